#pragma once

// Per-update scalar book attributes. Raw values only: nothing here is
// divided by a deviation or any other scale estimate, and "absent" is
// kept distinct from zero (an empty side is not a zero imbalance).

#include <cstdint>
#include <optional>
#include <span>

#include "bookflow/book.hpp"
#include "bookflow/types.hpp"

namespace bookflow {

// (P_sell + P_buy) / 2 in dollars; absent on a one-sided book.
inline std::optional<double> midprice(std::optional<Price4> p_buy,
                                      std::optional<Price4> p_sell) {
    if (!p_buy || !p_sell) return std::nullopt;
    return (static_cast<double>(p_buy->raw) + static_cast<double>(p_sell->raw)) / 2.0 /
           10000.0;
}

// (V_best_sell - V_best_buy) / (V_best_sell + V_best_buy); absent when
// there is no volume on either side.
inline std::optional<double> disbalance(std::uint64_t v_best_buy, std::uint64_t v_best_sell) {
    const double sum = static_cast<double>(v_best_buy) + static_cast<double>(v_best_sell);
    if (sum <= 0) return std::nullopt;
    return (static_cast<double>(v_best_sell) - static_cast<double>(v_best_buy)) / sum;
}

// Size-weighted mean age of a level's orders, in seconds.
inline std::optional<double> time_in_book(std::span<const Order> orders, Nanos now_ns) {
    if (orders.empty()) return std::nullopt;
    double weighted = 0, total = 0;
    for (const auto& o : orders) {
        const Nanos age = now_ns >= o.origination_ns ? now_ns - o.origination_ns : 0;
        weighted += static_cast<double>(o.shares) * seconds_from_ns(age);
        total += static_cast<double>(o.shares);
    }
    return weighted / total;
}

// Signed dollar distances of the best levels from the last execution
// price; absent before the first trade.
struct EdgePrices {
    std::optional<double> buy_minus_last;
    std::optional<double> sell_minus_last;
};

inline EdgePrices edge_prices(std::optional<Price4> p_buy, std::optional<Price4> p_sell,
                              std::optional<Price4> p_last) {
    EdgePrices e;
    if (!p_last) return e;
    if (p_buy) e.buy_minus_last = dollars_between(*p_buy, *p_last);
    if (p_sell) e.sell_minus_last = dollars_between(*p_sell, *p_last);
    return e;
}

// One CSV row worth of attributes.
struct AttributeSample {
    Nanos time_ns = 0;
    double time_decimal_hours = 0;
    std::optional<Price4> p_last, p_buy, p_sell;
    std::optional<double> p_buy_minus_last, p_sell_minus_last;
    std::uint64_t v_best_buy = 0, v_best_sell = 0;
    std::optional<double> eta_disbalance;
    std::optional<double> t_in_book_buy_s, t_in_book_sell_s;
};

// Reads the book-side attributes off the current book state.
inline AttributeSample sample_book(const OrderBook& book, Nanos now_ns) {
    AttributeSample s;
    s.time_ns = now_ns;
    s.time_decimal_hours = hours_from_ns(now_ns);
    s.p_last = book.last_trade_price();

    const auto bb = book.best(Side::Buy);
    const auto bs = book.best(Side::Sell);
    if (bb) s.p_buy = bb->price;
    if (bs) s.p_sell = bs->price;
    s.v_best_buy = bb ? bb->volume : 0;
    s.v_best_sell = bs ? bs->volume : 0;
    s.eta_disbalance = disbalance(s.v_best_buy, s.v_best_sell);

    const auto edges = edge_prices(s.p_buy, s.p_sell, s.p_last);
    s.p_buy_minus_last = edges.buy_minus_last;
    s.p_sell_minus_last = edges.sell_minus_last;

    if (const Level* lvl = book.best_level(Side::Buy))
        s.t_in_book_buy_s = time_in_book(lvl->orders, now_ns);
    if (const Level* lvl = book.best_level(Side::Sell))
        s.t_in_book_sell_s = time_in_book(lvl->orders, now_ns);
    return s;
}

} // namespace bookflow
