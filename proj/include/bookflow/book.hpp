#pragma once

// Full-depth single-symbol limit order book driven by decoded ITCH
// events. Tracks per-order origination times (for time-in-book), emits
// executed trades, and flags orders that ever rested at a best level
// (for the cancellation statistic).

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "bookflow/itch.hpp"
#include "bookflow/types.hpp"

namespace bookflow {

struct Order {
    std::uint64_t ref = 0;
    std::uint32_t shares = 0;
    Nanos origination_ns = 0;
    bool touched_best = false;
};

enum class MatchKind : std::uint8_t { BuyAggressor, SellAggressor, Unknown };

struct Trade {
    Nanos time_ns = 0;
    Price4 price;
    std::uint32_t shares = 0;
    MatchKind match_kind = MatchKind::Unknown;
};

// One price level; orders kept in arrival order.
struct Level {
    std::uint64_t volume = 0;
    std::vector<Order> orders;
};

struct BestLevel {
    Price4 price;
    std::uint64_t volume = 0;
    std::size_t order_count = 0;
};

struct SessionStats {
    std::uint64_t events = 0;
    std::uint64_t adds = 0;
    std::uint64_t executions = 0;
    std::uint64_t cancels = 0;
    std::uint64_t deletes = 0;
    std::uint64_t replaces = 0;
    std::uint64_t hidden_trades = 0;
    std::uint64_t trades = 0;
    std::uint64_t trade_volume = 0;
    std::uint64_t unknown_refs = 0;
    std::uint64_t crossed_after_event = 0;
    std::uint64_t book_updates = 0;
    // Orders that rested at a best level at some time and have terminated,
    // split by how they terminated.
    std::uint64_t best_touched_terminated = 0;
    std::uint64_t best_touched_cancelled = 0;
};

// Fraction of best-touching orders whose life ended in a cancel, delete
// or replace rather than full execution. Empty before any such order
// has terminated.
std::optional<double> cancellation_ratio(const SessionStats& stats);

// Fatal book corruption (decoder desync or a broken capture).
struct BookError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class OrderBook {
public:
    explicit OrderBook(std::string symbol) : symbol_(std::move(symbol)) {}

    // Applies one event. Returns trades emitted by this event (view is
    // valid until the next apply) and whether the book changed.
    struct ApplyResult {
        std::span<const Trade> trades;
        bool changed = false;
    };
    ApplyResult apply(const itch::MarketEvent& ev);

    const std::string& symbol() const { return symbol_; }
    std::optional<Price4> last_trade_price() const { return last_trade_price_; }
    Nanos last_time() const { return last_time_; }
    const SessionStats& stats() const { return stats_; }
    SessionStats& stats() { return stats_; }

    std::optional<BestLevel> best(Side side) const;
    const Level* best_level(Side side) const;

    // Walks levels best-first; fn(price, level) returns false to stop.
    void scan_levels(Side side, const std::function<bool(Price4, const Level&)>& fn) const;

    std::size_t order_count() const { return index_.size(); }
    std::size_t level_count(Side side) const {
        return side == Side::Buy ? buys_.size() : sells_.size();
    }

    // Flat snapshot sorted by (price best-first, ref); for tests and the
    // naive-reference comparison.
    struct FlatOrder {
        std::uint64_t ref;
        Side side;
        std::uint32_t price_raw;
        std::uint32_t shares;
        Nanos origination_ns;
        auto operator<=>(const FlatOrder&) const = default;
    };
    std::vector<FlatOrder> flatten() const;

    // Internal-consistency walk (index vs levels vs volumes); throws on
    // violation. Test hook.
    void audit() const;

private:
    struct Locator {
        Side side;
        std::uint32_t price_raw;
    };

    using BuyLevels = std::map<std::uint32_t, Level, std::greater<std::uint32_t>>;
    using SellLevels = std::map<std::uint32_t, Level>;

    Level* find_level(const Locator& loc);
    Order* find_order(Level& lvl, std::uint64_t ref, std::size_t* pos);
    void insert_order(Side side, Price4 price, std::uint64_t ref, std::uint32_t shares,
                      Nanos origination);
    // Removes `shares` from the located order; erases it at zero.
    // `exec` selects the termination classification.
    void reduce_order(const Locator& loc, std::uint64_t ref, std::uint32_t shares, bool exec,
                      bool remove_all);
    void mark_best_touched(Side side);
    void note_trade(Nanos t, Price4 px, std::uint32_t shares, MatchKind mk);
    void check_crossed();
    std::optional<std::uint32_t> best_price_raw(Side side) const;

    std::string symbol_;
    BuyLevels buys_;
    SellLevels sells_;
    std::unordered_map<std::uint64_t, Locator> index_;
    std::optional<Price4> last_trade_price_;
    Nanos last_time_ = 0;
    SessionStats stats_;
    std::vector<Trade> trade_buf_;
};

// Everything the per-update callback gets to see: the event time, the
// trades emitted since the previous callback, and read access to the
// book sides as they stand immediately after the event.
struct BookUpdate {
    Nanos time_ns;
    std::span<const Trade> recent_trades;
    const OrderBook& book;
};

// Replays an event source into the book, invoking `sink` after every
// event that changed the book or emitted a trade. `source` is any
// callable returning std::optional<itch::MarketEvent>.
template <class Source, class Sink>
SessionStats run_session(Source&& source, OrderBook& book, Sink&& sink) {
    std::vector<Trade> pending;
    while (auto ev = source()) {
        auto res = book.apply(*ev);
        if (!res.trades.empty())
            pending.insert(pending.end(), res.trades.begin(), res.trades.end());
        if (res.changed || !res.trades.empty()) {
            book.stats().book_updates++;
            sink(BookUpdate{ev->timestamp_ns, std::span<const Trade>(pending), book});
            pending.clear();
        }
    }
    return book.stats();
}

template <class Sink>
SessionStats run_session(std::span<const itch::MarketEvent> events, OrderBook& book,
                         Sink&& sink) {
    std::size_t i = 0;
    return run_session(
        [&]() -> std::optional<itch::MarketEvent> {
            if (i == events.size()) return std::nullopt;
            return events[i++];
        },
        book, std::forward<Sink>(sink));
}

} // namespace bookflow
