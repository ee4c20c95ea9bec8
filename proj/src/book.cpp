#include "bookflow/book.hpp"

#include <algorithm>

namespace bookflow {

using itch::EventKind;
using itch::MarketEvent;

std::optional<double> cancellation_ratio(const SessionStats& stats) {
    if (stats.best_touched_terminated == 0) return std::nullopt;
    return static_cast<double>(stats.best_touched_cancelled) /
           static_cast<double>(stats.best_touched_terminated);
}

std::optional<std::uint32_t> OrderBook::best_price_raw(Side side) const {
    if (side == Side::Buy) {
        if (buys_.empty()) return std::nullopt;
        return buys_.begin()->first;
    }
    if (sells_.empty()) return std::nullopt;
    return sells_.begin()->first;
}

const Level* OrderBook::best_level(Side side) const {
    if (side == Side::Buy) return buys_.empty() ? nullptr : &buys_.begin()->second;
    return sells_.empty() ? nullptr : &sells_.begin()->second;
}

std::optional<BestLevel> OrderBook::best(Side side) const {
    auto raw = best_price_raw(side);
    if (!raw) return std::nullopt;
    const Level* lvl = best_level(side);
    return BestLevel{Price4(*raw), lvl->volume, lvl->orders.size()};
}

void OrderBook::scan_levels(Side side,
                            const std::function<bool(Price4, const Level&)>& fn) const {
    if (side == Side::Buy) {
        for (const auto& [raw, lvl] : buys_)
            if (!fn(Price4(raw), lvl)) return;
    } else {
        for (const auto& [raw, lvl] : sells_)
            if (!fn(Price4(raw), lvl)) return;
    }
}

Level* OrderBook::find_level(const Locator& loc) {
    if (loc.side == Side::Buy) {
        auto it = buys_.find(loc.price_raw);
        return it == buys_.end() ? nullptr : &it->second;
    }
    auto it = sells_.find(loc.price_raw);
    return it == sells_.end() ? nullptr : &it->second;
}

Order* OrderBook::find_order(Level& lvl, std::uint64_t ref, std::size_t* pos) {
    for (std::size_t i = 0; i < lvl.orders.size(); ++i) {
        if (lvl.orders[i].ref == ref) {
            if (pos) *pos = i;
            return &lvl.orders[i];
        }
    }
    return nullptr;
}

void OrderBook::mark_best_touched(Side side) {
    Level* lvl = nullptr;
    if (side == Side::Buy)
        lvl = buys_.empty() ? nullptr : &buys_.begin()->second;
    else
        lvl = sells_.empty() ? nullptr : &sells_.begin()->second;
    if (!lvl) return;
    for (auto& o : lvl->orders) o.touched_best = true;
}

void OrderBook::insert_order(Side side, Price4 price, std::uint64_t ref, std::uint32_t shares,
                             Nanos origination) {
    if (shares == 0) throw BookError("add with zero shares, ref " + std::to_string(ref));
    auto [it, fresh] = index_.try_emplace(ref, Locator{side, price.raw});
    if (!fresh) throw BookError("duplicate order reference " + std::to_string(ref));

    const auto prev_best = best_price_raw(side);
    Level& lvl = side == Side::Buy ? buys_[price.raw] : sells_[price.raw];
    lvl.orders.push_back(Order{ref, shares, origination, false});
    lvl.volume += shares;

    const auto now_best = best_price_raw(side);
    if (now_best == prev_best) {
        if (prev_best && *prev_best == price.raw) lvl.orders.back().touched_best = true;
    } else {
        mark_best_touched(side); // the new order opened a better level
    }
}

void OrderBook::reduce_order(const Locator& loc, std::uint64_t ref, std::uint32_t shares,
                             bool exec, bool remove_all) {
    Level* lvl = find_level(loc);
    std::size_t pos = 0;
    Order* ord = lvl ? find_order(*lvl, ref, &pos) : nullptr;
    if (!ord) throw BookError("index/level desync for ref " + std::to_string(ref));

    if (remove_all) shares = ord->shares;
    if (shares > ord->shares)
        throw BookError("overdecrement on ref " + std::to_string(ref) + ": " +
                        std::to_string(shares) + " > " + std::to_string(ord->shares));

    ord->shares -= shares;
    lvl->volume -= shares;
    if (ord->shares > 0) return;

    if (ord->touched_best) {
        stats_.best_touched_terminated++;
        if (!exec) stats_.best_touched_cancelled++;
    }
    const auto prev_best = best_price_raw(loc.side);
    lvl->orders.erase(lvl->orders.begin() + static_cast<std::ptrdiff_t>(pos));
    if (lvl->orders.empty()) {
        if (loc.side == Side::Buy)
            buys_.erase(loc.price_raw);
        else
            sells_.erase(loc.price_raw);
    }
    index_.erase(ref);
    if (best_price_raw(loc.side) != prev_best) mark_best_touched(loc.side);
}

void OrderBook::note_trade(Nanos t, Price4 px, std::uint32_t shares, MatchKind mk) {
    trade_buf_.push_back(Trade{t, px, shares, mk});
    last_trade_price_ = px;
    stats_.trades++;
    stats_.trade_volume += shares;
}

void OrderBook::check_crossed() {
    auto b = best_price_raw(Side::Buy);
    auto s = best_price_raw(Side::Sell);
    if (b && s && *b >= *s) stats_.crossed_after_event++;
}

OrderBook::ApplyResult OrderBook::apply(const MarketEvent& ev) {
    trade_buf_.clear();
    stats_.events++;
    last_time_ = ev.timestamp_ns;
    bool changed = false;

    switch (ev.kind) {
        case EventKind::AddOrder:
        case EventKind::AddOrderMpid:
            insert_order(ev.side, ev.price, ev.order_ref, ev.shares, ev.timestamp_ns);
            stats_.adds++;
            changed = true;
            break;

        case EventKind::OrderExecuted:
        case EventKind::OrderExecutedWithPrice: {
            auto it = index_.find(ev.order_ref);
            if (it == index_.end()) {
                stats_.unknown_refs++;
                break;
            }
            const Locator loc = it->second;
            const bool printable =
                ev.kind == EventKind::OrderExecuted || ev.printable;
            const MatchKind mk =
                loc.side == Side::Buy ? MatchKind::SellAggressor : MatchKind::BuyAggressor;
            const Price4 px =
                ev.kind == EventKind::OrderExecuted ? Price4(loc.price_raw) : ev.price;
            reduce_order(loc, ev.order_ref, ev.shares, /*exec=*/true, /*remove_all=*/false);
            if (printable) note_trade(ev.timestamp_ns, px, ev.shares, mk);
            stats_.executions++;
            changed = true;
            break;
        }

        case EventKind::OrderCancel: {
            auto it = index_.find(ev.order_ref);
            if (it == index_.end()) {
                stats_.unknown_refs++;
                break;
            }
            reduce_order(it->second, ev.order_ref, ev.shares, /*exec=*/false,
                         /*remove_all=*/false);
            stats_.cancels++;
            changed = true;
            break;
        }

        case EventKind::OrderDelete: {
            auto it = index_.find(ev.order_ref);
            if (it == index_.end()) {
                stats_.unknown_refs++;
                break;
            }
            reduce_order(it->second, ev.order_ref, 0, /*exec=*/false, /*remove_all=*/true);
            stats_.deletes++;
            changed = true;
            break;
        }

        case EventKind::OrderReplace: {
            auto it = index_.find(ev.order_ref);
            if (it == index_.end()) {
                stats_.unknown_refs++;
                break;
            }
            const Side side = it->second.side;
            reduce_order(it->second, ev.order_ref, 0, /*exec=*/false, /*remove_all=*/true);
            insert_order(side, ev.price, ev.new_ref, ev.shares, ev.timestamp_ns);
            stats_.replaces++;
            changed = true;
            break;
        }

        case EventKind::NonDisplayedTrade: {
            // Hidden execution: no resting state to touch, but it is a print.
            const MatchKind mk =
                ev.side == Side::Buy ? MatchKind::SellAggressor : MatchKind::BuyAggressor;
            note_trade(ev.timestamp_ns, ev.price, ev.shares, mk);
            stats_.hidden_trades++;
            break;
        }

        case EventKind::Seconds:
        case EventKind::SystemEvent:
        case EventKind::Other:
            break;
    }

    if (changed) check_crossed();
    return ApplyResult{std::span<const Trade>(trade_buf_), changed};
}

std::vector<OrderBook::FlatOrder> OrderBook::flatten() const {
    std::vector<FlatOrder> out;
    out.reserve(index_.size());
    for (const auto& [raw, lvl] : buys_)
        for (const auto& o : lvl.orders)
            out.push_back(FlatOrder{o.ref, Side::Buy, raw, o.shares, o.origination_ns});
    for (const auto& [raw, lvl] : sells_)
        for (const auto& o : lvl.orders)
            out.push_back(FlatOrder{o.ref, Side::Sell, raw, o.shares, o.origination_ns});
    std::sort(out.begin(), out.end());
    return out;
}

void OrderBook::audit() const {
    std::size_t seen = 0;
    auto walk = [&](Side side, const auto& levels) {
        for (const auto& [raw, lvl] : levels) {
            if (lvl.orders.empty()) throw BookError("empty level retained");
            std::uint64_t vol = 0;
            for (const auto& o : lvl.orders) {
                if (o.shares == 0) throw BookError("zero-share order resident");
                vol += o.shares;
                auto it = index_.find(o.ref);
                if (it == index_.end() || it->second.side != side ||
                    it->second.price_raw != raw)
                    throw BookError("index/level mismatch for ref " + std::to_string(o.ref));
                ++seen;
            }
            if (vol != lvl.volume) throw BookError("level volume drift");
        }
    };
    walk(Side::Buy, buys_);
    walk(Side::Sell, sells_);
    if (seen != index_.size()) throw BookError("index size mismatch");
}

} // namespace bookflow
