#include "support/reference_book.hpp"

#include <algorithm>
#include <stdexcept>

namespace bookflow::testing {

using itch::EventKind;
using itch::MarketEvent;

ReferenceBook::RefOrder* ReferenceBook::find(std::uint64_t ref) {
    for (auto& o : orders_)
        if (o.ref == ref) return &o;
    return nullptr;
}

void ReferenceBook::erase(std::uint64_t ref, bool exec) {
    for (std::size_t i = 0; i < orders_.size(); ++i) {
        if (orders_[i].ref == ref) {
            if (orders_[i].touched_best) {
                ++touched_terminated_;
                if (!exec) ++touched_cancelled_;
            }
            orders_.erase(orders_.begin() + static_cast<std::ptrdiff_t>(i));
            return;
        }
    }
    throw std::logic_error("reference erase of absent ref");
}

void ReferenceBook::mark_best() {
    std::optional<std::uint32_t> best_buy, best_sell;
    for (const auto& o : orders_) {
        if (o.side == Side::Buy) {
            if (!best_buy || o.price_raw > *best_buy) best_buy = o.price_raw;
        } else {
            if (!best_sell || o.price_raw < *best_sell) best_sell = o.price_raw;
        }
    }
    for (auto& o : orders_) {
        if (o.side == Side::Buy && best_buy && o.price_raw == *best_buy) o.touched_best = true;
        if (o.side == Side::Sell && best_sell && o.price_raw == *best_sell)
            o.touched_best = true;
    }
}

std::optional<BestLevel> ReferenceBook::best(Side side) const {
    std::optional<BestLevel> out;
    for (const auto& o : orders_) {
        if (o.side != side) continue;
        const bool better = !out || (side == Side::Buy ? o.price_raw > out->price.raw
                                                       : o.price_raw < out->price.raw);
        if (better) out = BestLevel{Price4(o.price_raw), o.shares, 1};
        else if (o.price_raw == out->price.raw) {
            out->volume += o.shares;
            out->order_count += 1;
        }
    }
    return out;
}

void ReferenceBook::apply(const MarketEvent& ev) {
    bool changed = false;
    switch (ev.kind) {
        case EventKind::AddOrder:
        case EventKind::AddOrderMpid:
            if (ev.shares == 0) throw std::logic_error("reference: zero-share add");
            if (find(ev.order_ref)) throw std::logic_error("reference: duplicate ref");
            orders_.push_back(
                RefOrder{ev.order_ref, ev.side, ev.price.raw, ev.shares, ev.timestamp_ns});
            changed = true;
            break;

        case EventKind::OrderExecuted:
        case EventKind::OrderExecutedWithPrice: {
            RefOrder* o = find(ev.order_ref);
            if (!o) {
                ++unknown_refs_;
                break;
            }
            if (ev.shares > o->shares) throw std::logic_error("reference: overdecrement");
            const bool printable = ev.kind == EventKind::OrderExecuted || ev.printable;
            const Price4 px =
                ev.kind == EventKind::OrderExecuted ? Price4(o->price_raw) : ev.price;
            const MatchKind mk =
                o->side == Side::Buy ? MatchKind::SellAggressor : MatchKind::BuyAggressor;
            o->shares -= ev.shares;
            if (o->shares == 0) erase(ev.order_ref, /*exec=*/true);
            if (printable) {
                trades_.push_back(Trade{ev.timestamp_ns, px, ev.shares, mk});
                p_last_ = px;
            }
            changed = true;
            break;
        }

        case EventKind::OrderCancel: {
            RefOrder* o = find(ev.order_ref);
            if (!o) {
                ++unknown_refs_;
                break;
            }
            if (ev.shares > o->shares) throw std::logic_error("reference: overdecrement");
            o->shares -= ev.shares;
            if (o->shares == 0) erase(ev.order_ref, /*exec=*/false);
            changed = true;
            break;
        }

        case EventKind::OrderDelete: {
            RefOrder* o = find(ev.order_ref);
            if (!o) {
                ++unknown_refs_;
                break;
            }
            erase(ev.order_ref, /*exec=*/false);
            changed = true;
            break;
        }

        case EventKind::OrderReplace: {
            RefOrder* o = find(ev.order_ref);
            if (!o) {
                ++unknown_refs_;
                break;
            }
            const Side side = o->side;
            erase(ev.order_ref, /*exec=*/false);
            orders_.push_back(
                RefOrder{ev.new_ref, side, ev.price.raw, ev.shares, ev.timestamp_ns});
            changed = true;
            break;
        }

        case EventKind::NonDisplayedTrade: {
            const MatchKind mk =
                ev.side == Side::Buy ? MatchKind::SellAggressor : MatchKind::BuyAggressor;
            trades_.push_back(Trade{ev.timestamp_ns, ev.price, ev.shares, mk});
            p_last_ = ev.price;
            break;
        }

        case EventKind::Seconds:
        case EventKind::SystemEvent:
        case EventKind::Other:
            break;
    }
    if (changed) mark_best();
}

std::vector<OrderBook::FlatOrder> ReferenceBook::flatten() const {
    std::vector<OrderBook::FlatOrder> out;
    out.reserve(orders_.size());
    for (const auto& o : orders_)
        out.push_back(
            OrderBook::FlatOrder{o.ref, o.side, o.price_raw, o.shares, o.origination_ns});
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace bookflow::testing
