#include "bookflow/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bookflow::synth {

using itch::EventKind;
using itch::MarketEvent;

std::uint32_t SizeDist::sample(Rng& rng) const {
    if (kind == Kind::Fixed) return static_cast<std::uint32_t>(value);
    // geometric on {1,2,...} with the requested mean
    const double p = 1.0 / std::max(1.0, value);
    const double u = rng.uniform();
    const double k = std::ceil(std::log1p(-u) / std::log1p(-p));
    return static_cast<std::uint32_t>(std::clamp(k, 1.0, 1e6));
}

double SpikeProcess::rate_at(double t) const {
    double r = lambda0;
    for (const auto& s : spikes)
        if (s.onset_s <= t) r += s.amplitude * std::exp(-(t - s.onset_s) / s.relax_s);
    return r;
}

double SpikeProcess::rate_bound() const {
    double b = lambda0;
    for (const auto& s : spikes) b += s.amplitude;
    return b;
}

SpikeProcess SpikeProcess::random(std::uint64_t seed, double horizon_s, int n_spikes,
                                  double lambda0, double amp_lo, double amp_hi,
                                  double relax_lo, double relax_hi) {
    Rng rng(seed);
    SpikeProcess proc;
    proc.lambda0 = lambda0;
    if (n_spikes <= 0) return proc;
    // Spread onsets over equal slots so spikes stay individually visible.
    const double slot = horizon_s / n_spikes;
    for (int i = 0; i < n_spikes; ++i) {
        Spike s;
        s.onset_s = slot * i + rng.uniform(0.15, 0.5) * slot;
        s.amplitude = lambda0 * rng.log_uniform(amp_lo, amp_hi);
        s.relax_s = rng.log_uniform(relax_lo, relax_hi);
        proc.spikes.push_back(s);
    }
    return proc;
}

std::vector<SynthTrade> gen_trades(const SpikeProcess& proc, double horizon_s,
                                   std::uint64_t seed) {
    if (!(horizon_s > 0)) throw std::invalid_argument("horizon must be positive");
    Rng rng(seed);
    std::vector<SynthTrade> out;
    const double bound = proc.rate_bound();
    if (bound <= 0) return out;
    double t = 0;
    for (;;) {
        t += rng.exponential(bound);
        if (t >= horizon_s) break;
        if (rng.uniform() * bound <= proc.rate_at(t))
            out.push_back(SynthTrade{t, proc.size_dist.sample(rng)});
    }
    return out;
}

namespace {

struct GenOrder {
    std::uint64_t ref;
    Side side;
    std::uint32_t price_raw;
    std::uint32_t shares;
};

// The generator's own flat book model. Kept independent of the real
// book engine so stream validity is guaranteed by construction, not by
// the code under test.
class StreamBuilder {
public:
    StreamBuilder(const BookSimParams& p, double horizon_s, std::uint64_t seed)
        : p_(p), rng_(seed ^ 0x9e3779b97f4a7c15ULL), next_ref_(p.ref_base),
          end_ns_(to_ns(horizon_s)) {}

    std::vector<MarketEvent> run(const std::vector<SynthTrade>& trades) {
        emit_heartbeat_upto(to_ns(0));
        for (int i = 0; i < p_.initial_depth; ++i) {
            add_order(to_ns(0), Side::Buy);
            add_order(to_ns(0), Side::Sell);
        }
        double next_passive = p_.passive_rate > 0 ? rng_.exponential(p_.passive_rate) : -1;
        std::size_t ti = 0;
        for (;;) {
            const double trade_t = ti < trades.size() ? trades[ti].time_s : -1;
            const bool passive_next =
                next_passive >= 0 && (trade_t < 0 || next_passive < trade_t);
            if (passive_next && to_ns(next_passive) < end_ns_) {
                passive_event(to_ns(next_passive));
                next_passive += rng_.exponential(p_.passive_rate);
            } else if (trade_t >= 0) {
                execute(to_ns(trade_t), trades[ti].shares);
                ++ti;
            } else {
                break;
            }
        }
        emit_heartbeat_upto(end_ns_);
        return std::move(events_);
    }

private:
    Nanos to_ns(double rel_s) const {
        return static_cast<Nanos>((p_.session_start_s + rel_s) * 1e9);
    }

    void emit_heartbeat_upto(Nanos t) {
        if (!p_.heartbeats) return;
        std::int64_t sec = t / 1'000'000'000;
        if (last_heartbeat_sec_ < 0) {
            push_seconds(sec);
            return;
        }
        while (last_heartbeat_sec_ < sec) push_seconds(last_heartbeat_sec_ + 1);
    }

    void push_seconds(std::int64_t sec) {
        MarketEvent ev;
        ev.kind = EventKind::Seconds;
        ev.timestamp_ns = sec * 1'000'000'000;
        events_.push_back(ev);
        last_heartbeat_sec_ = sec;
    }

    void stamp(MarketEvent& ev, Nanos t) {
        emit_heartbeat_upto(t);
        ev.timestamp_ns = t;
    }

    std::uint32_t mid_raw() const {
        auto best = [&](Side s) -> std::int64_t {
            std::int64_t b = -1;
            for (const auto& o : live_)
                if (o.side == s) {
                    if (b < 0)
                        b = o.price_raw;
                    else if (s == Side::Buy)
                        b = std::max<std::int64_t>(b, o.price_raw);
                    else
                        b = std::min<std::int64_t>(b, o.price_raw);
                }
            return b;
        };
        const std::int64_t bb = best(Side::Buy), bs = best(Side::Sell);
        if (bb >= 0 && bs >= 0) return static_cast<std::uint32_t>((bb + bs) / 2);
        if (bb >= 0) return static_cast<std::uint32_t>(bb);
        if (bs >= 0) return static_cast<std::uint32_t>(bs);
        return p_.base_price_raw;
    }

    std::uint32_t price_for(Side side) {
        const std::uint32_t mid = mid_raw();
        const std::uint32_t off =
            1 + static_cast<std::uint32_t>(rng_.exponential(0.12)); // ~1..40 ticks
        if (side == Side::Buy) return mid > off ? mid - off : 1;
        return mid + off;
    }

    std::size_t add_order(Nanos t, Side side) {
        MarketEvent ev;
        ev.kind = rng_.chance(0.06) ? EventKind::AddOrderMpid : EventKind::AddOrder;
        stamp(ev, t);
        ev.order_ref = next_ref_++;
        ev.side = side;
        ev.shares = p_.order_size.sample(rng_);
        ev.stock = pad_stock(p_.symbol);
        ev.price = Price4(price_for(side));
        events_.push_back(ev);
        live_.push_back(GenOrder{ev.order_ref, side, ev.price.raw, ev.shares});
        return live_.size() - 1;
    }

    void remove_live(std::size_t idx) {
        live_[idx] = live_.back();
        live_.pop_back();
    }

    void passive_event(Nanos t) {
        std::size_t per_side[2] = {0, 0};
        for (const auto& o : live_) per_side[o.side == Side::Buy ? 0 : 1]++;
        const Side side = rng_.chance(0.5) ? Side::Buy : Side::Sell;
        const std::size_t depth = per_side[side == Side::Buy ? 0 : 1];

        const double p_add = depth < static_cast<std::size_t>(p_.target_depth) ? 0.75 : 0.30;
        if (live_.empty() || rng_.chance(p_add)) {
            add_order(t, side);
            return;
        }
        const std::size_t idx = rng_.integer(live_.size());
        GenOrder& o = live_[idx];
        const double roll = rng_.uniform();
        MarketEvent ev;
        if (roll < 0.35) { // partial or full cancel
            stamp(ev, t);
            ev.kind = EventKind::OrderCancel;
            ev.order_ref = o.ref;
            ev.shares = 1 + static_cast<std::uint32_t>(rng_.integer(o.shares));
            o.shares -= ev.shares;
            events_.push_back(ev);
            if (o.shares == 0) remove_live(idx);
        } else if (roll < 0.6) {
            stamp(ev, t);
            ev.kind = EventKind::OrderDelete;
            ev.order_ref = o.ref;
            events_.push_back(ev);
            remove_live(idx);
        } else if (roll < 0.9) {
            stamp(ev, t);
            ev.kind = EventKind::OrderReplace;
            ev.order_ref = o.ref;
            ev.new_ref = next_ref_++;
            ev.shares = p_.order_size.sample(rng_);
            ev.price = Price4(price_for(o.side));
            events_.push_back(ev);
            o.ref = ev.new_ref;
            o.price_raw = ev.price.raw;
            o.shares = ev.shares;
        } else { // non-printable execution-with-price: book-only decrement
            stamp(ev, t);
            ev.kind = EventKind::OrderExecutedWithPrice;
            ev.order_ref = o.ref;
            ev.shares = 1 + static_cast<std::uint32_t>(rng_.integer(o.shares));
            ev.match_number = ++match_seq_;
            ev.printable = false;
            ev.price = Price4(o.price_raw);
            o.shares -= ev.shares;
            events_.push_back(ev);
            if (o.shares == 0) remove_live(idx);
        }
    }

    // Best resting order on a side within the generator's model.
    std::ptrdiff_t best_index(Side side) const {
        std::ptrdiff_t best = -1;
        for (std::size_t i = 0; i < live_.size(); ++i) {
            if (live_[i].side != side) continue;
            if (best < 0)
                best = static_cast<std::ptrdiff_t>(i);
            else if (side == Side::Buy
                         ? live_[i].price_raw > live_[best].price_raw
                         : live_[i].price_raw < live_[best].price_raw)
                best = static_cast<std::ptrdiff_t>(i);
        }
        return best;
    }

    void execute(Nanos t, std::uint32_t volume) {
        if (rng_.chance(p_.hidden_fraction)) {
            MarketEvent ev;
            stamp(ev, t);
            ev.kind = EventKind::NonDisplayedTrade;
            ev.order_ref = 0;
            ev.side = rng_.chance(0.5) ? Side::Buy : Side::Sell;
            ev.shares = volume;
            ev.stock = pad_stock(p_.symbol);
            ev.price = Price4(mid_raw());
            ev.match_number = ++match_seq_;
            events_.push_back(ev);
            return;
        }
        const Side side = rng_.chance(0.5) ? Side::Buy : Side::Sell;
        std::uint32_t remaining = volume;
        while (remaining > 0) {
            std::ptrdiff_t idx = best_index(side);
            if (idx < 0) idx = static_cast<std::ptrdiff_t>(add_order(t, side));
            GenOrder& o = live_[static_cast<std::size_t>(idx)];
            const std::uint32_t fill = std::min(remaining, o.shares);
            MarketEvent ev;
            stamp(ev, t);
            ev.order_ref = o.ref;
            ev.shares = fill;
            ev.match_number = ++match_seq_;
            if (rng_.chance(p_.exec_with_price_fraction)) {
                ev.kind = EventKind::OrderExecutedWithPrice;
                ev.printable = true;
                ev.price = Price4(o.price_raw);
            } else {
                ev.kind = EventKind::OrderExecuted;
            }
            events_.push_back(ev);
            o.shares -= fill;
            remaining -= fill;
            if (o.shares == 0) remove_live(static_cast<std::size_t>(idx));
        }
    }

    const BookSimParams& p_;
    Rng rng_;
    std::vector<MarketEvent> events_;
    std::vector<GenOrder> live_;
    std::uint64_t next_ref_;
    std::uint64_t match_seq_ = 0;
    std::int64_t last_heartbeat_sec_ = -1;
    Nanos end_ns_;
};

} // namespace

std::vector<MarketEvent> gen_itch(const SpikeProcess& proc, const BookSimParams& params,
                                  double horizon_s, std::uint64_t seed) {
    const auto trades = gen_trades(proc, horizon_s, seed);
    StreamBuilder builder(params, horizon_s, seed);
    return builder.run(trades);
}

} // namespace bookflow::synth
