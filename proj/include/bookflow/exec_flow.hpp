#pragma once

// Execution-rate estimation: shares traded per unit time, read "now".
//
// The trade measure is carried as power sums of exponentially mapped
// time x = exp((t - t_now)/tau), so moving "now" forward is a diagonal
// rescale (O(n) per event) and a reading costs one small dense solve.
// The time measure has closed-form moments on the retained window. A
// reading is the ratio of the two measures localized at x = 1 in a
// shifted Legendre basis; the extremal variant solves the generalized
// eigenproblem M psi = lambda G psi for the least/greatest locally
// resolvable rates and the weight of "now" on the maximal state.

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>

#include "bookflow/legendre.hpp"
#include "bookflow/types.hpp"

namespace bookflow {

struct FlowConfig {
    double tau_s = 128.0;       // localization time scale
    int n_basis = 7;            // shifted Legendre basis size
    double history_cap_w = 16.0; // history older than w*tau is dropped

    void validate() const {
        if (!(tau_s > 0)) throw std::invalid_argument("tau must be positive");
        if (n_basis < 2 || n_basis > LegendreBasis::kMaxN)
            throw std::invalid_argument("n_basis out of range [2,12]");
        if (!(history_cap_w >= 4)) throw std::invalid_argument("history cap W must be >= 4");
    }
};

struct FlowReading {
    double i_now = 0;      // shares/second at "now"
    double lambda_min = 0; // least resolvable rate
    double lambda_max = 0; // greatest resolvable rate
    double c_max_sq = 0;   // |<psi_max | now>|^2, in [0,1]
};

class FlowState {
public:
    explicit FlowState(const FlowConfig& cfg);

    // Moves "now" forward. The Nanos overload pins the clock to event
    // time; the seconds overload exists for synthetic feeds.
    void advance_to(Nanos t);
    void advance(double dt_seconds);

    // Adds a trade at the current "now" (advance first).
    void add_trade(double shares);

    bool started() const { return started_; }
    Nanos t_now() const { return t_now_; }
    Nanos t_start() const { return t_start_; }
    double total_volume() const { return total_volume_; }
    std::span<const double> power_sums() const { return {u_.data(), moment_count()}; }

    // Assembles the basis Gram of the time measure (G), the basis moment
    // matrix of the trade measure (M) and the evaluation vector at "now"
    // (k), row-major n x n. False when there is no history yet.
    bool assemble(double* g, double* m, double* k) const;

    // Radon-Nikodym reading at "now"; nullopt when the Gram is not yet
    // numerically resolvable (short history) -- callers fall back to a
    // sliding window.
    std::optional<double> i_now() const;

    // Extremal reading; same availability as i_now.
    std::optional<FlowReading> reading() const;

    const FlowConfig& config() const { return cfg_; }

private:
    std::size_t moment_count() const { return static_cast<std::size_t>(2 * cfg_.n_basis - 1); }
    bool history_capped() const {
        return t_now_ - t_start_ >= ns_from_seconds(cfg_.history_cap_w * cfg_.tau_s);
    }
    void assemble_volume(double* m) const;
    bool gram_factor(const double* g, const double* k) const;

    FlowConfig cfg_;
    LegendreBasis basis_;
    bool started_ = false;
    Nanos t_now_ = 0;
    Nanos t_start_ = 0;
    std::array<double, 2 * LegendreBasis::kMaxN - 1> u_{};
    double total_volume_ = 0;
    // Trades still inside the w*tau window; volume that aged out is
    // accumulated so the m=0 moment matches the truncated time measure.
    std::deque<std::pair<Nanos, double>> live_trades_;
    double stale_volume_ = 0;
    // Once the history cap is reached the time Gram stops changing; its
    // factorization is cached (readings are const, hence mutable).
    mutable bool gram_cached_ = false;
    mutable std::array<double, LegendreBasis::kMaxN * LegendreBasis::kMaxN> gram_lo_{};
    mutable std::array<double, LegendreBasis::kMaxN> gram_w_{}; // L^{-1} k
    mutable double gram_c_ = 0;                                 // k^T G^{-1} k
};

// Crude baseline: shares in (t_now - window, t_now] divided by window.
double sliding_rate(std::span<const std::pair<Nanos, double>> trade_log, double window_s,
                    Nanos t_now);

// Streaming form of the same baseline.
class SlidingRate {
public:
    explicit SlidingRate(double window_s) : window_s_(window_s) {
        if (!(window_s > 0)) throw std::invalid_argument("window must be positive");
    }

    void observe(Nanos t, double shares) {
        log_.emplace_back(t, shares);
        sum_ += shares;
        evict(t);
    }

    double rate_at(Nanos t) {
        evict(t);
        return sum_ / window_s_;
    }

private:
    void evict(Nanos t) {
        const Nanos cutoff = t - ns_from_seconds(window_s_);
        while (!log_.empty() && log_.front().first <= cutoff) {
            sum_ -= log_.front().second;
            log_.pop_front();
        }
        if (log_.empty()) sum_ = 0;
    }

    double window_s_;
    std::deque<std::pair<Nanos, double>> log_;
    double sum_ = 0;
};

} // namespace bookflow
