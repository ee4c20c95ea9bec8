#include "bookflow/exec_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>

#include "bookflow/smallmat.hpp"

namespace bookflow {

namespace {

constexpr int kMaxN = LegendreBasis::kMaxN;
constexpr double kPivotTol = 1e-7; // relative Cholesky pivot gate

// Readings run once per book event; fixing the basis size at compile
// time lets the small dense kernels unroll.
template <class F>
auto dispatch_basis(int n, F&& f) {
    switch (n) {
        case 2: return f(std::integral_constant<int, 2>{});
        case 3: return f(std::integral_constant<int, 3>{});
        case 4: return f(std::integral_constant<int, 4>{});
        case 5: return f(std::integral_constant<int, 5>{});
        case 6: return f(std::integral_constant<int, 6>{});
        case 7: return f(std::integral_constant<int, 7>{});
        case 8: return f(std::integral_constant<int, 8>{});
        case 9: return f(std::integral_constant<int, 9>{});
        case 10: return f(std::integral_constant<int, 10>{});
        case 11: return f(std::integral_constant<int, 11>{});
        default: return f(std::integral_constant<int, 12>{});
    }
}

template <int N>
double i_now_fixed(const double* m, const double* lo, const double* w, double c) {
    double q[N];
    for (int i = 0; i < N; ++i) q[i] = w[i];
    smallmat::solve_lower_t(N, lo, q); // q = G^{-1} k
    double num = 0;
    for (int i = 0; i < N; ++i) {
        double row = 0;
        for (int j = 0; j < N; ++j) row += m[i * N + j] * q[j];
        num += q[i] * row;
    }
    return num / c;
}

template <int N>
FlowReading reading_fixed(const double* m, const double* lo, const double* w, double c) {
    double b[N * N];
    smallmat::reduce_congruence(N, lo, m, b); // B = L^{-1} M L^{-T}

    double d[N], e[N > 1 ? N - 1 : 1];
    double wt[N]; // becomes w in the tridiagonal basis, Q^T w
    for (int i = 0; i < N; ++i) wt[i] = w[i];
    smallmat::householder_tridiag<N>(b, d, e, wt);

    double bw = 0; // w^T T w via the tridiagonal form
    for (int i = 0; i < N; ++i) {
        bw += d[i] * wt[i] * wt[i];
        if (i + 1 < N) bw += 2.0 * e[i] * wt[i] * wt[i + 1];
    }
    const double i_val = bw / c;

    double lmin, lmax;
    if (!smallmat::tridiag_extremes<N>(d, e, &lmin, &lmax)) {
        FlowReading bad;
        bad.i_now = std::numeric_limits<double>::quiet_NaN();
        return bad; // caller filters non-finite readings
    }

    // eigenvector at the maximal rate; the start vector has nonzero
    // overlap with any direction
    double z[N];
    for (int i = 0; i < N; ++i) z[i] = (i % 2 ? -1.0 : 1.0) * (1.0 + 0.37 * i);
    smallmat::tridiag_inverse_iteration<N>(d, e, lmax, z);
    double dot = 0;
    for (int i = 0; i < N; ++i) dot += z[i] * wt[i];

    FlowReading r;
    r.lambda_min = lmin;
    r.lambda_max = lmax;
    r.i_now = std::clamp(i_val, lmin, lmax);
    r.c_max_sq = std::clamp(dot * dot / c, 0.0, 1.0);
    return r;
}

} // namespace

FlowState::FlowState(const FlowConfig& cfg) : cfg_(cfg), basis_(cfg.n_basis) {
    cfg_.validate();
}

void FlowState::advance_to(Nanos t) {
    if (!started_) {
        started_ = true;
        t_start_ = t_now_ = t;
        return;
    }
    if (t <= t_now_) return;
    advance(seconds_from_ns(t - t_now_));
    t_now_ = t; // exact, avoids double->Nanos round-trip drift
}

void FlowState::advance(double dt_seconds) {
    if (!started_) {
        started_ = true;
        return;
    }
    if (dt_seconds <= 0) return;
    const double f = std::exp(-dt_seconds / cfg_.tau_s);
    double acc = f;
    const std::size_t nm = moment_count();
    for (std::size_t m = 1; m < nm; ++m) {
        u_[m] *= acc;
        acc *= f;
    }
    t_now_ += ns_from_seconds(dt_seconds);

    const Nanos cutoff = t_now_ - ns_from_seconds(cfg_.history_cap_w * cfg_.tau_s);
    while (!live_trades_.empty() && live_trades_.front().first < cutoff) {
        stale_volume_ += live_trades_.front().second;
        live_trades_.pop_front();
    }
}

void FlowState::add_trade(double shares) {
    if (shares <= 0) return;
    const std::size_t nm = moment_count();
    for (std::size_t m = 0; m < nm; ++m) u_[m] += shares;
    total_volume_ += shares;
    live_trades_.emplace_back(t_now_, shares);
}

void FlowState::assemble_volume(double* m) const {
    const int n = cfg_.n_basis;
    const std::size_t nm = moment_count();
    double uw[2 * kMaxN - 1];
    uw[0] = u_[0] - stale_volume_;
    for (std::size_t i = 1; i < nm; ++i) uw[i] = u_[i];

    for (int j = 0; j < n; ++j)
        for (int kk = j; kk < n; ++kk) {
            const double* c = basis_.product_coeffs(j, kk);
            double sm = 0;
            for (std::size_t i = 0; i < nm; ++i) sm += c[i] * uw[i];
            m[j * n + kk] = m[kk * n + j] = sm;
        }
}

bool FlowState::assemble(double* g, double* m, double* k) const {
    const int n = cfg_.n_basis;
    const std::size_t nm = moment_count();
    const double t_hist = seconds_from_ns(t_now_ - t_start_);
    if (!started_ || t_hist <= 0) return false;

    const double tau = cfg_.tau_s;
    const double x_min = std::exp(-std::min(t_hist / tau, cfg_.history_cap_w));

    double tm[2 * kMaxN - 1];
    tm[0] = std::min(t_hist, cfg_.history_cap_w * tau);
    double xp = x_min;
    for (std::size_t i = 1; i < nm; ++i) {
        tm[i] = tau * (1.0 - xp) / static_cast<double>(i);
        xp *= x_min;
    }

    for (int j = 0; j < n; ++j) {
        for (int kk = j; kk < n; ++kk) {
            const double* c = basis_.product_coeffs(j, kk);
            double sg = 0;
            for (std::size_t i = 0; i < nm; ++i) sg += c[i] * tm[i];
            g[j * n + kk] = g[kk * n + j] = sg;
        }
        k[j] = basis_.at_one(j);
    }
    assemble_volume(m);
    return true;
}

// Factorizes the time Gram into gram_lo_/gram_w_/gram_c_; false when the
// history is too short to resolve the basis.
bool FlowState::gram_factor(const double* g, const double* k) const {
    const int n = cfg_.n_basis;
    if (!smallmat::cholesky(n, g, gram_lo_.data(), kPivotTol)) return false;
    for (int i = 0; i < n; ++i) gram_w_[i] = k[i];
    smallmat::solve_lower(n, gram_lo_.data(), gram_w_.data());
    gram_c_ = 0;
    for (int i = 0; i < n; ++i) gram_c_ += gram_w_[i] * gram_w_[i];
    return true;
}

std::optional<double> FlowState::i_now() const {
    const int n = cfg_.n_basis;
    double m[kMaxN * kMaxN];
    if (gram_cached_ && history_capped()) {
        if (!started_) return std::nullopt;
        assemble_volume(m);
    } else {
        double g[kMaxN * kMaxN], k[kMaxN];
        if (!assemble(g, m, k)) return std::nullopt;
        if (!gram_factor(g, k)) return std::nullopt;
        gram_cached_ = history_capped();
    }
    const double i = dispatch_basis(n, [&](auto nc) {
        return i_now_fixed<nc.value>(m, gram_lo_.data(), gram_w_.data(), gram_c_);
    });
    if (!std::isfinite(i)) return std::nullopt;
    return i;
}

std::optional<FlowReading> FlowState::reading() const {
    const int n = cfg_.n_basis;
    double m[kMaxN * kMaxN];
    if (gram_cached_ && history_capped()) {
        if (!started_) return std::nullopt;
        assemble_volume(m);
    } else {
        double g[kMaxN * kMaxN], k[kMaxN];
        if (!assemble(g, m, k)) return std::nullopt;
        if (!gram_factor(g, k)) return std::nullopt;
        gram_cached_ = history_capped();
    }
    const FlowReading r = dispatch_basis(n, [&](auto nc) {
        return reading_fixed<nc.value>(m, gram_lo_.data(), gram_w_.data(), gram_c_);
    });
    if (!std::isfinite(r.i_now) || !std::isfinite(r.lambda_min) || !std::isfinite(r.lambda_max))
        return std::nullopt;
    return r;
}

double sliding_rate(std::span<const std::pair<Nanos, double>> trade_log, double window_s,
                    Nanos t_now) {
    const Nanos cutoff = t_now - ns_from_seconds(window_s);
    double sum = 0;
    for (const auto& [t, v] : trade_log)
        if (t > cutoff && t <= t_now) sum += v;
    return sum / window_s;
}

} // namespace bookflow
