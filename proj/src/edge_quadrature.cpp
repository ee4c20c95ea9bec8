#include "bookflow/edge_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bookflow/legendre.hpp"
#include "bookflow/smallmat.hpp"

namespace bookflow {

namespace {

// Gragg-Harrod (RKPW) reduction: first n recurrence pairs (alpha, beta)
// of the monic orthogonal polynomials of the discrete measure
// sum_i w_i delta(y_i). beta[0] carries the total mass. Numerically
// stable where the classical moment-Hankel route is hopeless at tick
// granularity.
bool lanczos_rkpw(const std::vector<double>& y, const std::vector<double>& w, int n,
                  std::vector<double>& alpha, std::vector<double>& beta) {
    const std::size_t s = y.size();
    std::vector<double> p0(y);
    std::vector<double> p1(s, 0.0);
    p1[0] = w[0];

    for (std::size_t k = 0; k + 1 < s; ++k) {
        const double pn = y[k + 1];
        double gam = 1.0, sig = 0.0, t = 0.0;
        double xlam = w[k + 1];
        for (std::size_t j = 0; j <= k + 1; ++j) {
            const double rho = p1[j] + xlam;
            const double tmp = gam * rho;
            const double tsig = sig;
            if (rho <= 0.0) {
                gam = 1.0;
                sig = 0.0;
            } else {
                gam = p1[j] / rho;
                sig = xlam / rho;
            }
            const double tk = sig * (p0[j] - pn) - gam * t;
            p0[j] -= (tk - t);
            t = tk;
            xlam = (sig <= 0.0) ? tsig * p1[j] : (t * t) / sig;
            p1[j] = tmp;
        }
    }
    alpha.assign(p0.begin(), p0.begin() + n);
    beta.assign(p1.begin(), p1.begin() + n);
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(alpha[i]) || !std::isfinite(beta[i]) || (i > 0 && beta[i] <= 0.0))
            return false;
    return beta[0] > 0.0;
}

} // namespace

std::optional<PriceMeasure> build_measure(Side side, double cutoff_dollars,
                                          std::vector<double> y, std::vector<double> w,
                                          std::vector<double> a) {
    if (y.empty()) return std::nullopt;
    PriceMeasure m;
    m.side = side;
    m.cutoff = cutoff_dollars;
    m.y = std::move(y);
    m.w = std::move(w);
    m.a = std::move(a);
    return m;
}

std::optional<PriceMeasure> build_measure(const OrderBook& book, Side side, Nanos now,
                                          double cutoff_dollars) {
    auto best = book.best(side);
    if (!best) return std::nullopt;

    const std::int64_t best_raw = best->price.raw;
    const std::int64_t cutoff_ticks = std::llround(cutoff_dollars * 10000.0);

    PriceMeasure m;
    m.side = side;
    m.cutoff = cutoff_dollars;
    book.scan_levels(side, [&](Price4 price, const Level& lvl) {
        const std::int64_t off = side == Side::Buy
                                     ? best_raw - static_cast<std::int64_t>(price.raw)
                                     : static_cast<std::int64_t>(price.raw) - best_raw;
        if (off > cutoff_ticks) return false;
        double age_weighted = 0.0;
        for (const auto& o : lvl.orders) {
            const Nanos age = std::max<Nanos>(0, now - o.origination_ns);
            age_weighted += static_cast<double>(o.shares) * seconds_from_ns(age);
        }
        m.y.push_back(static_cast<double>(off) / 10000.0);
        m.w.push_back(static_cast<double>(lvl.volume));
        m.a.push_back(age_weighted / static_cast<double>(lvl.volume));
        return true;
    });
    return m;
}

std::optional<RadauRule> radau_rule(const PriceMeasure& measure, int n_nodes) {
    const int s = static_cast<int>(measure.size());
    if (s == 0 || n_nodes < 1) return std::nullopt;

    RadauRule rule;
    rule.n_requested = n_nodes;

    if (s <= n_nodes) {
        // A measure on s points is the unique s-point quadrature of itself.
        rule.nodes = measure.y;
        rule.weights = measure.w;
        rule.n_effective = s;
        return rule;
    }

    std::vector<double> alpha, beta;
    if (!lanczos_rkpw(measure.y, measure.w, n_nodes, alpha, beta)) return std::nullopt;

    // Pin a node at zero: replace the last alpha with
    //   alpha* = 0 - beta_{n-1} * pi_{n-2}(0) / pi_{n-1}(0)
    // where pi are the measure's monic orthogonal polynomials.
    double pm1 = 0.0, p = 1.0;
    for (int i = 0; i + 1 < n_nodes; ++i) {
        const double pn = (0.0 - alpha[i]) * p - (i > 0 ? beta[i] : 0.0) * pm1;
        pm1 = p;
        p = pn;
    }
    if (p == 0.0 || !std::isfinite(p)) return std::nullopt;
    alpha[n_nodes - 1] = -beta[n_nodes - 1] * pm1 / p;

    // Golub-Welsch on the modified Jacobi matrix.
    const int n = n_nodes;
    std::vector<double> jac(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) jac[i * n + i] = alpha[i];
    for (int i = 1; i < n; ++i) {
        const double b = std::sqrt(beta[i]);
        jac[i * n + (i - 1)] = jac[(i - 1) * n + i] = b;
    }
    std::vector<double> evals(n), vecs(static_cast<std::size_t>(n) * n);
    if (!smallmat::jacobi_eig(n, jac.data(), evals.data(), vecs.data())) return std::nullopt;

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return evals[i] < evals[j]; });

    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = evals[order[i]];
        const double v0 = vecs[0 * n + order[i]];
        rule.weights[i] = beta[0] * v0 * v0;
    }
    rule.n_effective = n;

    // The pinned node comes out of the eigensolve as a rounding-level
    // perturbation of zero; snap it. Anything larger means the
    // construction broke down.
    int i0 = 0;
    for (int i = 1; i < n; ++i)
        if (std::abs(rule.nodes[i]) < std::abs(rule.nodes[i0])) i0 = i;
    if (std::abs(rule.nodes[i0]) > 1e-12) return std::nullopt;
    rule.nodes[i0] = 0.0;

    for (int i = 0; i < n; ++i)
        if (!(rule.weights[i] > 0.0) || !std::isfinite(rule.nodes[i])) return std::nullopt;
    return rule;
}

double christoffel_volume(const RadauRule& rule) {
    std::size_t i0 = 0;
    for (std::size_t i = 1; i < rule.nodes.size(); ++i)
        if (std::abs(rule.nodes[i]) < std::abs(rule.nodes[i0])) i0 = i;
    return rule.weights[i0];
}

std::optional<double> rn_tau_at_edge(const PriceMeasure& measure, int n_basis_tau) {
    const int s = static_cast<int>(measure.size());
    if (s == 0) return std::nullopt;
    const int n = std::min(n_basis_tau, s);
    if (n < 1) return std::nullopt;

    // Basis scaled to the cutoff interval; a common factor cancels in
    // the ratio, so plain evaluations of the [0,1] polynomials suffice.
    LegendreBasis basis(n);
    const double inv_cut = 1.0 / measure.cutoff;

    std::vector<double> g(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<double> am(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<double> pj(n);
    for (int i = 0; i < s; ++i) {
        const double x = measure.y[i] * inv_cut;
        for (int j = 0; j < n; ++j) pj[j] = basis.eval(j, x);
        const double wi = measure.w[i];
        const double awi = measure.a[i] * wi;
        for (int j = 0; j < n; ++j)
            for (int k = j; k < n; ++k) {
                g[j * n + k] += wi * pj[j] * pj[k];
                am[j * n + k] += awi * pj[j] * pj[k];
            }
    }
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < j; ++k) {
            g[j * n + k] = g[k * n + j];
            am[j * n + k] = am[k * n + j];
        }

    std::vector<double> lo(static_cast<std::size_t>(n) * n, 0.0);
    if (!smallmat::cholesky(n, g.data(), lo.data(), 1e-11)) return std::nullopt;

    std::vector<double> q(n);
    for (int j = 0; j < n; ++j) q[j] = basis.at_zero(j);
    smallmat::solve_lower(n, lo.data(), q.data());
    double denom = 0.0;
    for (int j = 0; j < n; ++j) denom += q[j] * q[j];
    smallmat::solve_lower_t(n, lo.data(), q.data());

    double num = 0.0;
    for (int j = 0; j < n; ++j) {
        double row = 0.0;
        for (int k = 0; k < n; ++k) row += am[j * n + k] * q[k];
        num += q[j] * row;
    }
    const double tau = num / denom;

    // Rayleigh bound: trim rounding noise at the age extremes.
    const auto [lo_a, hi_a] = std::minmax_element(measure.a.begin(), measure.a.end());
    return std::clamp(tau, *lo_a, *hi_a);
}

} // namespace bookflow
