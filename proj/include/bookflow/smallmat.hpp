#pragma once

// Dense symmetric kernels for matrices up to a few dozen rows: Cholesky
// with a relative pivot gate, triangular solves, and a cyclic Jacobi
// eigensolver. These run once per book event, so they are kept
// allocation-free and inline; callers own the (row-major) storage.

#include <cmath>
#include <cstddef>

namespace bookflow::smallmat {

// A = L L^T, lower triangle written to `lo` (row-major, upper untouched).
// Returns false when a pivot falls below rel_tol * max diagonal of A,
// i.e. the matrix is numerically semidefinite.
inline bool cholesky(int n, const double* a, double* lo, double rel_tol = 1e-7) {
    double max_diag = 0.0;
    for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, a[i * n + i]);
    if (!(max_diag > 0.0) || !std::isfinite(max_diag)) return false;
    const double floor = rel_tol * max_diag;

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[i * n + j];
            for (int k = 0; k < j; ++k) s -= lo[i * n + k] * lo[j * n + k];
            if (i == j) {
                if (!(s >= floor) || !std::isfinite(s)) return false;
                lo[i * n + i] = std::sqrt(s);
            } else {
                lo[i * n + j] = s / lo[j * n + j];
            }
        }
    }
    return true;
}

// Solves L y = b in place.
inline void solve_lower(int n, const double* lo, double* b) {
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= lo[i * n + k] * b[k];
        b[i] = s / lo[i * n + i];
    }
}

// Solves L^T y = b in place.
inline void solve_lower_t(int n, const double* lo, double* b) {
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int k = i + 1; k < n; ++k) s -= lo[k * n + i] * b[k];
        b[i] = s / lo[i * n + i];
    }
}

// Congruence B = L^{-1} A L^{-T} for symmetric A; B row-major, full.
inline void reduce_congruence(int n, const double* lo, const double* a, double* b) {
    // forward-substitute on each column of A, then on each column of the
    // transposed intermediate; symmetry of the result is restored exactly.
    double inv[40];
    for (int i = 0; i < n; ++i) inv[i] = 1.0 / lo[i * n + i];
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) b[i * n + j] = a[i * n + j];
        for (int i = 0; i < n; ++i) {
            double s = b[i * n + j];
            for (int k = 0; k < i; ++k) s -= lo[i * n + k] * b[k * n + j];
            b[i * n + j] = s * inv[i];
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double s = b[i * n + j];
            for (int k = 0; k < j; ++k) s -= lo[j * n + k] * b[i * n + k];
            b[i * n + j] = s * inv[j];
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            double v = 0.5 * (b[i * n + j] + b[j * n + i]);
            b[i * n + j] = b[j * n + i] = v;
        }
}

// Symmetric Householder tridiagonalization: A (row-major, destroyed)
// becomes T = Q^T A Q with diagonal `d` and subdiagonal `e` (length
// n-1). When `covec` is non-null it is transformed in place to
// Q^T covec, which is all the eigen-path needs (no Q accumulation).
template <int N>
inline void householder_tridiag(double* a, double* d, double* e, double* covec = nullptr) {
    double v[N], p[N];
    for (int k = 0; k < N - 2; ++k) {
        // reflector annihilating column k below the subdiagonal
        double sigma = 0.0;
        for (int i = k + 2; i < N; ++i) sigma += a[i * N + k] * a[i * N + k];
        const double x0 = a[(k + 1) * N + k];
        if (sigma == 0.0) {
            e[k] = x0;
            continue;
        }
        const double mu = std::sqrt(x0 * x0 + sigma);
        const double vk1 = x0 <= 0.0 ? x0 - mu : -sigma / (x0 + mu);
        const double vnorm2 = vk1 * vk1 + sigma;
        v[k + 1] = vk1;
        for (int i = k + 2; i < N; ++i) v[i] = a[i * N + k];
        const double beta = 2.0 / vnorm2;

        // A <- (I - beta v v^T) A (I - beta v v^T), restricted to k+1..N-1
        double vav = 0.0;
        for (int i = k + 1; i < N; ++i) {
            double s = 0.0;
            for (int j = k + 1; j < N; ++j) s += a[i * N + j] * v[j];
            p[i] = beta * s;
            vav += v[i] * p[i];
        }
        const double half = 0.5 * beta * vav;
        for (int i = k + 1; i < N; ++i) p[i] -= half * v[i];
        for (int i = k + 1; i < N; ++i)
            for (int j = k + 1; j < N; ++j)
                a[i * N + j] -= v[i] * p[j] + p[i] * v[j];

        // with v = x - mu*e1 (v1 kept cancellation-free above), Hx = mu*e1
        e[k] = mu;
        a[(k + 1) * N + k] = mu;

        if (covec) { // covec <- H_k covec (reflectors applied in order give Q^T)
            double s = 0.0;
            for (int j = k + 1; j < N; ++j) s += covec[j] * v[j];
            s *= beta;
            for (int j = k + 1; j < N; ++j) covec[j] -= s * v[j];
        }
    }
    if (N >= 2) e[N - 2] = a[(N - 1) * N + (N - 2)];
    for (int i = 0; i < N; ++i) d[i] = a[i * N + i];
}

// Eigenvalue-counting function of the tridiagonal at eight points in
// one pass: counts[j] = #eigenvalues < x[j], from sign changes of the
// leading-principal-minor recurrence. The lanes are independent, so the
// loop vectorizes; inputs must be pre-normalized to order one so the
// minors cannot over- or underflow at small N.
template <int N>
inline void tridiag_count8(const double* d, const double* e2, const double* x, int* counts) {
    double p[8], pm1[8];
    int cnt[8];
    for (int j = 0; j < 8; ++j) {
        pm1[j] = 1.0;
        double v = d[0] - x[j];
        if (v == 0.0) v = -1e-300;
        p[j] = v;
        cnt[j] = v < 0 ? 1 : 0;
    }
    for (int k = 1; k < N; ++k) {
        const double dk = d[k], ek = e2[k - 1];
        for (int j = 0; j < 8; ++j) {
            double pn = (dk - x[j]) * p[j] - ek * pm1[j];
            if (pn == 0.0) pn = (p[j] >= 0.0) ? -1e-300 : 1e-300;
            cnt[j] += (pn < 0) != (p[j] < 0) ? 1 : 0;
            pm1[j] = p[j];
            p[j] = pn;
        }
    }
    for (int j = 0; j < 8; ++j) counts[j] = cnt[j];
}

// Extreme eigenvalues of the tridiagonal by multisection on the Sturm
// count: both brackets shrink 4x per pass, all probe evaluations ride
// one fused 8-lane recurrence. Inputs preserved.
template <int N>
inline bool tridiag_extremes(const double* d, const double* e, double* lambda_min,
                             double* lambda_max) {
    double scale = 0.0;
    for (int i = 0; i < N; ++i) scale = std::max(scale, std::abs(d[i]));
    for (int i = 0; i + 1 < N; ++i) scale = std::max(scale, std::abs(e[i]));
    if (scale == 0.0 || !std::isfinite(scale)) {
        *lambda_min = *lambda_max = 0.0;
        return scale == 0.0;
    }
    const double inv = 1.0 / scale;
    double dn[N], e2[N > 1 ? N - 1 : 1];
    for (int i = 0; i < N; ++i) dn[i] = d[i] * inv;
    for (int i = 0; i + 1 < N; ++i) {
        const double en = e[i] * inv;
        e2[i] = en * en;
    }

    double lo = dn[0], hi = dn[0];
    for (int i = 0; i < N; ++i) {
        const double r = (i > 0 ? std::sqrt(e2[i - 1]) : 0.0) +
                         (i + 1 < N ? std::sqrt(e2[i]) : 0.0);
        lo = std::min(lo, dn[i] - r);
        hi = std::max(hi, dn[i] + r);
    }
    if (lo == hi) {
        *lambda_min = *lambda_max = lo * scale;
        return true;
    }
    // margin keeps the bracket invariants count(lo)=0, count(hi)=N even
    // when an eigenvalue sits exactly on a Gershgorin bound
    const double margin = 1e-13 * (std::abs(lo) + std::abs(hi) + 1.0);
    double alo = lo - margin, ahi = hi + margin; // bracket for lambda_min
    double blo = lo - margin, bhi = hi + margin; // bracket for lambda_max

    double x[8];
    int counts[8];
    for (int iter = 0; iter < 20; ++iter) {
        const double wa = ahi - alo, wb = bhi - blo;
        x[0] = alo + 0.25 * wa;
        x[1] = alo + 0.50 * wa;
        x[2] = alo + 0.75 * wa;
        x[3] = blo + 0.25 * wb;
        x[4] = blo + 0.50 * wb;
        x[5] = blo + 0.75 * wb;
        x[6] = x[0];
        x[7] = x[3];
        tridiag_count8<N>(dn, e2, x, counts);

        // lambda_min: first quartile point with count >= 1 closes the bracket
        if (counts[0] >= 1)
            ahi = x[0];
        else if (counts[1] >= 1) {
            alo = x[0];
            ahi = x[1];
        } else if (counts[2] >= 1) {
            alo = x[1];
            ahi = x[2];
        } else
            alo = x[2];

        // lambda_max: last quartile point with count < N closes the bracket
        if (counts[5] < N)
            blo = x[5];
        else if (counts[4] < N) {
            blo = x[4];
            bhi = x[5];
        } else if (counts[3] < N) {
            blo = x[3];
            bhi = x[4];
        } else
            bhi = x[3];
    }
    *lambda_min = 0.5 * (alo + ahi) * scale;
    *lambda_max = 0.5 * (blo + bhi) * scale;
    return true;
}

// One inverse-iteration pass for the eigenvector of the tridiagonal at
// shift sigma (Thomas solve with clamped pivots); z holds the start
// vector in, the normalized eigenvector estimate out.
template <int N>
inline void tridiag_inverse_iteration(const double* d, const double* e, double sigma,
                                      double* z) {
    const double tiny = 1e-300;
    double scale = 0.0;
    for (int i = 0; i < N; ++i) scale = std::max(scale, std::abs(d[i]));
    for (int i = 0; i + 1 < N; ++i) scale = std::max(scale, std::abs(e[i]));
    const double eps_piv = std::max(scale, 1.0) * 1e-14;

    for (int pass = 0; pass < 2; ++pass) {
        double diag[N], rhs[N], upper[N];
        for (int i = 0; i < N; ++i) {
            diag[i] = d[i] - sigma;
            rhs[i] = z[i];
        }
        for (int i = 0; i < N - 1; ++i) {
            double piv = diag[i];
            if (std::abs(piv) < eps_piv) piv = piv < 0 ? -eps_piv : eps_piv;
            const double m = e[i] / piv;
            diag[i] = piv;
            upper[i] = e[i];
            diag[i + 1] -= m * e[i];
            rhs[i + 1] -= m * rhs[i];
        }
        if (std::abs(diag[N - 1]) < eps_piv)
            diag[N - 1] = diag[N - 1] < 0 ? -eps_piv : eps_piv;
        z[N - 1] = rhs[N - 1] / diag[N - 1];
        for (int i = N - 2; i >= 0; --i) z[i] = (rhs[i] - upper[i] * z[i + 1]) / diag[i];

        double norm = tiny;
        for (int i = 0; i < N; ++i) norm += z[i] * z[i];
        norm = 1.0 / std::sqrt(norm);
        for (int i = 0; i < N; ++i) z[i] *= norm;
    }
}

// Cyclic Jacobi on symmetric A (destroyed; eigenvalues land on the
// diagonal, returned in `w` ascending-unsorted). When `v` is non-null it
// receives the eigenvectors as columns. Converges quadratically; the
// sweep cap is generous for n <= 40.
inline bool jacobi_eig(int n, double* a, double* w, double* v = nullptr) {
    if (v)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) v[i * n + j] = (i == j) ? 1.0 : 0.0;

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a[i * n + j] * a[i * n + j];
        if (off <= 1e-60 || !std::isfinite(off)) break;

        double diag = 0.0;
        for (int i = 0; i < n; ++i) diag += a[i * n + i] * a[i * n + i];
        if (off <= 1e-30 * (diag + off)) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (apq == 0.0) continue;
                const double app = a[p * n + p];
                const double aqq = a[q * n + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0)
                                     ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                                     : 1.0 / (theta - std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (int k = 0; k < n; ++k) {
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a[p * n + k];
                    const double aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                if (v) {
                    for (int k = 0; k < n; ++k) {
                        const double vkp = v[k * n + p];
                        const double vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        w[i] = a[i * n + i];
        if (!std::isfinite(w[i])) return false;
    }
    return true;
}

} // namespace bookflow::smallmat
