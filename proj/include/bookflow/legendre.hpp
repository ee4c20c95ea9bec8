#pragma once

// Shifted Legendre basis, orthonormal on [0,1] under Lebesgue measure:
//   p_j(x) = sqrt(2j+1) * sum_k (-1)^(j-k) C(j,k) C(j+k,k) x^k.
// The binomial products are exact integers (< 2^21 for j <= 11), so the
// monomial tables below are exact up to one sqrt rounding, which is what
// lets Gram/moment matrices be assembled from monomial power sums.

#include <cmath>
#include <cstdint>
#include <vector>

namespace bookflow {

class LegendreBasis {
public:
    static constexpr int kMaxN = 12;

    explicit LegendreBasis(int n) : n_(n) {
        coeff_.assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int j = 0; j < n; ++j) {
            const double scale = std::sqrt(2.0 * j + 1.0);
            double binom_jk = 1.0;      // C(j,k)
            double binom_jkk = 1.0;     // C(j+k,k)
            for (int k = 0; k <= j; ++k) {
                const double mag = binom_jk * binom_jkk;
                coeff_[static_cast<std::size_t>(j) * n_ + k] =
                    scale * (((j - k) % 2 == 0) ? mag : -mag);
                binom_jk = binom_jk * (j - k) / (k + 1);
                binom_jkk = binom_jkk * (j + k + 1) / (k + 1);
            }
        }
        // Product tables: prod_[pair(j,k)][m] = monomial coefficients of
        // p_j * p_k, for the upper triangle j <= k.
        prod_.assign(static_cast<std::size_t>(n) * (n + 1) / 2 * (2 * n - 1), 0.0);
        for (int j = 0; j < n; ++j)
            for (int k = j; k < n; ++k) {
                double* dst = prod_row(j, k);
                for (int a = 0; a <= j; ++a)
                    for (int b = 0; b <= k; ++b)
                        dst[a + b] += coeff(j, a) * coeff(k, b);
            }
    }

    int size() const { return n_; }

    double coeff(int j, int k) const { return coeff_[static_cast<std::size_t>(j) * n_ + k]; }

    // Monomial coefficients of p_j * p_k (length 2n-1, zero-padded).
    const double* product_coeffs(int j, int k) const {
        return j <= k ? prod_row(j, k) : prod_row(k, j);
    }

    double eval(int j, double x) const {
        double acc = 0.0;
        for (int k = j; k >= 0; --k) acc = acc * x + coeff(j, k);
        return acc;
    }

    // p_j(1) = sqrt(2j+1); p_j(0) = (-1)^j sqrt(2j+1).
    double at_one(int j) const { return std::sqrt(2.0 * j + 1.0); }
    double at_zero(int j) const {
        const double s = std::sqrt(2.0 * j + 1.0);
        return (j % 2 == 0) ? s : -s;
    }

private:
    const double* prod_row(int j, int k) const {
        const std::size_t pair = static_cast<std::size_t>(j) * n_ - j * (j + 1) / 2 + k;
        return prod_.data() + pair * (2 * n_ - 1);
    }
    double* prod_row(int j, int k) {
        const std::size_t pair = static_cast<std::size_t>(j) * n_ - j * (j + 1) / 2 + k;
        return prod_.data() + pair * (2 * n_ - 1);
    }

    int n_;
    std::vector<double> coeff_;
    std::vector<double> prod_;
};

} // namespace bookflow
