#pragma once

// Smoothed book-edge estimates from the price-volume distribution near
// the best level. Levels within a dollar cutoff of the best price form
// a discrete measure in the offset variable y = |price - best|; a
// Gauss-Radau rule with one node pinned at y = 0 interpolates the
// best-level volume (the pinned node's weight equals the Christoffel
// function value of the modified measure there), and a Radon-Nikodym
// ratio of the age measure against the volume measure interpolates the
// best-level time-in-book.

#include <cstdint>
#include <optional>
#include <vector>

#include "bookflow/book.hpp"
#include "bookflow/types.hpp"

namespace bookflow {

struct PriceMeasure {
    Side side = Side::Buy;
    double cutoff = 1.0;        // dollars
    std::vector<double> y;      // offsets from best, ascending, y[0] == 0
    std::vector<double> w;      // shares per level, > 0
    std::vector<double> a;      // size-weighted mean age per level, seconds

    std::size_t size() const { return y.size(); }
};

struct RadauRule {
    std::vector<double> nodes;   // dollars offsets, ascending, includes 0
    std::vector<double> weights; // shares, positive, sum preserved
    int n_requested = 10;
    int n_effective = 0;
};

// Aggregates one book side into a PriceMeasure. nullopt when the side
// is empty.
std::optional<PriceMeasure> build_measure(const OrderBook& book, Side side, Nanos now,
                                          double cutoff_dollars = 1.0);

// From parallel arrays; the measure-building used by the book overload
// and directly by tests.
std::optional<PriceMeasure> build_measure(Side side, double cutoff_dollars,
                                          std::vector<double> y, std::vector<double> w,
                                          std::vector<double> a);

// Gauss-Radau rule for the measure with the fixed node at y = 0. A
// measure on s <= n_nodes points is returned as-is (it is its own
// quadrature). nullopt signals non-finite moments or a failed
// construction; callers fall back to the raw best-level volume.
std::optional<RadauRule> radau_rule(const PriceMeasure& measure, int n_nodes = 10);

// The quadrature weight attached to the pinned node at y = 0.
double christoffel_volume(const RadauRule& rule);

// Radon-Nikodym interpolation of time-in-book at the edge: the age
// measure (a_i * w_i) against the volume measure (w_i), evaluated at
// y = 0 in a shifted Legendre basis on [0, cutoff]. The basis size is
// reduced to the support size when the measure is smaller. nullopt when
// the volume Gram is numerically singular; callers fall back to the raw
// best-level time-in-book.
std::optional<double> rn_tau_at_edge(const PriceMeasure& measure, int n_basis_tau = 4);

} // namespace bookflow
