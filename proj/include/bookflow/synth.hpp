#pragma once

// Synthetic order flow: an inhomogeneous Poisson trade process with
// exponential excitation spikes (sudden rate jumps that relax slowly),
// and a generator that wraps such a trade stream into an internally
// consistent ITCH event sequence for fuzzing the book engine and
// exercising the full pipeline.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bookflow/itch.hpp"
#include "bookflow/types.hpp"

namespace bookflow::synth {

// Deterministic RNG: mt19937_64 bit stream (standardized) with local
// variate transforms, so identical seeds give identical streams on any
// platform or standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { // [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double exponential(double rate) { return -std::log(1.0 - uniform()) / rate; }
    double log_uniform(double lo, double hi) {
        return lo * std::exp(uniform() * std::log(hi / lo));
    }
    std::uint64_t integer(std::uint64_t n) { return eng_() % n; } // small n only
    bool chance(double p) { return uniform() < p; }

private:
    std::mt19937_64 eng_;
};

struct Spike {
    double onset_s = 0;      // seconds from stream start
    double amplitude = 0;    // extra trades/second at onset
    double relax_s = 1;      // exponential relaxation time
};

struct SizeDist {
    enum class Kind { Fixed, Geometric } kind = Kind::Fixed;
    double value = 100; // fixed shares, or the geometric mean

    std::uint32_t sample(Rng& rng) const;
};

struct SpikeProcess {
    double lambda0 = 1.0; // base trade rate, trades/second
    std::vector<Spike> spikes;
    SizeDist size_dist;

    double rate_at(double t) const;
    double rate_bound() const;

    // A random process with well-separated spikes; relaxation times are
    // log-uniform in [relax_lo, relax_hi] seconds, amplitudes log-uniform
    // in [amp_lo, amp_hi] multiples of lambda0.
    static SpikeProcess random(std::uint64_t seed, double horizon_s, int n_spikes,
                               double lambda0, double amp_lo = 20.0, double amp_hi = 200.0,
                               double relax_lo = 1.0, double relax_hi = 1000.0);
};

struct SynthTrade {
    double time_s = 0;
    std::uint32_t shares = 0;
};

// Thinning sampler for the inhomogeneous Poisson process.
std::vector<SynthTrade> gen_trades(const SpikeProcess& proc, double horizon_s,
                                   std::uint64_t seed);

struct BookSimParams {
    std::string symbol = "SYNTH";
    std::uint32_t base_price_raw = 500000; // $50.00
    double session_start_s = 34200;        // 09:30:00
    int initial_depth = 40;                // resting orders per side at start
    int target_depth = 40;
    double passive_rate = 8.0;             // adds/cancels/replaces per second
    std::uint64_t ref_base = 1;
    SizeDist order_size{SizeDist::Kind::Geometric, 200};
    double hidden_fraction = 0.05;         // trades realized as 'P' prints
    double exec_with_price_fraction = 0.05;
    bool heartbeats = true;                // emit 'T' every second
};

// Wraps the trade stream of `proc` into a valid event sequence: every
// referenced order exists, nothing over-decrements, and the executed
// (printable) share total equals the trade stream's total exactly.
std::vector<itch::MarketEvent> gen_itch(const SpikeProcess& proc, const BookSimParams& params,
                                        double horizon_s, std::uint64_t seed);

} // namespace bookflow::synth
