#pragma once

#include "shrinktarget/certified.hpp"
#include "shrinktarget/exact.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace shrinktarget {

struct OrbitConfig {
    CertifiedVector theta;
    Rational delta;                // target radius n^(-1/delta)
    std::uint64_t n_max = 0;
    std::uint64_t samples = 1;
    std::uint64_t seed = 0;
    unsigned precision_bits = 128;  // grid and fixed-point width; iteration supports at most 128
    unsigned threads = 1;
};

// Rejects configurations whose accumulated error horizon (2^-p + radius) * 1000 reaches horizon^(-1/delta).
void validate(const OrbitConfig& config, const Integer& horizon);
void validate(const OrbitConfig& config);

// Sample point id on the 2^-p grid: mt19937_64 seeded with splitmix64(splitmix64(seed) + id), one draw per 64 bits, most significant first.
RationalVector sample_point(const OrbitConfig& config, std::uint64_t id);

struct LogLawStat {
    Rational lo;  // lower enclosure of max_n -log||x + n theta|| / log n
    Rational hi;  // upper enclosure
    std::uint64_t argmax = 0;  // n attaining the upper enclosure
    bool valid = false;        // false when some distance interval contains 0 or no n >= 2 was seen
};

struct HitRecord {
    std::uint64_t sample_id = 0;
    RationalVector x0;
    std::vector<std::uint64_t> hits;  // conclusive hits, increasing
    std::uint64_t hit_count = 0;
    std::uint64_t inconclusive = 0;
    LogLawStat stat;
};

// Conclusive hits n in [n_lo, n_max] with ||x0 + n theta|| <= n^(-1/delta), by fixed-point iteration.
HitRecord orbit_hits(const OrbitConfig& config, const RationalVector& x0, std::uint64_t n_lo = 1);

// Same decisions in exact rational arithmetic (slow oracle).
HitRecord orbit_hits_exact(const OrbitConfig& config, const RationalVector& x0, std::uint64_t n_lo = 1);

// Log-law statistic over max(2, n_lo) <= n <= n_max; precision error when a distance interval contains 0.
LogLawStat log_law_stat(const OrbitConfig& config, const RationalVector& x0, std::uint64_t n_lo = 2);

struct WindowEstimate {
    Integer l_begin, l_end;  // [L, L')
    std::uint64_t samples = 0;
    std::uint64_t hits = 0;
    std::uint64_t inconclusive = 0;
    double fraction = 0;
    double confidence_radius = 0;  // half-width of the 95% Wilson interval, widest side
    std::string method;            // "iteration" or "lattice"
};

// Fraction of sample points x with ||x + l theta|| <= l^(-1/delta) for some l in [L, L').
WindowEstimate bc_window_estimate(const OrbitConfig& config, const Integer& l_begin, const Integer& l_end);

struct CensusSummary {
    std::uint64_t n_lo = 0, n_hi = 0;
    std::vector<std::uint64_t> counts;
    std::vector<std::uint64_t> inconclusive;
    std::vector<LogLawStat> stats;  // filled when requested
    double mean = 0, median = 0, q1 = 0, q3 = 0;
};

// Per-sample conclusive hit counts over [n_lo, n_max]; deterministic for a given seed and any thread count.
CensusSummary hit_census(const OrbitConfig& config, std::uint64_t n_lo, bool with_stats = false);

}  // namespace shrinktarget
