#pragma once

#include "shrinktarget/certified.hpp"
#include "shrinktarget/exact.hpp"

#include <cstdint>
#include <vector>

namespace shrinktarget {

struct ScanOptions {
    // Maximum number of candidate evaluations a single scan may perform.
    std::uint64_t budget = 100'000'000;
};

// A best approximation: q for simultaneous records, delta for linear records.
struct ApproxRecord {
    Integer q = 0;
    IntegerVector delta;
    CertifiedScalar value;
    std::size_t index = 0;

    bool is_linear() const { return !delta.empty(); }
    // q, or the sup norm of delta.
    Integer size() const;
};

// Every q in [1, q_max] with ||q theta|| strictly below ||q' theta|| for all 0 < q' < q.
// Stops at an exact zero. Precision error when a record decision is inconclusive.
std::vector<ApproxRecord> best_simultaneous(const CertifiedVector& theta, std::uint64_t q_max,
                                            const ScanOptions& options = {});

// Nonzero integer vectors (first nonzero coordinate positive) with |delta| <= h_max whose
// ||<delta, theta>|| is strictly below every shorter vector; one witness per norm.
std::vector<ApproxRecord> best_linear(const CertifiedVector& theta, std::uint64_t h_max,
                                      const ScanOptions& options = {});

// min over 1 <= q <= h of ||q theta||, with a witness.
ApproxRecord eps_s(const CertifiedVector& theta, const Rational& h, const ScanOptions& options = {});

// min over 0 < |delta| <= h of ||<delta, theta>||, with a witness.
ApproxRecord eps_l(const CertifiedVector& theta, const Rational& h, const ScanOptions& options = {});

// Value of the step function h -> min over records of size <= h (records from a single scan).
const ApproxRecord& record_at(const std::vector<ApproxRecord>& records, const Integer& h);

struct ContinuedFraction {
    IntegerVector partial_quotients;  // a_0, a_1, ...
    std::vector<Rational> convergents;
    IntegerVector denominators;
    bool terminated = false;  // expansion reached x exactly
};

ContinuedFraction continued_fraction(const Rational& x, std::size_t max_terms);

// Rational with the given partial quotients [a_0; a_1, ..., a_k].
Rational evaluate_continued_fraction(const IntegerVector& partial_quotients);

// Convergent of [0; 2, 2, 2, ...] with `terms` twos and its certified radius 1/(q_k q_{k+1}).
CertifiedVector sqrt2_minus_1(std::size_t terms);

}  // namespace shrinktarget
