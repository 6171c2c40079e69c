#pragma once

#include "shrinktarget/exact.hpp"
#include "shrinktarget/fixed_point.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace shrinktarget {

// Return-time search: all integers l in [l_lo, l_hi] with ||x + l c|| <= radius on T^d.
// The lattice {(l, l c - p)} is LLL-reduced once in a box-adapted scaling; each query is a
// closest-vector enumeration in a ball that contains the box, so results are complete.
class ReturnSearch {
public:
    ReturnSearch(const RationalVector& center, const Integer& l_lo, const Integer& l_hi, const Rational& radius,
                 unsigned min_bits = 128);

    std::size_t dim() const noexcept { return dim_; }
    unsigned bits() const noexcept { return bits_; }

    // Superset of the solutions, sorted; every entry lies in [l_lo, l_hi].
    std::vector<Integer> candidates(std::span<const Rational> x) const;
    // Same for offsets on the 2^-128 grid.
    std::vector<Integer> candidates_grid128(std::span<const u128> x) const;

    // Exact solutions.
    std::vector<Integer> solve(std::span<const Rational> x) const;

    std::uint64_t node_limit = 50'000'000;

private:
    std::vector<Integer> enumerate(const IntegerVector& offset_scaled) const;

    std::size_t dim_;
    std::size_t m_;
    unsigned bits_;
    RationalVector center_;
    Integer l_lo_, l_hi_;
    Rational radius_;
    IntegerVector theta_scaled_;           // round(c_i 2^bits) mod 2^bits
    std::vector<IntegerVector> u_;         // u_[row][col]: coefficient tuples of reduced vectors (columns)
    std::vector<IntegerVector> u_inv_;
    std::vector<std::vector<double>> mu_;  // Gram-Schmidt data of the reduced basis in box coordinates
    std::vector<double> norms_;
};

}  // namespace shrinktarget
