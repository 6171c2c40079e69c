#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace shrinktarget {

using Integer = mpz_class;
using Rational = mpq_class;

// Canonical rational num/den; throws a domain error when den == 0.
Rational make_rational(const Integer& num, const Integer& den);

// Accepts integers, fractions "a/b" and decimals with optional exponent ("-0.125", "1e-40").
Rational parse_rational(std::string_view text);
Integer parse_integer(std::string_view text);

std::string to_string(const Integer& x);
std::string to_string(const Rational& x);

// Rounded decimal with `digits` digits after the point (round half away from zero).
std::string to_decimal(const Rational& x, int digits);

Integer floor_of(const Rational& x);
Integer ceil_of(const Rational& x);

Rational abs_of(const Rational& x);
Integer abs_of(const Integer& x);

Rational pow_of(const Rational& x, unsigned long e);
Integer pow_of(const Integer& x, unsigned long e);

// Distance to the nearest integer with a witness; ties resolve to the smaller integer.
struct NearestInteger {
    Rational distance;
    Integer witness;
};

NearestInteger nearest_integer(const Rational& x);
Rational dist_nearest_int(const Rational& x);

// Sup-norm distance to Z^d.
Rational dist_nearest_lattice(std::span<const Rational> x);

using RationalVector = std::vector<Rational>;
using IntegerVector = std::vector<Integer>;

Integer sup_norm(std::span<const Integer> v);
Rational sup_norm(std::span<const Rational> v);

// sum_i s_i * x_i
Rational pairing(std::span<const Integer> s, std::span<const Rational> x);

// Number of bits of |x| (0 for x == 0).
std::size_t bit_length(const Integer& x);

// Saturating conversion for budget arithmetic.
std::uint64_t to_u64_saturating(const Integer& x);

}  // namespace shrinktarget
