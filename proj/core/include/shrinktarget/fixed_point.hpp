#pragma once

#include "shrinktarget/exact.hpp"

#include <cstdint>

namespace shrinktarget {

// Points of the circle R/Z stored as 128-bit fractions; wrap-around addition is addition mod 1.
using u128 = unsigned __int128;

inline constexpr u128 k_half_turn = static_cast<u128>(1) << 127;
inline constexpr u128 k_u128_max = ~static_cast<u128>(0);

// round(frac(x) * 2^128) mod 2^128; `exact` reports whether no rounding happened.
u128 to_fixed128(const Rational& x, bool* exact = nullptr);

// Keeps the top `bits` bits of a fraction (grid of spacing 2^-bits).
inline u128 truncate_to_bits(u128 v, unsigned bits)
{
    if (bits >= 128)
        return v;
    return v & ~((static_cast<u128>(1) << (128 - bits)) - 1);
}

// Distance to the nearest integer in units of 2^-128 (at most 2^127).
inline u128 circle_distance(u128 v)
{
    return v > k_half_turn ? static_cast<u128>(-v) : v;
}

inline u128 saturating_add(u128 a, u128 b)
{
    u128 s = a + b;
    return s < a ? k_u128_max : s;
}

inline u128 saturating_mul(u128 a, u128 b)
{
    if (a == 0 || b == 0)
        return 0;
    if (a > k_u128_max / b)
        return k_u128_max;
    return a * b;
}

// ceil(r * 2^128), saturating; r >= 0.
u128 ceil_units128(const Rational& r);

Integer to_integer(u128 v);
u128 to_u128(const Integer& v);
Rational fixed_to_rational(u128 v);

long double to_long_double(u128 v);  // v * 2^-128

}  // namespace shrinktarget
