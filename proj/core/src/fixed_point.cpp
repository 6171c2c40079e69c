#include "shrinktarget/fixed_point.hpp"

#include "shrinktarget/errors.hpp"

#include <cmath>

namespace shrinktarget {

Integer to_integer(u128 v)
{
    Integer hi = static_cast<unsigned long>(static_cast<std::uint64_t>(v >> 64));
    Integer lo = static_cast<unsigned long>(static_cast<std::uint64_t>(v));
    return (hi << 64) + lo;
}

u128 to_u128(const Integer& v)
{
    require(v >= 0 && bit_length(v) <= 128, ErrorKind::internal, "value does not fit 128 bits");
    Integer hi = v >> 64;
    Integer lo = v - (hi << 64);
    auto limb = [](const Integer& x) {
        Integer h = x >> 32;
        Integer l = x - (h << 32);
        return (static_cast<std::uint64_t>(h.get_ui()) << 32) | static_cast<std::uint64_t>(l.get_ui());
    };
    return (static_cast<u128>(limb(hi)) << 64) | static_cast<u128>(limb(lo));
}

u128 to_fixed128(const Rational& x, bool* exact)
{
    Rational frac = x - Rational(floor_of(x));
    Rational scaled = frac;
    mpq_mul_2exp(scaled.get_mpq_t(), scaled.get_mpq_t(), 128);
    Integer rounded = floor_of(scaled + Rational(1, 2));
    if (exact)
        *exact = Rational(rounded) == scaled;
    Integer one = Integer(1) << 128;
    if (rounded >= one)
        rounded -= one;
    return to_u128(rounded);
}

u128 ceil_units128(const Rational& r)
{
    require(r >= 0, ErrorKind::domain, "negative radius");
    Rational scaled = r;
    mpq_mul_2exp(scaled.get_mpq_t(), scaled.get_mpq_t(), 128);
    Integer c = ceil_of(scaled);
    if (bit_length(c) > 127)
        return k_u128_max;
    return to_u128(c);
}

Rational fixed_to_rational(u128 v)
{
    Rational r(to_integer(v));
    mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), 128);
    return r;
}

long double to_long_double(u128 v)
{
    auto hi = static_cast<std::uint64_t>(v >> 64);
    auto lo = static_cast<std::uint64_t>(v);
    return std::ldexp(static_cast<long double>(hi), -64) + std::ldexp(static_cast<long double>(lo), -128);
}

}  // namespace shrinktarget
