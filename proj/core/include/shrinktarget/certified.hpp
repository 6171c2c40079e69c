#pragma once

#include "shrinktarget/exact.hpp"

#include <span>
#include <string>
#include <vector>

namespace shrinktarget {

enum class Verdict { less, equal, greater, inconclusive };

const char* to_string(Verdict v) noexcept;

// Exact centre with an exact non-negative error radius: the true value lies in [value - radius, value + radius].
class CertifiedScalar {
public:
    CertifiedScalar() = default;
    explicit CertifiedScalar(Rational value, Rational radius = 0);

    static CertifiedScalar from_bounds(const Rational& lo, const Rational& hi);

    const Rational& value() const noexcept { return value_; }
    const Rational& radius() const noexcept { return radius_; }
    Rational lo() const { return value_ - radius_; }
    Rational hi() const { return value_ + radius_; }
    bool is_exact() const { return radius_ == 0; }

    CertifiedScalar& operator+=(const CertifiedScalar& other);
    friend CertifiedScalar operator+(CertifiedScalar a, const CertifiedScalar& b) { return a += b; }
    friend CertifiedScalar operator*(const Rational& k, const CertifiedScalar& a);

    friend bool operator==(const CertifiedScalar& a, const CertifiedScalar& b)
    {
        return a.value_ == b.value_ && a.radius_ == b.radius_;
    }

private:
    Rational value_ = 0;
    Rational radius_ = 0;
};

Verdict compare(const CertifiedScalar& a, const CertifiedScalar& b);
Verdict compare(const CertifiedScalar& a, const Rational& b);

// Product of two enclosures of non-negative quantities.
CertifiedScalar multiply_nonnegative(const CertifiedScalar& a, const CertifiedScalar& b);

std::string to_string(const CertifiedScalar& x);

// A point of R^d known up to a sup-norm radius.
struct CertifiedVector {
    RationalVector coords;
    Rational radius = 0;

    CertifiedVector() = default;
    CertifiedVector(RationalVector c, Rational r = 0);

    std::size_t dim() const noexcept { return coords.size(); }
    bool is_exact() const { return radius == 0; }
};

// ||q theta||
CertifiedScalar certified_dist_nearest_lattice(const Integer& q, const CertifiedVector& theta);

// ||<s, theta>||
CertifiedScalar certified_linear_form_distance(std::span<const Integer> s, const CertifiedVector& theta);

// Enclosure of x^(1/k) with relative width at most 2^-rel_bits; x >= 0.
CertifiedScalar root_enclosure(const Rational& x, unsigned long k, unsigned rel_bits = 64);

// Enclosure of x^e for rational e; x > 0, or x == 0 with e > 0.
CertifiedScalar pow_enclosure(const Rational& x, const Rational& e, unsigned rel_bits = 64);

// Enclosure of x^e over every point of the enclosure of x (monotone in x).
CertifiedScalar pow_enclosure(const CertifiedScalar& x, const Rational& e, unsigned rel_bits = 64);

}  // namespace shrinktarget
