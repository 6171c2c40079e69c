#include "shrinktarget/certified.hpp"

#include "shrinktarget/errors.hpp"

namespace shrinktarget {

const char* to_string(Verdict v) noexcept
{
    switch (v) {
    case Verdict::less: return "less";
    case Verdict::equal: return "equal";
    case Verdict::greater: return "greater";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

CertifiedScalar::CertifiedScalar(Rational value, Rational radius) : value_(std::move(value)), radius_(std::move(radius))
{
    require(radius_ >= 0, ErrorKind::domain, "negative certification radius");
}

CertifiedScalar CertifiedScalar::from_bounds(const Rational& lo, const Rational& hi)
{
    require(lo <= hi, ErrorKind::domain, "enclosure with lo > hi");
    return CertifiedScalar((lo + hi) / 2, (hi - lo) / 2);
}

CertifiedScalar& CertifiedScalar::operator+=(const CertifiedScalar& other)
{
    value_ += other.value_;
    radius_ += other.radius_;
    return *this;
}

CertifiedScalar operator*(const Rational& k, const CertifiedScalar& a)
{
    return CertifiedScalar(k * a.value_, abs_of(k) * a.radius_);
}

Verdict compare(const CertifiedScalar& a, const CertifiedScalar& b)
{
    if (a.hi() < b.lo())
        return Verdict::less;
    if (a.lo() > b.hi())
        return Verdict::greater;
    if (a.is_exact() && b.is_exact() && a.value() == b.value())
        return Verdict::equal;
    return Verdict::inconclusive;
}

Verdict compare(const CertifiedScalar& a, const Rational& b)
{
    return compare(a, CertifiedScalar(b));
}

CertifiedScalar multiply_nonnegative(const CertifiedScalar& a, const CertifiedScalar& b)
{
    Rational alo = a.lo() < 0 ? Rational(0) : a.lo();
    Rational blo = b.lo() < 0 ? Rational(0) : b.lo();
    require(a.hi() >= 0 && b.hi() >= 0, ErrorKind::domain, "product of negative enclosures");
    return CertifiedScalar::from_bounds(alo * blo, a.hi() * b.hi());
}

std::string to_string(const CertifiedScalar& x)
{
    if (x.is_exact())
        return x.value().get_str();
    return x.value().get_str() + " +/- " + x.radius().get_str();
}

CertifiedVector::CertifiedVector(RationalVector c, Rational r) : coords(std::move(c)), radius(std::move(r))
{
    require(radius >= 0, ErrorKind::domain, "negative certification radius");
}

CertifiedScalar certified_dist_nearest_lattice(const Integer& q, const CertifiedVector& theta)
{
    RationalVector scaled;
    scaled.reserve(theta.dim());
    for (const auto& c : theta.coords)
        scaled.push_back(Rational(q) * c);
    return CertifiedScalar(dist_nearest_lattice(scaled), Rational(abs_of(q)) * theta.radius);
}

CertifiedScalar certified_linear_form_distance(std::span<const Integer> s, const CertifiedVector& theta)
{
    require(s.size() == theta.dim(), ErrorKind::dimension, "linear form and point have different dimensions");
    Integer l1 = 0;
    for (const auto& si : s)
        l1 += abs_of(si);
    return CertifiedScalar(dist_nearest_int(pairing(s, theta.coords)), Rational(l1) * theta.radius);
}

namespace {

// floor(log2(x)) for x > 0, exact.
long floor_log2(const Rational& x)
{
    long e = static_cast<long>(bit_length(x.get_num())) - static_cast<long>(bit_length(x.get_den()));
    Rational two_e = e >= 0 ? Rational(Integer(1) << static_cast<unsigned long>(e))
                            : make_rational(1, Integer(1) << static_cast<unsigned long>(-e));
    while (two_e > x) {
        --e;
        two_e /= 2;
    }
    while (two_e * 2 <= x) {
        ++e;
        two_e *= 2;
    }
    return e;
}

Rational times_pow2(const Rational& x, long e)
{
    Rational r = x;
    if (e >= 0)
        mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
    else
        mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
    return r;
}

}  // namespace

CertifiedScalar root_enclosure(const Rational& x, unsigned long k, unsigned rel_bits)
{
    require(k >= 1, ErrorKind::domain, "root of order zero");
    require(x >= 0, ErrorKind::domain, "root of a negative number");
    if (x == 0)
        return CertifiedScalar(0);
    if (k == 1)
        return CertifiedScalar(x);
    {
        Integer rn, rd;
        bool en = mpz_root(rn.get_mpz_t(), x.get_num_mpz_t(), k) != 0;
        bool ed = mpz_root(rd.get_mpz_t(), x.get_den_mpz_t(), k) != 0;
        if (en && ed)
            return CertifiedScalar(make_rational(rn, rd));
    }
    // Choose p with x * 2^(k p) >= 2^(k (rel_bits + 1)) so the integer root m has at least rel_bits + 1 bits.
    long lg = floor_log2(x);
    long p = static_cast<long>(rel_bits) + 2 - lg / static_cast<long>(k);
    Integer n = floor_of(times_pow2(x, p * static_cast<long>(k)));
    Integer m;
    mpz_root(m.get_mpz_t(), n.get_mpz_t(), k);
    if (pow_of(m, k) == n && times_pow2(x, p * static_cast<long>(k)) == Rational(n))
        return CertifiedScalar(times_pow2(Rational(m), -p));
    return CertifiedScalar::from_bounds(times_pow2(Rational(m), -p), times_pow2(Rational(m + 1), -p));
}

CertifiedScalar pow_enclosure(const Rational& x, const Rational& e, unsigned rel_bits)
{
    require(x >= 0, ErrorKind::domain, "power of a negative number");
    if (x == 0) {
        require(e > 0, ErrorKind::degenerate, "zero raised to a non-positive power");
        return CertifiedScalar(0);
    }
    Integer a = e.get_num();
    Integer b = e.get_den();
    require(b.fits_ulong_p() && abs_of(a).fits_ulong_p(), ErrorKind::domain, "exponent too large");
    Rational base = a >= 0 ? x : Rational(1 / x);
    Rational powered = pow_of(base, abs_of(a).get_ui());
    return root_enclosure(powered, b.get_ui(), rel_bits);
}

CertifiedScalar pow_enclosure(const CertifiedScalar& x, const Rational& e, unsigned rel_bits)
{
    if (x.is_exact())
        return pow_enclosure(x.value(), e, rel_bits);
    Rational lo = x.lo();
    Rational hi = x.hi();
    if (e > 0) {
        if (lo < 0)
            lo = 0;
        require(hi >= 0, ErrorKind::domain, "power of a negative enclosure");
        return CertifiedScalar::from_bounds(pow_enclosure(lo, e, rel_bits).lo(), pow_enclosure(hi, e, rel_bits).hi());
    }
    require(lo > 0, ErrorKind::precision, "enclosure reaches zero under a negative power");
    if (e == 0)
        return CertifiedScalar(1);
    return CertifiedScalar::from_bounds(pow_enclosure(hi, e, rel_bits).lo(), pow_enclosure(lo, e, rel_bits).hi());
}

}  // namespace shrinktarget
