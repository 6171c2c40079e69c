#include "shrinktarget/lattice.hpp"

#include "shrinktarget/errors.hpp"

namespace shrinktarget {

LatticePoint3 operator+(const LatticePoint3& a, const LatticePoint3& b)
{
    return {a.x + b.x, a.y + b.y, a.z + b.z};
}

LatticePoint3 operator-(const LatticePoint3& a, const LatticePoint3& b)
{
    return {a.x - b.x, a.y - b.y, a.z - b.z};
}

LatticePoint3 operator-(const LatticePoint3& a)
{
    return {-a.x, -a.y, -a.z};
}

LatticePoint3 operator*(const Integer& k, const LatticePoint3& a)
{
    return {k * a.x, k * a.y, k * a.z};
}

Integer sup_norm(const LatticePoint3& p)
{
    auto c = p.coords();
    return sup_norm(std::span<const Integer>(c));
}

Integer dot(const LatticePoint3& a, const LatticePoint3& b)
{
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

LatticePoint3 wedge(const LatticePoint3& a, const LatticePoint3& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

Integer content(const LatticePoint3& p)
{
    Integer g;
    mpz_gcd(g.get_mpz_t(), p.x.get_mpz_t(), p.y.get_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), p.z.get_mpz_t());
    return g;
}

bool is_primitive(const LatticePoint3& p)
{
    return content(p) == 1;
}

Rational projective_distance(const LatticePoint3& p, const LatticePoint3& q)
{
    require(!p.is_zero() && !q.is_zero(), ErrorKind::degenerate, "projective distance of the zero vector");
    return make_rational(sup_norm(wedge(p, q)), sup_norm(p) * sup_norm(q));
}

std::array<Rational, 2> affine_point(const LatticePoint3& p)
{
    require(p.z != 0, ErrorKind::degenerate, "point at infinity has no affine image");
    return {make_rational(p.x, p.z), make_rational(p.y, p.z)};
}

std::string to_string(const LatticePoint3& p)
{
    return "(" + p.x.get_str() + ", " + p.y.get_str() + ", " + p.z.get_str() + ")";
}

}  // namespace shrinktarget
