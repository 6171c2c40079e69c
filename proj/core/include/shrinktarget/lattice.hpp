#pragma once

#include "shrinktarget/exact.hpp"

#include <array>
#include <string>

namespace shrinktarget {

struct LatticePoint3 {
    Integer x = 0;
    Integer y = 0;
    Integer z = 0;

    LatticePoint3() = default;
    LatticePoint3(Integer x_, Integer y_, Integer z_) : x(std::move(x_)), y(std::move(y_)), z(std::move(z_)) {}

    std::array<Integer, 3> coords() const { return {x, y, z}; }
    bool is_zero() const { return x == 0 && y == 0 && z == 0; }

    friend bool operator==(const LatticePoint3& a, const LatticePoint3& b)
    {
        return a.x == b.x && a.y == b.y && a.z == b.z;
    }
};

LatticePoint3 operator+(const LatticePoint3& a, const LatticePoint3& b);
LatticePoint3 operator-(const LatticePoint3& a, const LatticePoint3& b);
LatticePoint3 operator-(const LatticePoint3& a);
LatticePoint3 operator*(const Integer& k, const LatticePoint3& a);

Integer sup_norm(const LatticePoint3& p);
Integer dot(const LatticePoint3& a, const LatticePoint3& b);
LatticePoint3 wedge(const LatticePoint3& a, const LatticePoint3& b);
Integer content(const LatticePoint3& p);
bool is_primitive(const LatticePoint3& p);

// |P ^ Q| / (|P| |Q|); degenerate-input error for a zero argument.
Rational projective_distance(const LatticePoint3& p, const LatticePoint3& q);

// Affine image (x/z, y/z); degenerate-input error when z == 0.
std::array<Rational, 2> affine_point(const LatticePoint3& p);

std::string to_string(const LatticePoint3& p);

}  // namespace shrinktarget
