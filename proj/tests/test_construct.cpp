#include "doctest.h"

#include "shrinktarget/construct.hpp"
#include "shrinktarget/errors.hpp"

#include <chrono>
#include <random>

using namespace shrinktarget;

namespace {

ErrorKind kind_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::internal;
}

ConstructionState standard(std::size_t steps)
{
    return build_theta(make_params("const:33", "1", steps), steps);
}

}  // namespace

TEST_CASE("sequence mini-language")
{
    CHECK(expand_a_sequence("const:33", 3) == IntegerVector{33, 33, 33});
    CHECK(expand_a_sequence("poly:4", 2) == IntegerVector{81, 256});
    CHECK(expand_a_sequence("poly:2@6", 2) == IntegerVector{36, 49});
    CHECK(expand_a_sequence("40,50,60,70", 3) == IntegerVector{40, 50, 60});
    CHECK(kind_of([] { expand_a_sequence("40,50", 3); }) == ErrorKind::config);
    CHECK(kind_of([] { expand_a_sequence("const:x", 3); }) == ErrorKind::config);
    IntegerVector a{33, 33, 33, 33};
    CHECK(expand_h_sequence("1", a, 3) == IntegerVector{1, 792, 627264});
    CHECK(expand_h_sequence("2;geom:30a", a, 2) == IntegerVector{2, 1980});
    CHECK(expand_h_sequence("geom:24a", a, 2) == IntegerVector{1, 792});
    CHECK(expand_h_sequence("1,800", a, 3) == IntegerVector{1, 800, 633600});
    CHECK(kind_of([&] { expand_h_sequence("1;lin:3", a, 3); }) == ErrorKind::config);
}

TEST_CASE("complete_basis examples")
{
    CHECK(complete_basis({0, 0, 1}, {1, 0, 0}) == LatticePoint3(0, 1, 0));
    CHECK(complete_basis({1, -1, 0}, {1, 1, 33}) == LatticePoint3(0, 0, 1));
    CHECK(kind_of([] { complete_basis({1, 0, 0}, {0, 2, 0}); }) == ErrorKind::domain);
    CHECK(kind_of([] { complete_basis({1, 0, 0}, {1, 2, 0}); }) == ErrorKind::domain);
    CHECK(kind_of([] { complete_basis({0, 0, 0}, {1, 2, 0}); }) == ErrorKind::degenerate);
}

TEST_CASE("complete_basis matches a brute-force lattice search")
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> coord(-5, 5);
    int tested = 0;
    while (tested < 60) {
        LatticePoint3 p(coord(rng), coord(rng), coord(rng));
        LatticePoint3 v(coord(rng), coord(rng), coord(rng));
        LatticePoint3 delta = wedge(p, v);
        if (delta.is_zero() || !is_primitive(p))
            continue;
        ++tested;
        LatticePoint3 out = complete_basis(delta, p);
        LatticePoint3 prim = delta;
        Integer g = content(delta);
        prim = LatticePoint3(prim.x / g, prim.y / g, prim.z / g);
        CHECK((wedge(p, out) == prim || wedge(p, out) == -prim));
        // No shorter completion exists among X with p ^ X = +-prim within the box.
        Integer best = sup_norm(out);
        for (int x = -25; x <= 25; ++x)
            for (int y = -25; y <= 25; ++y)
                for (int z = -25; z <= 25; ++z) {
                    LatticePoint3 c(x, y, z);
                    if (sup_norm(c) >= best)
                        continue;
                    auto w = wedge(p, c);
                    CHECK_FALSE((w == prim || w == -prim));
                }
    }
}

TEST_CASE("build_theta initial data and admissibility")
{
    auto s = standard(2);
    CHECK(s.steps.size() == 4);
    CHECK(s.params.q_target(0) == 33);
    CHECK(s.steps[0].delta == LatticePoint3(1, -1, 0));
    CHECK(s.steps[0].point == LatticePoint3(1, 1, 33));
    CHECK(projective_distance({0, 0, 1}, s.steps[0].point) == Rational(1, 33));
    CHECK(s.theta.radius == Rational(3, 2) * make_rational(s.steps[3].h, s.steps[2].q * s.steps[3].q));

    auto bad_a = make_params("32,33,33,33", "1", 2);
    CHECK(kind_of([&] { build_theta(bad_a, 2); }) == ErrorKind::domain);
    auto bad_h = make_params("const:33", "1,700", 2);
    try {
        build_theta(bad_h, 2);
        FAIL("expected a domain error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::domain);
        CHECK(std::string(e.what()).find("h_1") != std::string::npos);
    }
    CHECK(kind_of([] { build_theta(make_params("const:33", "1", 1), 0); }) == ErrorKind::domain);
}

TEST_CASE("build_theta invariants hold step by step")
{
    for (const char* a : {"const:33", "poly:4", "const:1000"}) {
        auto s = build_theta(make_params(a, "1", 8), 8);
        for (std::size_t n = 0; n < s.steps.size(); ++n) {
            const auto& st = s.steps[n];
            CHECK(is_primitive(st.delta));
            CHECK(is_primitive(st.point));
            CHECK(dot(st.delta, st.point) == 0);
            if (n + 1 < s.steps.size()) {
                const auto& nx = s.steps[n + 1];
                CHECK(dot(nx.delta, st.point) == 0);
                CHECK(wedge(st.delta, nx.delta) == st.point);
                CHECK(wedge(st.point, nx.point) == nx.delta);
                CHECK(dot(st.delta, nx.point) == 1);
            }
        }
        CHECK(sup_norm(std::span<const Rational>(s.theta.coords)) <= Rational(1, 8));
    }
}

TEST_CASE("verify_construction: depth 6 with two exhaustive levels")
{
    auto s = standard(6);
    VerifyOptions o;
    o.depth_bruteforce = 2;
    auto r = verify_construction(s, o);
    for (const auto& c : r.checks)
        if (!c.passed)
            MESSAGE(c.name << " n=" << c.index << " " << c.detail);
    CHECK(r.all_passed());
    CHECK(r.count("exceptional_returns_scan") == 2);
    CHECK(r.count("exceptional_returns_lattice") == 6);
    CHECK(r.count("point_enclosure") == 6);
    CHECK(r.count("pairing_enclosure") == 6);
    CHECK(r.count("distance_enclosure") == 6);
    CHECK(r.count("simultaneous_records") == 1);
    CHECK(r.count("linear_records") == 2);
    CHECK(r.exceptional.size() == 6);
}

TEST_CASE("verify_construction: structural checks only")
{
    auto s = standard(3);
    VerifyOptions o;
    o.depth_bruteforce = 0;
    o.return_search = false;
    o.linear_records = false;
    auto r = verify_construction(s, o);
    CHECK(r.all_passed());
    CHECK(r.count("exceptional_returns_scan") == 0);
    CHECK(r.count("simultaneous_records") == 0);
}

TEST_CASE("verify_construction reports a tampered transcript")
{
    auto s = standard(4);
    s.steps[2].delta = Integer(2) * s.steps[2].delta;
    VerifyOptions o;
    o.depth_bruteforce = 0;
    o.return_search = false;
    o.linear_records = false;
    auto r = verify_construction(s, o);
    CHECK_FALSE(r.all_passed());
    bool flagged = false;
    for (const auto& c : r.checks)
        if (c.name == "primitive_delta" && c.index == 2)
            flagged = !c.passed;
    CHECK(flagged);
}

TEST_CASE("verify_construction exhaustive scan with a larger a")
{
    auto s = build_theta(make_params("const:40", "1", 4), 4);
    VerifyOptions o;
    o.depth_bruteforce = 1;
    auto r = verify_construction(s, o);
    CHECK(r.all_passed());
    CHECK(r.bruteforce_depth == 1);
}

TEST_CASE("transcript round trip")
{
    auto s = build_theta(make_params("poly:4", "1", 5), 5);
    std::string text = serialize_transcript(s);
    auto back = parse_transcript(text);
    CHECK(serialize_transcript(back) == text);
    CHECK(back.theta.coords == s.theta.coords);
    CHECK(back.theta.radius == s.theta.radius);
    CHECK(back.params.a_source == "poly:4");

    CHECK(kind_of([] { parse_transcript("garbage"); }) == ErrorKind::config);
    std::string truncated = text.substr(0, text.rfind('\n', text.size() - 2) + 1);
    CHECK(kind_of([&] { parse_transcript(truncated); }) == ErrorKind::config);
    CHECK(kind_of([&] { parse_transcript(text + "extra\n"); }) == ErrorKind::config);
}

TEST_CASE("alternating continued fractions")
{
    auto spec = alternating_cf(2, Rational(4), 3, 2);
    CHECK(growth_violations(spec).empty());
    const auto& q = spec.denominators;
    for (unsigned long n = 2; n <= 3; ++n) {
        CHECK(q[1][n] >= q[0][n] * q[0][n] * pow_of(Integer(n), 4));
        CHECK(q[0][n + 1] >= q[1][n] * q[1][n] * pow_of(Integer(n), 4));
    }
    CHECK(spec.partial_quotients[0][0] == 0);
    CHECK(spec.partial_quotients[0].size() == 6);
    CHECK(spec.theta.radius > 0);

    CHECK(kind_of([] { alternating_cf(2, Rational(3), 3, 2); }) == ErrorKind::domain);
    auto tiny = alternating_cf(2, Rational(4), 1, 2);
    CHECK(growth_violations(tiny).empty());

    auto d3 = alternating_cf(3, Rational(9, 2), 3, 1);
    CHECK(growth_violations(d3).empty());

    // Theta coordinates are the stated convergents of the digit lists.
    for (std::size_t i = 0; i < 2; ++i) {
        Rational x = 0;
        const auto& digits = spec.partial_quotients[i];
        for (std::size_t k = spec.levels + 1; k >= 1; --k)
            x = 1 / (Rational(digits[k]) + x);
        CHECK(x == spec.theta.coords[i]);
    }

    // Damaging one denominator trips the exact check.
    auto broken = spec;
    broken.denominators[1][3] = 1;
    CHECK_FALSE(growth_violations(broken).empty());
}
