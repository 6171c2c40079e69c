#include "doctest.h"

#include "shrinktarget/errors.hpp"
#include "shrinktarget/lattice_search.hpp"

#include <random>

using namespace shrinktarget;

namespace {

Rational random_unit(std::mt19937_64& rng, unsigned bits)
{
    std::uniform_int_distribution<std::uint64_t> dist(0, (std::uint64_t{1} << bits) - 1);
    return make_rational(Integer(static_cast<unsigned long>(dist(rng))), Integer(1) << bits);
}

std::vector<Integer> oracle(const RationalVector& c, const RationalVector& x, long lo, long hi, const Rational& r)
{
    std::vector<Integer> out;
    for (long l = lo; l <= hi; ++l) {
        RationalVector y(c.size());
        for (std::size_t i = 0; i < c.size(); ++i)
            y[i] = x[i] + Rational(l) * c[i];
        if (dist_nearest_lattice(y) <= r)
            out.push_back(l);
    }
    return out;
}

}  // namespace

TEST_CASE("return search agrees with direct iteration")
{
    std::mt19937_64 rng(11);
    for (std::size_t d : {1u, 2u, 3u}) {
        for (int trial = 0; trial < 6; ++trial) {
            RationalVector c, x;
            for (std::size_t i = 0; i < d; ++i) {
                c.push_back(random_unit(rng, 40));
                x.push_back(random_unit(rng, 30));
            }
            long lo = static_cast<long>(rng() % 50);
            long hi = lo + 3000 + static_cast<long>(rng() % 3000);
            // Radius with roughly a dozen expected hits.
            Rational r = d == 1 ? Rational(3, 1000) : d == 2 ? Rational(1, 30) : Rational(1, 12);
            ReturnSearch search(c, Integer(lo), Integer(hi), r);
            auto want = oracle(c, x, lo, hi, r);
            CHECK(search.solve(x) == want);
            auto cand = search.candidates(x);
            for (const auto& l : want)
                CHECK(std::binary_search(cand.begin(), cand.end(), l));
            for (const auto& l : cand) {
                CHECK(l >= lo);
                CHECK(l <= hi);
            }
        }
    }
}

TEST_CASE("return search on the 2^-128 grid")
{
    std::mt19937_64 rng(5);
    RationalVector c{random_unit(rng, 60), random_unit(rng, 60)};
    u128 xs[2] = {to_fixed128(Rational(1, 3)), to_fixed128(Rational(2, 7))};
    RationalVector x{fixed_to_rational(xs[0]), fixed_to_rational(xs[1])};
    Rational r(1, 40);
    ReturnSearch search(c, Integer(1), Integer(5000), r);
    auto want = oracle(c, x, 1, 5000, r);
    auto cand = search.candidates_grid128(xs);
    for (const auto& l : want)
        CHECK(std::binary_search(cand.begin(), cand.end(), l));
}

TEST_CASE("return search reaches long windows")
{
    Rational phi = make_rational(Integer("6180339887498948482045868343656381177"),
                                 Integer("10000000000000000000000000000000000000"));
    const long tail = 300000;
    Integer hi("1000000000000");
    Rational r(1, 100000000);
    ReturnSearch search({phi}, Integer(1), hi, r);
    RationalVector zero{Rational(0)};
    auto sol = search.solve(zero);
    // About 2 r hi solutions.
    CHECK(sol.size() > 19000);
    CHECK(sol.size() < 21000);
    // Complete on a tail window checked by direct iteration.
    std::vector<Integer> in_tail;
    for (const auto& l : sol)
        if (l > hi - tail)
            in_tail.push_back(l);
    std::vector<Integer> want;
    Rational y = Rational(hi - tail) * phi;
    y -= floor_of(y);
    for (long k = 1; k <= tail; ++k) {
        y += phi;
        if (y >= 1)
            y -= 1;
        if (y <= r || 1 - y <= r)
            want.push_back(hi - tail + k);
    }
    CHECK(in_tail == want);
}

TEST_CASE("return search node limit raises a resource error")
{
    ReturnSearch search({Rational(1, 3), Rational(2, 5)}, Integer(0), Integer(1000000), Rational(49, 100));
    search.node_limit = 100;
    RationalVector zero{Rational(0), Rational(0)};
    bool resource = false;
    try {
        search.candidates(zero);
    } catch (const Error& e) {
        resource = e.kind() == ErrorKind::resource;
    }
    CHECK(resource);
}
