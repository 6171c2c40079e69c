#include <doctest.h>

#include "shrinktarget/best_approx.hpp"
#include "shrinktarget/errors.hpp"

#include <random>

using namespace shrinktarget;

namespace {

Rational q(long n, long d)
{
    return make_rational(n, d);
}

ErrorKind kind_of(auto&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::internal;
}

std::vector<long> witnesses(const std::vector<ApproxRecord>& rs)
{
    std::vector<long> out;
    for (const auto& r : rs)
        out.push_back(r.q.get_si());
    return out;
}

// Exact-rational record scan, independent of the fixed-point engine.
std::vector<std::pair<long, Rational>> oracle_simultaneous(const RationalVector& theta, long q_max)
{
    std::vector<std::pair<long, Rational>> out;
    for (long n = 1; n <= q_max; ++n) {
        RationalVector p;
        for (const auto& t : theta)
            p.push_back(Rational(n) * t);
        Rational v = dist_nearest_lattice(p);
        if (out.empty() || v < out.back().second) {
            out.emplace_back(n, v);
            if (v == 0)
                break;
        }
    }
    return out;
}

// Exact minimum of ||<s, theta>|| over 0 < |s| <= h.
Rational oracle_eps_l(const RationalVector& theta, long h)
{
    const std::size_t d = theta.size();
    std::vector<long> s(d, -h);
    Rational best = 1;
    while (true) {
        bool nonzero = false;
        Rational acc = 0;
        for (std::size_t i = 0; i < d; ++i) {
            nonzero = nonzero || s[i] != 0;
            acc += Rational(s[i]) * theta[i];
        }
        if (nonzero)
            best = std::min(best, dist_nearest_int(acc));
        std::size_t k = d;
        bool adv = false;
        while (k-- > 0) {
            if (s[k] < h) {
                ++s[k];
                for (std::size_t t = k + 1; t < d; ++t)
                    s[t] = -h;
                adv = true;
                break;
            }
        }
        if (!adv)
            break;
    }
    return best;
}

RationalVector random_theta(std::mt19937_64& rng, std::size_t d, unsigned long den)
{
    RationalVector t;
    for (std::size_t i = 0; i < d; ++i)
        t.push_back(make_rational(Integer(static_cast<unsigned long>(rng() % den)), Integer(den)));
    return t;
}

}  // namespace

TEST_CASE("eps_s examples")
{
    CertifiedVector t({q(2, 7)});
    auto r = eps_s(t, Rational(3));
    CHECK(r.value.value() == q(1, 7));
    CHECK(r.q == 3);
    CHECK(eps_s(t, Rational(1)).value.value() == q(2, 7));
    CHECK(kind_of([&] { eps_s(t, q(1, 2)); }) == ErrorKind::domain);
}

TEST_CASE("eps_l examples")
{
    CertifiedVector t({q(2, 7), q(3, 7)});
    auto r = eps_l(t, Rational(1));
    CHECK(r.value.value() == q(1, 7));
    CHECK(r.delta == IntegerVector{Integer(1), Integer(-1)});
    CHECK(eps_l(CertifiedVector({q(2, 7)}), Rational(3)).value.value() == q(1, 7));
    CertifiedVector t3({q(1, 3), q(1, 5), q(1, 7)});
    CHECK(kind_of([&] { eps_l(t3, Rational(1000000)); }) == ErrorKind::resource);
    CHECK(kind_of([&] { eps_l(t, q(1, 2)); }) == ErrorKind::domain);
}

TEST_CASE("best_simultaneous examples")
{
    CertifiedVector pell = sqrt2_minus_1(60);
    CHECK(pell.radius < make_rational(1, pow_of(Integer(10), 30)));
    CHECK(witnesses(best_simultaneous(pell, 100)) == std::vector<long>{1, 2, 5, 12, 29, 70});

    auto rs = best_simultaneous(CertifiedVector({q(2, 7)}), 7);
    CHECK(witnesses(rs) == std::vector<long>{1, 3, 7});
    CHECK(rs[0].value.value() == q(2, 7));
    CHECK(rs[1].value.value() == q(1, 7));
    CHECK(rs[2].value.value() == 0);
    CHECK(best_simultaneous(pell, 0).empty());
}

TEST_CASE("best_linear examples")
{
    auto rs = best_linear(CertifiedVector({q(2, 7)}), 3);
    REQUIRE(rs.size() == 2);
    CHECK(rs[0].delta == IntegerVector{Integer(1)});
    CHECK(rs[1].delta == IntegerVector{Integer(3)});
    CHECK(rs[1].value.value() == q(1, 7));
    CHECK(best_linear(CertifiedVector({q(2, 7), q(1, 3)}), 0).empty());
}

TEST_CASE("continued fractions")
{
    auto a = continued_fraction(q(1, 3), 10);
    CHECK(a.partial_quotients == IntegerVector{Integer(0), Integer(3)});
    CHECK(a.convergents == std::vector<Rational>{Rational(0), q(1, 3)});
    auto b = continued_fraction(q(7, 10), 10);
    CHECK(b.partial_quotients == IntegerVector{Integer(0), Integer(1), Integer(2), Integer(3)});
    CHECK(b.convergents == std::vector<Rational>{Rational(0), Rational(1), q(2, 3), q(7, 10)});
    CHECK(b.terminated);
    CHECK(kind_of([] { continued_fraction(q(3, 2), 5); }) == ErrorKind::domain);
    // recurrences
    auto c = continued_fraction(make_rational(Integer("123456789012345"), Integer("987654321098765")), 40);
    for (std::size_t k = 1; k < c.convergents.size(); ++k) {
        Integer det = c.convergents[k].get_num() * c.convergents[k - 1].get_den() -
                      c.convergents[k - 1].get_num() * c.convergents[k].get_den();
        CHECK(abs_of(det) == 1);
        if (k >= 2)
            CHECK(c.denominators[k] == c.partial_quotients[k] * c.denominators[k - 1] + c.denominators[k - 2]);
    }
}

TEST_CASE("scan matches exact oracle on random exact theta")
{
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t d = 1 + trial % 3;
        RationalVector t = random_theta(rng, d, 1000003UL);
        auto rs = best_simultaneous(CertifiedVector(t), 3000);
        auto oracle = oracle_simultaneous(t, 3000);
        REQUIRE(rs.size() == oracle.size());
        for (std::size_t i = 0; i < rs.size(); ++i) {
            CHECK(rs[i].q == oracle[i].first);
            CHECK(rs[i].value.value() == oracle[i].second);
            CHECK(rs[i].index == i);
        }
    }
}

TEST_CASE("eps_l matches brute force and best_linear step function")
{
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 12; ++trial) {
        std::size_t d = 2 + trial % 2;
        RationalVector t = random_theta(rng, d, 99991UL);
        CertifiedVector th(t);
        long hmax = d == 2 ? 25 : 7;
        auto lin = best_linear(th, static_cast<std::uint64_t>(hmax));
        for (long h = 1; h <= hmax; ++h) {
            Rational o = oracle_eps_l(t, h);
            CHECK(eps_l(th, Rational(h)).value.value() == o);
            CHECK(record_at(lin, Integer(h)).value.value() == o);
        }
        for (std::size_t i = 1; i < lin.size(); ++i) {
            CHECK(lin[i].size() > lin[i - 1].size());
            CHECK(lin[i].value.value() < lin[i - 1].value.value());
        }
    }
}

TEST_CASE("d = 1: scans agree with continued fraction denominators and with best_linear")
{
    CertifiedVector pell = sqrt2_minus_1(60);
    auto cf = continued_fraction(pell.coords[0], 20);
    auto rs = best_simultaneous(pell, 100000);
    for (std::size_t i = 0; i < rs.size(); ++i)
        CHECK(rs[i].q == cf.denominators[i]);
    auto lin = best_linear(pell, 100000);
    REQUIRE(lin.size() == rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i)
        CHECK(lin[i].delta == IntegerVector{rs[i].q});
}

TEST_CASE("record identities: eps_s equals the last record and Eq. (1) brackets hold")
{
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        std::size_t d = 2 + trial % 2;
        CertifiedVector th(random_theta(rng, d, (1UL << 40) + 15));
        auto rs = best_simultaneous(th, 5000);
        for (unsigned long h : {1UL, 17UL, 300UL, 4999UL})
            CHECK(eps_s(th, Rational(h)).value.value() == record_at(rs, Integer(h)).value.value());
        for (std::size_t i = 0; i + 1 < rs.size(); ++i) {
            const Rational& v = rs[i].value.value();
            CHECK(v * Rational(rs[i].q + rs[i + 1].q) >= 1);
            CHECK(pow_of(v, d) * Rational(rs[i + 1].q) <= 1);
        }
    }
}

TEST_CASE("inconclusive comparisons raise precision errors")
{
    CertifiedVector fuzzy({q(1, 3), q(2, 5)}, q(1, 50));
    CHECK(kind_of([&] { best_simultaneous(fuzzy, 100); }) == ErrorKind::precision);
    CHECK(kind_of([&] { eps_l(fuzzy, Rational(5)); }) == ErrorKind::precision);
    CHECK(kind_of([&] { best_linear(fuzzy, 5); }) == ErrorKind::precision);
}

TEST_CASE("scan budget")
{
    CertifiedVector t({q(1, 3), q(1, 5)});
    ScanOptions tight;
    tight.budget = 100;
    CHECK(kind_of([&] { best_simultaneous(t, 1000, tight); }) == ErrorKind::resource);
    CHECK(kind_of([&] { best_linear(t, 100, tight); }) == ErrorKind::resource);
}
