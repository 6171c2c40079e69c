#include "shrinktarget/construct.hpp"
#include "shrinktarget/errors.hpp"

namespace shrinktarget {

namespace {

struct Column {
    IntegerVector a, p, q;

    void push(const Integer& digit)
    {
        std::size_t m = a.size();
        a.push_back(digit);
        if (m == 0) {
            p.push_back(digit);
            q.push_back(1);
        } else if (m == 1) {
            p.push_back(digit * p[0] + 1);
            q.push_back(digit * q[0]);
        } else {
            p.push_back(digit * p[m - 1] + p[m - 2]);
            q.push_back(digit * q[m - 1] + q[m - 2]);
        }
    }
};

// Smallest digit strictly exceeding what q_new >= target requires.
Integer growth_digit(const Column& c, const Integer& target)
{
    const Integer& cur = c.q.back();
    Integer need;
    mpz_cdiv_q(need.get_mpz_t(), target.get_mpz_t(), cur.get_mpz_t());
    return std::max(need, Integer(0)) + 1;
}

Integer growth_target(const Integer& base, std::size_t d, std::size_t n, const Rational& delta)
{
    if (n == 0)
        return 0;
    Rational factor = pow_enclosure(Rational(static_cast<unsigned long>(n)), delta).hi();
    return ceil_of(Rational(pow_of(base, static_cast<unsigned long>(d))) * factor);
}

}  // namespace

CFVectorSpec alternating_cf(std::size_t d, const Rational& delta, std::size_t levels, std::size_t start_index)
{
    require(d >= 1, ErrorKind::dimension, "dimension must be at least 1");
    require(delta > Rational(static_cast<long>(d + 1)), ErrorKind::domain, "delta must exceed d + 1");
    require(levels >= 1, ErrorKind::domain, "need at least one level");
    CFVectorSpec spec;
    spec.d = d;
    spec.delta = delta;
    spec.levels = levels;
    spec.start_index = start_index;
    spec.digit_rule = "a_0 = 0; forced digits ceil(target / q) + 1; filler digit 2";

    std::vector<Column> cols(d);
    for (auto& c : cols)
        c.push(0);
    const std::size_t top = levels + 2;
    for (std::size_t m = 1; m <= top; ++m) {
        // Coordinates 1..d-1 follow coordinate i+1 at the previous level, coordinate d follows coordinate 1.
        for (std::size_t i = 0; i + 1 < d; ++i) {
            std::size_t n = m - 1;
            Integer digit = 2;
            if (n >= start_index)
                digit = growth_digit(cols[i], growth_target(cols[i + 1].q[n], d, n, delta));
            cols[i].push(digit);
        }
        Integer digit = 2;
        if (m >= start_index && d >= 2)
            digit = growth_digit(cols[d - 1], growth_target(cols[0].q[m], d, m, delta));
        cols[d - 1].push(digit);
    }

    RationalVector center;
    Rational radius = 0;
    for (auto& c : cols) {
        center.push_back(make_rational(c.p[top - 1], c.q[top - 1]));
        radius = std::max(radius, make_rational(1, c.q[top - 1] * c.q[top]));
        spec.partial_quotients.push_back(std::move(c.a));
        spec.denominators.push_back(std::move(c.q));
    }
    spec.theta = CertifiedVector(std::move(center), radius);
    return spec;
}

std::vector<std::string> growth_violations(const CFVectorSpec& spec)
{
    std::vector<std::string> out;
    const Integer a = spec.delta.get_num();
    const unsigned long b = spec.delta.get_den().get_ui();
    const std::size_t d = spec.d;
    auto holds = [&](const Integer& big, const Integer& base, std::size_t n) {
        // big^b >= base^(d b) n^a
        Integer rhs = pow_of(base, d * b) * pow_of(Integer(static_cast<unsigned long>(n)), a.get_ui());
        return pow_of(big, b) >= rhs;
    };
    const auto& q = spec.denominators;
    for (std::size_t n = std::max<std::size_t>(spec.start_index, 1); n <= spec.levels; ++n) {
        if (d >= 2 && !holds(q[d - 1][n], q[0][n], n))
            out.push_back("q_{" + std::to_string(d) + "," + std::to_string(n) + "} too small");
        for (std::size_t i = 1; i < d; ++i)
            if (!holds(q[i - 1][n + 1], q[i][n], n))
                out.push_back("q_{" + std::to_string(i) + "," + std::to_string(n + 1) + "} too small");
    }
    return out;
}

}  // namespace shrinktarget
