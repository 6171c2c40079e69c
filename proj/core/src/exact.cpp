#include "shrinktarget/exact.hpp"

#include "shrinktarget/errors.hpp"

#include <cctype>
#include <limits>

namespace shrinktarget {

namespace {

bool all_digits(std::string_view s)
{
    if (s.empty())
        return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            return false;
    return true;
}

Integer digits_to_integer(std::string_view s)
{
    return Integer(std::string(s), 10);
}

}  // namespace

Rational make_rational(const Integer& num, const Integer& den)
{
    require(den != 0, ErrorKind::domain, "zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

Integer parse_integer(std::string_view text)
{
    std::string_view body = text;
    bool negative = false;
    if (!body.empty() && (body.front() == '+' || body.front() == '-')) {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }
    require(all_digits(body), ErrorKind::config, "not an integer: '" + std::string(text) + "'");
    Integer v = digits_to_integer(body);
    return negative ? Integer(-v) : v;
}

Rational parse_rational(std::string_view text)
{
    const std::string original(text);
    std::string_view body = text;
    bool negative = false;
    if (!body.empty() && (body.front() == '+' || body.front() == '-')) {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }
    Rational value;
    if (auto slash = body.find('/'); slash != std::string_view::npos) {
        auto num = body.substr(0, slash);
        auto den = body.substr(slash + 1);
        require(all_digits(num) && all_digits(den), ErrorKind::config,
                "not a rational: '" + original + "'");
        value = make_rational(digits_to_integer(num), digits_to_integer(den));
    } else {
        long exponent = 0;
        if (auto e = body.find_first_of("eE"); e != std::string_view::npos) {
            auto exp_text = body.substr(e + 1);
            body = body.substr(0, e);
            Integer ev = parse_integer(exp_text);
            require(abs_of(ev) < 100000, ErrorKind::config, "exponent out of range: '" + original + "'");
            exponent = ev.get_si();
        }
        std::string digits;
        if (auto dot = body.find('.'); dot != std::string_view::npos) {
            auto ip = body.substr(0, dot);
            auto fp = body.substr(dot + 1);
            require((ip.empty() || all_digits(ip)) && (fp.empty() || all_digits(fp)) &&
                        !(ip.empty() && fp.empty()),
                    ErrorKind::config, "not a decimal: '" + original + "'");
            digits = std::string(ip) + std::string(fp);
            exponent -= static_cast<long>(fp.size());
        } else {
            require(all_digits(body), ErrorKind::config, "not a number: '" + original + "'");
            digits = std::string(body);
        }
        Integer mant = digits_to_integer(digits);
        if (exponent >= 0)
            value = Rational(mant * pow_of(Integer(10), static_cast<unsigned long>(exponent)));
        else
            value = make_rational(mant, pow_of(Integer(10), static_cast<unsigned long>(-exponent)));
    }
    return negative ? Rational(-value) : value;
}

std::string to_string(const Integer& x)
{
    return x.get_str();
}

std::string to_string(const Rational& x)
{
    return x.get_str();
}

std::string to_decimal(const Rational& x, int digits)
{
    Integer scale = pow_of(Integer(10), static_cast<unsigned long>(digits));
    Rational scaled = abs_of(x) * scale;
    Integer rounded = floor_of(scaled + Rational(1, 2));
    std::string s = rounded.get_str();
    if (digits > 0) {
        if (s.size() <= static_cast<std::size_t>(digits))
            s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
        s.insert(s.size() - static_cast<std::size_t>(digits), ".");
    }
    if (x < 0 && rounded != 0)
        s.insert(0, "-");
    return s;
}

Integer floor_of(const Rational& x)
{
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return r;
}

Integer ceil_of(const Rational& x)
{
    Integer r;
    mpz_cdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return r;
}

Rational abs_of(const Rational& x)
{
    return x < 0 ? Rational(-x) : x;
}

Integer abs_of(const Integer& x)
{
    return x < 0 ? Integer(-x) : x;
}

Integer pow_of(const Integer& x, unsigned long e)
{
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), x.get_mpz_t(), e);
    return r;
}

Rational pow_of(const Rational& x, unsigned long e)
{
    Rational r;
    mpz_pow_ui(r.get_num_mpz_t(), x.get_num_mpz_t(), e);
    mpz_pow_ui(r.get_den_mpz_t(), x.get_den_mpz_t(), e);
    return r;
}

NearestInteger nearest_integer(const Rational& x)
{
    Integer lo = floor_of(x);
    Rational below = x - lo;
    Rational above = Rational(lo + 1) - x;
    if (below <= above)
        return {below, lo};
    return {above, lo + 1};
}

Rational dist_nearest_int(const Rational& x)
{
    return nearest_integer(x).distance;
}

Rational dist_nearest_lattice(std::span<const Rational> x)
{
    Rational best = 0;
    for (const auto& xi : x) {
        Rational d = dist_nearest_int(xi);
        if (d > best)
            best = d;
    }
    return best;
}

Integer sup_norm(std::span<const Integer> v)
{
    Integer best = 0;
    for (const auto& vi : v) {
        Integer a = abs_of(vi);
        if (a > best)
            best = a;
    }
    return best;
}

Rational sup_norm(std::span<const Rational> v)
{
    Rational best = 0;
    for (const auto& vi : v) {
        Rational a = abs_of(vi);
        if (a > best)
            best = a;
    }
    return best;
}

Rational pairing(std::span<const Integer> s, std::span<const Rational> x)
{
    require(s.size() == x.size(), ErrorKind::dimension, "pairing of vectors with different lengths");
    Rational acc = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        acc += Rational(s[i]) * x[i];
    return acc;
}

std::size_t bit_length(const Integer& x)
{
    if (x == 0)
        return 0;
    return mpz_sizeinbase(x.get_mpz_t(), 2);
}

std::uint64_t to_u64_saturating(const Integer& x)
{
    if (x <= 0)
        return 0;
    if (bit_length(x) > 64)
        return std::numeric_limits<std::uint64_t>::max();
    Integer hi = x >> 32;
    Integer lo = x - (hi << 32);
    return (static_cast<std::uint64_t>(hi.get_ui()) << 32) | static_cast<std::uint64_t>(lo.get_ui());
}

}  // namespace shrinktarget
