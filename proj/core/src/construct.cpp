#include "shrinktarget/construct.hpp"

#include "shrinktarget/best_approx.hpp"
#include "shrinktarget/errors.hpp"
#include "shrinktarget/fixed_point.hpp"
#include "shrinktarget/lattice_search.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace shrinktarget {

namespace {

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        out.push_back(cur);
    if (!s.empty() && s.back() == sep)
        out.emplace_back();
    return out;
}

bool starts_with(const std::string& s, const std::string& prefix)
{
    return s.rfind(prefix, 0) == 0;
}

Integer parse_positive(const std::string& text, const std::string& what)
{
    Integer v = parse_integer(text);
    require(v > 0, ErrorKind::config, what + " must be positive: '" + text + "'");
    return v;
}

LatticePoint3 divide_exact(const LatticePoint3& p, const Integer& g)
{
    LatticePoint3 r;
    mpz_divexact(r.x.get_mpz_t(), p.x.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(r.y.get_mpz_t(), p.y.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(r.z.get_mpz_t(), p.z.get_mpz_t(), g.get_mpz_t());
    return r;
}

// w with <p, w> = 1 for primitive p.
LatticePoint3 bezout_vector(const LatticePoint3& p)
{
    Integer g1, s, t, g, u, v;
    mpz_gcdext(g1.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), p.x.get_mpz_t(), p.y.get_mpz_t());
    mpz_gcdext(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(), g1.get_mpz_t(), p.z.get_mpz_t());
    require(g == 1, ErrorKind::internal, "Bezout vector of a non-primitive point");
    LatticePoint3 w(u * s, u * t, v);
    require(dot(p, w) == 1, ErrorKind::internal, "Bezout identity failed");
    return w;
}

// k minimizing |x + k p| (sup norm); ties to the smallest |k|, then the smallest k.
Integer best_shift(const LatticePoint3& x, const LatticePoint3& p)
{
    auto xs = x.coords();
    auto ps = p.coords();
    std::vector<Rational> roots;
    for (std::size_t i = 0; i < 3; ++i) {
        if (ps[i] != 0)
            roots.push_back(make_rational(-xs[i], ps[i]));
        for (std::size_t j = i + 1; j < 3; ++j) {
            for (int sigma : {1, -1}) {
                Integer den = ps[i] - sigma * ps[j];
                if (den != 0)
                    roots.push_back(make_rational(sigma * xs[j] - xs[i], den));
            }
        }
    }
    std::set<Integer> ks{Integer(0)};
    for (const auto& r : roots) {
        ks.insert(floor_of(r));
        ks.insert(ceil_of(r));
    }
    Integer best_k = 0;
    Integer best_n = sup_norm(x);
    for (const auto& k : ks) {
        Integer n = sup_norm(x + k * p);
        if (n < best_n || (n == best_n && (abs_of(k) < abs_of(best_k) || (abs_of(k) == abs_of(best_k) && k < best_k)))) {
            best_n = n;
            best_k = k;
        }
    }
    return best_k;
}

Rational affine_gap(const LatticePoint3& p, const RationalVector& c)
{
    auto a = affine_point(p);
    return std::max(abs_of(a[0] - c[0]), abs_of(a[1] - c[1]));
}

// |<Delta, theta_bar>| as a certified quantity; precision error when the sign is undecided.
CertifiedScalar pairing_magnitude(const LatticePoint3& delta, const CertifiedVector& theta)
{
    Rational v = Rational(delta.x) * theta.coords[0] + Rational(delta.y) * theta.coords[1] + Rational(delta.z);
    Rational rho = Rational(abs_of(delta.x) + abs_of(delta.y)) * theta.radius;
    if (v - rho >= 0)
        return CertifiedScalar(v, rho);
    if (v + rho <= 0)
        return CertifiedScalar(-v, rho);
    fail(ErrorKind::precision, "sign of <Delta, theta_bar> undecided; rebuild with more steps");
}

std::string text(const Rational& x)
{
    return x.get_str();
}

}  // namespace

IntegerVector expand_a_sequence(const std::string& spec, std::size_t count)
{
    IntegerVector out;
    if (starts_with(spec, "const:")) {
        Integer k = parse_positive(spec.substr(6), "constant");
        out.assign(count, k);
    } else if (starts_with(spec, "poly:")) {
        std::string body = spec.substr(5);
        std::string exp_text = body;
        std::optional<Integer> start;
        if (auto at = body.find('@'); at != std::string::npos) {
            exp_text = body.substr(0, at);
            start = parse_integer(body.substr(at + 1));
            require(*start >= 0, ErrorKind::config, "poly start index must be non-negative");
        }
        Integer p = parse_positive(exp_text, "poly exponent");
        require(p <= 64, ErrorKind::config, "poly exponent too large");
        unsigned long pe = p.get_ui();
        Integer s = start ? *start : Integer(1);
        if (!start)
            while (pow_of(s, pe) <= 32)
                ++s;
        for (std::size_t n = 0; n < count; ++n)
            out.push_back(pow_of(Integer(s + static_cast<unsigned long>(n)), pe));
    } else {
        for (const auto& part : split(spec, ','))
            out.push_back(parse_integer(part));
        require(!out.empty(), ErrorKind::config, "empty sequence");
        require(out.size() >= count, ErrorKind::config,
                "literal a sequence has " + std::to_string(out.size()) + " terms, " + std::to_string(count) +
                    " needed");
        out.resize(count);
    }
    return out;
}

IntegerVector expand_h_sequence(const std::string& spec, const IntegerVector& a, std::size_t count)
{
    std::string literal = spec;
    Integer factor = 24;
    if (auto semi = spec.find(';'); semi != std::string::npos) {
        literal = spec.substr(0, semi);
        std::string rule = spec.substr(semi + 1);
        require(starts_with(rule, "geom:") && rule.size() > 6 && rule.back() == 'a', ErrorKind::config,
                "unknown h rule '" + rule + "'");
        factor = parse_positive(rule.substr(5, rule.size() - 6), "geom factor");
    } else if (starts_with(spec, "geom:")) {
        require(spec.size() > 6 && spec.back() == 'a', ErrorKind::config, "unknown h rule '" + spec + "'");
        factor = parse_positive(spec.substr(5, spec.size() - 6), "geom factor");
        literal = "1";
    }
    IntegerVector out;
    for (const auto& part : split(literal, ','))
        out.push_back(parse_positive(part, "h value"));
    require(!out.empty(), ErrorKind::config, "empty h sequence");
    while (out.size() < count) {
        std::size_t n = out.size() - 1;
        require(n < a.size(), ErrorKind::config, "a sequence too short to extend h");
        out.push_back(factor * a[n] * out[n]);
    }
    out.resize(count);
    return out;
}

ConstructionParams make_params(const std::string& a_spec, const std::string& h_spec, std::size_t steps)
{
    ConstructionParams p;
    p.a = expand_a_sequence(a_spec, steps + 2);
    p.h_target = expand_h_sequence(h_spec, p.a, steps + 2);
    p.a_source = a_spec;
    p.h_source = h_spec;
    return p;
}

LatticePoint3 complete_basis(const LatticePoint3& delta, const LatticePoint3& p)
{
    require(!delta.is_zero(), ErrorKind::degenerate, "complete_basis needs a nonzero Delta");
    require(is_primitive(p), ErrorKind::domain, "complete_basis needs a primitive point, got " + to_string(p));
    require(dot(delta, p) == 0, ErrorKind::domain, "point " + to_string(p) + " is not on " + to_string(delta));
    LatticePoint3 dp = divide_exact(delta, content(delta));
    LatticePoint3 x = wedge(dp, bezout_vector(p));  // p ^ x = dp
    LatticePoint3 result = x + best_shift(x, p) * p;
    require(wedge(p, result) == dp, ErrorKind::internal, "basis completion does not generate the lattice");
    Integer np = sup_norm(p);
    Integer bound = std::max<Integer>(np * np, sup_norm(delta));  // |P'| |P| <= 2 max(|P|^2, |Delta|)
    require(sup_norm(result) * np <= 2 * bound, ErrorKind::internal,
            "basis completion " + to_string(result) + " exceeds the height bound");
    return result;
}

void check_admissible(const ConstructionParams& params, std::size_t steps)
{
    require(steps >= 1, ErrorKind::domain, "construction needs N >= 1");
    require(params.a.size() >= steps + 2 && params.h_target.size() >= steps + 2, ErrorKind::domain,
            "sequences must provide N + 2 terms");
    for (std::size_t n = 0; n <= steps + 1; ++n) {
        require(params.a[n] > 32, ErrorKind::domain,
                "a_" + std::to_string(n) + " = " + params.a[n].get_str() + " violates a_n > 32");
        require(params.h_target[n] > 0, ErrorKind::domain, "h_" + std::to_string(n) + " must be positive");
    }
    for (std::size_t n = 0; n <= steps; ++n) {
        Integer need = 24 * params.a[n] * params.h_target[n];
        require(params.h_target[n + 1] >= need, ErrorKind::domain,
                "h_" + std::to_string(n + 1) + " = " + params.h_target[n + 1].get_str() + " is below 24 a_" +
                    std::to_string(n) + " h_" + std::to_string(n) + " = " + need.get_str());
    }
}

CertifiedVector certified_limit(const std::vector<ConstructionStep>& steps, std::size_t depth)
{
    require(depth + 1 < steps.size(), ErrorKind::domain, "transcript lacks the certifying step");
    auto c = affine_point(steps[depth].point);
    Rational radius = Rational(3, 2) * make_rational(steps[depth + 1].h, steps[depth].q * steps[depth + 1].q);
    return CertifiedVector({c[0], c[1]}, radius);
}

ConstructionState build_theta(const ConstructionParams& params, std::size_t steps)
{
    check_admissible(params, steps);
    ConstructionState state;
    state.params = params;
    state.depth = steps;

    const Integer& h0 = params.h_target[0];
    ConstructionStep first;
    first.delta = LatticePoint3(h0, -1, 0);
    first.point = LatticePoint3(1, h0, params.q_target(0));
    first.h = sup_norm(first.delta);
    first.q = sup_norm(first.point);
    state.steps.push_back(first);

    for (std::size_t n = 0; n <= steps; ++n) {
        const ConstructionStep& cur = state.steps[n];
        LatticePoint3 d_prime = complete_basis(cur.point, cur.delta);
        if (wedge(cur.delta, d_prime) == -cur.point)
            d_prime = -d_prime;
        require(wedge(cur.delta, d_prime) == cur.point, ErrorKind::internal, "Delta' sign cannot be fixed");

        ConstructionStep next;
        Integer kd;
        mpz_fdiv_q(kd.get_mpz_t(), params.h_target[n + 1].get_mpz_t(), cur.h.get_mpz_t());
        next.delta = kd * cur.delta + d_prime;
        next.h = sup_norm(next.delta);

        LatticePoint3 p_prime = complete_basis(next.delta, cur.point);
        if (wedge(cur.point, p_prime) == -next.delta)
            p_prime = -p_prime;
        require(wedge(cur.point, p_prime) == next.delta, ErrorKind::internal, "P' sign cannot be fixed");
        Integer kp;
        Integer qt = params.q_target(n + 1);
        mpz_fdiv_q(kp.get_mpz_t(), qt.get_mpz_t(), cur.q.get_mpz_t());
        next.point = kp * cur.point + p_prime;
        next.q = sup_norm(next.point);

        const std::string at = " at step " + std::to_string(n + 1);
        require(is_primitive(next.delta) && is_primitive(next.point), ErrorKind::internal, "non-primitive output" + at);
        require(2 * next.h >= params.h_target[n + 1] && next.h <= 2 * params.h_target[n + 1], ErrorKind::internal,
                "h sandwich violated" + at);
        require(2 * next.q >= qt && next.q <= 2 * qt, ErrorKind::internal, "q sandwich violated" + at);
        require(dot(cur.delta, next.point) == 1, ErrorKind::internal, "<Delta_n, P_{n+1}> != 1" + at);
        state.steps.push_back(std::move(next));
    }
    state.theta = certified_limit(state.steps, steps);
    return state;
}

bool VerificationReport::all_passed() const
{
    return failures() == 0;
}

std::size_t VerificationReport::failures() const
{
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.passed; }));
}

std::size_t VerificationReport::count(const std::string& name) const
{
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [&](const CheckResult& c) { return c.name == name; }));
}

VerificationReport verify_construction(const ConstructionState& state, const VerifyOptions& options)
{
    VerificationReport report;
    const auto& st = state.steps;
    const std::size_t N = state.depth;
    require(st.size() == N + 2, ErrorKind::domain, "transcript length does not match its depth");
    const CertifiedVector& theta = state.theta;
    const auto& params = state.params;

    auto add = [&](const std::string& name, std::size_t n, bool ok, std::string detail = {}) {
        report.checks.push_back({name, n, ok, std::move(detail)});
    };
    // Certified bracket lo <= x <= hi: pass, fail, or precision error.
    auto bracket = [&](const std::string& name, std::size_t n, const CertifiedScalar& x, const Rational& lo,
                       const Rational& hi) {
        if (x.lo() >= lo && x.hi() <= hi) {
            add(name, n, true);
            return;
        }
        if (x.hi() < lo || x.lo() > hi) {
            add(name, n, false, to_string(x) + " outside [" + text(lo) + ", " + text(hi) + "]");
            return;
        }
        fail(ErrorKind::precision, name + " at n = " + std::to_string(n) +
                                       " is inconclusive; rebuild with more steps for a smaller radius");
    };

    // Structural checks; a damaged transcript is reported, never thrown.
    for (std::size_t n = 0; n < st.size(); ++n) {
        add("primitive_delta", n, is_primitive(st[n].delta), to_string(st[n].delta));
        add("primitive_point", n, is_primitive(st[n].point), to_string(st[n].point));
        add("incidence", n, dot(st[n].delta, st[n].point) == 0);
        add("height_delta", n, st[n].h == sup_norm(st[n].delta));
        add("height_point", n, st[n].q == sup_norm(st[n].point));
        if (n < params.h_target.size())
            add("sandwich_h", n, 2 * st[n].h >= params.h_target[n] && st[n].h <= 2 * params.h_target[n]);
        if (n < params.a.size())
            add("sandwich_q", n, 2 * st[n].q >= params.q_target(n) && st[n].q <= 2 * params.q_target(n));
    }
    for (std::size_t n = 0; n + 1 < st.size(); ++n) {
        add("incidence_next", n, dot(st[n + 1].delta, st[n].point) == 0);
        add("wedge_delta", n, wedge(st[n].delta, st[n + 1].delta) == st[n].point);
        add("wedge_point", n, wedge(st[n].point, st[n + 1].point) == st[n + 1].delta);
        add("unit_pairing", n, dot(st[n].delta, st[n + 1].point) == 1);
    }

    bool geometric = true;
    for (const auto& s : st)
        geometric = geometric && !s.point.is_zero() && s.point.z != 0 && s.q != 0;
    if (geometric) {
        Rational d0 = projective_distance(LatticePoint3(0, 0, 1), st[0].point);
        add("origin_distance", 0, d0 < Rational(1, 32), text(d0));
        Rational sharp = make_rational(1, Integer(1) << 18) / 27;
        Rational prev = 0;
        Rational scale = 1;
        for (std::size_t n = 0; n + 1 < st.size(); ++n) {
            Rational dn = projective_distance(st[n].point, st[n + 1].point);
            scale /= 32;
            add("crude_decay", n, dn <= scale, text(dn));
            if (n >= 1)
                add("sharp_decay", n, dn <= sharp * prev, text(dn / prev));
            prev = dn;
        }
        Rational tnorm = sup_norm(std::span<const Rational>(theta.coords)) + theta.radius;
        add("theta_norm", N, tnorm <= Rational(1, 8), text(tnorm));

        for (std::size_t n = 0; n < N; ++n) {
            Rational dn = make_rational(st[n + 1].h, st[n].q * st[n + 1].q);
            CertifiedScalar gap(affine_gap(st[n].point, theta.coords), theta.radius);
            bracket("point_enclosure", n, gap, dn / 2, Rational(3, 2) * dn);

            CertifiedScalar pair = pairing_magnitude(st[n].delta, theta);
            bracket("pairing_enclosure", n, pair, make_rational(3, 4 * st[n + 1].q), make_rational(5, 4 * st[n + 1].q));

            CertifiedScalar dist = certified_dist_nearest_lattice(st[n].q, theta);
            bracket("distance_enclosure", n, dist, make_rational(st[n + 1].h, 2 * st[n + 1].q),
                    make_rational(3 * st[n + 1].h, 2 * st[n + 1].q));

            if (n + 1 < params.a.size()) {
                CertifiedScalar scaled = Rational(st[n + 1].h * st[n + 1].h) * pair;
                bracket("height_normalized_pairing", n, scaled, make_rational(3, 32 * params.a[n + 1]),
                        make_rational(10, params.a[n + 1]));
            }
        }

        // Exceptional returns: ||q theta|| > ||q_n theta|| for 0 < q < q_{n+1}, q != q_n, q_{n+1} - q_n.
        std::size_t depth = 0;
        if (options.depth_bruteforce) {
            depth = std::min(*options.depth_bruteforce, N);
        } else {
            while (depth < N && st[depth + 1].q <= options.scan_limit)
                ++depth;
        }
        report.bruteforce_depth = depth;
        const std::vector<u128> th{to_fixed128(theta.coords[0]), to_fixed128(theta.coords[1])};
        const u128 unit = saturating_add(1, ceil_units128(theta.radius));
        // q in [1, q_{n+1}) other than the allowed exceptions with ||q theta|| <= ||q_n theta||.
        auto violations_below = [&](std::size_t n, bool iterate) {
            std::vector<Integer> bad;
            CertifiedScalar ref = certified_dist_nearest_lattice(st[n].q, theta);
            auto judge = [&](const Integer& q) {
                if (q == st[n].q || q == st[n + 1].q - st[n].q)
                    return;
                Verdict v = compare(certified_dist_nearest_lattice(q, theta), ref);
                if (v == Verdict::greater)
                    return;
                if (v == Verdict::inconclusive)
                    fail(ErrorKind::precision, "exceptional-return check undecided at q = " + q.get_str() +
                                                   "; rebuild with more steps");
                bad.push_back(q);
            };
            if (iterate) {
                const std::uint64_t qn1 = st[n + 1].q.get_ui();
                const u128 ref_units = ceil_units128(ref.hi());
                u128 a0 = 0, a1 = 0;
                for (std::uint64_t q = 1; q < qn1; ++q) {
                    a0 += th[0];
                    a1 += th[1];
                    u128 f = std::max(circle_distance(a0), circle_distance(a1));
                    if (f > ref_units && f - ref_units > saturating_mul(q, unit))
                        continue;
                    judge(Integer(static_cast<unsigned long>(q)));
                }
            } else {
                Rational radius = ref.hi() + Rational(st[n + 1].q) * theta.radius;
                ReturnSearch search(theta.coords, Integer(1), st[n + 1].q - 1, radius);
                RationalVector origin{Rational(0), Rational(0)};
                for (const auto& q : search.candidates(origin))
                    judge(q);
            }
            return bad;
        };
        auto summary = [](const std::vector<Integer>& bad) {
            return bad.empty() ? std::string() : "q = " + bad.front().get_str();
        };
        for (std::size_t n = 0; n < depth; ++n) {
            // Beyond the iteration budget the complete lattice enumeration stands in for the loop.
            bool iterate = st[n + 1].q <= options.scan_budget;
            auto bad = violations_below(n, iterate);
            add("exceptional_returns_scan", n, bad.empty(),
                summary(bad) + (iterate ? "" : (bad.empty() ? "lattice enumeration" : " (lattice enumeration)")));
        }

        // Best simultaneous approximations below q_{depth}: only q_k and q_{k+1} - q_k from q_0 on.
        std::size_t record_depth = 0;
        while (record_depth < depth && st[record_depth + 1].q <= options.scan_budget)
            ++record_depth;
        if (record_depth >= 1) {
            const std::size_t depth = record_depth;
            ScanOptions so;
            so.budget = options.scan_budget * 2;
            auto records = best_simultaneous(theta, st[depth].q.get_ui() - 1, so);
            std::set<Integer> allowed;
            std::set<Integer> required;
            for (std::size_t k = 0; k < depth; ++k) {
                allowed.insert(st[k].q);
                required.insert(st[k].q);
                allowed.insert(st[k + 1].q - st[k].q);
            }
            std::set<Integer> seen;
            bool ok = true;
            std::string detail;
            for (const auto& r : records) {
                seen.insert(r.q);
                if (r.q >= st[0].q && !allowed.count(r.q)) {
                    ok = false;
                    detail = "unexpected record q = " + r.q.get_str();
                }
            }
            for (const auto& q : required)
                if (!seen.count(q)) {
                    ok = false;
                    detail = "missing record q = " + q.get_str();
                }
            add("simultaneous_records", depth, ok, detail);
            for (std::size_t k = 0; k < depth; ++k) {
                ExceptionalCandidate e;
                e.n = k;
                e.q = st[k + 1].q - st[k].q;
                e.against_q_n = compare(certified_dist_nearest_lattice(e.q, theta),
                                        certified_dist_nearest_lattice(st[k].q, theta));
                e.scanned = true;
                e.is_record = seen.count(e.q) > 0;
                report.exceptional.push_back(std::move(e));
            }
        }

        if (options.return_search) {
            for (std::size_t n = 0; n < N; ++n) {
                auto bad = violations_below(n, false);
                add("exceptional_returns_lattice", n, bad.empty(), summary(bad));
            }
        }
        for (std::size_t n = report.exceptional.size(); n < N; ++n) {
            ExceptionalCandidate e;
            e.n = n;
            e.q = st[n + 1].q - st[n].q;
            e.against_q_n = compare(certified_dist_nearest_lattice(e.q, theta),
                                    certified_dist_nearest_lattice(st[n].q, theta));
            report.exceptional.push_back(std::move(e));
        }

        // Linear best approximations up to h_1 contain (r_0, s_0) and (r_1, s_1).
        if (options.linear_records && N >= 1) {
            const Integer& h1 = st[1].h;
            Integer evals = (2 * h1 + 1) * (2 * h1 + 1) / 2;
            if (evals <= options.scan_budget) {
                ScanOptions so;
                so.budget = options.scan_budget;
                auto records = best_linear(theta, h1.get_ui(), so);
                auto canonical = [](const LatticePoint3& d) {
                    IntegerVector v{d.x, d.y};
                    if (v[0] < 0 || (v[0] == 0 && v[1] < 0)) {
                        v[0] = -v[0];
                        v[1] = -v[1];
                    }
                    return v;
                };
                for (std::size_t k = 0; k <= 1; ++k) {
                    IntegerVector want = canonical(st[k].delta);
                    bool found = std::any_of(records.begin(), records.end(),
                                             [&](const ApproxRecord& r) { return r.delta == want; });
                    add("linear_records", k, found, "(" + want[0].get_str() + ", " + want[1].get_str() + ")");
                }
            }
        }
    } else {
        add("geometry", 0, false, "a point has a zero last coordinate");
    }
    return report;
}

}  // namespace shrinktarget
