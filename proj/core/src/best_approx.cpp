#include "shrinktarget/best_approx.hpp"

#include "shrinktarget/errors.hpp"
#include "shrinktarget/fixed_point.hpp"

#include <algorithm>
#include <limits>

namespace shrinktarget {

namespace {

std::uint64_t saturating_mul64(std::uint64_t a, std::uint64_t b)
{
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
        return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

std::uint64_t saturating_pow64(std::uint64_t base, std::size_t e)
{
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < e; ++i)
        r = saturating_mul64(r, base);
    return r;
}

void check_theta(const CertifiedVector& theta)
{
    require(theta.dim() >= 1, ErrorKind::dimension, "theta must have at least one coordinate");
}

std::vector<u128> fixed_coords(const CertifiedVector& theta)
{
    std::vector<u128> out;
    for (const auto& c : theta.coords)
        out.push_back(to_fixed128(c));
    return out;
}

u128 fixed_linear_form(const std::vector<long long>& s, const std::vector<u128>& th)
{
    u128 acc = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        acc += static_cast<u128>(static_cast<__int128>(s[i])) * th[i];
    return acc;
}

std::uint64_t l1_norm(const std::vector<long long>& s)
{
    std::uint64_t n = 0;
    for (auto v : s)
        n += static_cast<std::uint64_t>(v < 0 ? -v : v);
    return n;
}

IntegerVector to_integers(const std::vector<long long>& s)
{
    IntegerVector out;
    for (auto v : s)
        out.push_back(Integer(static_cast<long>(v)));
    return out;
}

std::string vector_text(const IntegerVector& s)
{
    std::string out = "(";
    for (std::size_t i = 0; i < s.size(); ++i)
        out += (i ? ", " : "") + s[i].get_str();
    return out + ")";
}

bool canonical_sign(const std::vector<long long>& s)
{
    for (auto v : s) {
        if (v > 0)
            return true;
        if (v < 0)
            return false;
    }
    return false;
}

// Calls f(s) for every canonical vector of sup norm exactly h.
template <typename F>
void for_each_shell_vector(std::size_t d, long long h, F&& f)
{
    std::vector<long long> s(d);
    for (std::size_t lead = 0; lead < d; ++lead) {
        // Coordinates before `lead` have |s_i| < h, s_lead = +-h, later coordinates are free in [-h, h].
        for (long long sign : {1LL, -1LL}) {
            std::vector<long long> lo(d), hi(d);
            for (std::size_t i = 0; i < d; ++i) {
                if (i < lead) {
                    lo[i] = -(h - 1);
                    hi[i] = h - 1;
                } else if (i == lead) {
                    lo[i] = hi[i] = sign * h;
                } else {
                    lo[i] = -h;
                    hi[i] = h;
                }
            }
            s = lo;
            while (true) {
                if (canonical_sign(s))
                    f(s);
                bool advanced = false;
                for (std::size_t k = d; k-- > 0;) {
                    if (s[k] < hi[k]) {
                        ++s[k];
                        for (std::size_t t = k + 1; t < d; ++t)
                            s[t] = lo[t];
                        advanced = true;
                        break;
                    }
                }
                if (!advanced)
                    break;
            }
        }
    }
}

struct LinearCandidate {
    std::vector<long long> s;
    u128 f;
};

// Exact minimum among candidates; ties between exact values go to the smallest norm, then lexicographic order.
ApproxRecord certify_linear_minimum(const CertifiedVector& theta, std::vector<LinearCandidate>& cands)
{
    require(!cands.empty(), ErrorKind::internal, "no candidates to certify");
    struct Evaluated {
        IntegerVector s;
        CertifiedScalar v;
        Integer norm;
    };
    std::vector<Evaluated> ev;
    ev.reserve(cands.size());
    for (const auto& c : cands) {
        IntegerVector s = to_integers(c.s);
        CertifiedScalar v = certified_linear_form_distance(s, theta);
        Integer n = sup_norm(std::span<const Integer>(s));
        ev.push_back({std::move(s), std::move(v), std::move(n)});
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < ev.size(); ++i) {
        const auto& a = ev[i];
        const auto& b = ev[best];
        if (a.v.value() < b.v.value() ||
            (a.v.value() == b.v.value() && (a.norm < b.norm || (a.norm == b.norm && a.s < b.s))))
            best = i;
    }
    for (std::size_t i = 0; i < ev.size(); ++i) {
        if (i == best)
            continue;
        Verdict v = compare(ev[best].v, ev[i].v);
        if (v == Verdict::inconclusive)
            fail(ErrorKind::precision, "cannot separate linear forms " + vector_text(ev[best].s) + " and " +
                                           vector_text(ev[i].s) + " at the given theta radius");
    }
    ApproxRecord r;
    r.delta = ev[best].s;
    r.value = ev[best].v;
    return r;
}

}  // namespace

Integer ApproxRecord::size() const
{
    if (is_linear())
        return sup_norm(std::span<const Integer>(delta));
    return q;
}

std::vector<ApproxRecord> best_simultaneous(const CertifiedVector& theta, std::uint64_t q_max,
                                            const ScanOptions& options)
{
    check_theta(theta);
    const std::size_t d = theta.dim();
    require(saturating_mul64(q_max, d) <= options.budget, ErrorKind::resource,
            "simultaneous scan to q_max = " + std::to_string(q_max) + " exceeds the evaluation budget");

    const std::vector<u128> step = fixed_coords(theta);
    std::vector<u128> acc(d, 0);
    const u128 unit = saturating_add(1, ceil_units128(theta.radius));

    std::vector<ApproxRecord> records;
    u128 best_f = 0;
    std::uint64_t best_q = 0;
    for (std::uint64_t q = 1; q <= q_max; ++q) {
        u128 f = 0;
        for (std::size_t i = 0; i < d; ++i) {
            acc[i] += step[i];
            u128 di = circle_distance(acc[i]);
            if (di > f)
                f = di;
        }
        if (!records.empty() && f > best_f) {
            u128 margin = saturating_mul(static_cast<u128>(q) + best_q, unit);
            if (f - best_f > margin)
                continue;
        }
        CertifiedScalar v = certified_dist_nearest_lattice(Integer(static_cast<unsigned long>(q)), theta);
        if (!records.empty()) {
            Verdict verdict = compare(v, records.back().value);
            if (verdict == Verdict::greater || verdict == Verdict::equal)
                continue;
            if (verdict == Verdict::inconclusive)
                fail(ErrorKind::precision, "cannot decide whether q = " + std::to_string(q) + " improves on q = " +
                                               std::to_string(best_q) + " at the given theta radius");
        }
        ApproxRecord r;
        r.q = Integer(static_cast<unsigned long>(q));
        r.value = v;
        r.index = records.size();
        records.push_back(std::move(r));
        best_f = f;
        best_q = q;
        if (v.value() == 0)
            break;
    }
    return records;
}

std::vector<ApproxRecord> best_linear(const CertifiedVector& theta, std::uint64_t h_max, const ScanOptions& options)
{
    check_theta(theta);
    const std::size_t d = theta.dim();
    if (d == 1) {
        auto records = best_simultaneous(theta, h_max, options);
        for (auto& r : records)
            r.delta = {r.q};
        return records;
    }
    require(h_max < (1ULL << 40), ErrorKind::resource, "linear scan radius too large");
    require(saturating_pow64(2 * h_max + 1, d) / 2 <= options.budget, ErrorKind::resource,
            "linear scan to h_max = " + std::to_string(h_max) + " exceeds the evaluation budget");

    const std::vector<u128> th = fixed_coords(theta);
    const u128 unit = saturating_add(1, ceil_units128(theta.radius));

    std::vector<ApproxRecord> records;
    u128 best_f = 0;
    u128 best_margin = 0;
    std::vector<LinearCandidate> cands;
    for (std::uint64_t h = 1; h <= h_max; ++h) {
        const u128 shell_margin = saturating_mul(static_cast<u128>(d * h), unit);
        u128 shell_min = k_u128_max;
        cands.clear();
        for_each_shell_vector(d, static_cast<long long>(h), [&](const std::vector<long long>& s) {
            u128 f = circle_distance(fixed_linear_form(s, th));
            if (f < shell_min)
                shell_min = f;
            if (f <= saturating_add(shell_min, 2 * shell_margin))
                cands.push_back({s, f});
        });
        if (!records.empty() && shell_min > best_f &&
            shell_min - best_f > saturating_add(best_margin, shell_margin))
            continue;
        const u128 cut = saturating_add(shell_min, 2 * shell_margin);
        std::erase_if(cands, [&](const LinearCandidate& c) { return c.f > cut; });

        // Cheap exit: if no candidate can beat the record, skip the exact certification of the shell.
        if (!records.empty()) {
            bool any = false;
            for (const auto& c : cands) {
                CertifiedScalar v = certified_linear_form_distance(to_integers(c.s), theta);
                if (compare(v, records.back().value) != Verdict::greater &&
                    compare(v, records.back().value) != Verdict::equal) {
                    any = true;
                    break;
                }
            }
            if (!any)
                continue;
        }
        ApproxRecord shell = certify_linear_minimum(theta, cands);
        if (!records.empty()) {
            Verdict verdict = compare(shell.value, records.back().value);
            if (verdict == Verdict::greater || verdict == Verdict::equal)
                continue;
            if (verdict == Verdict::inconclusive)
                fail(ErrorKind::precision, "cannot decide whether " + vector_text(shell.delta) + " improves on " +
                                               vector_text(records.back().delta) + " at the given theta radius");
        }
        shell.index = records.size();
        std::uint64_t n1 = 0;
        for (const auto& c : cands)
            if (to_integers(c.s) == shell.delta)
                n1 = l1_norm(c.s);
        for (const auto& c : cands)
            if (to_integers(c.s) == shell.delta)
                best_f = c.f;
        best_margin = saturating_mul(static_cast<u128>(n1), unit);
        records.push_back(std::move(shell));
        if (records.back().value.value() == 0)
            break;
    }
    return records;
}

ApproxRecord eps_s(const CertifiedVector& theta, const Rational& h, const ScanOptions& options)
{
    require(h >= 1, ErrorKind::domain, "eps_s needs h >= 1");
    Integer hf = floor_of(h);
    require(hf.fits_ulong_p(), ErrorKind::resource, "eps_s scale too large");
    auto records = best_simultaneous(theta, hf.get_ui(), options);
    return records.back();
}

ApproxRecord eps_l(const CertifiedVector& theta, const Rational& h, const ScanOptions& options)
{
    check_theta(theta);
    require(h >= 1, ErrorKind::domain, "eps_l needs h >= 1");
    const std::size_t d = theta.dim();
    Integer hf = floor_of(h);
    require(hf < Integer(1UL << 40), ErrorKind::resource, "eps_l scale too large");
    const auto hmax = static_cast<long long>(hf.get_ui());
    if (d == 1) {
        ApproxRecord r = eps_s(theta, h, options);
        r.delta = {r.q};
        return r;
    }
    const auto side = static_cast<std::uint64_t>(2 * hmax + 1);
    require(saturating_pow64(side, d - 1) <= options.budget, ErrorKind::resource,
            "eps_l at h = " + hf.get_str() + " needs " + std::to_string(saturating_pow64(side, d - 1)) +
                " evaluations, over the budget of " + std::to_string(options.budget));

    const std::vector<u128> th = fixed_coords(theta);
    const u128 unit = saturating_add(1, ceil_units128(theta.radius));
    const u128 margin = saturating_add(saturating_mul(static_cast<u128>(d) * static_cast<u128>(hmax), unit), d);
    const std::size_t last = d - 1;

    std::vector<std::pair<u128, long long>> table;
    table.reserve(side);
    for (long long s = -hmax; s <= hmax; ++s)
        table.emplace_back(static_cast<u128>(static_cast<__int128>(s)) * th[last], s);
    std::sort(table.begin(), table.end());

    u128 best = k_u128_max;
    std::vector<LinearCandidate> cands;
    auto consider = [&](const std::vector<long long>& s, u128 f) {
        if (f > saturating_add(best, 2 * margin))
            return;
        cands.push_back({s, f});
        if (f < best) {
            best = f;
            if (cands.size() > 4096) {
                const u128 cut = saturating_add(best, 2 * margin);
                std::erase_if(cands, [&](const LinearCandidate& c) { return c.f > cut; });
            }
        }
    };

    std::vector<long long> s(d, 0);
    for (long long v = 1; v <= hmax; ++v) {
        s[last] = v;
        consider(s, circle_distance(static_cast<u128>(v) * th[last]));
    }

    std::vector<long long> prefix(last, -hmax);
    const std::size_t n = table.size();
    while (true) {
        if (canonical_sign(prefix)) {
            u128 c = 0;
            for (std::size_t i = 0; i < last; ++i)
                c += static_cast<u128>(static_cast<__int128>(prefix[i])) * th[i];
            const u128 target = static_cast<u128>(-c);
            std::size_t idx = static_cast<std::size_t>(
                std::lower_bound(table.begin(), table.end(), std::make_pair(target, std::numeric_limits<long long>::min())) -
                table.begin());
            std::copy(prefix.begin(), prefix.end(), s.begin());
            for (std::size_t k = 0; k < n; ++k) {
                const auto& e = table[(idx + k) % n];
                u128 gap = e.first - target;
                if (gap > saturating_add(best, 2 * margin))
                    break;
                s[last] = e.second;
                consider(s, circle_distance(c + e.first));
            }
            for (std::size_t k = 1; k <= n; ++k) {
                const auto& e = table[(idx + n - k) % n];
                u128 gap = target - e.first;
                if (gap > saturating_add(best, 2 * margin))
                    break;
                s[last] = e.second;
                consider(s, circle_distance(c + e.first));
            }
        }
        std::size_t k = last;
        bool done = true;
        while (k > 0) {
            --k;
            if (prefix[k] < hmax) {
                ++prefix[k];
                for (std::size_t t = k + 1; t < last; ++t)
                    prefix[t] = -hmax;
                done = false;
                break;
            }
        }
        if (done)
            break;
    }
    const u128 cut = saturating_add(best, 2 * margin);
    std::erase_if(cands, [&](const LinearCandidate& c) { return c.f > cut; });
    return certify_linear_minimum(theta, cands);
}

const ApproxRecord& record_at(const std::vector<ApproxRecord>& records, const Integer& h)
{
    require(!records.empty() && records.front().size() <= h, ErrorKind::domain,
            "step function evaluated below its first record");
    std::size_t best = 0;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (records[i].size() <= h)
            best = i;
    return records[best];
}

ContinuedFraction continued_fraction(const Rational& x, std::size_t max_terms)
{
    require(x > 0 && x < 1, ErrorKind::domain, "continued_fraction needs 0 < x < 1");
    require(max_terms >= 1, ErrorKind::domain, "continued_fraction needs max_terms >= 1");
    ContinuedFraction cf;
    Integer num = x.get_num();
    Integer den = x.get_den();
    // p_{-2} = 0, p_{-1} = 1, q_{-2} = 1, q_{-1} = 0
    Integer pm2 = 0, pm1 = 1, qm2 = 1, qm1 = 0;
    while (cf.partial_quotients.size() < max_terms) {
        Integer a;
        mpz_fdiv_q(a.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
        Integer r = num - a * den;
        cf.partial_quotients.push_back(a);
        Integer pn = a * pm1 + pm2;
        Integer qn = a * qm1 + qm2;
        cf.convergents.push_back(make_rational(pn, qn));
        cf.denominators.push_back(qn);
        pm2 = pm1;
        pm1 = pn;
        qm2 = qm1;
        qm1 = qn;
        if (r == 0) {
            cf.terminated = true;
            break;
        }
        num = den;
        den = r;
    }
    return cf;
}

Rational evaluate_continued_fraction(const IntegerVector& partial_quotients)
{
    require(!partial_quotients.empty(), ErrorKind::domain, "empty continued fraction");
    Rational x(partial_quotients.back());
    for (std::size_t i = partial_quotients.size() - 1; i-- > 0;) {
        require(x != 0, ErrorKind::domain, "zero partial quotient inside a continued fraction");
        x = Rational(partial_quotients[i]) + 1 / x;
    }
    return x;
}

CertifiedVector sqrt2_minus_1(std::size_t terms)
{
    require(terms >= 1, ErrorKind::domain, "need at least one partial quotient");
    IntegerVector pq(terms + 1, Integer(2));
    pq[0] = 0;
    Rational c = evaluate_continued_fraction(pq);
    Integer qk = c.get_den();
    // q_{k+1} = 2 q_k + q_{k-1} >= 2 q_k
    Integer qm = 1, qn = 2;  // q_0 = 1, q_1 = 2
    while (qn != qk) {
        Integer t = 2 * qn + qm;
        qm = qn;
        qn = t;
    }
    Integer qnext = 2 * qn + qm;
    return CertifiedVector({c}, make_rational(1, qk * qnext));
}

}  // namespace shrinktarget
