#include "shrinktarget/criteria.hpp"

#include "shrinktarget/errors.hpp"

#include <algorithm>

namespace shrinktarget {

namespace {

void finish(SeriesReport& report, const SeriesOptions& options)
{
    CertifiedScalar sum;
    for (const auto& t : report.terms) {
        sum += t.value;
        report.partial_sums.push_back(sum);
    }
    std::size_t start = report.terms.size() > options.tail_window ? report.terms.size() - options.tail_window : 0;
    CertifiedScalar tail;
    for (std::size_t i = start; i < report.terms.size(); ++i)
        tail += report.terms[i].value;
    report.tail_estimate = tail;
}

Integer to_integer_u64(std::uint64_t v)
{
    Integer r(static_cast<unsigned long>(v >> 32));
    r <<= 32;
    return r + static_cast<unsigned long>(v & 0xffffffffULL);
}

void check_dimension(const CertifiedVector& theta, std::size_t size)
{
    require(theta.dim() >= 1, ErrorKind::dimension, "theta must have at least one coordinate");
    require(size == theta.dim(), ErrorKind::dimension,
            "vector of length " + std::to_string(size) + " paired with theta of dimension " +
                std::to_string(theta.dim()));
}

// Sup norms of xs[0..count) must increase strictly from a positive start.
void check_increasing(const std::vector<IntegerVector>& xs, std::size_t count)
{
    Integer prev = 0;
    for (std::size_t i = 0; i < count; ++i) {
        Integer n = sup_norm(std::span<const Integer>(xs[i]));
        require(n > prev, ErrorKind::domain,
                "norms must increase strictly; |X_" + std::to_string(i) + "| = " + n.get_str());
        prev = n;
    }
}

CertifiedScalar nonzero(const CertifiedScalar& eps, const std::string& what)
{
    require(eps.hi() > 0, ErrorKind::degenerate, what + " vanishes (rational relation)");
    return eps;
}

// a / b for enclosures of positive quantities.
CertifiedScalar divide_positive(const CertifiedScalar& a, const CertifiedScalar& b)
{
    require(b.lo() > 0, ErrorKind::precision, "divisor enclosure reaches zero");
    Rational lo = std::max(a.lo(), Rational(0));
    return CertifiedScalar::from_bounds(lo / b.hi(), a.hi() / b.lo());
}

CertifiedScalar power_of_enclosure(const CertifiedScalar& x, unsigned long k)
{
    CertifiedScalar r(1);
    for (unsigned long i = 0; i < k; ++i)
        r = multiply_nonnegative(r, x);
    return r;
}

std::vector<ApproxRecord> linear_records(const CertifiedVector& theta, std::uint64_t h_max, const ScanOptions& scan)
{
    require(h_max >= 1, ErrorKind::domain, "linear scan needs h >= 1");
    return best_linear(theta, h_max, scan);
}

// Sum of the harmonic terms (eps_l(k) / k)^(1/(delta+1)) for k = 1..k_max.
std::vector<SeriesTerm> harmonic_terms(const std::vector<ApproxRecord>& records, std::uint64_t k_max,
                                       const Rational& delta, unsigned rel_bits)
{
    std::vector<SeriesTerm> terms;
    const Rational e = 1 / (delta + 1);
    for (std::uint64_t k = 1; k <= k_max; ++k) {
        const ApproxRecord& r = record_at(records, Integer(static_cast<unsigned long>(k)));
        Rational inv = make_rational(1, Integer(static_cast<unsigned long>(k)));
        terms.push_back({static_cast<std::size_t>(k), pow_enclosure(inv * r.value, e, rel_bits)});
    }
    return terms;
}

CertifiedScalar dyadic_term(const std::vector<ApproxRecord>& records, std::size_t n, std::size_t d, unsigned rel_bits)
{
    Integer scale = Integer(1) << static_cast<unsigned long>(n);
    const ApproxRecord& r = record_at(records, scale);
    Rational factor(Integer(1) << static_cast<unsigned long>(n * d));
    return pow_enclosure(factor * r.value, Rational(1, static_cast<long>(d + 1)), rel_bits);
}

CertifiedScalar sum_of(const std::vector<SeriesTerm>& terms)
{
    CertifiedScalar s;
    for (const auto& t : terms)
        s += t.value;
    return s;
}

}  // namespace

CertifiedScalar SeriesReport::total() const
{
    return partial_sums.empty() ? CertifiedScalar() : partial_sums.back();
}

SeriesReport linear_window_series(const CertifiedVector& theta, const std::vector<IntegerVector>& xs, std::size_t n,
                                  const SeriesOptions& options)
{
    SeriesReport report;
    report.label = "linear_window";
    if (n == 0)
        return report;
    require(xs.size() >= n + 1, ErrorKind::domain, "need N + 1 vectors");
    for (std::size_t i = 0; i <= n; ++i)
        check_dimension(theta, xs[i].size());
    check_increasing(xs, n + 1);
    const std::size_t d = theta.dim();
    const Rational e(1, static_cast<long>(d + 1));
    for (std::size_t i = 0; i < n; ++i) {
        CertifiedScalar eps = nonzero(certified_linear_form_distance(xs[i], theta), "||<X_" + std::to_string(i) + ", theta>||");
        Integer next = sup_norm(std::span<const Integer>(xs[i + 1]));
        Rational scale(pow_of(next, static_cast<unsigned long>(d)));
        report.terms.push_back({i, pow_enclosure(scale * eps, e, options.rel_bits)});
    }
    finish(report, options);
    return report;
}

SeriesReport harmonic_linear_series(const CertifiedVector& theta, std::uint64_t k_max, const Rational& delta,
                                    const SeriesOptions& options)
{
    require(k_max >= 1, ErrorKind::domain, "K must be at least 1");
    require(delta >= 1, ErrorKind::domain, "delta must be at least 1");
    SeriesReport report;
    report.label = "harmonic_linear";
    auto records = linear_records(theta, k_max, options.scan);
    report.terms = harmonic_terms(records, k_max, delta, options.rel_bits);
    finish(report, options);
    return report;
}

SeriesReport dyadic_linear_series(const CertifiedVector& theta, std::size_t n, const SeriesOptions& options)
{
    SeriesReport report;
    report.label = "dyadic_linear";
    if (n == 0)
        return report;
    require(n <= 62, ErrorKind::resource, "dyadic scale 2^" + std::to_string(n - 1) + " exceeds the scan range");
    const std::size_t d = theta.dim();
    std::uint64_t top = std::uint64_t{1} << (n - 1);
    auto records = linear_records(theta, top, options.scan);
    for (std::size_t i = 0; i < n; ++i)
        report.terms.push_back({i, dyadic_term(records, i, d, options.rel_bits)});
    finish(report, options);
    return report;
}

SeriesReport simultaneous_series(const CertifiedVector& theta, const IntegerVector& qs, std::size_t n,
                                 const SeriesOptions& options)
{
    SeriesReport report;
    report.label = "simultaneous";
    if (n == 0)
        return report;
    require(qs.size() >= n + 1, ErrorKind::domain, "need N + 1 denominators");
    for (std::size_t i = 0; i <= n; ++i) {
        require(qs[i] > 0, ErrorKind::domain, "denominators must be positive");
        if (i > 0)
            require(qs[i] > qs[i - 1], ErrorKind::domain,
                    "denominators must increase strictly: q_" + std::to_string(i) + " = " + qs[i].get_str());
    }
    const std::size_t d = theta.dim();
    require(d >= 1, ErrorKind::dimension, "theta must have at least one coordinate");
    // (q_n^(1/d) e)^(1/(d+1)) = (q_n e^d)^(1/(d(d+1)))
    const Rational e(1, static_cast<long>(d * (d + 1)));
    for (std::size_t i = 1; i <= n; ++i) {
        CertifiedScalar dist = certified_dist_nearest_lattice(qs[i - 1], theta);
        CertifiedScalar inner = Rational(qs[i]) * power_of_enclosure(dist, d);
        report.terms.push_back({i, pow_enclosure(inner, e, options.rel_bits)});
    }
    finish(report, options);
    return report;
}

bool DyadicBracket::holds() const
{
    auto ok = [](Verdict v) { return v == Verdict::less || v == Verdict::equal; };
    return ok(lower_holds) && ok(upper_holds);
}

DyadicBracket dyadic_bracket(const CertifiedVector& theta, std::size_t j, const SeriesOptions& options)
{
    require(j >= 1 && j <= 40, ErrorKind::domain, "dyadic bracket needs 1 <= J <= 40");
    const std::size_t d = theta.dim();
    require(d >= 1, ErrorKind::dimension, "theta must have at least one coordinate");
    const std::uint64_t top = std::uint64_t{1} << j;
    auto records = linear_records(theta, top, options.scan);

    DyadicBracket b;
    b.harmonic = sum_of(harmonic_terms(records, top - 1, Rational(static_cast<long>(d)), options.rel_bits));
    CertifiedScalar low_sum, high_sum;
    for (std::size_t n = 0; n <= j; ++n) {
        CertifiedScalar t = dyadic_term(records, n, d, options.rel_bits);
        if (n >= 1)
            low_sum += t;
        if (n < j)
            high_sum += t;
    }
    const Rational dd(static_cast<long>(d));
    CertifiedScalar low_const = pow_enclosure(Rational(1, 2), 1 + dd / (dd + 1), options.rel_bits);
    CertifiedScalar high_const = pow_enclosure(Rational(2), dd / (dd + 1), options.rel_bits);
    b.lower = multiply_nonnegative(low_const, low_sum);
    b.upper = multiply_nonnegative(high_const, high_sum);
    b.lower_holds = compare(b.lower, b.harmonic);
    b.upper_holds = compare(b.harmonic, b.upper);
    return b;
}

TransferReport transfer_check(const CertifiedVector& theta, const Rational& h, const ScanOptions& options)
{
    const std::size_t d = theta.dim();
    require(d >= 1, ErrorKind::dimension, "theta must have at least one coordinate");
    require(h >= 1, ErrorKind::domain, "transfer needs h >= 1");
    TransferReport r;
    r.h = h;
    r.c = Rational(1, static_cast<long>(2 * (d + 1)));
    Rational scale = r.c * pow_of(h, static_cast<unsigned long>(d));
    require(scale >= 1, ErrorKind::domain, "C h^d = " + scale.get_str() + " < 1 leaves no simultaneous witness");
    r.lhs = eps_l(theta, h, options).value;
    Rational divisor = r.c * pow_of(h, static_cast<unsigned long>(d - 1));
    r.rhs = (1 / divisor) * eps_s(theta, scale, options).value;
    Verdict v = compare(r.lhs, r.rhs);
    require(v != Verdict::inconclusive, ErrorKind::precision,
            "transfer comparison undecided at h = " + h.get_str() + "; tighten theta");
    r.holds = v != Verdict::greater;
    return r;
}

std::vector<TransferReport> transfer_sweep(const CertifiedVector& theta, const std::vector<Rational>& hs,
                                           const ScanOptions& options)
{
    const std::size_t d = theta.dim();
    require(d >= 1, ErrorKind::dimension, "theta must have at least one coordinate");
    std::vector<TransferReport> out;
    if (hs.empty())
        return out;
    const Rational c(1, static_cast<long>(2 * (d + 1)));
    Rational h_max = 0;
    for (const auto& h : hs) {
        require(h >= 1, ErrorKind::domain, "transfer needs h >= 1");
        require(c * pow_of(h, static_cast<unsigned long>(d)) >= 1, ErrorKind::domain,
                "C h^d < 1 at h = " + h.get_str());
        h_max = std::max(h_max, h);
    }
    Integer lin_top = floor_of(h_max);
    Integer sim_top = floor_of(c * pow_of(h_max, static_cast<unsigned long>(d)));
    require(lin_top.fits_ulong_p() && sim_top.fits_ulong_p(), ErrorKind::resource, "transfer sweep range too large");
    // One full linear scan when it fits the budget, otherwise eps_l per h.
    Integer full_scan = pow_of(Integer(2 * lin_top + 1), static_cast<unsigned long>(d)) / 2;
    const bool one_scan = full_scan <= to_integer_u64(options.budget);
    std::vector<ApproxRecord> linear;
    if (one_scan)
        linear = best_linear(theta, lin_top.get_ui(), options);
    auto simultaneous = best_simultaneous(theta, sim_top.get_ui(), options);
    for (const auto& h : hs) {
        TransferReport r;
        r.h = h;
        r.c = c;
        Rational scale = c * pow_of(h, static_cast<unsigned long>(d));
        r.lhs = one_scan ? record_at(linear, floor_of(h)).value : eps_l(theta, h, options).value;
        Rational divisor = c * pow_of(h, static_cast<unsigned long>(d - 1));
        r.rhs = (1 / divisor) * record_at(simultaneous, floor_of(scale)).value;
        Verdict v = compare(r.lhs, r.rhs);
        require(v != Verdict::inconclusive, ErrorKind::precision,
                "transfer comparison undecided at h = " + h.get_str() + "; tighten theta");
        r.holds = v != Verdict::greater;
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

TypeEvidence assemble(const Rational& tau, EvidenceMode mode, const std::vector<Integer>& sizes,
                      const std::vector<CertifiedScalar>& errors, const Rational& exponent, unsigned rel_bits)
{
    TypeEvidence ev;
    ev.mode = mode;
    ev.tau = tau;
    if (sizes.size() < 2)
        return ev;
    std::vector<CertifiedScalar> powers;
    for (const auto& s : sizes)
        powers.push_back(pow_enclosure(Rational(s), exponent, rel_bits));
    for (std::size_t n = 0; n + 1 < sizes.size(); ++n) {
        EvidenceSample s;
        s.n = n;
        s.size = sizes[n];
        s.error = errors[n];
        s.theta_scaled = multiply_nonnegative(powers[n + 1], errors[n]);
        s.omega_scaled = multiply_nonnegative(powers[n], errors[n]);
        ev.samples.push_back(std::move(s));
    }
    ev.running_inf = std::max(ev.samples.front().omega_scaled.lo(), Rational(0));
    for (const auto& s : ev.samples)
        ev.running_inf = std::min(ev.running_inf, std::max(s.omega_scaled.lo(), Rational(0)));
    ev.running_sup_of_tail = 0;
    for (std::size_t n = ev.samples.size() / 2; n < ev.samples.size(); ++n)
        ev.running_sup_of_tail = std::max(ev.running_sup_of_tail, ev.samples[n].theta_scaled.hi());
    return ev;
}

}  // namespace

TypeEvidence type_evidence(const CertifiedVector& theta, const Rational& tau, EvidenceMode mode, std::size_t depth,
                           const SeriesOptions& options)
{
    require(tau >= 0, ErrorKind::domain, "tau must be non-negative");
    const std::size_t d = theta.dim();
    require(d >= 1, ErrorKind::dimension, "theta must have at least one coordinate");
    if (depth == 0) {
        TypeEvidence ev;
        ev.mode = mode;
        ev.tau = tau;
        return ev;
    }
    std::vector<ApproxRecord> records;
    std::uint64_t limit = 64;
    for (;;) {
        records = mode == EvidenceMode::simultaneous ? best_simultaneous(theta, limit, options.scan)
                                                     : best_linear(theta, limit, options.scan);
        bool exhausted = !records.empty() && records.back().value.hi() == 0;
        if (records.size() >= depth + 1 || exhausted)
            break;
        require(limit <= std::uint64_t{1} << 40, ErrorKind::resource, "type evidence needs too many records");
        limit *= 4;
    }
    if (records.size() > depth + 1)
        records.resize(depth + 1);
    std::vector<Integer> sizes;
    std::vector<CertifiedScalar> errors;
    for (const auto& r : records) {
        sizes.push_back(r.size());
        errors.push_back(r.value);
    }
    const Rational dd(static_cast<long>(d));
    Rational exponent = mode == EvidenceMode::simultaneous ? Rational((1 + tau) / dd) : Rational(dd * (1 + tau));
    return assemble(tau, mode, sizes, errors, exponent, options.rel_bits);
}

TypeEvidence type_evidence_for(const CertifiedVector& theta, const Rational& tau, const IntegerVector& qs,
                               const SeriesOptions& options)
{
    require(tau >= 0, ErrorKind::domain, "tau must be non-negative");
    const std::size_t d = theta.dim();
    require(d >= 1, ErrorKind::dimension, "theta must have at least one coordinate");
    std::vector<CertifiedScalar> errors;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        require(qs[i] > 0 && (i == 0 || qs[i] > qs[i - 1]), ErrorKind::domain,
                "denominators must be positive and increasing");
        errors.push_back(certified_dist_nearest_lattice(qs[i], theta));
    }
    return assemble(tau, EvidenceMode::simultaneous, std::vector<Integer>(qs.begin(), qs.end()), errors,
                    (1 + tau) / Rational(static_cast<long>(d)), options.rel_bits);
}

WindowBound window_bound(const CertifiedVector& theta, const std::vector<IntegerVector>& xs, const Rational& delta,
                         std::size_t n, const SeriesOptions& options)
{
    require(delta >= 1, ErrorKind::domain, "delta must be at least 1");
    require(n >= 1 && n + 1 < xs.size(), ErrorKind::domain, "window needs X_{n-1}, X_n and X_{n+1}");
    for (std::size_t i = n - 1; i <= n + 1; ++i)
        check_dimension(theta, xs[i].size());
    const std::size_t d = theta.dim();
    WindowBound w;
    w.eps_prev = nonzero(certified_linear_form_distance(xs[n - 1], theta), "eps_{n-1}");
    w.eps = nonzero(certified_linear_form_distance(xs[n], theta), "eps_n");
    CertifiedScalar size_n(Rational(sup_norm(std::span<const Integer>(xs[n]))));
    CertifiedScalar size_next(Rational(sup_norm(std::span<const Integer>(xs[n + 1]))));
    const Rational e = delta / (delta + 1);
    w.l_n = pow_enclosure(divide_positive(size_n, w.eps_prev), e, options.rel_bits);
    w.l_next = pow_enclosure(divide_positive(size_next, w.eps), e, options.rel_bits);
    // L_n^(-1/delta) = (eps_{n-1} / |X_n|)^(1/(delta+1))
    CertifiedScalar shrink = pow_enclosure(divide_positive(w.eps_prev, size_n), 1 / (delta + 1), options.rel_bits);
    CertifiedScalar first = multiply_nonnegative(w.l_next, w.eps);
    CertifiedScalar second = multiply_nonnegative(Rational(static_cast<long>(d)) * shrink, size_n);
    w.bound = Rational(2) * (first + second);
    return w;
}

}  // namespace shrinktarget
