#include "shrinktarget/orbit.hpp"

#include "shrinktarget/errors.hpp"
#include "shrinktarget/fixed_point.hpp"
#include "shrinktarget/lattice_search.hpp"

#include <mpfr.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <thread>

namespace shrinktarget {

namespace {

constexpr std::size_t k_max_dim = 4;
constexpr std::uint64_t k_chunk = 1 << 15;
constexpr std::uint64_t k_iteration_budget = 200'000'000;

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Integer to_integer_u64(std::uint64_t v)
{
    Integer r(static_cast<unsigned long>(v >> 32));
    r <<= 32;
    r += static_cast<unsigned long>(v & 0xffffffffULL);
    return r;
}

Rational reduce_mod1(const Rational& x)
{
    return x - Rational(floor_of(x));
}

// delta = a / b; the threshold n^(-1/delta) is n^(-b/a).
struct Exponents {
    unsigned long a = 1, b = 1;
};

Exponents exponents_of(const Rational& delta)
{
    require(delta.get_num().fits_ulong_p() && delta.get_den().fits_ulong_p(), ErrorKind::config, "delta too large");
    require(delta.get_num() <= 64 && delta.get_den() <= 64, ErrorKind::config,
            "delta numerator and denominator must not exceed 64");
    return {delta.get_num().get_ui(), delta.get_den().get_ui()};
}

// y <= n^(-b/a) for y = units / 2^128.
bool below_threshold(u128 units, const Integer& n, const Exponents& ex)
{
    Integer lhs = pow_of(to_integer(units), ex.a) * pow_of(n, ex.b);
    return lhs <= (Integer(1) << static_cast<unsigned long>(128 * ex.a));
}

// y <= n^(-b/a) for rational y >= 0.
bool below_threshold(const Rational& y, const Integer& n, const Exponents& ex)
{
    return pow_of(y, ex.a) * Rational(pow_of(n, ex.b)) <= 1;
}

struct Threshold {
    u128 lo = 0, hi = 0;
    bool all = false;  // n^(-1/delta) >= 1/2 covers the whole torus
};

void fill_thresholds(std::vector<Threshold>& table, std::uint64_t n0, std::uint64_t count, const Exponents& ex)
{
    table.resize(count);
    const long double e = -static_cast<long double>(ex.b) / static_cast<long double>(ex.a);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint64_t n = n0 + i;
        Threshold& t = table[i];
        // n^(-b/a) >= 1/2 iff n^b <= 2^a
        Integer nb = pow_of(to_integer_u64(n), ex.b);
        t.all = nb <= (Integer(1) << ex.a);
        if (t.all)
            continue;
        long double units = std::ldexp(std::pow(static_cast<long double>(n), e), 128);
        long double margin = units * 0x1p-50L;
        t.lo = static_cast<u128>(std::max(units - margin, 0.0L));
        t.hi = static_cast<u128>(units + margin) + 1;
    }
}

enum class Decision { hit, miss, unknown };

Decision decide(u128 d, u128 e, std::uint64_t n, const Threshold& t, const Exponents& ex)
{
    if (t.all)
        return Decision::hit;
    u128 up = saturating_add(d, e);
    if (up <= t.lo)
        return Decision::hit;
    if (d > e && d - e > t.hi)
        return Decision::miss;
    Integer nn = to_integer_u64(n);
    if (below_threshold(up, nn, ex))
        return Decision::hit;
    if (d > e && !below_threshold(d - e, nn, ex))
        return Decision::miss;
    return Decision::unknown;
}

class MpfrValue {
public:
    MpfrValue() { mpfr_init2(v_, 160); }
    ~MpfrValue() { mpfr_clear(v_); }
    MpfrValue(const MpfrValue&) = delete;
    MpfrValue& operator=(const MpfrValue&) = delete;
    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }

private:
    mpfr_t v_;
};

// -log(units / 2^128) / log n, rounded up (upper) or down.
void log_ratio(MpfrValue& out, u128 units, std::uint64_t n, bool upper)
{
    MpfrValue x, ln;
    Integer z = to_integer(units);
    mpfr_set_z(x.get(), z.get_mpz_t(), MPFR_RNDN);  // exact at 160 bits
    mpfr_mul_2si(x.get(), x.get(), -128, MPFR_RNDN);
    mpfr_log(x.get(), x.get(), upper ? MPFR_RNDD : MPFR_RNDU);
    mpfr_neg(x.get(), x.get(), MPFR_RNDN);
    mpfr_set_z(ln.get(), to_integer_u64(n).get_mpz_t(), MPFR_RNDN);
    mpfr_log(ln.get(), ln.get(), upper ? MPFR_RNDD : MPFR_RNDU);
    mpfr_div(out.get(), x.get(), ln.get(), upper ? MPFR_RNDU : MPFR_RNDD);
}

Rational to_rational(const MpfrValue& v)
{
    Rational q;
    mpfr_get_q(q.get_mpq_t(), v.get());
    return q;
}

struct StatTracker {
    bool active = false;
    bool seen = false;
    bool broken = false;
    std::uint64_t broken_at = 0;
    long double best_hi_ld = -1, best_lo_ld = -1;
    MpfrValue best_hi, best_lo;
    std::uint64_t argmax = 0;

    void update(u128 d, u128 e, std::uint64_t n)
    {
        if (d <= e) {
            if (!broken) {
                broken = true;
                broken_at = n;
            }
            return;
        }
        const long double ln = std::log(static_cast<long double>(n));
        const long double up = -std::log(std::ldexp(static_cast<long double>(d - e), -128)) / ln;
        const long double lo = -std::log(std::ldexp(static_cast<long double>(saturating_add(d, e)), -128)) / ln;
        constexpr long double slack = 1e-12L;
        if (!seen || up >= best_hi_ld - slack) {
            MpfrValue v;
            log_ratio(v, d - e, n, true);
            if (!seen || mpfr_cmp(v.get(), best_hi.get()) > 0) {
                mpfr_set(best_hi.get(), v.get(), MPFR_RNDN);
                argmax = n;
            }
            best_hi_ld = std::max(best_hi_ld, up);
        }
        if (!seen || lo >= best_lo_ld - slack) {
            MpfrValue v;
            log_ratio(v, saturating_add(d, e), n, false);
            if (!seen || mpfr_cmp(v.get(), best_lo.get()) > 0)
                mpfr_set(best_lo.get(), v.get(), MPFR_RNDN);
            best_lo_ld = std::max(best_lo_ld, lo);
        }
        seen = true;
    }

    LogLawStat result() const
    {
        LogLawStat s;
        if (!seen || broken)
            return s;
        s.lo = to_rational(best_lo);
        s.hi = to_rational(best_hi);
        s.argmax = argmax;
        s.valid = true;
        return s;
    }
};

// Fixed-point image of theta: truncated coordinates and the per-step error in 2^-128 units.
struct FixedTheta {
    std::size_t dim = 0;
    std::array<u128, k_max_dim> coords{};
    u128 step_error = 0;
};

FixedTheta fixed_theta(const OrbitConfig& config)
{
    FixedTheta f;
    f.dim = config.theta.dim();
    require(f.dim >= 1 && f.dim <= k_max_dim, ErrorKind::dimension, "orbit simulation supports 1 <= d <= 4");
    Rational worst = 0;
    for (std::size_t i = 0; i < f.dim; ++i) {
        Rational c = reduce_mod1(config.theta.coords[i]);
        u128 full = to_fixed128(c);
        u128 t = truncate_to_bits(full, config.precision_bits);
        f.coords[i] = t;
        worst = std::max<Rational>(worst, c - fixed_to_rational(t));
    }
    f.step_error = ceil_units128(worst + config.theta.radius);
    return f;
}

struct SampleState {
    std::array<u128, k_max_dim> pos{};
    u128 e0 = 0;
    std::uint64_t count = 0;
    std::uint64_t inconclusive = 0;
    std::vector<std::uint64_t> hits;
    bool done = false;
    StatTracker stat;
};

void start_state(SampleState& s, const FixedTheta& f, const RationalVector& x0, std::uint64_t n_begin)
{
    require(x0.size() == f.dim, ErrorKind::dimension, "starting point and theta have different dimensions");
    Rational worst = 0;
    for (std::size_t i = 0; i < f.dim; ++i) {
        Rational x = reduce_mod1(x0[i]);
        u128 xf = to_fixed128(x);  // floor
        worst = std::max<Rational>(worst, x - fixed_to_rational(xf));
        s.pos[i] = xf + f.coords[i] * static_cast<u128>(n_begin);
    }
    s.e0 = ceil_units128(worst);
}

struct RunFlags {
    bool record_hits = false;
    bool stop_at_first = false;
    bool stats = false;
    std::uint64_t stat_from = 2;
};

// Advances every state through n in [n_begin, n_end).
void run_states(std::vector<SampleState*>& states, const FixedTheta& f, const Exponents& ex, std::uint64_t n_begin,
                std::uint64_t n_end, const RunFlags& flags)
{
    std::vector<Threshold> table;
    for (std::uint64_t c0 = n_begin; c0 < n_end; c0 += std::min(k_chunk, n_end - c0)) {
        const std::uint64_t len = std::min(k_chunk, n_end - c0);
        fill_thresholds(table, c0, len, ex);
        for (SampleState* s : states) {
            if (s->done)
                continue;
            for (std::uint64_t i = 0; i < len; ++i) {
                const std::uint64_t n = c0 + i;
                u128 d = 0;
                for (std::size_t k = 0; k < f.dim; ++k) {
                    d = std::max(d, circle_distance(s->pos[k]));
                    s->pos[k] += f.coords[k];
                }
                u128 e = saturating_add(s->e0, saturating_mul(f.step_error, n));
                Decision dec = decide(d, e, n, table[i], ex);
                if (dec == Decision::hit) {
                    ++s->count;
                    if (flags.record_hits)
                        s->hits.push_back(n);
                    if (flags.stop_at_first) {
                        s->done = true;
                        break;
                    }
                } else if (dec == Decision::unknown) {
                    ++s->inconclusive;
                }
                if (flags.stats && n >= flags.stat_from)
                    s->stat.update(d, e, n);
            }
        }
    }
}

void check_iteration(const OrbitConfig& config)
{
    require(config.precision_bits >= 8 && config.precision_bits <= 128, ErrorKind::config,
            "fixed-point iteration needs 8 <= precision_bits <= 128");
}

double wilson_radius(std::uint64_t k, std::uint64_t m)
{
    const double z = 1.959963984540054;
    const double n = static_cast<double>(m);
    const double p = static_cast<double>(k) / n;
    const double denom = 1 + z * z / n;
    const double centre = (p + z * z / (2 * n)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
    return std::max(p - (centre - half), (centre + half) - p);
}

double quantile(const std::vector<std::uint64_t>& sorted, double q)
{
    if (sorted.empty())
        return 0;
    double pos = q * static_cast<double>(sorted.size() - 1);
    std::size_t i = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(i);
    double a = static_cast<double>(sorted[i]);
    double b = static_cast<double>(sorted[std::min(i + 1, sorted.size() - 1)]);
    return a + frac * (b - a);
}

}  // namespace

void validate(const OrbitConfig& config, const Integer& horizon)
{
    const std::size_t d = config.theta.dim();
    require(d >= 1 && d <= k_max_dim, ErrorKind::dimension, "orbit simulation supports 1 <= d <= 4");
    require(config.delta >= Rational(static_cast<long>(d)), ErrorKind::domain, "delta must be at least d");
    exponents_of(config.delta);
    require(config.precision_bits >= 8 && config.precision_bits <= 1024, ErrorKind::config,
            "precision_bits must lie in [8, 1024]");
    require(config.threads >= 1, ErrorKind::config, "threads must be at least 1");
    if (horizon <= 0)
        return;
    // horizon (2^-p + r) 1000 < horizon^(-1/delta), i.e. s^a horizon^b < 1
    const Exponents ex = exponents_of(config.delta);
    Rational unit = make_rational(1, Integer(1) << config.precision_bits);
    Rational s = Rational(horizon) * (unit + config.theta.radius) * 1000;
    bool ok = pow_of(s, ex.a) * Rational(pow_of(horizon, ex.b)) < 1;
    require(ok, ErrorKind::resource,
            "error budget exceeded: horizon " + horizon.get_str() + " with precision 2^-" +
                std::to_string(config.precision_bits) + " and theta radius " + to_decimal(config.theta.radius, 3) +
                " leaves less than 1000x margin below the target radius");
}

void validate(const OrbitConfig& config)
{
    validate(config, to_integer_u64(config.n_max));
}

RationalVector sample_point(const OrbitConfig& config, std::uint64_t id)
{
    std::mt19937_64 gen(splitmix64(splitmix64(config.seed) + id));
    const unsigned p = config.precision_bits;
    RationalVector x;
    for (std::size_t i = 0; i < config.theta.dim(); ++i) {
        Integer v = 0;
        unsigned words = (p + 63) / 64;
        for (unsigned w = 0; w < words; ++w) {
            v <<= 64;
            v += to_integer_u64(gen());
        }
        v >>= words * 64 - p;
        x.push_back(make_rational(v, Integer(1) << p));
    }
    return x;
}

HitRecord orbit_hits(const OrbitConfig& config, const RationalVector& x0, std::uint64_t n_lo)
{
    validate(config);
    check_iteration(config);
    require(n_lo >= 1, ErrorKind::domain, "n starts at 1");
    HitRecord rec;
    rec.x0 = x0;
    FixedTheta f = fixed_theta(config);
    require(x0.size() == f.dim, ErrorKind::dimension, "starting point and theta have different dimensions");
    if (config.n_max < n_lo)
        return rec;
    SampleState s;
    start_state(s, f, x0, n_lo);
    std::vector<SampleState*> states{&s};
    RunFlags flags;
    flags.record_hits = true;
    flags.stats = true;
    run_states(states, f, exponents_of(config.delta), n_lo, config.n_max + 1, flags);
    rec.hits = std::move(s.hits);
    rec.hit_count = s.count;
    rec.inconclusive = s.inconclusive;
    rec.stat = s.stat.result();
    return rec;
}

HitRecord orbit_hits_exact(const OrbitConfig& config, const RationalVector& x0, std::uint64_t n_lo)
{
    validate(config, 0);
    require(n_lo >= 1, ErrorKind::domain, "n starts at 1");
    require(x0.size() == config.theta.dim(), ErrorKind::dimension, "starting point and theta differ in dimension");
    const Exponents ex = exponents_of(config.delta);
    HitRecord rec;
    rec.x0 = x0;
    for (std::uint64_t n = n_lo; n <= config.n_max; ++n) {
        Integer nn = to_integer_u64(n);
        RationalVector y;
        for (std::size_t i = 0; i < x0.size(); ++i)
            y.push_back(x0[i] + Rational(nn) * config.theta.coords[i]);
        Rational dist = dist_nearest_lattice(y);
        Rational rad = Rational(nn) * config.theta.radius;
        if (below_threshold(dist + rad, nn, ex)) {
            rec.hits.push_back(n);
            ++rec.hit_count;
        } else if (dist - rad > 0 && !below_threshold(dist - rad, nn, ex)) {
            continue;
        } else {
            ++rec.inconclusive;
        }
    }
    return rec;
}

LogLawStat log_law_stat(const OrbitConfig& config, const RationalVector& x0, std::uint64_t n_lo)
{
    validate(config);
    check_iteration(config);
    const std::uint64_t from = std::max<std::uint64_t>(n_lo, 2);
    require(config.n_max >= from, ErrorKind::domain, "log-law statistic needs some n >= 2 in range");
    FixedTheta f = fixed_theta(config);
    SampleState s;
    start_state(s, f, x0, from);
    std::vector<SampleState*> states{&s};
    RunFlags flags;
    flags.stats = true;
    flags.stat_from = from;
    run_states(states, f, exponents_of(config.delta), from, config.n_max + 1, flags);
    if (s.stat.broken)
        fail(ErrorKind::precision, "orbit distance interval contains 0 at n = " + std::to_string(s.stat.broken_at));
    return s.stat.result();
}

WindowEstimate bc_window_estimate(const OrbitConfig& config, const Integer& l_begin, const Integer& l_end)
{
    require(config.samples >= 1, ErrorKind::config, "window estimate needs at least one sample");
    require(l_begin >= 1 && l_begin < l_end, ErrorKind::domain, "window must satisfy 1 <= L < L'");
    validate(config, l_end);
    const Exponents ex = exponents_of(config.delta);
    const std::uint64_t m = config.samples;

    WindowEstimate est;
    est.l_begin = l_begin;
    est.l_end = l_end;
    est.samples = m;

    std::vector<RationalVector> points;
    for (std::uint64_t id = 0; id < m; ++id)
        points.push_back(sample_point(config, id));
    std::vector<char> hit(m, 0), unknown(m, 0);

    const Integer span = l_end - l_begin;
    const bool iterate = config.precision_bits <= 128 && span * m <= k_iteration_budget;
    if (iterate) {
        est.method = "iteration";
        FixedTheta f = fixed_theta(config);
        std::vector<SampleState> states(m);
        std::vector<SampleState*> ptrs;
        const std::uint64_t b = l_begin.get_ui();
        for (std::uint64_t id = 0; id < m; ++id) {
            start_state(states[id], f, points[id], b);
            ptrs.push_back(&states[id]);
        }
        RunFlags flags;
        flags.stop_at_first = true;
        run_states(ptrs, f, ex, b, l_end.get_ui(), flags);
        for (std::uint64_t id = 0; id < m; ++id) {
            hit[id] = states[id].count > 0;
            unknown[id] = !hit[id] && states[id].inconclusive > 0;
        }
    } else {
        est.method = "lattice";
        const CertifiedVector& th = config.theta;
        for (Integer lo = l_begin; lo < l_end;) {
            Integer hi = std::min<Integer>(2 * lo, l_end) - 1;
            Rational radius = pow_enclosure(Rational(lo), -1 / config.delta).hi() + Rational(hi) * th.radius;
            if (radius >= Rational(1, 2)) {
                // the first ball already covers the torus
                std::fill(hit.begin(), hit.end(), 1);
                break;
            }
            ReturnSearch search(th.coords, lo, hi, radius);
            for (std::uint64_t id = 0; id < m; ++id) {
                if (hit[id])
                    continue;
                for (const auto& l : search.candidates(points[id])) {
                    RationalVector y;
                    for (std::size_t i = 0; i < th.dim(); ++i)
                        y.push_back(points[id][i] + Rational(l) * th.coords[i]);
                    Rational dist = dist_nearest_lattice(y);
                    Rational rad = Rational(l) * th.radius;
                    if (below_threshold(dist + rad, l, ex)) {
                        hit[id] = 1;
                        break;
                    }
                    if (!(dist - rad > 0 && !below_threshold(dist - rad, l, ex)))
                        unknown[id] = 1;
                }
            }
            lo = hi + 1;
        }
        for (std::uint64_t id = 0; id < m; ++id)
            if (hit[id])
                unknown[id] = 0;
    }
    est.hits = static_cast<std::uint64_t>(std::count(hit.begin(), hit.end(), 1));
    est.inconclusive = static_cast<std::uint64_t>(std::count(unknown.begin(), unknown.end(), 1));
    est.fraction = static_cast<double>(est.hits) / static_cast<double>(m);
    est.confidence_radius = wilson_radius(est.hits, m);
    return est;
}

CensusSummary hit_census(const OrbitConfig& config, std::uint64_t n_lo, bool with_stats)
{
    validate(config);
    check_iteration(config);
    require(n_lo >= 1 && n_lo <= config.n_max, ErrorKind::domain, "census range must satisfy 1 <= n_lo <= N");
    require(config.samples >= 1, ErrorKind::config, "census needs at least one sample");
    const std::uint64_t m = config.samples;
    FixedTheta f = fixed_theta(config);
    const Exponents ex = exponents_of(config.delta);

    std::vector<SampleState> states(m);
    for (std::uint64_t id = 0; id < m; ++id)
        start_state(states[id], f, sample_point(config, id), n_lo);
    RunFlags flags;
    flags.stats = with_stats;
    flags.stat_from = std::max<std::uint64_t>(n_lo, 2);

    const unsigned threads = static_cast<unsigned>(std::min<std::uint64_t>(config.threads, m));
    std::vector<std::vector<SampleState*>> groups(threads);
    for (std::uint64_t id = 0; id < m; ++id)
        groups[id % threads].push_back(&states[id]);
    if (threads == 1) {
        run_states(groups[0], f, ex, n_lo, config.n_max + 1, flags);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                try {
                    run_states(groups[t], f, ex, n_lo, config.n_max + 1, flags);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        for (auto& th : pool)
            th.join();
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    CensusSummary c;
    c.n_lo = n_lo;
    c.n_hi = config.n_max;
    for (auto& s : states) {
        c.counts.push_back(s.count);
        c.inconclusive.push_back(s.inconclusive);
        if (with_stats)
            c.stats.push_back(s.stat.result());
    }
    std::vector<std::uint64_t> sorted = c.counts;
    std::sort(sorted.begin(), sorted.end());
    double total = 0;
    for (auto v : sorted)
        total += static_cast<double>(v);
    c.mean = total / static_cast<double>(m);
    c.median = quantile(sorted, 0.5);
    c.q1 = quantile(sorted, 0.25);
    c.q3 = quantile(sorted, 0.75);
    return c;
}

}  // namespace shrinktarget
