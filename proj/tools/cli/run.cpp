#include "run.hpp"

#include "output.hpp"

#include "shrinktarget/best_approx.hpp"
#include "shrinktarget/construct.hpp"
#include "shrinktarget/criteria.hpp"
#include "shrinktarget/orbit.hpp"

#include <chrono>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>

#ifndef SHRINKTARGET_VERSION
#define SHRINKTARGET_VERSION "0.0.0"
#endif

namespace shrinktarget::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Context {
    const RunConfig& config;
    const RunOptions& options;
    std::vector<std::string> outputs;
    bool checks_failed = false;

    fs::path file(const std::string& name)
    {
        outputs.push_back(name);
        return options.out / name;
    }
};

struct Source {
    CertifiedVector theta;
    std::optional<ConstructionState> construction;
};

json scalar_json(const CertifiedScalar& x)
{
    return {{"lo", decimal(x.lo())}, {"hi", decimal(x.hi())}, {"center", to_string(x.value())},
            {"radius", to_string(x.radius())}};
}

json theta_json(const CertifiedVector& theta)
{
    json coords = json::array();
    for (const auto& c : theta.coords)
        coords.push_back({{"decimal", decimal(c)}, {"exact", to_string(c)}});
    return {{"coordinates", coords}, {"radius", to_string(theta.radius)}, {"radius_decimal", decimal(theta.radius)}};
}

ConstructionState build_from(const RunConfig& c)
{
    std::size_t steps = c.integer("steps");
    return build_theta(make_params(c.text("a"), c.text_or("h0", "1") + ";" + c.text_or("h", "geom:24a"), steps),
                       steps);
}

Source resolve(const RunConfig& c)
{
    Source s;
    if (c.has("a")) {
        s.construction = build_from(c);
        s.theta = s.construction->theta;
        return s;
    }
    const std::string& t = c.text("theta");
    if (t.rfind("sqrt2-1:", 0) == 0)
        s.theta = sqrt2_minus_1(std::stoul(t.substr(8)));
    else
        s.theta = CertifiedVector(c.rationals("theta"));
    return s;
}

ScanOptions scan_options(const RunConfig& c)
{
    ScanOptions o;
    o.budget = c.integer_or("budget", o.budget);
    return o;
}

std::string witness(const ApproxRecord& r)
{
    if (!r.is_linear())
        return to_string(r.q);
    std::string s;
    for (const auto& x : r.delta)
        s += (s.empty() ? "" : " ") + to_string(x);
    return s;
}

json run_approx(Context& ctx)
{
    const auto& c = ctx.config;
    Source src = resolve(c);
    bool linear = c.text_or("mode", "simultaneous") == "linear";
    auto recs = linear ? best_linear(src.theta, c.integer("h_max"), scan_options(c))
                       : best_simultaneous(src.theta, c.integer("q_max"), scan_options(c));
    std::vector<std::vector<std::string>> rows;
    std::vector<std::vector<Rational>> plot;
    for (const auto& r : recs) {
        rows.push_back({std::to_string(r.index), witness(r), to_string(r.size()), decimal(r.value.lo()),
                        decimal(r.value.hi()), to_string(r.value.value()), to_string(r.value.radius())});
        plot.push_back({Rational(r.size()), r.value.value()});
    }
    write_csv(ctx.file("records.csv"),
              {"index", "witness", "size", "error_lo", "error_hi", "error_center", "error_radius"}, rows);
    write_columns(ctx.file("records.dat"), {"size", "error"}, plot, "records.csv");
    json out{{"mode", linear ? "linear" : "simultaneous"}, {"records", recs.size()}, {"theta", theta_json(src.theta)}};
    if (!recs.empty())
        out["last"] = {{"witness", witness(recs.back())}, {"error", scalar_json(recs.back().value)}};
    return out;
}

std::vector<IntegerVector> linear_witnesses(const ConstructionState& s)
{
    std::vector<IntegerVector> xs;
    for (const auto& st : s.steps)
        xs.push_back({st.delta.x, st.delta.y});
    return xs;
}

json series_json(const SeriesReport& r)
{
    return {{"label", r.label},
            {"terms", r.terms.size()},
            {"total", scalar_json(r.total())},
            {"tail_estimate", scalar_json(r.tail_estimate)},
            {"verdict", r.verdict}};
}

json emit_series(Context& ctx, const SeriesReport& r)
{
    write_series_csv(r, ctx.file("series.csv"));
    emit_plot_data(r, ctx.file("series.dat"), "series.csv");
    return series_json(r);
}

json run_criteria(Context& ctx)
{
    const auto& c = ctx.config;
    Source src = resolve(c);
    SeriesOptions o;
    o.rel_bits = static_cast<unsigned>(c.integer_or("rel_bits", o.rel_bits));
    o.scan = scan_options(c);
    const std::string& series = c.text("series");
    const std::size_t d = src.theta.dim();
    json out{{"series", series}, {"theta", theta_json(src.theta)}};
    if (series == "harmonic") {
        out["report"] = emit_series(
            ctx, harmonic_linear_series(src.theta, c.integer("k"), c.rational_or("delta", Rational(Integer(d))), o));
    } else if (series == "dyadic") {
        out["report"] = emit_series(ctx, dyadic_linear_series(src.theta, c.integer("n"), o));
    } else if (series == "simultaneous") {
        IntegerVector qs;
        for (const auto& st : src.construction->steps)
            qs.push_back(st.q);
        out["report"] = emit_series(ctx, simultaneous_series(src.theta, qs, c.integer_or("n", src.construction->depth), o));
    } else if (series == "window") {
        out["report"] = emit_series(ctx, linear_window_series(src.theta, linear_witnesses(*src.construction),
                                                              c.integer_or("n", src.construction->depth), o));
    } else if (series == "bracket") {
        auto b = dyadic_bracket(src.theta, c.integer("j"), o);
        out["bracket"] = {{"harmonic", scalar_json(b.harmonic)},     {"lower", scalar_json(b.lower)},
                          {"upper", scalar_json(b.upper)},           {"lower_holds", to_string(b.lower_holds)},
                          {"upper_holds", to_string(b.upper_holds)}, {"holds", b.holds()}};
        ctx.checks_failed = !b.holds();
    } else if (series == "type") {
        auto mode = c.text_or("evidence", "simultaneous") == "linear" ? EvidenceMode::linear : EvidenceMode::simultaneous;
        auto e = type_evidence(src.theta, c.rational("tau"), mode, c.integer("depth"), o);
        write_evidence_csv(e, ctx.file("evidence.csv"));
        emit_plot_data(e, ctx.file("evidence.dat"), "evidence.csv");
        const Rational cut(1, 1000);
        out["evidence"] = {
            {"samples", e.samples.size()},
            {"running_inf", to_string(e.running_inf)},
            {"running_sup_of_tail", to_string(e.running_sup_of_tail)},
            {"heuristic",
             {{"omega", e.running_inf >= cut ? "looks like Omega(tau)" : "no Omega(tau) evidence"},
              {"theta", e.running_sup_of_tail >= cut ? "looks like Theta(tau)" : "no Theta(tau) evidence"},
              {"rule", "label when the running value is at least 1/1000; finite-depth evidence, not a proof"}}}};
    } else if (series == "window_bound") {
        auto w = window_bound(src.theta, linear_witnesses(*src.construction), c.rational("delta"), c.integer("n"), o);
        out["window"] = {{"l_n", scalar_json(w.l_n)},   {"l_next", scalar_json(w.l_next)},
                         {"eps_prev", scalar_json(w.eps_prev)}, {"eps", scalar_json(w.eps)},
                         {"bound", scalar_json(w.bound)}};
    }
    return out;
}

VerifyOptions verify_options(const RunConfig& c)
{
    VerifyOptions v;
    if (c.has("bruteforce_depth"))
        v.depth_bruteforce = c.integer("bruteforce_depth");
    v.scan_budget = c.integer_or("budget", v.scan_budget);
    v.linear_records = c.flag_or("linear_records", true);
    return v;
}

json emit_verification(Context& ctx, const VerificationReport& r)
{
    std::vector<std::vector<std::string>> rows;
    for (const auto& ch : r.checks)
        rows.push_back({ch.name, std::to_string(ch.index), ch.passed ? "true" : "false", ch.detail});
    write_csv(ctx.file("verification.csv"), {"check", "index", "passed", "detail"}, rows);
    rows.clear();
    for (const auto& e : r.exceptional)
        rows.push_back({std::to_string(e.n), to_string(e.q), to_string(e.against_q_n), e.is_record ? "true" : "false",
                        e.scanned ? "true" : "false"});
    write_csv(ctx.file("exceptional.csv"), {"n", "q", "against_q_n", "is_record", "scanned"}, rows);
    ctx.checks_failed = !r.all_passed();
    json failed = json::array();
    for (const auto& ch : r.checks)
        if (!ch.passed)
            failed.push_back({{"check", ch.name}, {"index", ch.index}, {"detail", ch.detail}});
    return {{"checks", r.checks.size()},
            {"failures", r.failures()},
            {"bruteforce_depth", r.bruteforce_depth},
            {"failed", failed}};
}

json run_construct(Context& ctx)
{
    const auto& c = ctx.config;
    auto s = build_from(c);
    {
        std::ofstream out(ctx.file("transcript.txt"), std::ios::binary);
        require(static_cast<bool>(out), ErrorKind::config, "cannot write transcript");
        out << serialize_transcript(s);
    }
    json out{{"depth", s.depth}, {"theta", theta_json(s.theta)}};
    if (c.flag_or("verify", true))
        out["verification"] = emit_verification(ctx, verify_construction(s, verify_options(c)));
    return out;
}

json run_verify(Context& ctx)
{
    const auto& c = ctx.config;
    std::ifstream in(c.text("transcript"), std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::config, c.where("transcript") + ": cannot read " + c.text("transcript"));
    std::stringstream buf;
    buf << in.rdbuf();
    auto s = parse_transcript(buf.str());
    return {{"depth", s.depth}, {"theta", theta_json(s.theta)},
            {"verification", emit_verification(ctx, verify_construction(s, verify_options(c)))}};
}

json run_simulate(Context& ctx)
{
    const auto& c = ctx.config;
    Source src = resolve(c);
    OrbitConfig o;
    o.theta = src.theta;
    o.delta = c.rational("delta");
    o.n_max = c.integer_or("n_max", 0);
    o.seed = c.integer_or("seed", 0);
    o.precision_bits = static_cast<unsigned>(c.integer_or("precision", 128));
    o.threads = ctx.options.threads;
    const std::string mode = c.text_or("mode", "census");
    o.samples = c.integer_or("samples", mode == "hits" ? 1 : 100);
    json out{{"mode", mode}, {"theta", theta_json(src.theta)}, {"seed", o.seed}, {"samples", o.samples}};
    if (mode == "window") {
        auto w = bc_window_estimate(o, Integer(c.text("window_begin")), Integer(c.text("window_end")));
        out["window"] = {{"l_begin", to_string(w.l_begin)}, {"l_end", to_string(w.l_end)},
                         {"samples", w.samples},            {"hits", w.hits},
                         {"inconclusive", w.inconclusive},  {"fraction", w.fraction},
                         {"confidence_radius", w.confidence_radius}, {"method", w.method}};
        return out;
    }
    validate(o);
    if (mode == "census") {
        bool stats = c.flag_or("stats", false);
        auto census = hit_census(o, c.integer_or("n_lo", 1), stats);
        std::vector<std::vector<std::string>> rows;
        for (std::size_t i = 0; i < census.counts.size(); ++i) {
            std::vector<std::string> r{std::to_string(i), std::to_string(census.counts[i]),
                                       std::to_string(census.inconclusive[i])};
            if (stats) {
                const auto& st = census.stats[i];
                r.insert(r.end(), {decimal(st.lo), decimal(st.hi), std::to_string(st.argmax), st.valid ? "true" : "false"});
            }
            rows.push_back(std::move(r));
        }
        std::vector<std::string> header{"sample", "hits", "inconclusive"};
        if (stats)
            header.insert(header.end(), {"log_stat_lo", "log_stat_hi", "argmax", "valid"});
        write_csv(ctx.file("census.csv"), header, rows);
        emit_plot_data(census, ctx.file("census.dat"), "census.csv");
        out["census"] = {{"n_lo", census.n_lo}, {"n_hi", census.n_hi}, {"mean", census.mean},
                         {"median", census.median}, {"q1", census.q1}, {"q3", census.q3}};
    } else if (mode == "hits") {
        RationalVector x0 = c.has("x0") ? c.rationals("x0") : sample_point(o, 0);
        require(x0.size() == o.theta.dim(), ErrorKind::dimension,
                c.where("x0") + ": x0 has " + std::to_string(x0.size()) + " coordinates, theta has " +
                    std::to_string(o.theta.dim()));
        auto h = orbit_hits(o, x0, c.integer_or("n_lo", 1));
        std::vector<std::vector<std::string>> rows;
        for (auto n : h.hits)
            rows.push_back({std::to_string(n)});
        write_csv(ctx.file("hits.csv"), {"n"}, rows);
        json start = json::array();
        for (const auto& x : x0)
            start.push_back(to_string(x));
        out["hits"] = {{"x0", start}, {"count", h.hit_count}, {"inconclusive", h.inconclusive}};
    } else {
        std::vector<std::vector<std::string>> rows;
        std::vector<std::vector<Rational>> plot;
        for (std::uint64_t id = 0; id < o.samples; ++id) {
            auto st = log_law_stat(o, sample_point(o, id), c.integer_or("n_lo", 2));
            rows.push_back({std::to_string(id), decimal(st.lo), decimal(st.hi), to_string(st.lo), to_string(st.hi),
                            std::to_string(st.argmax)});
            plot.push_back({Rational(Integer(id)), st.lo, st.hi});
        }
        write_csv(ctx.file("loglaw.csv"), {"sample", "lo", "hi", "lo_exact", "hi_exact", "argmax"}, rows);
        write_columns(ctx.file("loglaw.dat"), {"sample", "lo", "hi"}, plot, "loglaw.csv");
    }
    return out;
}

json run_transfer(Context& ctx)
{
    const auto& c = ctx.config;
    Source src = resolve(c);
    std::vector<Rational> hs;
    if (c.has("h_values")) {
        hs = c.rationals("h_values");
    } else {
        const std::size_t d = src.theta.dim();
        const Rational cst(1, 2 * (static_cast<long>(d) + 1));
        std::uint64_t h = c.integer_or("h_min", 1);
        if (!c.has("h_min"))
            while (cst * pow_of(Rational(Integer(h)), d) < 1)
                ++h;
        for (; h <= c.integer("h_max"); ++h)
            hs.push_back(Rational(Integer(h)));
    }
    auto reports = transfer_sweep(src.theta, hs, scan_options(c));
    std::vector<std::vector<std::string>> rows;
    std::vector<std::vector<Rational>> plot;
    std::size_t held = 0;
    for (const auto& r : reports) {
        held += r.holds;
        rows.push_back({to_string(r.h), to_string(r.c), decimal(r.lhs.lo()), decimal(r.lhs.hi()), decimal(r.rhs.lo()),
                        decimal(r.rhs.hi()), to_string(r.lhs.value()), to_string(r.rhs.value()),
                        r.holds ? "true" : "false"});
        plot.push_back({r.h, r.lhs.value(), r.rhs.value()});
    }
    write_csv(ctx.file("transfer.csv"),
              {"h", "c", "lhs_lo", "lhs_hi", "rhs_lo", "rhs_hi", "lhs_center", "rhs_center", "holds"}, rows);
    write_columns(ctx.file("transfer.dat"), {"h", "eps_l", "rhs"}, plot, "transfer.csv");
    ctx.checks_failed = held != reports.size();
    return {{"theta", theta_json(src.theta)}, {"checks", reports.size()}, {"held", held}};
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_json(const fs::path& path, const json& doc)
{
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::config, "cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

}  // namespace

RunOutcome run(const RunConfig& config, const RunOptions& options)
{
    std::error_code ec;
    fs::create_directories(options.out, ec);
    require(!ec, ErrorKind::config, "cannot create output directory " + options.out.string() + ": " + ec.message());
    require(options.threads >= 1, ErrorKind::config, "--threads must be at least 1");
    Context ctx{config, options, {}, false};
    auto t0 = std::chrono::steady_clock::now();
    json summary;
    const std::string& cmd = config.command;
    if (cmd == "approx")
        summary = run_approx(ctx);
    else if (cmd == "criteria")
        summary = run_criteria(ctx);
    else if (cmd == "construct")
        summary = run_construct(ctx);
    else if (cmd == "verify")
        summary = run_verify(ctx);
    else if (cmd == "simulate")
        summary = run_simulate(ctx);
    else if (cmd == "transfer")
        summary = run_transfer(ctx);
    else
        fail(ErrorKind::config, "unknown command '" + cmd + "'");
    RunOutcome outcome;
    outcome.exit_code = ctx.checks_failed ? k_checks_failed : 0;
    ctx.outputs.push_back("manifest.json");
    outcome.manifest = {{"format", "shrinktarget-manifest v1"},
                        {"tool", "shrinktarget"},
                        {"version", SHRINKTARGET_VERSION},
                        {"command", cmd},
                        {"config", serialize_config(config)},
                        {"threads", options.threads},
                        {"status", ctx.checks_failed ? "checks_failed" : "ok"},
                        {"exit_code", outcome.exit_code},
                        {"timings_seconds", {{"run", seconds_since(t0)}}},
                        {"outputs", ctx.outputs},
                        {"summary", summary}};
    if (config.has("seed"))
        outcome.manifest["seed"] = config.integer("seed");
    write_json(options.out / "manifest.json", outcome.manifest);
    return outcome;
}

nlohmann::json error_json(const Error& error)
{
    json doc{{"format", "shrinktarget-error v1"},
             {"kind", to_string(error.kind())},
             {"exit_code", exit_code(error.kind())},
             {"message", error.what()}};
    static const std::regex where(R"(line (\d+), column (\d+))");
    std::smatch m;
    std::string what = error.what();
    if (std::regex_search(what, m, where)) {
        doc["line"] = std::stoul(m[1]);
        doc["column"] = std::stoul(m[2]);
    }
    return doc;
}

int run_file(const std::string& command, const fs::path& config_path, const RunOptions& options, std::ostream& err)
{
    try {
        std::ifstream in(config_path, std::ios::binary);
        require(static_cast<bool>(in), ErrorKind::config, "cannot read config " + config_path.string());
        std::stringstream buf;
        buf << in.rdbuf();
        auto t0 = std::chrono::steady_clock::now();
        RunConfig config = parse_config(buf.str(), command);
        double parse_time = seconds_since(t0);
        auto outcome = run(config, options);
        outcome.manifest["timings_seconds"]["parse"] = parse_time;
        outcome.manifest["timings_seconds"]["total"] = seconds_since(t0);
        outcome.manifest["config_path"] = config_path.string();
        write_json(options.out / "manifest.json", outcome.manifest);
        if (outcome.exit_code == k_checks_failed)
            err << "shrinktarget: some checks did not hold; see " << (options.out / "manifest.json").string() << '\n';
        return outcome.exit_code;
    } catch (const Error& e) {
        json doc = error_json(e);
        err << doc.dump() << '\n';
        std::error_code ec;
        fs::create_directories(options.out, ec);
        if (!ec) {
            std::ofstream out(options.out / "error.json", std::ios::binary);
            if (out)
                out << doc.dump(2) << '\n';
        }
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        Error wrapped(ErrorKind::internal, e.what());
        err << error_json(wrapped).dump() << '\n';
        return 5;
    }
}

}  // namespace shrinktarget::cli
