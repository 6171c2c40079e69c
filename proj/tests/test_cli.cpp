#include "config.hpp"
#include "output.hpp"
#include "run.hpp"

#include "shrinktarget/construct.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace shrinktarget;
using namespace shrinktarget::cli;
namespace fs = std::filesystem;

namespace {

std::string config_error(const std::string& text, const std::string& command = "")
{
    try {
        parse_config(text, command);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::config);
        return e.what();
    }
    FAIL("no error for: " << text);
    return {};
}

fs::path scratch(const std::string& name)
{
    fs::path p = fs::temp_directory_path() / ("shrinktarget_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::vector<std::string> read_lines(const fs::path& p)
{
    std::ifstream in(p);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);)
        lines.push_back(l);
    return lines;
}

nlohmann::json read_json(const fs::path& p)
{
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

int run_text(const std::string& command, const std::string& text, const fs::path& dir, std::string* err_text = nullptr)
{
    fs::path cfg = dir / "run.cfg";
    std::ofstream(cfg) << text;
    std::ostringstream err;
    RunOptions o;
    o.out = dir / "out";
    int status = run_file(command, cfg, o, err);
    if (err_text)
        *err_text = err.str();
    return status;
}

}  // namespace

TEST_CASE("documented config examples")
{
    auto c = parse_config("command=construct\na=const:33\nh0=1\nsteps=6");
    CHECK(c.command == "construct");
    CHECK(c.text("a") == "const:33");
    CHECK(c.integer("steps") == 6);

    auto t = parse_config("tau=0.1\nseries=type\ntheta=1/3,2/7\ndepth=4", "criteria");
    CHECK(t.rational("tau") == Rational(1, 10));
    CHECK(t.text("tau") == "1/10");

    std::string e = config_error("command=construct\na=const:32\nh0=1\nsteps=6");
    CHECK(e.find("line 2, column 3") != std::string::npos);
    CHECK(e.find("a_n > 32") != std::string::npos);
}

TEST_CASE("strict parsing diagnostics carry line and column")
{
    CHECK(config_error("command=approx\ntheta=1/3\nq_max=10\nqmax=3").find("line 4, column 1: unknown key") !=
          std::string::npos);
    CHECK(config_error("command=approx\ntheta=1/3, 2/x\nq_max=10").find("line 2, column 12") != std::string::npos);
    CHECK(config_error("command=approx\ntheta=1/3\nq_max=10\nq_max=20").find("duplicate key") != std::string::npos);
    CHECK(config_error("command=approx\ntheta=1/3\nmode=linear\nq_max=10").find("missing h_max") !=
          std::string::npos);
    CHECK(config_error("command=approx\ntheta=1/3\nmode=linear\nh_max=10\nq_max=10").find("line 5") !=
          std::string::npos);
    CHECK(config_error("command=approx\ntheta=1/3\ntau=1\nq_max=10").find("does not apply to command approx") !=
          std::string::npos);
    CHECK(config_error("theta=1/3\nq_max=10", "").find("missing command") != std::string::npos);
    CHECK(config_error("command=transfer\ntheta=1/3\nh_max=9", "approx").find("line 1, column 9") !=
          std::string::npos);
    CHECK(config_error("command=approx\ntheta=1/3\nq_max=-4").find("positive integer") != std::string::npos);
    CHECK(config_error("command=approx\ntheta=1/0\nq_max=4").find("line 2") != std::string::npos);
    CHECK(config_error("command=approx\ntheta=1/3\na=const:40\nsteps=3\nq_max=4").find("mutually exclusive") !=
          std::string::npos);
    CHECK(config_error("command=approx\ntheta=1/3,1/5\ndimension=3\nq_max=4").find("disagrees") != std::string::npos);
    CHECK(config_error("command=criteria\na=poly:4\nsteps=4\nseries=dyadic").find("missing n") != std::string::npos);
    CHECK(config_error("command=criteria\ntheta=1/3\nseries=window").find("needs a construction") !=
          std::string::npos);
    CHECK(config_error("command=simulate\ntheta=1/3\ndelta=1\nmode=window\nwindow_begin=9\nwindow_end=4")
              .find("window_end must exceed") != std::string::npos);
    CHECK(config_error("command=construct\na=const:40\nsteps=3\nh=geom:2a").find("inadmissible") !=
          std::string::npos);
    CHECK(config_error("command=verify\ntranscript=x\nverify=true").find("does not apply") != std::string::npos);
    CHECK(config_error("command=approx\ntheta\n").find("line 2, column 1: expected key=value") != std::string::npos);
    CHECK(config_error("command=approx\nTheta=1\n").find("line 2, column 1: invalid character") !=
          std::string::npos);
}

TEST_CASE("comments, whitespace and numeric spellings")
{
    auto c = parse_config("# header\n\n  command = approx \r\ntheta = 0.25 , 3e-2,-1/3\n  q_max=1000\n");
    CHECK(c.text("theta") == "1/4,3/100,-1/3");
    CHECK(c.integer("q_max") == 1000);
    // Comments occupy whole lines only.
    CHECK(config_error("command=approx\ntheta=1/3\nq_max=10 # ten").find("line 3, column 7") != std::string::npos);
}

TEST_CASE("parse, serialize, parse is the identity")
{
    std::mt19937_64 rng(5);
    auto pick = [&](std::initializer_list<const char*> xs) {
        std::vector<const char*> v(xs);
        return std::string(v[rng() % v.size()]);
    };
    auto rational_text = [&] {
        long num = static_cast<long>(rng() % 2001) - 1000;
        long den = static_cast<long>(rng() % 50) + 1;
        switch (rng() % 4) {
        case 0: return std::to_string(num) + "/" + std::to_string(den);
        case 1: return std::to_string(num * 3) + "/" + std::to_string(den * 3);
        case 2: return std::to_string(num) + "." + std::to_string(rng() % 1000);
        default: return std::to_string(num) + "e-" + std::to_string(rng() % 5);
        }
    };
    auto theta_text = [&](std::size_t d) {
        std::string t;
        for (std::size_t i = 0; i < d; ++i)
            t += (i ? " , " : "") + rational_text();
        return t;
    };
    for (int trial = 0; trial < 300; ++trial) {
        std::string text;
        switch (trial % 6) {
        case 0:
            text = "command=approx\ntheta=" + theta_text(1 + rng() % 3) + "\n" +
                   (rng() & 1 ? "mode=linear\nh_max=" : "q_max=") + std::to_string(1 + rng() % 99) + "\n";
            break;
        case 1:
            text = "command=criteria\nseries=" + pick({"harmonic", "dyadic", "bracket"}) + "\ntheta=" + theta_text(2) + "\n";
            if (text.find("harmonic") != std::string::npos)
                text += "k=" + std::to_string(1 + rng() % 50) + "\ndelta=" + rational_text() + "\n";
            else if (text.find("dyadic") != std::string::npos)
                text += "n=" + std::to_string(rng() % 9) + "\n";
            else
                text += "j=" + std::to_string(1 + rng() % 9) + "\n";
            break;
        case 2:
            text = "command=construct\na=" + pick({"const:33", "const:1000", "poly:4", "poly:3@4", "40,50,60,70,80,90"}) +
                   "\nsteps=" + std::to_string(1 + rng() % 4) + "\n" + (rng() & 1 ? "h0=1\n" : "") +
                   (rng() & 1 ? "verify=false\n" : "bruteforce_depth=1\n");
            break;
        case 3:
            text = "command=simulate\ntheta=" + theta_text(1 + rng() % 2) + "\ndelta=" + pick({"2", "5/2", "3.5"}) +
                   "\nn_max=" + std::to_string(1 + rng() % 100000) + "\nseed=" + std::to_string(rng()) +
                   "\nsamples=" + std::to_string(1 + rng() % 9) + "\n";
            break;
        case 4:
            text = "command=transfer\ntheta=" + theta_text(2) + "\n" +
                   (rng() & 1 ? "h_values=" + rational_text() + "," + rational_text()
                              : "h_max=" + std::to_string(10 + rng() % 90)) +
                   "\n";
            break;
        default: text = "command=verify\ntranscript=/tmp/t" + std::to_string(rng() % 100) + ".txt\n"; break;
        }
        RunConfig first;
        try {
            first = parse_config(text);
        } catch (const Error& e) {
            // Random values may be rejected (e.g. nonpositive h); rejection must be a config error.
            CHECK(e.kind() == ErrorKind::config);
            continue;
        }
        std::string once = serialize_config(first);
        RunConfig second = parse_config(once);
        CHECK(first == second);
        CHECK(serialize_config(second) == once);
    }
}

TEST_CASE("plot data files")
{
    auto dir = scratch("plot");
    SeriesReport r;
    for (std::size_t i = 0; i < 5; ++i) {
        r.terms.push_back({i, CertifiedScalar(Rational(1, static_cast<long>(i + 2)))});
        r.partial_sums.push_back(CertifiedScalar(Rational(static_cast<long>(i + 1), 7)));
    }
    emit_plot_data(r, dir / "five.dat", "five.csv");
    auto lines = read_lines(dir / "five.dat");
    REQUIRE(lines.size() == 3 + 5);
    CHECK(lines[0] == "# columns: n term partial_sum");
    CHECK(lines[1].find("significant digits") != std::string::npos);
    CHECK(lines[3] == "0 5.0000000000000000e-01 1.4285714285714286e-01");

    emit_plot_data(SeriesReport{}, dir / "empty.dat", "empty.csv");
    CHECK(read_lines(dir / "empty.dat").size() == 3);

    TypeEvidence e;
    e.samples.push_back({1, Integer(5), CertifiedScalar(Rational(1, 8)), CertifiedScalar(Rational(2)),
                         CertifiedScalar(Rational(1, 3))});
    emit_plot_data(e, dir / "evidence.dat", "evidence.csv");
    lines = read_lines(dir / "evidence.dat");
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "# columns: n theta_scaled omega_scaled");
    CHECK(lines[3] == "1 2 3.3333333333333333e-01");

    write_series_csv(r, dir / "five.csv");
    lines = read_lines(dir / "five.csv");
    REQUIRE(lines.size() == 6);
    CHECK(lines[1].find(",1/2,0,") != std::string::npos);

    CHECK(decimal(Rational(-1, 3), 5) == "-3.3333e-01");
    CHECK(decimal(Rational(0)) == "0");
    CHECK(decimal(make_rational(1, pow_of(Integer(10), 400)), 3) == "1.00e-400");
}

TEST_CASE("construct run writes transcript, report and manifest")
{
    auto dir = scratch("construct");
    REQUIRE(run_text("construct", "command=construct\na=const:33\nh0=1\nsteps=6\n", dir) == 0);
    auto out = dir / "out";
    for (const char* f : {"transcript.txt", "verification.csv", "exceptional.csv", "manifest.json"})
        CHECK(fs::exists(out / f));
    auto m = read_json(out / "manifest.json");
    CHECK(m["status"] == "ok");
    CHECK(m["summary"]["verification"]["failures"] == 0);
    CHECK(m["config"].get<std::string>().rfind("command=construct\n", 0) == 0);

    std::ifstream in(out / "transcript.txt");
    std::stringstream buf;
    buf << in.rdbuf();
    auto s = parse_transcript(buf.str());
    CHECK(s.depth == 6);

    // The manifest alone reproduces the run.
    auto again = scratch("construct_again");
    REQUIRE(run_text("construct", m["config"].get<std::string>(), again) == 0);
    auto m2 = read_json(again / "out" / "manifest.json");
    CHECK(m2["summary"] == m["summary"]);

    auto verify_dir = scratch("verify");
    REQUIRE(run_text("verify", "transcript=" + (out / "transcript.txt").string() + "\nbruteforce_depth=0\n",
                     verify_dir) == 0);
    CHECK(read_json(verify_dir / "out" / "manifest.json")["summary"]["verification"]["failures"] == 0);
}

TEST_CASE("tampered transcript fails verification with exit status 1")
{
    auto dir = scratch("tamper");
    auto s = build_theta(make_params("const:33", "1;geom:24a", 4), 4);
    s.steps[2].delta.x += 1;
    std::ofstream(dir / "t.txt") << serialize_transcript(s);
    CHECK(run_text("verify", "transcript=" + (dir / "t.txt").string() + "\n", dir) == k_checks_failed);
    CHECK(read_json(dir / "out" / "manifest.json")["status"] == "checks_failed");
}

TEST_CASE("library errors map to stable exit codes")
{
    auto dir = scratch("codes");
    std::string err;
    CHECK(run_text("transfer", "theta=1/3,2/7\nh_values=1,5\n", dir, &err) == 2);
    auto doc = read_json(dir / "out" / "error.json");
    CHECK(doc["kind"] == "domain");
    CHECK(doc["exit_code"] == 2);
    CHECK(err.find("\"kind\":\"domain\"") != std::string::npos);

    CHECK(run_text("simulate", "theta=sqrt2-1:80\ndelta=1\nn_max=10000000000000000000\nsamples=2\n", dir) == 4);
    CHECK(read_json(dir / "out" / "error.json")["kind"] == "resource");

    CHECK(run_text("approx", "theta=1/3\nq_max=10\nbogus=1\n", dir) == 2);
    doc = read_json(dir / "out" / "error.json");
    CHECK(doc["line"] == 3);
    CHECK(doc["column"] == 1);

    CHECK(run_file("approx", dir / "missing.cfg", RunOptions{dir / "out", 1}, std::cerr) == 2);

    CHECK(error_json(Error(ErrorKind::precision, "x"))["exit_code"] == 3);
    CHECK(error_json(Error(ErrorKind::internal, "x"))["exit_code"] == 5);
    CHECK(error_json(Error(ErrorKind::dimension, "x"))["exit_code"] == 2);
    CHECK(error_json(Error(ErrorKind::degenerate, "x"))["exit_code"] == 2);
}

TEST_CASE("approx, criteria, simulate and transfer runs")
{
    auto dir = scratch("runs");
    REQUIRE(run_text("approx", "theta=sqrt2-1:60\nq_max=100000\n", dir) == 0);
    auto lines = read_lines(dir / "out" / "records.csv");
    REQUIRE(lines.size() == 15);
    CHECK(lines.back().rfind("13,80782,80782,", 0) == 0);

    REQUIRE(run_text("criteria", "a=poly:4\nsteps=6\nseries=window\nn=5\n", dir) == 0);
    CHECK(read_lines(dir / "out" / "series.dat").size() == 3 + 5);

    REQUIRE(run_text("criteria", "theta=1/7,0.3183098861837907\nseries=bracket\nj=6\n", dir) == 0);
    CHECK(read_json(dir / "out" / "manifest.json")["summary"]["bracket"]["holds"] == true);

    REQUIRE(run_text("criteria", "theta=sqrt2-1:80\nseries=type\ntau=0\ndepth=8\n", dir) == 0);
    auto m = read_json(dir / "out" / "manifest.json");
    CHECK(m["summary"]["evidence"]["heuristic"]["omega"] == "looks like Omega(tau)");
    CHECK(read_lines(dir / "out" / "evidence.dat").size() == 3 + 8);

    REQUIRE(run_text("simulate", "theta=1/4\ndelta=1\nn_max=8\nmode=hits\nx0=0\n", dir) == 0);
    CHECK(read_lines(dir / "out" / "hits.csv") == std::vector<std::string>{"n", "1", "2", "3", "4", "8"});

    REQUIRE(run_text("simulate", "theta=sqrt2-1:80\ndelta=1\nn_max=2000\nsamples=8\nseed=3\n", dir) == 0);
    m = read_json(dir / "out" / "manifest.json");
    CHECK(m["seed"] == 3);
    CHECK(read_lines(dir / "out" / "census.dat").size() == 3 + 8);

    REQUIRE(run_text("transfer", "theta=1/7,0.3183098861837907\nh_max=20\n", dir) == 0);
    m = read_json(dir / "out" / "manifest.json");
    CHECK(m["summary"]["checks"] == 18);
    CHECK(m["summary"]["held"] == 18);
}
