#include "output.hpp"

#include "shrinktarget/errors.hpp"

#include <fstream>
#include <gmpxx.h>

namespace shrinktarget::cli {

namespace {

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::config, "cannot write " + path.string());
    return out;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s)
        q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

std::vector<std::string> scalar_fields(const CertifiedScalar& x)
{
    return {decimal(x.lo()), decimal(x.hi()), to_string(x.value()), to_string(x.radius())};
}

}  // namespace

std::string decimal(const Rational& x, int digits)
{
    if (x == 0)
        return "0";
    // Binary truncation far below the last printed digit; the printed digits are rounded to nearest.
    mpf_class f(0, static_cast<mp_bitcnt_t>(digits * 4 + 64));
    f = x;
    char* text = nullptr;
    gmp_asprintf(&text, "%.*Fe", digits - 1, f.get_mpf_t());
    std::string out(text);
    void (*release)(void*, size_t);
    mp_get_memory_functions(nullptr, nullptr, &release);
    release(text, out.size() + 1);
    return out;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows)
{
    auto out = open_out(path);
    auto line = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i)
            out << (i ? "," : "") << csv_field(fields[i]);
        out << '\n';
    };
    line(header);
    for (const auto& r : rows)
        line(r);
}

void write_columns(const std::filesystem::path& path, const std::vector<std::string>& columns,
                   const std::vector<std::vector<Rational>>& rows, const std::string& exact_source)
{
    auto out = open_out(path);
    out << "# columns:";
    for (const auto& c : columns)
        out << ' ' << c;
    out << "\n# precision: " << k_decimal_digits << " significant digits, rounded to nearest\n";
    out << "# exact values: " << exact_source << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i)
            out << (i ? " " : "") << (r[i].get_den() == 1 ? to_string(r[i]) : decimal(r[i]));
        out << '\n';
    }
}

void emit_plot_data(const SeriesReport& report, const std::filesystem::path& path, const std::string& exact_source)
{
    std::vector<std::vector<Rational>> rows;
    for (std::size_t i = 0; i < report.terms.size(); ++i)
        rows.push_back({Rational(Integer(report.terms[i].index)), report.terms[i].value.value(),
                        report.partial_sums[i].value()});
    write_columns(path, {"n", "term", "partial_sum"}, rows, exact_source);
}

void emit_plot_data(const TypeEvidence& evidence, const std::filesystem::path& path, const std::string& exact_source)
{
    std::vector<std::vector<Rational>> rows;
    for (const auto& s : evidence.samples)
        rows.push_back({Rational(Integer(s.n)), s.theta_scaled.value(), s.omega_scaled.value()});
    write_columns(path, {"n", "theta_scaled", "omega_scaled"}, rows, exact_source);
}

void emit_plot_data(const CensusSummary& census, const std::filesystem::path& path, const std::string& exact_source)
{
    std::vector<std::vector<Rational>> rows;
    for (std::size_t i = 0; i < census.counts.size(); ++i)
        rows.push_back({Rational(Integer(i)), Rational(Integer(census.counts[i]))});
    write_columns(path, {"sample", "hits"}, rows, exact_source);
}

void write_series_csv(const SeriesReport& report, const std::filesystem::path& path)
{
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < report.terms.size(); ++i) {
        std::vector<std::string> r{std::to_string(report.terms[i].index)};
        for (auto& f : scalar_fields(report.terms[i].value))
            r.push_back(std::move(f));
        for (auto& f : scalar_fields(report.partial_sums[i]))
            r.push_back(std::move(f));
        rows.push_back(std::move(r));
    }
    write_csv(path,
              {"n", "term_lo", "term_hi", "term_center", "term_radius", "partial_lo", "partial_hi", "partial_center",
               "partial_radius"},
              rows);
}

void write_evidence_csv(const TypeEvidence& evidence, const std::filesystem::path& path)
{
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : evidence.samples) {
        std::vector<std::string> r{std::to_string(s.n), to_string(s.size)};
        for (const auto* x : {&s.error, &s.theta_scaled, &s.omega_scaled})
            for (auto& f : scalar_fields(*x))
                r.push_back(std::move(f));
        rows.push_back(std::move(r));
    }
    write_csv(path,
              {"n", "size", "error_lo", "error_hi", "error_center", "error_radius", "theta_scaled_lo",
               "theta_scaled_hi", "theta_scaled_center", "theta_scaled_radius", "omega_scaled_lo", "omega_scaled_hi",
               "omega_scaled_center", "omega_scaled_radius"},
              rows);
}

}  // namespace shrinktarget::cli
