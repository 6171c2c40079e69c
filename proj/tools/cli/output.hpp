#pragma once

#include "shrinktarget/certified.hpp"
#include "shrinktarget/criteria.hpp"
#include "shrinktarget/orbit.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace shrinktarget::cli {

inline constexpr int k_decimal_digits = 17;

// Scientific notation with `digits` significant digits, rounded to nearest.
std::string decimal(const Rational& x, int digits = k_decimal_digits);

// Writes a CSV with a header row; fields are quoted when they contain commas or quotes.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// Whitespace-separated numeric columns with '#' header lines naming columns and precision.
void write_columns(const std::filesystem::path& path, const std::vector<std::string>& columns,
                   const std::vector<std::vector<Rational>>& rows, const std::string& exact_source);

// Plot data: (n, term, partial_sum), (n, theta_scaled, omega_scaled) and (sample, hits).
void emit_plot_data(const SeriesReport& report, const std::filesystem::path& path, const std::string& exact_source);
void emit_plot_data(const TypeEvidence& evidence, const std::filesystem::path& path, const std::string& exact_source);
void emit_plot_data(const CensusSummary& census, const std::filesystem::path& path, const std::string& exact_source);

// Exact companions of the plot data: centers and radii as rational strings.
void write_series_csv(const SeriesReport& report, const std::filesystem::path& path);
void write_evidence_csv(const TypeEvidence& evidence, const std::filesystem::path& path);

}  // namespace shrinktarget::cli
