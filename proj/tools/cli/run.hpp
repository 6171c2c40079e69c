#pragma once

#include "config.hpp"

#include "shrinktarget/errors.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace shrinktarget::cli {

// Exit status when a run completes but one of its reported checks does not hold.
inline constexpr int k_checks_failed = 1;

struct RunOptions {
    std::filesystem::path out = ".";
    unsigned threads = 1;
};

struct RunOutcome {
    int exit_code = 0;
    nlohmann::json manifest;
};

// Runs a validated config, writing artifacts and manifest.json into options.out.
RunOutcome run(const RunConfig& config, const RunOptions& options);

// Machine-readable error document; line and column are filled for config diagnostics.
nlohmann::json error_json(const Error& error);

// Reads and parses the config file, runs it and writes error.json on failure. Diagnostics go to `err`.
int run_file(const std::string& command, const std::filesystem::path& config_path, const RunOptions& options,
             std::ostream& err);

}  // namespace shrinktarget::cli
