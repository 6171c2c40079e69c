#pragma once

#include "shrinktarget/exact.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace shrinktarget::cli {

// One key=value line after validation. `value` is canonical: rationals in lowest terms,
// lists without spaces, so serialize(parse(text)) is a fixed point.
struct ConfigEntry {
    std::string value;
    std::size_t line = 0;
    std::size_t column = 0;  // of the first character of the value
};

struct RunConfig {
    std::string command;
    std::map<std::string, ConfigEntry> entries;

    bool has(const std::string& key) const { return entries.count(key) != 0; }
    const std::string& text(const std::string& key) const;
    std::string text_or(const std::string& key, const std::string& fallback) const;
    Rational rational(const std::string& key) const;
    Rational rational_or(const std::string& key, const Rational& fallback) const;
    std::uint64_t integer(const std::string& key) const;
    std::uint64_t integer_or(const std::string& key, std::uint64_t fallback) const;
    std::vector<Rational> rationals(const std::string& key) const;
    bool flag_or(const std::string& key, bool fallback) const;

    // "line L, column C" of an entry, for diagnostics raised after parsing.
    std::string where(const std::string& key) const;

    friend bool operator==(const RunConfig& a, const RunConfig& b);
};

extern const std::vector<std::string> k_commands;

// Strict key=value parser: '#' starts a comment line, blank lines are ignored, keys are
// lower-case identifiers, every key is checked against the command's schema. Errors are
// config errors whose message starts with "line L, column C: ".
// `command` (from the command line) must agree with a command= line when both are present.
RunConfig parse_config(const std::string& text, const std::string& command = "");

// command= first, remaining keys sorted.
std::string serialize_config(const RunConfig& config);

// Keys accepted by a command, for help output.
std::vector<std::string> keys_for(const std::string& command);

}  // namespace shrinktarget::cli
