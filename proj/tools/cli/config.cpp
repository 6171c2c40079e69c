#include "config.hpp"

#include "shrinktarget/construct.hpp"
#include "shrinktarget/errors.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace shrinktarget::cli {

namespace {

enum class Kind { count, positive, rational, rationals, theta, word, a_spec, integers, h_rule, boolean, path };

struct Field {
    const char* key;
    Kind kind;
    std::vector<std::string> commands;
    std::vector<std::string> words;  // for Kind::word
};

const std::vector<std::string> k_theta_commands{"approx", "criteria", "simulate", "transfer"};
const std::vector<std::string> k_source_commands{"approx", "criteria", "construct", "simulate", "transfer"};

const std::vector<Field>& schema()
{
    static const std::vector<Field> fields{
        {"theta", Kind::theta, k_theta_commands, {}},
        {"dimension", Kind::positive, k_theta_commands, {}},
        {"a", Kind::a_spec, k_source_commands, {}},
        {"h0", Kind::integers, k_source_commands, {}},
        {"h", Kind::h_rule, k_source_commands, {}},
        {"steps", Kind::positive, k_source_commands, {}},
        {"budget", Kind::positive, {"approx", "criteria", "construct", "transfer", "verify"}, {}},
        {"mode", Kind::word, {"approx"}, {"simultaneous", "linear"}},
        {"q_max", Kind::positive, {"approx"}, {}},
        {"h_max", Kind::positive, {"approx"}, {}},
        {"series", Kind::word, {"criteria"}, {"harmonic", "dyadic", "bracket", "simultaneous", "window", "type", "window_bound"}},
        {"k", Kind::positive, {"criteria"}, {}},
        {"delta", Kind::rational, {"criteria", "simulate"}, {}},
        {"j", Kind::positive, {"criteria"}, {}},
        {"n", Kind::count, {"criteria"}, {}},
        {"tau", Kind::rational, {"criteria"}, {}},
        {"evidence", Kind::word, {"criteria"}, {"simultaneous", "linear"}},
        {"depth", Kind::positive, {"criteria"}, {}},
        {"rel_bits", Kind::positive, {"criteria"}, {}},
        {"verify", Kind::boolean, {"construct"}, {}},
        {"bruteforce_depth", Kind::count, {"construct", "verify"}, {}},
        {"linear_records", Kind::boolean, {"construct", "verify"}, {}},
        {"transcript", Kind::path, {"verify"}, {}},
        {"mode", Kind::word, {"simulate"}, {"census", "hits", "loglaw", "window"}},
        {"n_max", Kind::positive, {"simulate"}, {}},
        {"n_lo", Kind::positive, {"simulate"}, {}},
        {"samples", Kind::positive, {"simulate"}, {}},
        {"seed", Kind::count, {"simulate"}, {}},
        {"precision", Kind::positive, {"simulate"}, {}},
        {"x0", Kind::rationals, {"simulate"}, {}},
        {"window_begin", Kind::positive, {"simulate"}, {}},
        {"window_end", Kind::positive, {"simulate"}, {}},
        {"stats", Kind::boolean, {"simulate"}, {}},
        {"h_values", Kind::rationals, {"transfer"}, {}},
        {"h_min", Kind::positive, {"transfer"}, {}},
        {"h_max", Kind::positive, {"transfer"}, {}},
    };
    return fields;
}

const Field* find_field(const std::string& command, const std::string& key)
{
    for (const auto& f : schema())
        if (key == f.key && std::find(f.commands.begin(), f.commands.end(), command) != f.commands.end())
            return &f;
    return nullptr;
}

bool known_key(const std::string& key)
{
    return key == "command" ||
           std::any_of(schema().begin(), schema().end(), [&](const Field& f) { return key == f.key; });
}

[[noreturn]] void fail_at(std::size_t line, std::size_t column, const std::string& what)
{
    fail(ErrorKind::config, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
}

// Library message without its "<kind> error: " prefix.
std::string bare(const Error& e)
{
    std::string what = e.what();
    std::string prefix = std::string(to_string(e.kind())) + " error: ";
    return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

bool positioned(const Error& e)
{
    return bare(e).rfind("line ", 0) == 0;
}

std::string trim(const std::string& s, std::size_t& offset)
{
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) {
        offset = s.size();
        return {};
    }
    std::size_t e = s.find_last_not_of(" \t");
    offset = b;
    return s.substr(b, e - b + 1);
}

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

// Parses a comma-separated list, reporting the column of the offending item.
template <class F>
std::string canonical_list(const std::string& value, std::size_t line, std::size_t column, F item)
{
    std::string out;
    std::size_t pos = 0;
    for (const auto& raw : split(value, ',')) {
        std::size_t lead = 0;
        std::string t = trim(raw, lead);
        if (t.empty())
            fail_at(line, column + pos, "empty list item");
        try {
            out += (out.empty() ? "" : ",") + item(t);
        } catch (const Error& e) {
            fail_at(line, column + pos + lead, bare(e));
        }
        pos += raw.size() + 1;
    }
    return out;
}

std::string canonical_integer(const std::string& t, bool positive)
{
    Integer v = parse_integer(t);
    require(v >= (positive ? 1 : 0), ErrorKind::config,
            "'" + t + "' must be " + (positive ? "a positive" : "a nonnegative") + " integer");
    require(bit_length(v) <= 64, ErrorKind::config, "'" + t + "' does not fit in 64 bits");
    return to_string(v);
}

std::string canonicalize(const Field& f, const std::string& value, std::size_t line, std::size_t column)
{
    try {
        switch (f.kind) {
        case Kind::count: return canonical_integer(value, false);
        case Kind::positive: return canonical_integer(value, true);
        case Kind::rational: return to_string(parse_rational(value));
        case Kind::rationals:
            return canonical_list(value, line, column, [](const std::string& t) { return to_string(parse_rational(t)); });
        case Kind::integers:
            return canonical_list(value, line, column, [](const std::string& t) { return canonical_integer(t, true); });
        case Kind::theta:
            if (value.rfind("sqrt2-1:", 0) == 0)
                return "sqrt2-1:" + canonical_integer(value.substr(8), true);
            return canonical_list(value, line, column, [](const std::string& t) { return to_string(parse_rational(t)); });
        case Kind::word:
            if (std::find(f.words.begin(), f.words.end(), value) == f.words.end()) {
                std::string allowed;
                for (const auto& w : f.words)
                    allowed += (allowed.empty() ? "" : ", ") + w;
                fail(ErrorKind::config, "'" + value + "' is not one of " + allowed);
            }
            return value;
        case Kind::a_spec: {
            expand_a_sequence(value, 1);
            std::string out;
            for (char c : value)
                if (c != ' ' && c != '\t')
                    out += c;
            return out;
        }
        case Kind::h_rule: {
            require(value.rfind("geom:", 0) == 0, ErrorKind::config, "h rule must look like geom:24a");
            IntegerVector a{Integer(33)};
            expand_h_sequence(value, a, 1);
            return value;
        }
        case Kind::boolean:
            require(value == "true" || value == "false", ErrorKind::config, "expected true or false, got '" + value + "'");
            return value;
        case Kind::path: require(!value.empty(), ErrorKind::config, "empty path"); return value;
        }
    } catch (const Error& e) {
        if (positioned(e))
            throw;
        fail_at(line, column, f.key + std::string(": ") + bare(e));
    }
    return value;
}

void forbid(const RunConfig& c, const std::string& key, const std::string& reason)
{
    if (c.has(key))
        fail(ErrorKind::config, c.where(key) + ": " + key + " " + reason);
}

void need(const RunConfig& c, const std::string& key, const std::string& reason, std::size_t line)
{
    if (!c.has(key))
        fail_at(line, 1, "missing " + key + " " + reason);
}

// Cross-key rules; `last` is the line after the final entry, used for missing keys.
void validate(const RunConfig& c, std::size_t last)
{
    const std::string& cmd = c.command;
    bool uses_source = std::find(k_source_commands.begin(), k_source_commands.end(), cmd) != k_source_commands.end();
    bool from_construction = c.has("a");
    if (uses_source) {
        if (!from_construction) {
            for (const char* k : {"h0", "h", "steps"})
                forbid(c, k, "needs a construction (a=...)");
        }
        if (c.has("theta") && from_construction)
            fail(ErrorKind::config, c.where("a") + ": theta and a construction are mutually exclusive");
        if (cmd != "construct" && !c.has("theta") && !from_construction)
            fail_at(last, 1, "missing theta or a construction (a=...)");
        if (from_construction)
            need(c, "steps", "for the construction", last);
    }
    if (c.has("dimension")) {
        std::size_t d = from_construction ? 2 : 0;
        if (c.has("theta")) {
            const auto& t = c.text("theta");
            d = t.rfind("sqrt2-1:", 0) == 0 ? 1 : static_cast<std::size_t>(std::count(t.begin(), t.end(), ',') + 1);
        }
        if (c.integer("dimension") != d)
            fail(ErrorKind::config, c.where("dimension") + ": dimension " + c.text("dimension") +
                                        " disagrees with theta of dimension " + std::to_string(d));
    }
    if (cmd == "approx") {
        bool linear = c.text_or("mode", "simultaneous") == "linear";
        need(c, linear ? "h_max" : "q_max", "for mode " + c.text_or("mode", "simultaneous"), last);
        forbid(c, linear ? "q_max" : "h_max", "does not apply to this mode");
    } else if (cmd == "criteria") {
        need(c, "series", "(harmonic, dyadic, bracket, simultaneous, window, type, window_bound)", last);
        const std::string& s = c.text("series");
        const std::map<std::string, std::set<std::string>> allowed{
            {"harmonic", {"k", "delta", "rel_bits"}},
            {"dyadic", {"n", "rel_bits"}},
            {"bracket", {"j", "rel_bits"}},
            {"simultaneous", {"n", "rel_bits"}},
            {"window", {"n", "rel_bits"}},
            {"type", {"tau", "evidence", "depth", "rel_bits"}},
            {"window_bound", {"n", "delta", "rel_bits"}},
        };
        const std::map<std::string, std::set<std::string>> required{
            {"harmonic", {"k"}}, {"dyadic", {"n"}},   {"bracket", {"j"}},      {"simultaneous", {}},
            {"window", {}},      {"type", {"tau", "depth"}}, {"window_bound", {"n", "delta"}},
        };
        for (const char* k : {"k", "delta", "j", "n", "tau", "evidence", "depth", "rel_bits"})
            if (!allowed.at(s).count(k))
                forbid(c, k, "does not apply to series=" + s);
        for (const auto& k : required.at(s))
            need(c, k, "for series=" + s, last);
        if ((s == "simultaneous" || s == "window" || s == "window_bound") && !from_construction)
            fail(ErrorKind::config, c.where("series") + ": series=" + s + " needs a construction (a=...)");
    } else if (cmd == "construct") {
        need(c, "a", "sequence", last);
        if (c.has("bruteforce_depth") || c.has("linear_records"))
            if (c.has("verify") && !c.flag_or("verify", true))
                fail(ErrorKind::config, c.where("verify") + ": verification options given with verify=false");
    } else if (cmd == "simulate") {
        need(c, "delta", "(target radius n^(-1/delta))", last);
        const std::string mode = c.text_or("mode", "census");
        if (mode == "window") {
            need(c, "window_begin", "for mode=window", last);
            need(c, "window_end", "for mode=window", last);
            for (const char* k : {"n_max", "n_lo", "x0", "stats"})
                forbid(c, k, "does not apply to mode=window");
            if (c.integer("window_end") <= c.integer("window_begin"))
                fail(ErrorKind::config, c.where("window_end") + ": window_end must exceed window_begin");
        } else {
            need(c, "n_max", "for mode=" + mode, last);
            for (const char* k : {"window_begin", "window_end"})
                forbid(c, k, "only applies to mode=window");
            if (mode != "hits")
                forbid(c, "x0", "only applies to mode=hits");
            if (mode != "census")
                forbid(c, "stats", "only applies to mode=census");
            if (mode == "hits")
                forbid(c, "samples", "does not apply to mode=hits (one orbit)");
        }
    } else if (cmd == "transfer") {
        if (c.has("h_values")) {
            forbid(c, "h_min", "conflicts with h_values");
            forbid(c, "h_max", "conflicts with h_values");
        } else {
            need(c, "h_max", "or h_values", last);
            if (c.integer_or("h_min", 1) > c.integer("h_max"))
                fail(ErrorKind::config, c.where("h_min") + ": h_min exceeds h_max");
        }
    } else if (cmd == "verify") {
        need(c, "transcript", "path", last);
    }
    if (from_construction) {
        std::size_t steps = c.integer("steps");
        if (steps > 64)
            fail(ErrorKind::config, c.where("steps") + ": steps above 64 are not supported");
        std::string h_spec = c.text_or("h0", "1") + ";" + c.text_or("h", "geom:24a");
        try {
            auto params = make_params(c.text("a"), h_spec, steps);
            check_admissible(params, steps);
        } catch (const Error& e) {
            std::string what = bare(e);
            std::string key = what.find("h_") != std::string::npos && c.has("h0") ? "h0" : "a";
            fail(ErrorKind::config, c.where(key) + ": inadmissible construction: " + what);
        }
    }
}

}  // namespace

const std::vector<std::string> k_commands{"approx", "criteria", "construct", "simulate", "transfer", "verify"};

const std::string& RunConfig::text(const std::string& key) const
{
    auto it = entries.find(key);
    require(it != entries.end(), ErrorKind::config, "missing key " + key);
    return it->second.value;
}

std::string RunConfig::text_or(const std::string& key, const std::string& fallback) const
{
    return has(key) ? text(key) : fallback;
}

Rational RunConfig::rational(const std::string& key) const
{
    return parse_rational(text(key));
}

Rational RunConfig::rational_or(const std::string& key, const Rational& fallback) const
{
    return has(key) ? rational(key) : fallback;
}

std::uint64_t RunConfig::integer(const std::string& key) const
{
    return to_u64_saturating(parse_integer(text(key)));
}

std::uint64_t RunConfig::integer_or(const std::string& key, std::uint64_t fallback) const
{
    return has(key) ? integer(key) : fallback;
}

std::vector<Rational> RunConfig::rationals(const std::string& key) const
{
    std::vector<Rational> out;
    for (const auto& t : split(text(key), ','))
        out.push_back(parse_rational(t));
    return out;
}

bool RunConfig::flag_or(const std::string& key, bool fallback) const
{
    return has(key) ? text(key) == "true" : fallback;
}

std::string RunConfig::where(const std::string& key) const
{
    auto it = entries.find(key);
    if (it == entries.end())
        return "line 0, column 0";
    return "line " + std::to_string(it->second.line) + ", column " + std::to_string(it->second.column);
}

bool operator==(const RunConfig& a, const RunConfig& b)
{
    if (a.command != b.command || a.entries.size() != b.entries.size())
        return false;
    for (const auto& [k, e] : a.entries) {
        auto it = b.entries.find(k);
        if (it == b.entries.end() || it->second.value != e.value)
            return false;
    }
    return true;
}

RunConfig parse_config(const std::string& text, const std::string& command)
{
    RunConfig c;
    std::size_t command_line = 0, command_column = 0;
    struct RawEntry {
        std::string key, value;
        std::size_t line, key_column, value_column;
    };
    std::vector<RawEntry> raw;
    std::istringstream in(text);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::size_t lead = 0;
        std::string body = trim(line, lead);
        if (body.empty() || body.front() == '#')
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            fail_at(number, lead + 1, "expected key=value");
        std::size_t key_off = 0, value_off = 0;
        std::string key = trim(line.substr(0, eq), key_off);
        std::string value = trim(line.substr(eq + 1), value_off);
        std::size_t key_col = key_off + 1, value_col = eq + 2 + value_off;
        if (key.empty())
            fail_at(number, key_col, "empty key");
        for (std::size_t i = 0; i < key.size(); ++i) {
            char ch = key[i];
            if (!((ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '_'))
                fail_at(number, key_col + i, "invalid character in key '" + key + "'");
        }
        if (value.empty())
            fail_at(number, value_col, "empty value for " + key);
        if (!known_key(key))
            fail_at(number, key_col, "unknown key '" + key + "'");
        if (key == "command") {
            if (command_line)
                fail_at(number, key_col, "duplicate key 'command' (first on line " + std::to_string(command_line) + ")");
            if (std::find(k_commands.begin(), k_commands.end(), value) == k_commands.end())
                fail_at(number, value_col, "unknown command '" + value + "'");
            c.command = value;
            command_line = number;
            command_column = value_col;
            continue;
        }
        raw.push_back({key, value, number, key_col, value_col});
    }
    if (!command.empty()) {
        if (std::find(k_commands.begin(), k_commands.end(), command) == k_commands.end())
            fail(ErrorKind::config, "unknown command '" + command + "'");
        if (!c.command.empty() && c.command != command)
            fail_at(command_line, command_column,
                    "config is for command '" + c.command + "' but '" + command + "' was requested");
        c.command = command;
    }
    if (c.command.empty())
        fail_at(number + 1, 1, "missing command");
    for (const auto& r : raw) {
        const Field* f = find_field(c.command, r.key);
        if (!f)
            fail_at(r.line, r.key_column, "key '" + r.key + "' does not apply to command " + c.command);
        if (c.entries.count(r.key))
            fail_at(r.line, r.key_column,
                    "duplicate key '" + r.key + "' (first on line " + std::to_string(c.entries[r.key].line) + ")");
        c.entries[r.key] = ConfigEntry{canonicalize(*f, r.value, r.line, r.value_column), r.line, r.value_column};
    }
    validate(c, number + 1);
    return c;
}

std::string serialize_config(const RunConfig& config)
{
    std::string out = "command=" + config.command + "\n";
    for (const auto& [k, e] : config.entries)
        out += k + "=" + e.value + "\n";
    return out;
}

std::vector<std::string> keys_for(const std::string& command)
{
    std::vector<std::string> keys;
    for (const auto& f : schema())
        if (std::find(f.commands.begin(), f.commands.end(), command) != f.commands.end())
            keys.push_back(f.key);
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return keys;
}

}  // namespace shrinktarget::cli
