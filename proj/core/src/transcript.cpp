#include "shrinktarget/construct.hpp"
#include "shrinktarget/errors.hpp"

#include <sstream>

namespace shrinktarget {

namespace {

constexpr const char* k_header = "# shrinktarget-transcript v1";

std::string join(const IntegerVector& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += ',';
        out += v[i].get_str();
    }
    return out;
}

IntegerVector parse_list(const std::string& s)
{
    IntegerVector out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        out.push_back(parse_integer(item));
    return out;
}

std::string expect_key(std::istream& in, const std::string& key)
{
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorKind::config, "transcript ends before '" + key + "'");
    require(line.rfind(key + "=", 0) == 0, ErrorKind::config, "expected '" + key + "=', got '" + line + "'");
    return line.substr(key.size() + 1);
}

}  // namespace

std::string serialize_transcript(const ConstructionState& state)
{
    std::ostringstream out;
    out << k_header << '\n';
    out << "depth=" << state.depth << '\n';
    out << "a_source=" << state.params.a_source << '\n';
    out << "h_source=" << state.params.h_source << '\n';
    out << "a=" << join(state.params.a) << '\n';
    out << "h_target=" << join(state.params.h_target) << '\n';
    out << "steps=" << state.steps.size() << '\n';
    out << "# n r s t x y z h q\n";
    for (std::size_t n = 0; n < state.steps.size(); ++n) {
        const auto& s = state.steps[n];
        out << n << ' ' << s.delta.x << ' ' << s.delta.y << ' ' << s.delta.z << ' ' << s.point.x << ' ' << s.point.y
            << ' ' << s.point.z << ' ' << s.h << ' ' << s.q << '\n';
    }
    return out.str();
}

ConstructionState parse_transcript(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    require(std::getline(in, line) && line == k_header, ErrorKind::config, "not a v1 construction transcript");
    ConstructionState state;
    Integer depth = parse_integer(expect_key(in, "depth"));
    require(depth >= 1 && depth < 100000, ErrorKind::config, "transcript depth out of range");
    state.depth = depth.get_ui();
    state.params.a_source = expect_key(in, "a_source");
    state.params.h_source = expect_key(in, "h_source");
    state.params.a = parse_list(expect_key(in, "a"));
    state.params.h_target = parse_list(expect_key(in, "h_target"));
    Integer count = parse_integer(expect_key(in, "steps"));
    require(count == state.depth + 2, ErrorKind::config, "transcript must list depth + 2 steps");
    require(std::getline(in, line) && line == "# n r s t x y z h q", ErrorKind::config, "missing step header");
    for (std::size_t n = 0; n < state.depth + 2; ++n) {
        require(static_cast<bool>(std::getline(in, line)), ErrorKind::config, "transcript truncated");
        std::istringstream row(line);
        std::string f[9];
        for (auto& field : f)
            require(static_cast<bool>(row >> field), ErrorKind::config, "short step row: '" + line + "'");
        std::string extra;
        require(!(row >> extra), ErrorKind::config, "extra fields in step row: '" + line + "'");
        require(parse_integer(f[0]) == n, ErrorKind::config, "step rows out of order");
        ConstructionStep s;
        s.delta = LatticePoint3(parse_integer(f[1]), parse_integer(f[2]), parse_integer(f[3]));
        s.point = LatticePoint3(parse_integer(f[4]), parse_integer(f[5]), parse_integer(f[6]));
        s.h = parse_integer(f[7]);
        s.q = parse_integer(f[8]);
        state.steps.push_back(std::move(s));
    }
    require(!std::getline(in, line), ErrorKind::config, "trailing data after transcript");
    require(state.steps[state.depth].point.z != 0 && state.steps[state.depth].q != 0, ErrorKind::degenerate,
            "transcript limit point is at infinity");
    state.theta = certified_limit(state.steps, state.depth);
    return state;
}

}  // namespace shrinktarget
