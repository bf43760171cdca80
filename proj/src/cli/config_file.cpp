#include "vmimo/cli/config_file.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace vmimo::cli {

namespace {

enum class Kind { real, integer, boolean, real_list, choice, text };

struct KeySpec {
    const char* key;
    Kind kind;
    const char* fallback;  // nullptr: required
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool lo_open = false;
    bool hi_open = false;
    const char* choices = "";
};

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<KeySpec>& schema() {
    static const std::vector<KeySpec> keys = {
        {"channel.K", Kind::real, "10", 0.0, kInf, true, true},
        {"channel.delta", Kind::real, "2", 2.0, 4.0},
        {"channel.P_t", Kind::real, "1", 0.0, kInf, true, true},
        {"channel.P_min", Kind::real, "0.001", 0.0, kInf, true, true},
        {"channel.P_out", Kind::real, "0.01", 0.0, 1.0, true, true},
        {"channel.N0", Kind::real, "1e-13", 0.0, kInf, true, true},
        {"channel.gain_cap", Kind::integer, "4096", 1.0, 1e6},
        {"channel.range", Kind::real_list, "25", 0.0, kInf, true, true},
        {"traffic.lambda", Kind::real_list, "0.05", 0.0, kInf, true, true},
        {"traffic.v", Kind::real_list, "30", 0.0, kInf, true, true},
        {"protocol.tau", Kind::real, "0.01", 0.0, kInf, true, true},
        {"sim.road_length", Kind::real, "50000", 0.0, kInf, true, true},
        {"sim.margin", Kind::real, "1000", 0.0, kInf},
        {"sim.mode", Kind::choice, "deterministic", -kInf, kInf, false, false,
         "deterministic|channel-sampled"},
        {"sim.replicates", Kind::integer, "200", 1.0, 1e9},
        {"sim.zero_outage", Kind::boolean, "false"},
        {"sim.singleton_tx_law", Kind::boolean, "false"},
        {"sim.max_time", Kind::real, "0", 0.0, kInf},
        {"experiment.scenario", Kind::choice, nullptr, -kInf, kInf, false, false,
         "gain-curve|density-sweep|speed-sweep|gain-ratio|channel-mc|single-point"},
        {"experiment.seed", Kind::integer, "1", 0.0, 9.007199254740992e15},
        {"experiment.output", Kind::text, "results"},
        {"experiment.jobs", Kind::integer, "0", 0.0, 4096.0},
        {"gain.n_max", Kind::integer, "1024", 1.0, 1e6},
        {"gain.mc_samples", Kind::integer, "100000", 1e4, 1e9},
    };
    return keys;
}

const KeySpec* find_spec(const std::string& key) {
    for (const auto& s : schema()) {
        if (key == s.key) return &s;
    }
    return nullptr;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_real(const std::string& text, double& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(t.data(), end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_integer(const std::string& text, long long& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(t.data(), end, out);
    return ec == std::errc() && ptr == end;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

std::string range_text(const KeySpec& s) {
    std::ostringstream os;
    os << (s.lo_open ? "(" : "[") << s.lo << ", " << s.hi << (s.hi_open ? ")" : "]");
    return os.str();
}

bool in_range(const KeySpec& s, double x) {
    if (s.lo_open ? !(x > s.lo) : !(x >= s.lo)) return false;
    if (s.hi_open ? !(x < s.hi) : !(x <= s.hi)) return false;
    return true;
}

// Empty string when valid, otherwise the problem.
std::string check_value(const KeySpec& s, const std::string& value) {
    const std::string k = s.key;
    switch (s.kind) {
        case Kind::real: {
            double x = 0.0;
            if (!parse_real(value, x)) return k + ": '" + value + "' is not a number";
            if (!in_range(s, x)) return k + ": value " + trim(value) + " outside " + range_text(s);
            return "";
        }
        case Kind::integer: {
            long long x = 0;
            if (!parse_integer(value, x)) return k + ": '" + value + "' is not an integer";
            if (!in_range(s, static_cast<double>(x))) {
                return k + ": value " + trim(value) + " outside " + range_text(s);
            }
            return "";
        }
        case Kind::boolean: {
            const std::string t = trim(value);
            if (t == "true" || t == "false" || t == "1" || t == "0" || t == "yes" || t == "no") {
                return "";
            }
            return k + ": '" + value + "' is not a boolean";
        }
        case Kind::real_list: {
            const auto items = split(value, ',');
            if (items.empty()) return k + ": empty list";
            for (const auto& item : items) {
                double x = 0.0;
                if (!parse_real(item, x)) return k + ": '" + item + "' is not a number";
                if (!in_range(s, x)) return k + ": value " + item + " outside " + range_text(s);
            }
            return "";
        }
        case Kind::choice: {
            for (const auto& c : split(s.choices, '|')) {
                if (trim(value) == c) return "";
            }
            return k + ": '" + trim(value) + "' is not one of " + s.choices;
        }
        case Kind::text:
            if (trim(value).empty()) return k + ": empty value";
            return "";
    }
    return "";
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string leaf(const std::string& key) {
    const auto dot = key.rfind('.');
    return dot == std::string::npos ? key : key.substr(dot + 1);
}

}  // namespace

std::vector<std::string> known_keys() {
    std::vector<std::string> out;
    for (const auto& s : schema()) out.emplace_back(s.key);
    return out;
}

std::string suggest_key(const std::string& key) {
    for (const auto& s : schema()) {
        if (edit_distance(key, s.key) <= 1) return s.key;
    }
    const std::string l = leaf(key);
    for (const auto& s : schema()) {
        if (edit_distance(l, leaf(s.key)) <= 1) return s.key;
    }
    return "";
}

RawConfig parse_config_text(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(number) + ": missing key");
        if (raw.values.count(key)) {
            throw ConfigError("line " + std::to_string(number) + ": duplicate key '" + key + "'");
        }
        raw.values[key] = value;
        raw.lines[key] = number;
    }
    return raw;
}

RawConfig read_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string ValidationReport::to_string() const {
    if (ok()) return "ok\n";
    std::ostringstream os;
    for (const auto& u : unknown) os << "unknown key: " << u << "\n";
    for (const auto& m : missing) os << "missing required key: " << m << "\n";
    for (const auto& i : invalid) os << "invalid value: " << i << "\n";
    return os.str();
}

ValidationReport validate_config(const RawConfig& raw) {
    ValidationReport rep;
    for (const auto& [key, value] : raw.values) {
        const KeySpec* s = find_spec(key);
        if (!s) {
            const std::string hint = suggest_key(key);
            rep.unknown.push_back("'" + key + "'" +
                                  (hint.empty() ? "" : " (did you mean '" + hint + "'?)"));
            continue;
        }
        const std::string problem = check_value(*s, value);
        if (!problem.empty()) rep.invalid.push_back(problem);
    }
    for (const auto& s : schema()) {
        if (!s.fallback && !raw.values.count(s.key)) rep.missing.emplace_back(s.key);
    }
    if (rep.invalid.empty()) {
        // Cross-key constraints, checked on resolved values.
        const auto res = resolve_config(raw);
        double road = 0.0, margin = 0.0;
        parse_real(res.at("sim.road_length"), road);
        parse_real(res.at("sim.margin"), margin);
        if (!(2.0 * margin < road)) {
            rep.invalid.push_back("sim.margin: twice the margin must be below sim.road_length");
        }
        for (const auto& item : split(res.at("traffic.lambda"), ',')) {
            double lam = 0.0;
            parse_real(item, lam);
            if (road * lam < 1000.0) {
                rep.invalid.push_back("sim.road_length: must span at least 1000 mean gaps at "
                                      "traffic.lambda = " + item);
                break;
            }
        }
    }
    return rep;
}

std::map<std::string, std::string> resolve_config(const RawConfig& raw) {
    std::map<std::string, std::string> out;
    for (const auto& s : schema()) {
        auto it = raw.values.find(s.key);
        if (it != raw.values.end()) {
            out[s.key] = it->second;
        } else if (s.fallback) {
            out[s.key] = s.fallback;
        }
    }
    // Canonical list spelling: "a, b" -> "a,b".
    for (const auto& s : schema()) {
        if (s.kind != Kind::real_list || !out.count(s.key)) continue;
        std::string joined;
        for (const auto& item : split(out[s.key], ',')) {
            if (!joined.empty()) joined += ",";
            joined += item;
        }
        out[s.key] = joined;
    }
    return out;
}

std::string render_config(const std::map<std::string, std::string>& resolved) {
    std::string out;
    for (const auto& [k, v] : resolved) out += k + " = " + v + "\n";
    return out;
}

}  // namespace vmimo::cli
