#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace vmimo::cli {

/// Bad or unreadable configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raw `key = value` pairs in file order. '#' starts a comment.
struct RawConfig {
    std::map<std::string, std::string> values;
    std::map<std::string, int> lines;  // key -> line number
};

RawConfig parse_config_text(const std::string& text);
RawConfig read_config_file(const std::string& path);

struct ValidationReport {
    std::vector<std::string> unknown;    // with suggestion text
    std::vector<std::string> missing;
    std::vector<std::string> invalid;    // range or type violations
    bool ok() const { return unknown.empty() && missing.empty() && invalid.empty(); }
    std::string to_string() const;
};

ValidationReport validate_config(const RawConfig& raw);

/// Every known key with its resolved value (defaults filled in), in a
/// canonical sorted `key = value` form.
std::map<std::string, std::string> resolve_config(const RawConfig& raw);
std::string render_config(const std::map<std::string, std::string>& resolved);

/// Closest known key at edit distance <= 1, or empty.
std::string suggest_key(const std::string& key);

std::vector<std::string> known_keys();

}  // namespace vmimo::cli
