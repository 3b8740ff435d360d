#pragma once

// Plain key = value configuration text, TOML-flavoured:
//
//   # comment
//   [thresholds]
//   instruction_copy = 0.8
//   [lexicons]
//   affirmations = ["yes", "ok", "thanks"]
//
// Section headers prefix the keys that follow ("thresholds.instruction_copy").
// Values are numbers, true/false, quoted strings, or one-line arrays of
// quoted strings.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace reliance {

using ConfigValue = std::variant<double, bool, std::string, std::vector<std::string>>;

class KeyValueConfig {
public:
    static KeyValueConfig parse(std::string_view text, std::string_view origin = "config");
    static KeyValueConfig load(const std::filesystem::path& path);

    bool contains(const std::string& key) const { return values_.count(key) > 0; }
    std::optional<double> number(const std::string& key) const;
    std::optional<bool> boolean(const std::string& key) const;
    std::optional<std::string> string(const std::string& key) const;
    std::optional<std::vector<std::string>> list(const std::string& key) const;
    const std::map<std::string, ConfigValue>& values() const { return values_; }

private:
    std::map<std::string, ConfigValue> values_;
    std::string origin_;
};

}  // namespace reliance
