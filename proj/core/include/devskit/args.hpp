#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace devskit {

// Flat "--flag value" configuration shared by the scenario CLIs and the
// conformance evaluator: scenario defaults overlaid with per-case overrides.
// Values stay strings until a typed accessor parses them, so one structure
// serves argv, suite files, and rule evaluation alike. Typed accessors parse
// strictly and throw ConfigError on malformed or missing values.
class ArgMap {
public:
    ArgMap() = default;
    explicit ArgMap(std::map<std::string, std::string> values) : values_(std::move(values)) {}

    void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }
    [[nodiscard]] bool has(std::string_view key) const;

    [[nodiscard]] const std::string& get_string(std::string_view key) const;
    [[nodiscard]] std::int64_t get_int(std::string_view key) const;
    [[nodiscard]] double get_double(std::string_view key) const;

    [[nodiscard]] const std::map<std::string, std::string>& values() const { return values_; }

    // This map's entries overlaid on top of `defaults`.
    [[nodiscard]] ArgMap overlaid_on(const ArgMap& defaults) const;

private:
    std::map<std::string, std::string> values_;
};

// Parse a "--flag value --flag value ..." token list. Flags must start with
// "--"; every flag needs exactly one value. `known` lists the accepted flag
// names (without the dashes); anything else is a ConfigError.
ArgMap parse_flag_pairs(std::span<const std::string> tokens,
                        std::span<const std::string> known);

} // namespace devskit
