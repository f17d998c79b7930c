#include "devskit/args.hpp"

#include <algorithm>
#include <charconv>

#include "devskit/error.hpp"

namespace devskit {

bool ArgMap::has(std::string_view key) const {
    return values_.find(std::string(key)) != values_.end();
}

const std::string& ArgMap::get_string(std::string_view key) const {
    const auto it = values_.find(std::string(key));
    if (it == values_.end()) {
        throw ConfigError("missing configuration value \"" + std::string(key) + "\"");
    }
    return it->second;
}

std::int64_t ArgMap::get_int(std::string_view key) const {
    const std::string& text = get_string(key);
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError("value of --" + std::string(key) + " is not an integer: \"" + text +
                          "\"");
    }
    return value;
}

double ArgMap::get_double(std::string_view key) const {
    const std::string& text = get_string(key);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError("value of --" + std::string(key) + " is not a number: \"" + text + "\"");
    }
    return value;
}

ArgMap ArgMap::overlaid_on(const ArgMap& defaults) const {
    ArgMap merged(defaults.values_);
    for (const auto& [key, value] : values_) {
        merged.values_[key] = value;
    }
    return merged;
}

ArgMap parse_flag_pairs(std::span<const std::string> tokens, std::span<const std::string> known) {
    ArgMap args;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& token = tokens[i];
        if (token.rfind("--", 0) != 0 || token.size() <= 2) {
            throw ConfigError("expected a --flag, got \"" + token + "\"");
        }
        const std::string name = token.substr(2);
        if (std::find(known.begin(), known.end(), name) == known.end()) {
            throw ConfigError("unknown flag --" + name);
        }
        if (i + 1 >= tokens.size()) {
            throw ConfigError("flag --" + name + " is missing a value");
        }
        args.set(name, tokens[++i]);
    }
    return args;
}

} // namespace devskit
