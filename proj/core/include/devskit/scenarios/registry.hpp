#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "devskit/args.hpp"
#include "devskit/trace.hpp"

namespace devskit::scenarios {

// One entry per reference scenario: the flag surface (with defaults), a
// one-line summary, and a uniform run entry point. The conformance evaluator
// uses the same defaults to reconstruct a case's effective configuration.
struct Scenario {
    struct Flag {
        std::string name;                         // without the leading dashes
        std::optional<std::string> default_value; // nullopt = required
        std::string help;
    };

    std::string name;
    std::string summary;
    std::vector<Flag> flags;
    void (*run)(const ArgMap& args, trace::TraceSink& sink);
};

const std::vector<Scenario>& all_scenarios();

// nullptr when the name is unknown.
const Scenario* find_scenario(std::string_view name);

// Defaults of every optional flag, as an ArgMap base layer.
ArgMap scenario_defaults(const Scenario& scenario);

// Overlay `args` on the defaults and run. Throws ConfigError for missing
// required flags or invalid values.
void run_scenario(const Scenario& scenario, const ArgMap& args, trace::TraceSink& sink);

// Flag names accepted by the scenario (for command-line parsing).
std::vector<std::string> scenario_flag_names(const Scenario& scenario);

} // namespace devskit::scenarios
