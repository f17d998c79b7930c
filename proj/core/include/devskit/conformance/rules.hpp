#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "devskit/args.hpp"
#include "devskit/trace.hpp"

namespace devskit::conformance {

// The effective configuration a trace was produced under: the scenario's
// defaults overlaid with the test case's flags. Rules read timing and seed
// parameters from here instead of hard-coding defaults.
struct EvalContext {
    std::string scenario;
    ArgMap args;
};

// A failed rule points at the first record that completes the violating
// pattern; statistical and global failures carry no index.
struct Diagnostic {
    std::string rule_id;
    std::optional<std::size_t> record_index;
    std::vector<std::string> entities;
    std::string message;
};

enum class RuleLevel { component, system };

using RecordList = std::vector<trace::TraceRecord>;

// Pure, deterministic check; nullopt means the trace satisfies the rule. The
// returned diagnostic's rule_id may be left empty — the scorer stamps it.
using RuleCheck =
    std::function<std::optional<Diagnostic>(const RecordList&, const EvalContext&)>;

struct Rule {
    std::string id;
    RuleLevel level;
    std::string description;
    RuleCheck check;
};

struct RuleCatalog {
    std::vector<Rule> component;
    std::vector<Rule> system;
};

// Built-in rule sets per scenario; throws ConfigError for unknown names.
const RuleCatalog& rule_catalog(std::string_view scenario);

namespace detail {
RuleCatalog make_abp_rules();
RuleCatalog make_seird_rules();
RuleCatalog make_iobs_rules();
RuleCatalog make_barbershop_rules();

// Shorthand used across the catalog implementations.
inline Diagnostic violation(std::size_t index, std::vector<std::string> entities,
                            std::string message) {
    return Diagnostic{"", index, std::move(entities), std::move(message)};
}
inline Diagnostic global_violation(std::vector<std::string> entities, std::string message) {
    return Diagnostic{"", std::nullopt, std::move(entities), std::move(message)};
}
} // namespace detail

} // namespace devskit::conformance
