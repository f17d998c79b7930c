#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "devskit/conformance/rules.hpp"

namespace devskit::conformance {

struct RuleOutcome {
    std::string rule_id;
    bool passed = false;
};

// Everything known about one evaluated case. The validity indicator v folds
// together "ran to completion" (spawned, exit 0, no timeout, output within
// the cap) and "spoke the trace contract" (every stdout line parses); rules
// are only consulted when v = 1, and v = 0 forces c = 0.
struct CaseResult {
    std::string case_id;
    int v = 0;
    double c = 0.0;
    std::vector<RuleOutcome> component_outcomes;
    std::vector<RuleOutcome> system_outcomes;
    std::vector<Diagnostic> diagnostics;      // from failing rules
    std::vector<std::string> validity_notes;  // why v = 0

    // Run metadata, for the report.
    bool spawned = false;
    bool timed_out = false;
    bool output_capped = false;
    int exit_code = -1;
    std::size_t record_count = 0;
    double wall_seconds = 0.0;
};

// Apply both rule sets to a parsed trace and score:
//   c = 1/2 * v * (passed_component/|component| + passed_system/|system|).
// Rule evaluation order never affects c. An empty rule set on either level is
// a ConfigError (the average would be undefined). When v = 0 the rules are
// not consulted: outcomes stay empty and c = 0. A rule that throws on a
// malformed payload counts as failed, with the error text as its diagnostic.
CaseResult score_case(const RecordList& records, const RuleCatalog& catalog, int v,
                      const EvalContext& ctx);

} // namespace devskit::conformance
