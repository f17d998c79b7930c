#include "devskit/conformance/scoring.hpp"

#include "devskit/error.hpp"

namespace devskit::conformance {
namespace {

std::size_t apply_rules(const std::vector<Rule>& rules, const RecordList& records,
                        const EvalContext& ctx, std::vector<RuleOutcome>& outcomes,
                        std::vector<Diagnostic>& diagnostics) {
    std::size_t passed = 0;
    for (const Rule& rule : rules) {
        std::optional<Diagnostic> failure;
        try {
            failure = rule.check(records, ctx);
        } catch (const Error& error) {
            failure = Diagnostic{rule.id, std::nullopt, {},
                                 std::string("rule could not read the trace: ") +
                                     error.what()};
        }
        if (failure) {
            failure->rule_id = rule.id;
            if (failure->record_index && *failure->record_index >= records.size()) {
                failure->record_index.reset();
            }
            diagnostics.push_back(std::move(*failure));
            outcomes.push_back({rule.id, false});
        } else {
            outcomes.push_back({rule.id, true});
            ++passed;
        }
    }
    return passed;
}

} // namespace

CaseResult score_case(const RecordList& records, const RuleCatalog& catalog, int v,
                      const EvalContext& ctx) {
    if (catalog.component.empty() || catalog.system.empty()) {
        throw ConfigError("scoring requires non-empty component and system rule sets");
    }
    CaseResult result;
    result.v = v;
    result.record_count = records.size();
    if (v != 1) {
        result.c = 0.0;
        return result;
    }
    const std::size_t comp_passed = apply_rules(catalog.component, records, ctx,
                                                result.component_outcomes,
                                                result.diagnostics);
    const std::size_t sys_passed = apply_rules(catalog.system, records, ctx,
                                               result.system_outcomes, result.diagnostics);
    const double comp_rate =
        static_cast<double>(comp_passed) / static_cast<double>(catalog.component.size());
    const double sys_rate =
        static_cast<double>(sys_passed) / static_cast<double>(catalog.system.size());
    result.c = 0.5 * (comp_rate + sys_rate);
    return result;
}

} // namespace devskit::conformance
