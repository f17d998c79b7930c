#include <optional>
#include <string>
#include <vector>

#include <doctest.h>

#include "devskit/conformance/rules.hpp"
#include "devskit/conformance/scoring.hpp"
#include "devskit/error.hpp"

using devskit::ConfigError;
using devskit::EventValue;
using devskit::conformance::CaseResult;
using devskit::conformance::Diagnostic;
using devskit::conformance::EvalContext;
using devskit::conformance::RecordList;
using devskit::conformance::Rule;
using devskit::conformance::RuleCatalog;
using devskit::conformance::RuleLevel;
using devskit::conformance::score_case;
using devskit::trace::TraceRecord;

namespace {

RecordList three_records() {
    RecordList records;
    for (int i = 0; i < 3; ++i) {
        TraceRecord r;
        r.time = static_cast<double>(i);
        r.entity = "unit";
        r.event = "tick";
        records.push_back(r);
    }
    return records;
}

Rule passing(std::string id, RuleLevel level) {
    return {std::move(id), level, "always satisfied",
            [](const RecordList&, const EvalContext&) -> std::optional<Diagnostic> {
                return std::nullopt;
            }};
}

Rule failing(std::string id, RuleLevel level,
             std::optional<std::size_t> index = std::nullopt) {
    return {std::move(id), level, "always violated",
            [index](const RecordList&, const EvalContext&) -> std::optional<Diagnostic> {
                if (index) {
                    return devskit::conformance::detail::violation(*index, {"unit"},
                                                                  "synthetic failure");
                }
                return devskit::conformance::detail::global_violation({"unit"},
                                                                      "synthetic failure");
            }};
}

Rule counting(std::string id, RuleLevel level, int& calls) {
    return {std::move(id), level, "counts invocations",
            [&calls](const RecordList&, const EvalContext&) -> std::optional<Diagnostic> {
                ++calls;
                return std::nullopt;
            }};
}

const EvalContext kCtx{"abp", {}};

} // namespace

TEST_CASE("a fully conformant case scores one") {
    RuleCatalog catalog;
    catalog.component = {passing("c.one", RuleLevel::component),
                         passing("c.two", RuleLevel::component)};
    catalog.system = {passing("s.one", RuleLevel::system)};
    const CaseResult result = score_case(three_records(), catalog, 1, kCtx);
    CHECK(result.v == 1);
    CHECK(result.c == 1.0);
    CHECK(result.record_count == 3);
    REQUIRE(result.component_outcomes.size() == 2);
    CHECK(result.component_outcomes[0].rule_id == "c.one");
    CHECK(result.component_outcomes[0].passed);
    CHECK(result.component_outcomes[1].passed);
    REQUIRE(result.system_outcomes.size() == 1);
    CHECK(result.system_outcomes[0].passed);
    CHECK(result.diagnostics.empty());
}

TEST_CASE("half the component rules failing lands at three quarters") {
    RuleCatalog catalog;
    catalog.component = {passing("c.a", RuleLevel::component),
                         failing("c.b", RuleLevel::component, 1),
                         passing("c.c", RuleLevel::component),
                         failing("c.d", RuleLevel::component)};
    catalog.system = {passing("s.a", RuleLevel::system),
                      passing("s.b", RuleLevel::system),
                      passing("s.c", RuleLevel::system)};
    const CaseResult result = score_case(three_records(), catalog, 1, kCtx);
    CHECK(result.c == 0.75);
    REQUIRE(result.component_outcomes.size() == 4);
    CHECK(result.component_outcomes[0].passed);
    CHECK_FALSE(result.component_outcomes[1].passed);
    CHECK(result.component_outcomes[2].passed);
    CHECK_FALSE(result.component_outcomes[3].passed);
    // Diagnostics arrive in catalog order with the rule id stamped on.
    REQUIRE(result.diagnostics.size() == 2);
    CHECK(result.diagnostics[0].rule_id == "c.b");
    CHECK(result.diagnostics[0].record_index == 1);
    CHECK(result.diagnostics[1].rule_id == "c.d");
    CHECK_FALSE(result.diagnostics[1].record_index.has_value());
}

TEST_CASE("system failures weigh the system half") {
    RuleCatalog catalog;
    catalog.component = {passing("c.a", RuleLevel::component),
                         passing("c.b", RuleLevel::component)};
    catalog.system = {passing("s.a", RuleLevel::system),
                      failing("s.b", RuleLevel::system),
                      failing("s.c", RuleLevel::system),
                      failing("s.d", RuleLevel::system)};
    const CaseResult result = score_case(three_records(), catalog, 1, kCtx);
    CHECK(result.c == 0.625); // 0.5 * (1 + 1/4)
}

TEST_CASE("an invalid case scores zero without consulting any rule") {
    int calls = 0;
    RuleCatalog catalog;
    catalog.component = {counting("c.count", RuleLevel::component, calls)};
    catalog.system = {counting("s.count", RuleLevel::system, calls)};
    const CaseResult result = score_case(three_records(), catalog, 0, kCtx);
    CHECK(result.v == 0);
    CHECK(result.c == 0.0);
    CHECK(result.record_count == 3);
    CHECK(result.component_outcomes.empty());
    CHECK(result.system_outcomes.empty());
    CHECK(result.diagnostics.empty());
    CHECK(calls == 0);
}

TEST_CASE("both rule levels must be populated") {
    RuleCatalog no_component;
    no_component.system = {passing("s.a", RuleLevel::system)};
    CHECK_THROWS_AS((void)score_case(three_records(), no_component, 1, kCtx), ConfigError);

    RuleCatalog no_system;
    no_system.component = {passing("c.a", RuleLevel::component)};
    CHECK_THROWS_AS((void)score_case(three_records(), no_system, 1, kCtx), ConfigError);
    // The shape is checked even for cases that will not be scored.
    CHECK_THROWS_AS((void)score_case(three_records(), no_system, 0, kCtx), ConfigError);
}

TEST_CASE("a rule that cannot read the trace counts as failed, not fatal") {
    RuleCatalog catalog;
    catalog.component = {
        {"c.greedy", RuleLevel::component, "reads a key that is not there",
         [](const RecordList& records, const EvalContext&) -> std::optional<Diagnostic> {
             (void)records.at(0).payload.at("missing");
             return std::nullopt;
         }},
        passing("c.fine", RuleLevel::component),
    };
    catalog.system = {passing("s.fine", RuleLevel::system)};
    const CaseResult result = score_case(three_records(), catalog, 1, kCtx);
    CHECK(result.c == 0.75); // 0.5 * (1/2 + 1)
    REQUIRE(result.component_outcomes.size() == 2);
    CHECK_FALSE(result.component_outcomes[0].passed);
    CHECK(result.component_outcomes[1].passed);
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0].rule_id == "c.greedy");
    CHECK(result.diagnostics[0].message.find("could not read the trace") !=
          std::string::npos);
}

TEST_CASE("diagnostic indices outside the trace are dropped") {
    RuleCatalog catalog;
    catalog.component = {failing("c.wild", RuleLevel::component, 99),
                         failing("c.tame", RuleLevel::component, 2)};
    catalog.system = {passing("s.a", RuleLevel::system)};
    const CaseResult result = score_case(three_records(), catalog, 1, kCtx);
    REQUIRE(result.diagnostics.size() == 2);
    CHECK_FALSE(result.diagnostics[0].record_index.has_value());
    CHECK(result.diagnostics[1].record_index == 2);
}

TEST_CASE("component diagnostics precede system diagnostics") {
    RuleCatalog catalog;
    catalog.component = {failing("c.first", RuleLevel::component),
                         failing("c.second", RuleLevel::component)};
    catalog.system = {failing("s.third", RuleLevel::system)};
    const CaseResult result = score_case(three_records(), catalog, 1, kCtx);
    CHECK(result.c == 0.0);
    REQUIRE(result.diagnostics.size() == 3);
    CHECK(result.diagnostics[0].rule_id == "c.first");
    CHECK(result.diagnostics[1].rule_id == "c.second");
    CHECK(result.diagnostics[2].rule_id == "s.third");
}
