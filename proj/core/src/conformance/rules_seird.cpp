#include <cmath>
#include <string>

#include "devskit/conformance/rules.hpp"

namespace devskit::conformance {
namespace {

using detail::violation;
using trace::TraceRecord;

const char* kCompartments[] = {"S", "E", "I", "R", "D"};

std::optional<Diagnostic> check_conservation(const RecordList& records,
                                             const EvalContext& ctx) {
    const double population = ctx.args.get_double("population");
    for (std::size_t i = 0; i < records.size(); ++i) {
        double total = 0.0;
        for (const char* key : kCompartments) {
            total += records[i].payload.at(key).as_number();
        }
        if (std::abs(total - population) > 1e-9 * population) {
            return violation(i, {records[i].entity},
                             "compartments sum to " + std::to_string(total) +
                                 ", expected the population " + std::to_string(population));
        }
    }
    return std::nullopt;
}

std::optional<Diagnostic> check_non_negativity(const RecordList& records,
                                               const EvalContext& ctx) {
    const double slack = 1e-9 * ctx.args.get_double("population");
    for (std::size_t i = 0; i < records.size(); ++i) {
        for (const char* key : kCompartments) {
            if (records[i].payload.at(key).as_number() < -slack) {
                return violation(i, {records[i].entity},
                                 std::string("compartment ") + key + " went negative");
            }
        }
    }
    return std::nullopt;
}

std::optional<Diagnostic> check_cadence(const RecordList& records, const EvalContext& ctx) {
    const double dt = ctx.args.get_double("dt");
    const double horizon = ctx.args.get_double("horizon");
    const auto expected_count =
        static_cast<std::size_t>(std::floor(horizon / dt + 1e-9)) + 1;
    if (records.size() != expected_count) {
        return detail::global_violation(
            {"seird"}, "expected " + std::to_string(expected_count) + " state updates, got " +
                           std::to_string(records.size()));
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TraceRecord& r = records[i];
        if (r.event != "state_update") {
            return violation(i, {r.entity}, "only state_update events belong in this trace");
        }
        if (std::abs(r.time - static_cast<double>(i) * dt) > 1e-9) {
            return violation(i, {r.entity},
                             "state updates must land on the dt grid (step " +
                                 std::to_string(i) + ")");
        }
    }
    return std::nullopt;
}

} // namespace

namespace detail {

RuleCatalog make_seird_rules() {
    RuleCatalog catalog;
    catalog.component = {
        {"seird.conservation", RuleLevel::component,
         "compartments sum to the population at every step", check_conservation},
        {"seird.non-negativity", RuleLevel::component,
         "no compartment goes negative", check_non_negativity},
    };
    catalog.system = {
        {"seird.step-cadence", RuleLevel::system,
         "one state_update per Euler step, covering the whole horizon",
         check_cadence},
    };
    return catalog;
}

} // namespace detail
} // namespace devskit::conformance
