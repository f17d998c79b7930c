#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "devskit/conformance/rules.hpp"
#include "devskit/conformance/stats.hpp"

// Rule catalog for the online banking pipeline. Requests that are still in
// flight when the horizon cuts the run off have no observable outcome yet;
// every check below either anchors on events that did happen or skips such
// requests, so truncated traces stay conformant.

namespace devskit::conformance {
namespace {

using detail::global_violation;
using detail::violation;
using trace::TraceRecord;

const char* kChain[] = {"aam", "anv", "pv", "bpm", "tpm"};

int stage_index(const std::string& entity) {
    for (int i = 0; i < 5; ++i) {
        if (entity == kChain[i]) {
            return i;
        }
    }
    return -1;
}

int request_of(const TraceRecord& r) {
    return static_cast<int>(r.payload.at("request_id").as_int());
}

// The time the run was allowed to cover: an explicit horizon, or the same
// derivation the scenario uses (last arrival plus the full pipeline).
double case_horizon(const EvalContext& ctx) {
    const double horizon = ctx.args.get_double("horizon");
    if (horizon > 0.0) {
        return horizon;
    }
    const std::int64_t requests = ctx.args.get_int("requests");
    const double last_arrival =
        requests > 0 ? static_cast<double>(requests - 1) * ctx.args.get_double("inter_arrival")
                     : 0.0;
    return last_arrival + 5.0 * ctx.args.get_double("stage_delay") + 1.0;
}

// For one request's entry into a stage, the event that ends that visit:
// entry into the next stage, a drop at this stage, or the balance credit.
const TraceRecord* find_outcome(const RecordList& records, std::size_t entry_index) {
    const TraceRecord& entry = records[entry_index];
    const int id = request_of(entry);
    const int stage = stage_index(entry.entity);
    for (std::size_t j = entry_index + 1; j < records.size(); ++j) {
        const TraceRecord& r = records[j];
        if (request_of(r) != id) {
            continue;
        }
        if (r.event == "request_drop" && r.entity == entry.entity) {
            return &r;
        }
        if (r.event == "request_enter" && stage_index(r.entity) == stage + 1) {
            return &r;
        }
        if (r.event == "balance_update" && stage == 4) {
            return &r;
        }
    }
    return nullptr;
}

std::optional<Diagnostic> check_stage_latency(const RecordList& records,
                                              const EvalContext& ctx) {
    const double delay = ctx.args.get_double("stage_delay");
    const double horizon = case_horizon(ctx);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TraceRecord& r = records[i];
        if (r.event != "request_enter") {
            continue;
        }
        const TraceRecord* outcome = find_outcome(records, i);
        if (outcome == nullptr) {
            if (r.time + delay <= horizon) {
                return violation(i, {r.entity},
                                 "request " + std::to_string(request_of(r)) +
                                     " entered but never left within the horizon");
            }
            continue; // cut off by the horizon
        }
        if (outcome->time != r.time + delay) {
            return violation(i, {r.entity},
                             "stage visit must take exactly stage_delay (request " +
                                 std::to_string(request_of(r)) + ")");
        }
    }
    return std::nullopt;
}

std::optional<Diagnostic> check_drop_legality(const RecordList& records,
                                              const EvalContext&) {
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TraceRecord& r = records[i];
        if (r.event == "request_drop" && r.entity != "anv" && r.entity != "pv") {
            return violation(i, {r.entity},
                             "only the verification stages may drop requests");
        }
    }
    return std::nullopt;
}

std::optional<Diagnostic> check_arrival_grid(const RecordList& records,
                                             const EvalContext& ctx) {
    const double gap = ctx.args.get_double("inter_arrival");
    const std::int64_t requests = ctx.args.get_int("requests");
    int expected_id = 1;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TraceRecord& r = records[i];
        if (r.event != "request_enter" || r.entity != "aam") {
            continue;
        }
        if (request_of(r) != expected_id || expected_id > requests) {
            return violation(i, {"aam"}, "arrivals must carry ids 1..requests in order");
        }
        const double expected_time = static_cast<double>(expected_id - 1) * gap;
        if (r.time != expected_time) {
            return violation(i, {"aam"},
                             "request " + std::to_string(expected_id) +
                                 " must arrive on the inter_arrival grid");
        }
        ++expected_id;
    }
    return std::nullopt;
}

std::optional<Diagnostic> check_balance_audit(const RecordList& records,
                                              const EvalContext& ctx) {
    const double amount = ctx.args.get_double("amount");
    double expected_balance = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TraceRecord& r = records[i];
        if (r.event != "balance_update") {
            continue;
        }
        if (r.entity != "tpm") {
            return violation(i, {r.entity}, "only tpm may update the balance");
        }
        const int id = request_of(r);
        // The credited request must have visited every stage and never dropped.
        for (const char* stage : kChain) {
            bool entered = false;
            for (const TraceRecord& x : records) {
                if (x.event == "request_enter" && x.entity == stage &&
                    request_of(x) == id) {
                    entered = true;
                    break;
                }
            }
            if (!entered) {
                return violation(i, {"tpm"},
                                 "request " + std::to_string(id) + " was credited but never "
                                 "entered " + stage);
            }
        }
        for (const TraceRecord& x : records) {
            if (x.event == "request_drop" && request_of(x) == id) {
                return violation(i, {"tpm"},
                                 "request " + std::to_string(id) +
                                     " was both dropped and credited");
            }
        }
        expected_balance += amount;
        if (r.payload.at("balance").as_number() != expected_balance) {
            return violation(i, {"tpm"},
                             "balance must grow by amount per completion (expected " +
                                 std::to_string(expected_balance) + ")");
        }
    }
    return std::nullopt;
}

// Exact two-sided binomial test on a gated stage's observed pass rate.
std::optional<Diagnostic> check_gate_distribution(const RecordList& records,
                                                  const EvalContext& ctx,
                                                  const std::string& stage) {
    const double p = ctx.args.get_double("pass_probability");
    std::int64_t n = 0;
    std::int64_t passes = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TraceRecord& r = records[i];
        if (r.event != "request_enter" || r.entity != stage) {
            continue;
        }
        const TraceRecord* outcome = find_outcome(records, i);
        if (outcome == nullptr) {
            continue; // fate not observable before the horizon
        }
        ++n;
        passes += outcome->event == "request_enter" ? 1 : 0;
    }
    const double p_value = binomial_two_sided_pvalue(n, passes, p);
    if (p_value < 1e-4) {
        return global_violation(
            {stage}, stage + " passed " + std::to_string(passes) + "/" + std::to_string(n) +
                         " requests; two-sided exact binomial p = " + std::to_string(p_value) +
                         " against pass_probability " + std::to_string(p));
    }
    return std::nullopt;
}

} // namespace

namespace detail {

RuleCatalog make_iobs_rules() {
    RuleCatalog catalog;
    catalog.component = {
        {"iobs.stage-latency", RuleLevel::component,
         "every stage visit takes exactly stage_delay", check_stage_latency},
        {"iobs.drop-stage-legality", RuleLevel::component,
         "drops happen only at the verification stages", check_drop_legality},
    };
    catalog.system = {
        {"iobs.arrival-grid", RuleLevel::system,
         "requests enter on the deterministic arrival grid", check_arrival_grid},
        {"iobs.balance-audit", RuleLevel::system,
         "the balance is credited once per fully completed request",
         check_balance_audit},
        {"iobs.gate-distribution-anv", RuleLevel::system,
         "anv pass rate is consistent with pass_probability (exact binomial, 1e-4)",
         [](const RecordList& records, const EvalContext& ctx) {
             return check_gate_distribution(records, ctx, "anv");
         }},
        {"iobs.gate-distribution-pv", RuleLevel::system,
         "pv pass rate is consistent with pass_probability (exact binomial, 1e-4)",
         [](const RecordList& records, const EvalContext& ctx) {
             return check_gate_distribution(records, ctx, "pv");
         }},
    };
    return catalog;
}

} // namespace detail
} // namespace devskit::conformance
