#include <cmath>
#include <map>
#include <optional>
#include <string>

#include "devskit/conformance/rules.hpp"

namespace devskit::conformance {
namespace {

using detail::violation;
using trace::TraceRecord;

int customer_of(const TraceRecord& r) {
    return static_cast<int>(r.payload.at("customer_id").as_int());
}

bool is(const TraceRecord& r, const char* entity, const char* event) {
    return r.entity == entity && r.event == event;
}

// Each station serves for its configured time: every service_end matches the
// station's open service_start exactly service-time earlier.
std::optional<Diagnostic> check_service_durations(const RecordList& records,
                                                  const EvalContext& ctx) {
    const std::map<std::string, double> durations{
        {"inspection", ctx.args.get_double("inspection_time")},
        {"cutting", ctx.args.get_double("cutting_time")},
    };
    std::map<std::string, std::pair<int, double>> open; // entity -> (customer, start)
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TraceRecord& r = records[i];
        const auto duration = durations.find(r.entity);
        if (duration == durations.end()) {
            continue;
        }
        if (r.event == "service_start") {
            open[r.entity] = {customer_of(r), r.time};
        } else if (r.event == "service_end") {
            const auto it = open.find(r.entity);
            if (it == open.end() || it->second.first != customer_of(r)) {
                return violation(i, {r.entity},
                                 "service_end without a matching service_start");
            }
            if (r.time != it->second.second + duration->second) {
                return violation(i, {r.entity},
                                 r.entity + " service must take exactly " +
                                     std::to_string(duration->second));
            }
            open.erase(it);
        }
    }
    return std::nullopt;
}

// One chair per station: no service_start while the previous customer's
// service is still open.
std::optional<Diagnostic> check_single_chair(const RecordList& records,
                                             const EvalContext&) {
    std::map<std::string, int> busy_with; // entity -> open customer
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TraceRecord& r = records[i];
        if (r.entity != "inspection" && r.entity != "cutting") {
            continue;
        }
        if (r.event == "service_start") {
            if (busy_with.count(r.entity) != 0) {
                return violation(i, {r.entity},
                                 "station started a customer while still serving " +
                                     std::to_string(busy_with[r.entity]));
            }
            busy_with[r.entity] = customer_of(r);
        } else if (r.event == "service_end") {
            busy_with.erase(r.entity);
        }
    }
    return std::nullopt;
}

std::optional<Diagnostic> check_capacity(const RecordList& records, const EvalContext&) {
    int admitted = 0;
    int started = 0;
    std::size_t i = 0;
    while (i < records.size()) {
        const double now = records[i].time;
        std::size_t last = i;
        for (; i < records.size() && records[i].time == now; ++i) {
            const TraceRecord& r = records[i];
            last = i;
            if (is(r, "reception", "arrival")) {
                ++admitted;
            } else if (is(r, "reception", "rejected")) {
                --admitted; // the arrival logged just before was turned away
                if (admitted - started != 8) {
                    return violation(i, {"reception"},
                                     "customer rejected while seats were free");
                }
            } else if (is(r, "inspection", "service_start")) {
                ++started;
            }
        }
        const int occupancy = admitted - started;
        if (occupancy < 0 || occupancy > 8) {
            return violation(last, {"reception"},
                             "waiting room occupancy " + std::to_string(occupancy) +
                                 " outside [0, 8]");
        }
    }
    return std::nullopt;
}

// The pull/done credit protocol, seen from the trace: inspections only start
// for admitted customers, cutting only starts for customers inspection
// finished, and cutting never takes a second customer before signalling done.
std::optional<Diagnostic> check_handshake(const RecordList& records, const EvalContext&) {
    int done_signals = 0;
    int cuts_started = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TraceRecord& r = records[i];
        if (is(r, "inspection", "service_start")) {
            const int id = customer_of(r);
            bool admitted = false;
            for (std::size_t j = 0; j < i; ++j) {
                if (is(records[j], "reception", "arrival") && customer_of(records[j]) == id) {
                    admitted = true;
                }
                if (is(records[j], "reception", "rejected") && customer_of(records[j]) == id) {
                    admitted = false;
                }
            }
            if (!admitted) {
                return violation(i, {"reception", "inspection"},
                                 "inspection started customer " + std::to_string(id) +
                                     " who was never admitted");
            }
        } else if (is(r, "cutting", "service_start")) {
            const int id = customer_of(r);
            // Inspection must have finished this customer by now; at a direct
            // handoff the two records share the timestamp.
            bool inspected = false;
            for (const TraceRecord& x : records) {
                if (is(x, "inspection", "service_end") && customer_of(x) == id &&
                    x.time <= r.time) {
                    inspected = true;
                    break;
                }
            }
            if (!inspected) {
                return violation(i, {"inspection", "cutting"},
                                 "cutting started customer " + std::to_string(id) +
                                     " before inspection finished them");
            }
            ++cuts_started;
            if (cuts_started > done_signals + 1) {
                return violation(i, {"cutting"},
                                 "cutting accepted a customer without an intervening "
                                 "done signal");
            }
        } else if (is(r, "cutting", "done_signal")) {
            ++done_signals;
        }
    }
    return std::nullopt;
}

std::optional<Diagnostic> check_fifo(const RecordList& records, const EvalContext&) {
    int last_inspected = 0;
    int last_cut = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TraceRecord& r = records[i];
        if (is(r, "inspection", "service_start")) {
            if (customer_of(r) <= last_inspected) {
                return violation(i, {"inspection"},
                                 "inspection must serve customers in arrival order");
            }
            last_inspected = customer_of(r);
        } else if (is(r, "cutting", "service_start")) {
            if (customer_of(r) <= last_cut) {
                return violation(i, {"cutting"},
                                 "cutting must serve customers in arrival order");
            }
            last_cut = customer_of(r);
        }
    }
    return std::nullopt;
}

std::optional<Diagnostic> check_required_events(const RecordList& records,
                                                const EvalContext& ctx) {
    const std::int64_t burst = ctx.args.get_int("initial_burst");
    const double horizon = ctx.args.get_double("horizon");
    if (burst < 1 || horizon <= 0.0) {
        return std::nullopt; // the shop may legitimately stay empty
    }
    for (const TraceRecord& r : records) {
        if (r.time == 0.0 && is(r, "reception", "arrival") && customer_of(r) == 1) {
            return std::nullopt;
        }
    }
    return detail::global_violation(
        {"reception"}, "missing the burst arrival of customer 1 at time 0");
}

} // namespace

namespace detail {

RuleCatalog make_barbershop_rules() {
    RuleCatalog catalog;
    catalog.component = {
        {"barbershop.service-durations", RuleLevel::component,
         "each station serves for exactly its configured time",
         check_service_durations},
        {"barbershop.single-chair", RuleLevel::component,
         "stations serve one customer at a time", check_single_chair},
    };
    catalog.system = {
        {"barbershop.required-events", RuleLevel::system,
         "an initial burst shows up as arrivals at time 0", check_required_events},
        {"barbershop.capacity", RuleLevel::system,
         "the waiting room holds at most eight customers and rejects only when full",
         check_capacity},
        {"barbershop.handshake", RuleLevel::system,
         "customers flow reception -> inspection -> cutting under the credit protocol",
         check_handshake},
        {"barbershop.fifo", RuleLevel::system,
         "both stations serve in arrival order", check_fifo},
    };
    return catalog;
}

} // namespace detail
} // namespace devskit::conformance
