#include <cstdint>
#include <optional>
#include <string>

#include "devskit/conformance/rules.hpp"

// Rule catalog for the alternating-bit protocol. Every check only demands
// that observed effects have their causes in place — never that a cause has
// already produced its effect — so traces truncated by the simulation horizon
// still pass.

namespace devskit::conformance {
namespace {

using detail::global_violation;
using detail::violation;
using trace::TraceRecord;

bool is(const TraceRecord& r, const char* entity, const char* event) {
    return r.entity == entity && r.event == event;
}

std::int64_t ival(const TraceRecord& r, const char* key) {
    return r.payload.at(key).as_int();
}

std::string sval(const TraceRecord& r, const char* key) {
    return r.payload.at(key).as_string();
}

bool bval(const TraceRecord& r, const char* key) {
    return r.payload.at(key).as_bool();
}

bool is_preparation(const TraceRecord& r) {
    return is(r, "sender", "delay_start") && sval(r, "type") == "preparation";
}

std::optional<Diagnostic> check_cause_before_effect(const RecordList& records,
                                                    const EvalContext&) {
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TraceRecord& r = records[i];
        if (is(r, "receiver", "packet_received")) {
            bool caused = false;
            for (std::size_t j = 0; j < i && !caused; ++j) {
                caused = is(records[j], "sender", "packet_sent") &&
                         records[j].time < r.time &&
                         ival(records[j], "seq_num") == ival(r, "seq_num") &&
                         ival(records[j], "bit") == ival(r, "bit");
            }
            if (!caused) {
                return violation(i, {"sender", "receiver"},
                                 "packet_received without a prior matching packet_sent");
            }
        } else if (is(r, "sender", "ack_received")) {
            bool caused = false;
            for (std::size_t j = 0; j < i && !caused; ++j) {
                caused = is(records[j], "receiver", "packet_received") &&
                         records[j].time < r.time;
            }
            if (!caused) {
                return violation(i, {"receiver", "sender"},
                                 "ack_received without any prior receiver delivery");
            }
        }
    }
    return std::nullopt;
}

std::optional<Diagnostic> check_channel_latency(const RecordList& records,
                                                const EvalContext& ctx) {
    const double delay = static_cast<double>(ctx.args.get_int("channel_delay"));
    auto exists_at = [&](double t, auto&& predicate) {
        for (const TraceRecord& r : records) {
            if (r.time == t && predicate(r)) {
                return true;
            }
        }
        return false;
    };

    for (std::size_t i = 0; i < records.size(); ++i) {
        const TraceRecord& r = records[i];
        if (is(r, "subnet", "packet_get")) {
            const std::string channel = sval(r, "channel");
            const bool anchored = exists_at(r.time, [&](const TraceRecord& x) {
                return channel == "forward" ? is(x, "sender", "packet_sent")
                                            : is(x, "receiver", "packet_received");
            });
            if (!anchored) {
                return violation(i, {"subnet"},
                                 "packet_get at a time with no " +
                                     std::string(channel == "forward" ? "packet_sent"
                                                                      : "packet_received"));
            }
        } else if (is(r, "receiver", "delay_start")) {
            // Processing starts either when a packet lands (channel_delay
            // after its forward pass) or when the previous delivery completes
            // and a buffered duplicate takes the slot.
            const bool delivered =
                exists_at(r.time - delay,
                          [](const TraceRecord& x) {
                              return is(x, "subnet", "packet_get") &&
                                     sval(x, "channel") == "forward" &&
                                     sval(x, "behavior") == "pass";
                          }) ||
                exists_at(r.time, [](const TraceRecord& x) {
                    return is(x, "receiver", "packet_received");
                });
            if (!delivered) {
                return violation(i, {"subnet", "receiver"},
                                 "processing starts without a forward pass exactly "
                                 "channel_delay earlier");
            }
        } else if (is(r, "sender", "ack_received")) {
            const bool delivered =
                exists_at(r.time - delay, [](const TraceRecord& x) {
                    return is(x, "subnet", "packet_get") && sval(x, "channel") == "backward" &&
                           sval(x, "behavior") == "pass";
                });
            if (!delivered) {
                return violation(i, {"subnet", "sender"},
                                 "ack_received without a backward pass exactly "
                                 "channel_delay earlier");
            }
        }
    }
    return std::nullopt;
}

std::optional<Diagnostic> check_noise_orbit(const RecordList& records,
                                            const EvalContext& ctx) {
    const std::int64_t seed = ctx.args.get_int("seed");
    std::int64_t forward = seed;
    std::int64_t backward = seed;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TraceRecord& r = records[i];
        if (!is(r, "subnet", "packet_get")) {
            continue;
        }
        std::int64_t& state = sval(r, "channel") == "forward" ? forward : backward;
        state = (17 * state + 11) % 100;
        const bool drop = state < 10;
        if (ival(r, "noise_value") != state) {
            return violation(i, {"subnet"},
                             "noise_value off the (17x+11) mod 100 orbit: expected " +
                                 std::to_string(state));
        }
        if ((sval(r, "behavior") == "drop") != drop) {
            return violation(i, {"subnet"},
                             std::string("behavior must be ") + (drop ? "drop" : "pass") +
                                 " for noise_value " + std::to_string(state));
        }
    }
    return std::nullopt;
}

std::optional<Diagnostic> check_stop_and_wait(const RecordList& records,
                                              const EvalContext&) {
    std::optional<std::int64_t> outstanding;
    std::int64_t outstanding_bit = 0;
    std::int64_t last_acked = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TraceRecord& r = records[i];
        if (is(r, "sender", "packet_sent")) {
            const std::int64_t seq = ival(r, "seq_num");
            if (bval(r, "is_retry")) {
                if (!outstanding || seq != *outstanding ||
                    ival(r, "bit") != outstanding_bit) {
                    return violation(i, {"sender"},
                                     "retransmission does not repeat the outstanding packet");
                }
            } else {
                if (outstanding) {
                    return violation(i, {"sender"},
                                     "new packet sent while one is still unacknowledged");
                }
                if (seq != last_acked + 1) {
                    return violation(i, {"sender"},
                                     "expected next sequence number " +
                                         std::to_string(last_acked + 1) + ", got " +
                                         std::to_string(seq));
                }
                outstanding = seq;
                outstanding_bit = ival(r, "bit");
            }
        } else if (is(r, "sender", "ack_received") && bval(r, "is_valid")) {
            if (!outstanding) {
                return violation(i, {"sender"},
                                 "valid acknowledgement with no packet outstanding");
            }
            last_acked = *outstanding;
            outstanding.reset();
        }
    }
    return std::nullopt;
}

std::optional<Diagnostic> check_alternating_bit(const RecordList& records,
                                                const EvalContext&) {
    std::int64_t next_seq = 1;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TraceRecord& r = records[i];
        if (!is(r, "sender", "packet_sent") || bval(r, "is_retry")) {
            continue;
        }
        const std::int64_t seq = ival(r, "seq_num");
        const std::int64_t bit = ival(r, "bit");
        if (seq != next_seq) {
            return violation(i, {"sender"},
                             "original transmissions must walk seq 1, 2, 3, ...");
        }
        if (bit != (seq - 1) % 2) {
            return violation(i, {"sender"},
                             "control bit must alternate starting at 0 (seq " +
                                 std::to_string(seq) + ")");
        }
        ++next_seq;
    }
    return std::nullopt;
}

std::optional<Diagnostic> check_horizon(const RecordList& records, const EvalContext& ctx) {
    const double horizon = static_cast<double>(ctx.args.get_int("simulate_time"));
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].time > horizon) {
            return violation(i, {records[i].entity},
                             "event after the simulation horizon " +
                                 std::to_string(horizon));
        }
    }
    return std::nullopt;
}

std::optional<Diagnostic> check_monotone(const RecordList& records, const EvalContext&) {
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].time < records[i - 1].time) {
            return violation(i, {records[i].entity}, "timestamps must never decrease");
        }
    }
    return std::nullopt;
}

std::optional<Diagnostic> check_preparation_duration(const RecordList& records,
                                                     const EvalContext& ctx) {
    const double prep = static_cast<double>(ctx.args.get_int("sender_delay"));
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TraceRecord& r = records[i];
        if (!is(r, "sender", "packet_sent")) {
            continue;
        }
        bool prepared = false;
        for (const TraceRecord& x : records) {
            if (is_preparation(x) && x.time == r.time - prep &&
                x.payload.at("duration").as_number() == prep) {
                prepared = true;
                break;
            }
        }
        if (!prepared) {
            return violation(i, {"sender"},
                             "packet_sent without a preparation of exactly sender_delay");
        }
    }
    return std::nullopt;
}

std::optional<Diagnostic> check_processing_duration(const RecordList& records,
                                                    const EvalContext& ctx) {
    const double proc = static_cast<double>(ctx.args.get_int("receiver_delay"));
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TraceRecord& r = records[i];
        if (!is(r, "receiver", "packet_received")) {
            continue;
        }
        bool processed = false;
        for (const TraceRecord& x : records) {
            if (is(x, "receiver", "delay_start") && sval(x, "type") == "processing" &&
                x.time == r.time - proc && x.payload.at("duration").as_number() == proc) {
                processed = true;
                break;
            }
        }
        if (!processed) {
            return violation(i, {"receiver"},
                             "packet_received without a processing window of exactly "
                             "receiver_delay");
        }
    }
    return std::nullopt;
}

// A preparation directly after an unacknowledged send is the timeout path and
// must start exactly `timeout` after that send; a preparation following a
// valid acknowledgement starts with it immediately.
std::optional<Diagnostic> check_timeout_gap(const RecordList& records,
                                            const EvalContext& ctx) {
    const double timeout = static_cast<double>(ctx.args.get_int("timeout"));
    std::optional<double> last_send;
    std::optional<double> last_valid_ack;
    bool send_is_latest = false;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TraceRecord& r = records[i];
        if (is(r, "sender", "packet_sent")) {
            last_send = r.time;
            send_is_latest = true;
        } else if (is(r, "sender", "ack_received") && bval(r, "is_valid")) {
            last_valid_ack = r.time;
            send_is_latest = false;
        } else if (is_preparation(r)) {
            if (send_is_latest && last_send) {
                if (r.time - *last_send != timeout) {
                    return violation(i, {"sender"},
                                     "retransmission preparation must start exactly "
                                     "timeout after the unacknowledged send");
                }
            } else if (last_valid_ack && r.time != *last_valid_ack) {
                return violation(i, {"sender"},
                                 "next-packet preparation must start with the "
                                 "acknowledgement");
            }
        }
    }
    return std::nullopt;
}

std::optional<Diagnostic> check_retry_flag(const RecordList& records, const EvalContext&) {
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TraceRecord& r = records[i];
        if (!is(r, "sender", "packet_sent")) {
            continue;
        }
        bool seen_before = false;
        for (std::size_t j = 0; j < i && !seen_before; ++j) {
            seen_before = is(records[j], "sender", "packet_sent") &&
                          ival(records[j], "seq_num") == ival(r, "seq_num");
        }
        if (bval(r, "is_retry") != seen_before) {
            return violation(i, {"sender"},
                             seen_before ? "repeated send must be flagged is_retry"
                                         : "first send of a packet must not be a retry");
        }
    }
    return std::nullopt;
}

std::optional<Diagnostic> check_ack_validity_flag(const RecordList& records,
                                                  const EvalContext&) {
    bool awaiting = false;
    std::int64_t expected_bit = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TraceRecord& r = records[i];
        if (is(r, "sender", "packet_sent")) {
            awaiting = true;
            expected_bit = ival(r, "bit");
        } else if (is(r, "sender", "ack_received")) {
            const bool should_be_valid = awaiting && ival(r, "ack_bit") == expected_bit;
            if (bval(r, "is_valid") != should_be_valid) {
                return violation(i, {"sender"},
                                 should_be_valid
                                     ? "matching acknowledgement marked invalid"
                                     : "acknowledgement marked valid out of turn");
            }
            if (should_be_valid) {
                awaiting = false;
            }
        }
    }
    return std::nullopt;
}

std::optional<Diagnostic> check_required_events(const RecordList& records,
                                                const EvalContext& ctx) {
    const std::int64_t total_packets = ctx.args.get_int("total_packets");
    const double horizon = ctx.args.get_double("simulate_time");
    if (total_packets < 1 || horizon <= 0.0) {
        return std::nullopt; // nothing is guaranteed to happen
    }
    for (const TraceRecord& r : records) {
        if (r.time == 0.0 && is_preparation(r)) {
            return std::nullopt;
        }
    }
    return global_violation({"sender"},
                            "missing the initial preparation delay_start at time 0");
}

} // namespace

namespace detail {

RuleCatalog make_abp_rules() {
    RuleCatalog catalog;
    catalog.system = {
        {"abp.required-events", RuleLevel::system,
         "a run that delivers at least one packet starts preparing at time 0",
         check_required_events},
        {"abp.cause-before-effect", RuleLevel::system,
         "every delivery and acknowledgement is preceded by its cause",
         check_cause_before_effect},
        {"abp.channel-latency", RuleLevel::system,
         "channel crossings take exactly channel_delay", check_channel_latency},
        {"abp.noise-orbit", RuleLevel::system,
         "subnet noise follows the seeded (17x+11) mod 100 orbit with drops below 10",
         check_noise_orbit},
        {"abp.stop-and-wait", RuleLevel::system,
         "at most one packet is ever outstanding", check_stop_and_wait},
        {"abp.alternating-bit", RuleLevel::system,
         "original sends walk seq 1,2,3,... with bit (seq-1) mod 2",
         check_alternating_bit},
        {"abp.horizon-bound", RuleLevel::system,
         "no event occurs after simulate_time", check_horizon},
        {"abp.monotone-time", RuleLevel::system, "timestamps never decrease",
         check_monotone},
    };
    catalog.component = {
        {"abp.preparation-duration", RuleLevel::component,
         "each send is preceded by a sender_delay-long preparation",
         check_preparation_duration},
        {"abp.processing-duration", RuleLevel::component,
         "each delivery is preceded by a receiver_delay-long processing window",
         check_processing_duration},
        {"abp.timeout-retransmission-gap", RuleLevel::component,
         "timeout retransmissions are re-prepared exactly timeout after the send",
         check_timeout_gap},
        {"abp.retry-flag", RuleLevel::component,
         "is_retry marks exactly the repeated sends", check_retry_flag},
        {"abp.ack-validity-flag", RuleLevel::component,
         "is_valid reflects the alternating-bit acceptance state",
         check_ack_validity_flag},
    };
    return catalog;
}

} // namespace detail
} // namespace devskit::conformance
