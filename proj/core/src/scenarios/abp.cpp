#include "devskit/scenarios/abp.hpp"

#include <deque>
#include <optional>
#include <string>

#include "devskit/coordinator.hpp"
#include "devskit/error.hpp"

namespace devskit::scenarios {
namespace {

using devs::MessageBags;

// Wire formats between the models: a packet is {"seq_num", "bit"}, an
// acknowledgement is {"bit"}. Trace payloads are defined by the scenario's
// public event catalog and built where each event is logged.

struct Packet {
    int seq_num = 0;
    int bit = 0;
};

EventValue packet_message(const Packet& p) {
    return EventValue(EventValue::Object{{"seq_num", EventValue(p.seq_num)},
                                         {"bit", EventValue(p.bit)}});
}

Packet packet_from(const EventValue& v) {
    const auto& obj = v.as_object();
    return Packet{static_cast<int>(obj.at("seq_num").as_int()),
                  static_cast<int>(obj.at("bit").as_int())};
}

class Sender final : public devs::AtomicModel {
public:
    Sender(const AbpConfig& config)
        : AtomicModel("sender"),
          total_(config.total_packets),
          timeout_(config.timeout),
          prep_delay_(config.sender_delay) {
        add_in_port("in_ack");
        add_out_port("out_packet");
    }

    void initialize() override {
        if (total_ < 1) {
            passivate("done");
            return;
        }
        start_preparing();
    }

    void collect_outputs(MessageBags& out) const override {
        if (phase() == "preparing") {
            out.push("out_packet", packet_message(Packet{seq_, bit_}));
        }
    }

    void delta_int() override {
        if (phase() == "preparing") {
            // The packet just left through the output function.
            log("packet_sent", EventValue::Object{{"seq_num", EventValue(seq_)},
                                                  {"bit", EventValue(bit_)},
                                                  {"is_retry", EventValue(attempts_ > 0)}});
            ++attempts_;
            hold_in("waiting", SimTime(static_cast<double>(timeout_)));
        } else {
            // Acknowledgement timeout: prepare the retransmission.
            start_preparing();
        }
    }

    void delta_ext(SimTime elapsed, const MessageBags& input) override {
        const double remaining = sigma().is_finite() ? sigma().value() - elapsed.value() : 0.0;
        if (!handle_acks(input) && phase() != "done") {
            // Nothing accepted: the pending schedule continues unchanged.
            hold_in(phase(), sigma().is_finite() ? SimTime(remaining) : SimTime::passive());
        }
    }

    void delta_con(const MessageBags& input) override {
        if (phase() == "preparing") {
            // The retransmission is already on the wire; the colliding
            // acknowledgement (necessarily for the current bit) lands after.
            delta_int();
            if (!handle_acks(input)) {
                hold_in("waiting", SimTime(static_cast<double>(timeout_)));
            }
        } else {
            // Timer expiry and acknowledgement coincide: the arriving
            // acknowledgement wins; only if it is unusable does the timeout
            // retransmission go ahead.
            if (!handle_acks(input)) {
                delta_int();
            }
        }
    }

private:
    void start_preparing() {
        log("delay_start", EventValue::Object{{"type", EventValue("preparation")},
                                              {"duration",
                                               EventValue(static_cast<double>(prep_delay_))}});
        hold_in("preparing", SimTime(static_cast<double>(prep_delay_)));
    }

    // Logs every acknowledgement in the bag; applies the first valid one.
    // Returns true when one was accepted (the schedule was re-planned).
    bool handle_acks(const MessageBags& input) {
        bool accepted = false;
        for (const auto& message : input.at("in_ack")) {
            const int ack_bit = static_cast<int>(message.as_object().at("bit").as_int());
            const bool awaiting = !accepted && phase() != "done" &&
                                  (phase() == "waiting" ||
                                   (phase() == "preparing" && attempts_ > 0));
            const bool valid = awaiting && ack_bit == bit_;
            log("ack_received", EventValue::Object{{"ack_bit", EventValue(ack_bit)},
                                                   {"is_valid", EventValue(valid)}});
            if (!valid) {
                continue;
            }
            accepted = true;
            ++seq_;
            if (seq_ > total_) {
                passivate("done");
            } else {
                bit_ = (seq_ - 1) % 2;
                attempts_ = 0;
                start_preparing();
            }
        }
        return accepted;
    }

    int total_;
    int timeout_;
    int prep_delay_;
    int seq_ = 1;
    int bit_ = 0;
    int attempts_ = 0; // transmissions of the current packet so far
};

class Receiver final : public devs::AtomicModel {
public:
    explicit Receiver(const AbpConfig& config)
        : AtomicModel("receiver"), delay_(config.receiver_delay) {
        add_in_port("in_packet");
        add_out_port("out_ack");
    }

    void collect_outputs(MessageBags& out) const override {
        if (phase() == "processing") {
            out.push("out_ack",
                     EventValue(EventValue::Object{{"bit", EventValue(current_->bit)}}));
        }
    }

    void delta_int() override {
        log("packet_received", EventValue::Object{{"seq_num", EventValue(current_->seq_num)},
                                                  {"bit", EventValue(current_->bit)}});
        current_.reset();
        if (buffered_.has_value()) {
            current_ = buffered_;
            buffered_.reset();
            start_processing();
        } else {
            passivate("idle");
        }
    }

    void delta_ext(SimTime elapsed, const MessageBags& input) override {
        const double remaining = sigma().is_finite() ? sigma().value() - elapsed.value() : 0.0;
        bool rescheduled = false;
        for (const auto& message : input.at("in_packet")) {
            const Packet packet = packet_from(message);
            if (!current_.has_value()) {
                current_ = packet;
                start_processing();
                rescheduled = true;
            } else if (!buffered_.has_value()) {
                buffered_ = packet;
            } // further simultaneous packets are discarded
        }
        if (!rescheduled && phase() == "processing") {
            hold_in("processing", SimTime(remaining));
        }
    }

private:
    void start_processing() {
        log("delay_start",
            EventValue::Object{{"type", EventValue("processing")},
                               {"duration", EventValue(static_cast<double>(delay_))}});
        hold_in("processing", SimTime(static_cast<double>(delay_)));
    }

    int delay_;
    std::optional<Packet> current_;
    std::optional<Packet> buffered_;
};

// One-way lossy channel. The drop decision is made the instant a packet
// arrives (stepping the shared noise source once per packet); surviving
// packets queue behind a constant transmission delay.
class Subnet final : public devs::AtomicModel {
public:
    Subnet(std::string instance_name, std::string channel, const AbpConfig& config)
        : AtomicModel(std::move(instance_name)),
          channel_(std::move(channel)),
          delay_(config.channel_delay),
          noise_(config.seed) {
        set_trace_entity("subnet");
        add_in_port("in");
        add_out_port("out");
    }

    void collect_outputs(MessageBags& out) const override {
        if (!queue_.empty()) {
            out.push("out", queue_.front().second);
        }
    }

    void delta_int() override {
        clock_ = queue_.front().first;
        queue_.pop_front();
        reschedule();
    }

    void delta_ext(SimTime elapsed, const MessageBags& input) override {
        clock_ += elapsed.value();
        for (const auto& message : input.at("in")) {
            const LcgStep step = lcg_step(noise_);
            noise_ = step.value;
            log("packet_get",
                EventValue::Object{{"behavior", EventValue(step.drop ? "drop" : "pass")},
                                   {"channel", EventValue(channel_)},
                                   {"noise_value", EventValue(step.value)}});
            if (!step.drop) {
                queue_.emplace_back(clock_ + delay_, message);
            }
        }
        reschedule();
    }

private:
    void reschedule() {
        if (queue_.empty()) {
            passivate("idle");
        } else {
            hold_in("transmitting", SimTime(queue_.front().first - clock_));
        }
    }

    std::string channel_;
    int delay_;
    int noise_;
    double clock_ = 0.0;
    std::deque<std::pair<double, EventValue>> queue_;
};

} // namespace

void validate(const AbpConfig& config) {
    if (config.total_packets < 0) {
        throw ConfigError("--total_packets must be >= 0");
    }
    if (config.seed < 0) {
        throw ConfigError("--seed must be >= 0");
    }
    if (config.timeout < 1) {
        throw ConfigError("--timeout must be >= 1");
    }
    if (config.sender_delay < 1) {
        throw ConfigError("--sender_delay must be >= 1");
    }
    if (config.receiver_delay < 1) {
        throw ConfigError("--receiver_delay must be >= 1");
    }
    if (config.channel_delay < 1) {
        throw ConfigError("--channel_delay must be >= 1");
    }
    if (config.simulate_time < 0) {
        throw ConfigError("--simulate_time must be >= 0");
    }
}

AbpConfig abp_config_from_args(const ArgMap& args) {
    AbpConfig config;
    config.total_packets = static_cast<int>(args.get_int("total_packets"));
    config.seed = static_cast<int>(args.get_int("seed"));
    config.timeout = static_cast<int>(args.get_int("timeout"));
    config.sender_delay = static_cast<int>(args.get_int("sender_delay"));
    config.receiver_delay = static_cast<int>(args.get_int("receiver_delay"));
    config.channel_delay = static_cast<int>(args.get_int("channel_delay"));
    config.simulate_time = static_cast<int>(args.get_int("simulate_time"));
    return config;
}

LcgStep lcg_step(int state) {
    const int next = (17 * state + 11) % 100;
    return LcgStep{next, next < 10};
}

std::unique_ptr<devs::CoupledModel> build_abp(const AbpConfig& config) {
    validate(config);
    auto root = std::make_unique<devs::CoupledModel>("abp");
    root->add_component(std::make_unique<Sender>(config));
    root->add_component(std::make_unique<Receiver>(config));
    root->add_component(std::make_unique<Subnet>("subnet_forward", "forward", config));
    root->add_component(std::make_unique<Subnet>("subnet_backward", "backward", config));

    root->couple("sender.out_packet", "subnet_forward.in");
    root->couple("subnet_forward.out", "receiver.in_packet");
    root->couple("receiver.out_ack", "subnet_backward.in");
    root->couple("subnet_backward.out", "sender.in_ack");
    return root;
}

void run_abp(const AbpConfig& config, trace::TraceSink& sink) {
    auto root = build_abp(config);
    devs::CoordinatorOptions options;
    options.sink = &sink;
    devs::Coordinator coordinator(*root, options);
    coordinator.run_until(SimTime(static_cast<double>(config.simulate_time)));
}

} // namespace devskit::scenarios
