#include "devskit/scenarios/barbershop.hpp"

#include <cmath>
#include <deque>
#include <optional>
#include <vector>

#include "devskit/coordinator.hpp"
#include "devskit/error.hpp"
#include "devskit/rng.hpp"

namespace devskit::scenarios {
namespace {

using devs::MessageBags;

EventValue customer_message(int id) {
    return EventValue(EventValue::Object{{"customer_id", EventValue(id)}});
}

int customer_id(const EventValue& message) {
    return static_cast<int>(message.as_object().at("customer_id").as_int());
}

class Arrivals final : public devs::AtomicModel {
public:
    explicit Arrivals(const BarbershopConfig& config)
        : AtomicModel("arrivals"),
          mean_(config.arrival_mean),
          burst_(config.initial_burst),
          rng_(config.seed, "barbershop.arrivals") {
        add_out_port("out");
    }

    void initialize() override {
        if (burst_ > 0) {
            for (int i = 0; i < burst_; ++i) {
                pending_.push_back(++last_id_);
            }
            hold_in("arriving", SimTime(0.0));
        } else {
            schedule_next();
        }
    }

    void collect_outputs(MessageBags& out) const override {
        for (const int id : pending_) {
            out.push("out", customer_message(id));
        }
    }

    void delta_int() override {
        pending_.clear();
        schedule_next();
    }

private:
    void schedule_next() {
        pending_.push_back(++last_id_);
        hold_in("arriving", SimTime(rng_.exponential(mean_)));
    }

    double mean_;
    int burst_;
    Substream rng_;
    int last_id_ = 0;
    std::vector<int> pending_;
};

// Waiting room with strict capacity. Dispatches one customer per pull token,
// in arrival order, through a zero-delay emission.
class Reception final : public devs::AtomicModel {
public:
    Reception() : AtomicModel("reception") {
        add_in_port("in_customer");
        add_in_port("in_pull");
        add_out_port("out_customer");
    }

    void collect_outputs(MessageBags& out) const override {
        if (dispatching_.has_value()) {
            out.push("out_customer", customer_message(*dispatching_));
        }
    }

    void delta_int() override {
        dispatching_.reset();
        maybe_dispatch();
    }

    void delta_ext(SimTime, const MessageBags& input) override {
        for (const auto& message : input.at("in_customer")) {
            const int id = customer_id(message);
            log("arrival", EventValue::Object{{"customer_id", EventValue(id)}});
            if (static_cast<int>(queue_.size()) < kReceptionCapacity) {
                queue_.push_back(id);
            } else {
                log("rejected", EventValue::Object{{"customer_id", EventValue(id)}});
            }
        }
        if (!input.at("in_pull").empty()) {
            credit_ = true;
        }
        maybe_dispatch();
    }

private:
    void maybe_dispatch() {
        if (dispatching_.has_value()) {
            hold_in("dispatching", SimTime(0.0)); // emission already scheduled
        } else if (credit_ && !queue_.empty()) {
            dispatching_ = queue_.front();
            queue_.pop_front();
            credit_ = false;
            hold_in("dispatching", SimTime(0.0));
        } else {
            passivate("idle");
        }
    }

    std::deque<int> queue_;
    bool credit_ = false; // inspection is free and waiting
    std::optional<int> dispatching_;
};

// Serves one customer at a time; announces itself to reception with a pull
// token, and forwards finished customers to cutting only while holding the
// done-signal credit.
class Inspection final : public devs::AtomicModel {
public:
    explicit Inspection(const BarbershopConfig& config)
        : AtomicModel("inspection"), service_time_(config.inspection_time) {
        add_in_port("in_customer");
        add_in_port("in_done");
        add_out_port("out_customer");
        add_out_port("out_pull");
    }

    void initialize() override {
        hold_in("announcing", SimTime(0.0)); // initial pull token
    }

    void collect_outputs(MessageBags& out) const override {
        if (phase() == "announcing") {
            out.push("out_pull", EventValue(EventValue::Object{}));
        } else if (phase() == "busy" && credit_) {
            out.push("out_customer", customer_message(*current_));
        } else if (phase() == "releasing") {
            out.push("out_customer", customer_message(*current_));
        }
    }

    void delta_int() override {
        if (phase() == "announcing") {
            passivate("idle");
        } else if (phase() == "busy") {
            log("service_end", EventValue::Object{{"customer_id", EventValue(*current_)}});
            if (credit_) {
                // The finished customer left through the output function.
                credit_ = false;
                current_.reset();
                hold_in("announcing", SimTime(0.0));
            } else {
                passivate("blocked"); // wait for cutting's done signal
            }
        } else { // releasing
            current_.reset();
            hold_in("announcing", SimTime(0.0));
        }
    }

    void delta_ext(SimTime elapsed, const MessageBags& input) override {
        const double remaining = sigma().is_finite() ? sigma().value() - elapsed.value() : 0.0;
        if (!input.at("in_done").empty()) {
            credit_ = true;
        }
        for (const auto& message : input.at("in_customer")) {
            current_ = customer_id(message);
            log("service_start", EventValue::Object{{"customer_id", EventValue(*current_)}});
            hold_in("busy", SimTime(service_time_));
            return;
        }
        if (phase() == "blocked" && credit_) {
            credit_ = false;
            hold_in("releasing", SimTime(0.0));
        } else if (sigma().is_finite()) {
            hold_in(phase(), SimTime(remaining));
        }
    }

private:
    double service_time_;
    bool credit_ = true; // cutting starts idle
    std::optional<int> current_;
};

class Cutting final : public devs::AtomicModel {
public:
    explicit Cutting(const BarbershopConfig& config)
        : AtomicModel("cutting"), service_time_(config.cutting_time) {
        add_in_port("in_customer");
        add_out_port("out_done");
    }

    void collect_outputs(MessageBags& out) const override {
        if (phase() == "busy") {
            out.push("out_done", customer_message(*current_));
        }
    }

    void delta_int() override {
        log("service_end", EventValue::Object{{"customer_id", EventValue(*current_)}});
        log("done_signal", EventValue::Object{{"customer_id", EventValue(*current_)}});
        current_.reset();
        passivate("idle");
    }

    void delta_ext(SimTime, const MessageBags& input) override {
        // The handshake guarantees this model is idle when a customer lands.
        current_ = customer_id(input.at("in_customer").front());
        log("service_start", EventValue::Object{{"customer_id", EventValue(*current_)}});
        hold_in("busy", SimTime(service_time_));
    }

private:
    double service_time_;
    std::optional<int> current_;
};

} // namespace

void validate(const BarbershopConfig& config) {
    if (config.arrival_mean <= 0.0 || !std::isfinite(config.arrival_mean)) {
        throw ConfigError("--arrival_mean must be > 0");
    }
    if (config.inspection_time <= 0.0 || !std::isfinite(config.inspection_time)) {
        throw ConfigError("--inspection_time must be > 0");
    }
    if (config.cutting_time <= 0.0 || !std::isfinite(config.cutting_time)) {
        throw ConfigError("--cutting_time must be > 0");
    }
    if (config.initial_burst < 0) {
        throw ConfigError("--initial_burst must be >= 0");
    }
    if (config.horizon < 0.0 || !std::isfinite(config.horizon)) {
        throw ConfigError("--horizon must be >= 0");
    }
}

BarbershopConfig barbershop_config_from_args(const ArgMap& args) {
    BarbershopConfig config;
    config.arrival_mean = args.get_double("arrival_mean");
    config.inspection_time = args.get_double("inspection_time");
    config.cutting_time = args.get_double("cutting_time");
    config.initial_burst = static_cast<int>(args.get_int("initial_burst"));
    config.seed = static_cast<std::uint64_t>(args.get_int("seed"));
    config.horizon = args.get_double("horizon");
    return config;
}

std::unique_ptr<devs::CoupledModel> build_barbershop(const BarbershopConfig& config) {
    validate(config);
    auto root = std::make_unique<devs::CoupledModel>("barbershop");
    root->add_component(std::make_unique<Arrivals>(config));
    root->add_component(std::make_unique<Reception>());
    root->add_component(std::make_unique<Inspection>(config));
    root->add_component(std::make_unique<Cutting>(config));

    root->couple("arrivals.out", "reception.in_customer");
    root->couple("reception.out_customer", "inspection.in_customer");
    root->couple("inspection.out_pull", "reception.in_pull");
    root->couple("inspection.out_customer", "cutting.in_customer");
    root->couple("cutting.out_done", "inspection.in_done");
    return root;
}

void run_barbershop(const BarbershopConfig& config, trace::TraceSink& sink) {
    auto root = build_barbershop(config);
    devs::CoordinatorOptions options;
    options.sink = &sink;
    devs::Coordinator coordinator(*root, options);
    coordinator.run_until(SimTime(config.horizon));
}

} // namespace devskit::scenarios
