#include "devskit/scenarios/iobs.hpp"

#include <cmath>
#include <deque>
#include <string>

#include "devskit/coordinator.hpp"
#include "devskit/error.hpp"
#include "devskit/rng.hpp"

namespace devskit::scenarios {
namespace {

using devs::MessageBags;

EventValue request_message(int id) {
    return EventValue(EventValue::Object{{"request_id", EventValue(id)}});
}

class RequestSource final : public devs::AtomicModel {
public:
    explicit RequestSource(const IobsConfig& config)
        : AtomicModel("source"), total_(config.requests), gap_(config.inter_arrival) {
        add_out_port("out");
    }

    void initialize() override {
        if (total_ > 0) {
            hold_in("emitting", SimTime(0.0));
        }
    }

    void collect_outputs(MessageBags& out) const override {
        out.push("out", request_message(next_));
    }

    void delta_int() override {
        if (++next_ > total_) {
            passivate("done");
        } else {
            hold_in("emitting", SimTime(gap_));
        }
    }

private:
    int total_;
    double gap_;
    int next_ = 1;
};

// A service stage: an infinite-capacity delay line. Gated stages draw each
// request's fate from their substream at entry (one draw per entering
// request, in arrival order) and surface the outcome when processing ends —
// a dropped request produces "request_drop" instead of moving on. The
// terminal stage credits the balance on completion instead of forwarding.
class Stage final : public devs::AtomicModel {
public:
    enum class Kind { plain, gated, terminal };

    Stage(std::string name, Kind kind, const IobsConfig& config)
        : AtomicModel(std::move(name)),
          kind_(kind),
          delay_(config.stage_delay),
          pass_probability_(config.pass_probability),
          amount_(config.amount),
          rng_(config.seed, "iobs." + this->name()) {
        add_in_port("in");
        if (kind_ != Kind::terminal) {
            add_out_port("out");
        }
    }

    void collect_outputs(MessageBags& out) const override {
        if (queue_.empty()) {
            return;
        }
        const Entry& head = queue_.front();
        if (head.pass && kind_ != Kind::terminal) {
            out.push("out", request_message(head.id));
        }
    }

    void delta_int() override {
        clock_ = queue_.front().due;
        const Entry head = queue_.front();
        queue_.pop_front();
        if (!head.pass) {
            log("request_drop", EventValue::Object{{"request_id", EventValue(head.id)}});
        } else if (kind_ == Kind::terminal) {
            balance_ += amount_;
            log("balance_update", EventValue::Object{{"request_id", EventValue(head.id)},
                                                     {"balance", EventValue(balance_)}});
        }
        reschedule();
    }

    void delta_ext(SimTime elapsed, const MessageBags& input) override {
        clock_ += elapsed.value();
        for (const auto& message : input.at("in")) {
            const int id = static_cast<int>(message.as_object().at("request_id").as_int());
            log("request_enter", EventValue::Object{{"request_id", EventValue(id)}});
            const bool pass = kind_ != Kind::gated || rng_.bernoulli(pass_probability_);
            queue_.push_back(Entry{clock_ + delay_, id, pass});
        }
        reschedule();
    }

private:
    struct Entry {
        double due;
        int id;
        bool pass;
    };

    void reschedule() {
        if (queue_.empty()) {
            passivate("idle");
        } else {
            hold_in("busy", SimTime(queue_.front().due - clock_));
        }
    }

    Kind kind_;
    double delay_;
    double pass_probability_;
    double amount_;
    Substream rng_;
    double clock_ = 0.0;
    double balance_ = 0.0;
    std::deque<Entry> queue_;
};

} // namespace

void validate(const IobsConfig& config) {
    if (config.requests < 0) {
        throw ConfigError("--requests must be >= 0");
    }
    if (config.inter_arrival <= 0.0 || !std::isfinite(config.inter_arrival)) {
        throw ConfigError("--inter_arrival must be > 0");
    }
    if (config.stage_delay <= 0.0 || !std::isfinite(config.stage_delay)) {
        throw ConfigError("--stage_delay must be > 0");
    }
    if (config.pass_probability < 0.0 || config.pass_probability > 1.0) {
        throw ConfigError("--pass_probability must lie in [0, 1]");
    }
    if (config.amount <= 0.0 || !std::isfinite(config.amount)) {
        throw ConfigError("--amount must be > 0");
    }
    if (config.horizon < 0.0 || !std::isfinite(config.horizon)) {
        throw ConfigError("--horizon must be >= 0");
    }
}

IobsConfig iobs_config_from_args(const ArgMap& args) {
    IobsConfig config;
    config.requests = static_cast<int>(args.get_int("requests"));
    config.inter_arrival = args.get_double("inter_arrival");
    config.stage_delay = args.get_double("stage_delay");
    config.pass_probability = args.get_double("pass_probability");
    config.seed = static_cast<std::uint64_t>(args.get_int("seed"));
    config.amount = args.get_double("amount");
    config.horizon = args.get_double("horizon");
    return config;
}

double effective_horizon(const IobsConfig& config) {
    if (config.horizon > 0.0) {
        return config.horizon;
    }
    const double last_arrival =
        config.requests > 0 ? (config.requests - 1) * config.inter_arrival : 0.0;
    return last_arrival + 5.0 * config.stage_delay + 1.0;
}

std::unique_ptr<devs::CoupledModel> build_iobs(const IobsConfig& config) {
    validate(config);
    auto root = std::make_unique<devs::CoupledModel>("iobs");
    root->add_component(std::make_unique<RequestSource>(config));
    root->add_component(std::make_unique<Stage>("aam", Stage::Kind::plain, config));
    root->add_component(std::make_unique<Stage>("anv", Stage::Kind::gated, config));
    root->add_component(std::make_unique<Stage>("pv", Stage::Kind::gated, config));
    root->add_component(std::make_unique<Stage>("bpm", Stage::Kind::plain, config));
    root->add_component(std::make_unique<Stage>("tpm", Stage::Kind::terminal, config));

    root->couple("source.out", "aam.in");
    root->couple("aam.out", "anv.in");
    root->couple("anv.out", "pv.in");
    root->couple("pv.out", "bpm.in");
    root->couple("bpm.out", "tpm.in");
    return root;
}

void run_iobs(const IobsConfig& config, trace::TraceSink& sink) {
    auto root = build_iobs(config);
    devs::CoordinatorOptions options;
    options.sink = &sink;
    devs::Coordinator coordinator(*root, options);
    coordinator.run_until(SimTime(effective_horizon(config)));
}

} // namespace devskit::scenarios
