#include "devskit/scenarios/seird.hpp"

#include <cmath>

#include "devskit/coordinator.hpp"
#include "devskit/error.hpp"

namespace devskit::scenarios {
namespace {

class SeirdModel final : public devs::AtomicModel {
public:
    explicit SeirdModel(const SeirdConfig& config) : AtomicModel("seird"), config_(config) {
        state_ = SeirdState{config.susceptible, config.exposed, config.infective,
                            config.recovered, config.deceased};
    }

    void initialize() override {
        emit_state();
        hold_in("stepping", SimTime(config_.dt));
    }

    void delta_int() override {
        state_ = seird_euler_step(state_, config_);
        emit_state();
        hold_in("stepping", SimTime(config_.dt));
    }

private:
    void emit_state() {
        log("state_update", EventValue::Object{{"S", EventValue(state_.S)},
                                               {"E", EventValue(state_.E)},
                                               {"I", EventValue(state_.I)},
                                               {"R", EventValue(state_.R)},
                                               {"D", EventValue(state_.D)}});
    }

    SeirdConfig config_;
    SeirdState state_;
};

} // namespace

void validate(const SeirdConfig& config) {
    if (config.population <= 0.0) {
        throw ConfigError("--population must be > 0");
    }
    const std::pair<double, const char*> compartments[] = {
        {config.susceptible, "--susceptible"}, {config.exposed, "--exposed"},
        {config.infective, "--infective"},     {config.recovered, "--recovered"},
        {config.deceased, "--deceased"},
    };
    for (const auto& [value, flag] : compartments) {
        if (value < 0.0 || !std::isfinite(value)) {
            throw ConfigError(std::string(flag) + " must be >= 0");
        }
    }
    const double total = config.susceptible + config.exposed + config.infective +
                         config.recovered + config.deceased;
    if (std::abs(total - config.population) > 1e-9 * config.population) {
        throw ConfigError("compartments must sum to --population (got " + std::to_string(total) +
                          " vs " + std::to_string(config.population) + ")");
    }
    const std::pair<double, const char*> rates[] = {
        {config.beta, "--beta"}, {config.sigma, "--sigma"}, {config.gamma, "--gamma"}};
    for (const auto& [value, flag] : rates) {
        if (value < 0.0 || !std::isfinite(value)) {
            throw ConfigError(std::string(flag) + " must be >= 0");
        }
    }
    if (config.mu < 0.0 || config.mu > 1.0) {
        throw ConfigError("--mu must lie in [0, 1]");
    }
    if (config.dt <= 0.0 || !std::isfinite(config.dt)) {
        throw ConfigError("--dt must be > 0");
    }
    if (config.horizon < 0.0 || !std::isfinite(config.horizon)) {
        throw ConfigError("--horizon must be >= 0");
    }
}

SeirdConfig seird_config_from_args(const ArgMap& args) {
    SeirdConfig config;
    config.population = args.get_double("population");
    config.susceptible = args.get_double("susceptible");
    config.exposed = args.get_double("exposed");
    config.infective = args.get_double("infective");
    config.recovered = args.get_double("recovered");
    config.deceased = args.get_double("deceased");
    config.beta = args.get_double("beta");
    config.sigma = args.get_double("sigma");
    config.gamma = args.get_double("gamma");
    config.mu = args.get_double("mu");
    config.dt = args.get_double("dt");
    config.horizon = args.get_double("horizon");
    return config;
}

SeirdState seird_euler_step(const SeirdState& s, const SeirdConfig& c) {
    const double infection = c.beta * s.S * s.I / c.population;
    const double incubation = c.sigma * s.E;
    const double removal = c.gamma * s.I;
    SeirdState next;
    next.S = s.S + c.dt * (-infection);
    next.E = s.E + c.dt * (infection - incubation);
    next.I = s.I + c.dt * (incubation - removal);
    next.R = s.R + c.dt * ((1.0 - c.mu) * removal);
    next.D = s.D + c.dt * (c.mu * removal);
    return next;
}

std::unique_ptr<devs::CoupledModel> build_seird(const SeirdConfig& config) {
    validate(config);
    auto root = std::make_unique<devs::CoupledModel>("epidemic");
    root->add_component(std::make_unique<SeirdModel>(config));
    return root;
}

void run_seird(const SeirdConfig& config, trace::TraceSink& sink) {
    auto root = build_seird(config);
    devs::CoordinatorOptions options;
    options.sink = &sink;
    devs::Coordinator coordinator(*root, options);
    coordinator.run_until(SimTime(config.horizon));
}

} // namespace devskit::scenarios
