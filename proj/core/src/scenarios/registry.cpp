#include "devskit/scenarios/registry.hpp"

#include "devskit/error.hpp"
#include "devskit/scenarios/abp.hpp"
#include "devskit/scenarios/barbershop.hpp"
#include "devskit/scenarios/iobs.hpp"
#include "devskit/scenarios/seird.hpp"

namespace devskit::scenarios {
namespace {

void run_abp_args(const ArgMap& args, trace::TraceSink& sink) {
    run_abp(abp_config_from_args(args), sink);
}

void run_seird_args(const ArgMap& args, trace::TraceSink& sink) {
    run_seird(seird_config_from_args(args), sink);
}

void run_iobs_args(const ArgMap& args, trace::TraceSink& sink) {
    run_iobs(iobs_config_from_args(args), sink);
}

void run_barbershop_args(const ArgMap& args, trace::TraceSink& sink) {
    run_barbershop(barbershop_config_from_args(args), sink);
}

std::vector<Scenario> make_registry() {
    std::vector<Scenario> registry;

    registry.push_back(Scenario{
        "abp",
        "alternating-bit protocol over lossy channels",
        {
            {"total_packets", std::nullopt, "number of packets the sender will deliver"},
            {"seed", "42", "noise-generator seed shared by both channels"},
            {"timeout", "20", "sender acknowledgement timeout"},
            {"sender_delay", "10", "packet preparation delay"},
            {"receiver_delay", "10", "packet processing delay"},
            {"channel_delay", "3", "one-way channel latency"},
            {"simulate_time", "1000", "simulation horizon"},
        },
        &run_abp_args,
    });

    registry.push_back(Scenario{
        "seird",
        "compartmental epidemic integrated by forward Euler",
        {
            {"population", "1000", "total population N"},
            {"susceptible", "990", "initial susceptible compartment"},
            {"exposed", "0", "initial exposed compartment"},
            {"infective", "10", "initial infective compartment"},
            {"recovered", "0", "initial recovered compartment"},
            {"deceased", "0", "initial deceased compartment"},
            {"beta", "0.3", "transmission rate"},
            {"sigma", "0.2", "incubation rate"},
            {"gamma", "0.1", "removal rate"},
            {"mu", "0.02", "case fatality fraction"},
            {"dt", "0.5", "Euler step size"},
            {"horizon", "100", "simulation horizon"},
        },
        &run_seird_args,
    });

    registry.push_back(Scenario{
        "iobs",
        "five-stage online banking pipeline with verification gates",
        {
            {"requests", "4", "number of requests entering the pipeline"},
            {"inter_arrival", "60", "gap between consecutive requests"},
            {"stage_delay", "10", "processing time of every stage"},
            {"pass_probability", "0.5", "per-gate probability a request passes"},
            {"seed", "1", "verification-gate stream seed"},
            {"amount", "100", "balance credited per completed request"},
            {"horizon", "0", "simulation horizon (0 = derive from the arrival grid)"},
        },
        &run_iobs_args,
    });

    registry.push_back(Scenario{
        "barbershop",
        "blocking reception/inspection/cutting service chain",
        {
            {"arrival_mean", "5", "mean exponential inter-arrival time"},
            {"inspection_time", "4", "inspection service time"},
            {"cutting_time", "6", "cutting service time"},
            {"initial_burst", "0", "customers arriving together at t=0"},
            {"seed", "1", "arrival-stream seed"},
            {"horizon", "100", "simulation horizon"},
        },
        &run_barbershop_args,
    });

    return registry;
}

} // namespace

const std::vector<Scenario>& all_scenarios() {
    static const std::vector<Scenario> registry = make_registry();
    return registry;
}

const Scenario* find_scenario(std::string_view name) {
    for (const auto& scenario : all_scenarios()) {
        if (scenario.name == name) {
            return &scenario;
        }
    }
    return nullptr;
}

ArgMap scenario_defaults(const Scenario& scenario) {
    ArgMap defaults;
    for (const auto& flag : scenario.flags) {
        if (flag.default_value.has_value()) {
            defaults.set(flag.name, *flag.default_value);
        }
    }
    return defaults;
}

void run_scenario(const Scenario& scenario, const ArgMap& args, trace::TraceSink& sink) {
    scenario.run(args.overlaid_on(scenario_defaults(scenario)), sink);
}

std::vector<std::string> scenario_flag_names(const Scenario& scenario) {
    std::vector<std::string> names;
    names.reserve(scenario.flags.size());
    for (const auto& flag : scenario.flags) {
        names.push_back(flag.name);
    }
    return names;
}

} // namespace devskit::scenarios
