#pragma once

#include <memory>

#include "devskit/args.hpp"
#include "devskit/kernel.hpp"
#include "devskit/trace.hpp"

namespace devskit::scenarios {

// Compartmental S-E-I-R-D epidemic, integrated with a forward Euler step of
// size dt inside a single atomic model:
//
//   dS = -beta * S * I / N
//   dE =  beta * S * I / N - sigma * E
//   dI =  sigma * E - gamma * I
//   dR = (1 - mu) * gamma * I
//   dD =       mu * gamma * I
//
// The flows only move mass between compartments, so S+E+I+R+D is conserved
// exactly up to floating-point rounding. The model emits one "state_update"
// record per step (including the initial state at t=0).
struct SeirdConfig {
    double population = 1000.0;
    double susceptible = 990.0;
    double exposed = 0.0;
    double infective = 10.0;
    double recovered = 0.0;
    double deceased = 0.0;
    double beta = 0.3;   // transmission rate
    double sigma = 0.2;  // incubation rate (E -> I)
    double gamma = 0.1;  // removal rate (I -> R/D)
    double mu = 0.02;    // case fatality fraction of removals
    double dt = 0.5;
    double horizon = 100.0;
};

void validate(const SeirdConfig& config);
SeirdConfig seird_config_from_args(const ArgMap& args);

// One Euler step applied to (S, E, I, R, D); exposed for oracle use.
struct SeirdState {
    double S = 0, E = 0, I = 0, R = 0, D = 0;
};
[[nodiscard]] SeirdState seird_euler_step(const SeirdState& state, const SeirdConfig& config);

std::unique_ptr<devs::CoupledModel> build_seird(const SeirdConfig& config);
void run_seird(const SeirdConfig& config, trace::TraceSink& sink);

} // namespace devskit::scenarios
