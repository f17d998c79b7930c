#pragma once

#include <memory>

#include "devskit/args.hpp"
#include "devskit/kernel.hpp"
#include "devskit/trace.hpp"

namespace devskit::scenarios {

// Interactive online banking system: a five-stage service pipeline
//
//   AAM -> ANV -> PV -> BPM -> TPM
//
// (authentication, account-number verification, password verification,
// business processing, transaction processing). Requests enter AAM on a fixed
// inter-arrival grid; every stage takes `stage_delay`; the two verification
// stages each reject a request at the END of their processing with
// probability (1 - pass_probability), drawn from per-stage seeded streams.
// TPM maintains the account balance, crediting `amount` per completed
// request. Stages hold any number of in-flight requests (pure delay lines).
struct IobsConfig {
    int requests = 4;
    double inter_arrival = 60.0;
    double stage_delay = 10.0;
    double pass_probability = 0.5;
    std::uint64_t seed = 1;
    double amount = 100.0;
    double horizon = 0.0; // 0 = derive from the arrival grid and pipeline depth
};

void validate(const IobsConfig& config);
IobsConfig iobs_config_from_args(const ArgMap& args);

// The horizon actually used: explicit, or wide enough for the whole grid.
[[nodiscard]] double effective_horizon(const IobsConfig& config);

std::unique_ptr<devs::CoupledModel> build_iobs(const IobsConfig& config);
void run_iobs(const IobsConfig& config, trace::TraceSink& sink);

} // namespace devskit::scenarios
