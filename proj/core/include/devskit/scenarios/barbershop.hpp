#pragma once

#include <memory>

#include "devskit/args.hpp"
#include "devskit/kernel.hpp"
#include "devskit/trace.hpp"

namespace devskit::scenarios {

// Barbershop with blocking: Reception -> Inspection -> Cutting.
//
// Reception holds a waiting queue of capacity 8 and strictly rejects
// customers that arrive while it is full. Inspection pulls customers from
// reception one at a time (a pull token announces it is free), and may hand a
// finished customer to Cutting only while it holds Cutting's done-signal
// credit — Cutting serves one customer at a time and returns the credit when
// it finishes. Customer arrivals are exponential with mean `arrival_mean`;
// `initial_burst` extra customers walk in together at t=0.
struct BarbershopConfig {
    double arrival_mean = 5.0;
    double inspection_time = 4.0;
    double cutting_time = 6.0;
    int initial_burst = 0;
    std::uint64_t seed = 1;
    double horizon = 100.0;
};

// The waiting-room capacity is part of the scenario, not a parameter.
inline constexpr int kReceptionCapacity = 8;

void validate(const BarbershopConfig& config);
BarbershopConfig barbershop_config_from_args(const ArgMap& args);

std::unique_ptr<devs::CoupledModel> build_barbershop(const BarbershopConfig& config);
void run_barbershop(const BarbershopConfig& config, trace::TraceSink& sink);

} // namespace devskit::scenarios
