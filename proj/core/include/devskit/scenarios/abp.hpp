#pragma once

#include <memory>

#include "devskit/args.hpp"
#include "devskit/kernel.hpp"
#include "devskit/trace.hpp"

namespace devskit::scenarios {

// Alternating-bit protocol over two lossy one-way channels.
//
// A Sender prepares each packet for `sender_delay`, transmits it with the
// current control bit, and waits up to `timeout` for the matching
// acknowledgement before retransmitting. The Receiver processes each packet
// for `receiver_delay` and acknowledges with the packet's bit. Both channels
// impose a constant `channel_delay` and drop packets according to a linear
// congruential noise source: x' = (17x + 11) mod 100, dropping when x' < 10.
// The forward and backward channels run the generator independently, each
// starting from `seed`.
//
// All parameters are integers, matching the scenario's command-line contract;
// times are interpreted in simulated time units.
struct AbpConfig {
    int total_packets = 1;
    int seed = 42;
    int timeout = 20;
    int sender_delay = 10;
    int receiver_delay = 10;
    int channel_delay = 3;
    int simulate_time = 1000;
};

// Throws ConfigError naming the offending flag.
void validate(const AbpConfig& config);

AbpConfig abp_config_from_args(const ArgMap& args);

// One step of the channel noise source.
struct LcgStep {
    int value = 0;  // new noise state
    bool drop = false; // value < 10
};
[[nodiscard]] LcgStep lcg_step(int state);

// Assembled coupled model named "abp" (sender, receiver, and the two subnet
// instances; both subnets log under the shared entity "subnet").
std::unique_ptr<devs::CoupledModel> build_abp(const AbpConfig& config);

// Build and run to config.simulate_time, logging into `sink`.
void run_abp(const AbpConfig& config, trace::TraceSink& sink);

} // namespace devskit::scenarios
