#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace devskit::conformance {

// One child-process execution: argv, optional stdin payload, a wall-clock
// limit, and output caps. The stdout cap bounds what a runaway simulator can
// make the harness hold in memory; hitting it kills the child and marks the
// run, which the validity gate then rejects.
struct RunSpec {
    std::vector<std::string> argv;
    std::string stdin_payload;
    double wall_timeout_s = 10.0;
    std::size_t stdout_cap = 64ull * 1024 * 1024;
    std::size_t stderr_cap = 1ull * 1024 * 1024; // kept for diagnostics only
};

struct RunResult {
    bool spawned = false;       // fork/exec reached the target program
    std::string spawn_error;    // why not, when spawned is false
    bool exited_normally = false;
    int exit_code = -1;         // valid when exited_normally
    int term_signal = 0;        // valid when killed by a signal
    bool timed_out = false;
    bool output_capped = false; // stdout exceeded its cap (stderr just truncates)
    std::string stdout_text;
    std::string stderr_text;
    double wall_seconds = 0.0;
};

// Run to completion (or kill at the limits) and collect everything. Never
// throws for child-side failures; those land in the result fields.
RunResult run_process(const RunSpec& spec);

} // namespace devskit::conformance
