#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "devskit/conformance/scoring.hpp"

namespace devskit::conformance {

// One invocation of the simulator under test: ordered command-line flags, an
// optional stdin payload, and a wall-clock limit.
struct TestCase {
    std::string id;
    std::vector<std::pair<std::string, std::string>> args;
    std::string stdin_payload;
    double wall_timeout_s = 10.0;
};

struct Suite {
    std::string scenario;
    std::vector<TestCase> cases;
};

// Suite definition document (JSON):
//   {
//     "scenario": "abp",
//     "cases": [
//       {"id": "smoke", "args": {"total_packets": 1}, "timeout_s": 10,
//        "stdin": ""},
//       ...
//     ]
//   }
// Flag values may be JSON strings or integers; "stdin" and "timeout_s" are
// optional. Case ids must be unique and non-empty. Throws ConfigError on any
// structural problem.
Suite load_suite(std::istream& in);
Suite load_suite_file(const std::string& path);

struct EvaluateOptions {
    int jobs = 1;                               // concurrent child processes
    std::size_t stdout_cap = 64ull * 1024 * 1024;
};

// Whole-suite scores: oss and bcs are plain means over the cases.
struct Scores {
    std::string scenario;
    double oss = 0.0;
    double bcs = 0.0;
    std::vector<CaseResult> cases; // in suite order
};

// Run `command` once per case (the case's flags appended as "--flag value"),
// gate validity, apply the scenario's rule catalog, and aggregate. Cases may
// execute concurrently; results are deterministic and ordered by the suite.
// Throws ConfigError for an empty suite or unknown scenario.
Scores evaluate_suite(const std::vector<std::string>& command, const Suite& suite,
                      const EvaluateOptions& options = {});

// Machine-readable report (JSON, stable key order).
void write_report(const Scores& scores, const std::vector<std::string>& command,
                  std::ostream& out);

// Short human-readable summary, one line per case plus totals.
std::string summarize(const Scores& scores);

} // namespace devskit::conformance
