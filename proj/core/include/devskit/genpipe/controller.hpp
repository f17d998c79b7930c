#pragma once

#include <string>
#include <vector>

namespace devskit::genpipe {

// One-call facade over the staged pipeline: read the requirement document and
// experiment contract, plan the model tree, then construct and write the
// artifacts. This is what `devskit generate` drives.

struct ControllerConfig {
    std::string spec_path;        // requirement document
    std::string contract_path;    // experiment contract
    std::string output_dir;       // plan.json + generated sources land here
    std::string backend = "mock"; // "mock" (scripted replies) or "http"
    std::string mock_script_path; // required when backend == "mock"
    int concurrency = 1;          // sibling subtrees built concurrently when > 1
    std::string prompt_dir;       // override the embedded prompt templates
};

struct GenerationResult {
    std::string plan_path;
    std::vector<std::string> artifact_paths;
};

// Throws ConfigError for unusable inputs and PipelineError (naming the
// deepest failing node) when an agent step exhausts its retries. The plan and
// any artifacts completed before a failure are left in output_dir.
GenerationResult generate(const ControllerConfig& config);

} // namespace devskit::genpipe
