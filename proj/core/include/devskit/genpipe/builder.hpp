#pragma once

#include <map>
#include <string>
#include <vector>

#include "devskit/genpipe/client.hpp"
#include "devskit/genpipe/prompts.hpp"
#include "devskit/genpipe/schema.hpp"

namespace devskit::genpipe {

// Bottom-up code construction over a validated plan. Each atomic node becomes
// a C++ header, each coupled node a header generated after (and conditioned
// on) its children's summaries, and the root additionally gets a main.cpp
// entry point. Summaries are extracted from the generated code, not copied
// from the plan — the code is the authority on what a model actually does.

struct BuilderConfig {
    int max_attempts = 3; // client calls per generation / summarization step
    int concurrency = 1;  // sibling subtrees build concurrently when > 1
};

struct CodeArtifact {
    std::string class_name;
    std::string source;          // full header text
    ModelSpecification summary;  // extracted from `source`
};

struct ArtifactSet {
    // Keyed by class name; iteration order is the on-disk order.
    std::map<std::string, CodeArtifact> artifacts;
    std::string controller_source; // main.cpp for the root model
};

// Pull the source out of a <cpp_code>...</cpp_code> reply; markdown fences
// directly inside the tags are tolerated. Throws SerializeError when the tags
// are missing or empty.
std::string extract_code(const std::string& reply);

// Summarize one generated source file back into a ModelSpecification.
// Retries until every port the summary claims actually appears in the source.
ModelSpecification summarize(const std::string& node_path, const std::string& source,
                             const std::string& sub_models, ChatClient& client,
                             const PromptLibrary& prompts, const BuilderConfig& config = {});

// Build every artifact for the tree into `out`. Completed artifacts are
// recorded as they finish, so when a node fails permanently (PipelineError
// naming its path) the siblings built so far remain in `out`.
void construct(const PlanNode& tree, const std::string& contract, ChatClient& client,
               const PromptLibrary& prompts, const BuilderConfig& config, ArtifactSet& out);

// Write <ClassName>.hpp per artifact plus main.cpp into `out_dir` (created if
// needed), in sorted order. Returns the written paths.
std::vector<std::string> write_artifacts(const ArtifactSet& set, const std::string& out_dir);

} // namespace devskit::genpipe
