#pragma once

#include <set>
#include <string>
#include <vector>

#include "devskit/genpipe/client.hpp"
#include "devskit/genpipe/prompts.hpp"
#include "devskit/genpipe/schema.hpp"

namespace devskit::genpipe {

// Recursive structural planning: classify each node, split coupled nodes into
// child drafts, formulate atomic specifications — every agent step bounded by
// max_attempts client calls, with local schema validation fed back verbatim
// into the prompt's {feedback} slot on retry. Failures carry the node path
// ("System/Sender") in a PipelineError.

struct PlannerConfig {
    int max_attempts = 3;   // client calls per agent step
    int subtree_retries = 1; // re-splits of a parent after a child subtree fails
    int max_depth = 16;      // recursion guard
    std::string root_name = "System";
};

struct Classification {
    NodeKind kind = NodeKind::atomic;
    std::vector<std::string> submodels; // candidate children when coupled
};

// "notsure" triggers one augmented re-query, then defaults to coupled.
// Throws ConfigError on empty requirements, PipelineError on retry
// exhaustion.
Classification classify(const std::string& node_path, const std::string& name,
                        const std::string& requirements, const std::string& context,
                        ChatClient& client, const PromptLibrary& prompts,
                        const PlannerConfig& config = {});

struct SplitResult {
    struct Child {
        std::string class_name;
        ModelSpecification spec;
    };
    std::vector<Child> children;
    std::string coupling_specification;
};

// Decompose a coupled node. `taken` holds class names already used elsewhere
// in the tree; proposing one of them is a validation failure (class names are
// unique tree-wide).
SplitResult split(const std::string& node_path, const std::string& name,
                  const ModelSpecification& parent_spec, const std::string& context,
                  const std::set<std::string>& taken, ChatClient& client,
                  const PromptLibrary& prompts, const PlannerConfig& config = {});

// Produce the strict specification for an atomic node.
ModelSpecification formulate(const std::string& node_path, const std::string& name,
                             const std::string& requirements, const std::string& context,
                             ChatClient& client, const PromptLibrary& prompts,
                             const PlannerConfig& config = {});

// The full recursive plan over a requirement document and experiment
// contract. The result always passes validate_plan with zero findings.
PlanNode plan(const std::string& spec_text, const std::string& contract_text,
              ChatClient& client, const PromptLibrary& prompts,
              const PlannerConfig& config = {});

} // namespace devskit::genpipe
