#include "devskit/genpipe/planner.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <utility>

#include "devskit/error.hpp"

namespace devskit::genpipe {
namespace {

using nlohmann::json;

// Models wrap replies in markdown fences or chat around them; recover the
// outermost JSON object rather than insisting on a bare document.
std::string extract_json_object(const std::string& text) {
    const auto first = text.find('{');
    const auto last = text.rfind('}');
    if (first == std::string::npos || last == std::string::npos || last < first) {
        throw SerializeError("reply contains no JSON object");
    }
    return text.substr(first, last - first + 1);
}

json parse_reply_object(const std::string& text) {
    json doc;
    try {
        doc = json::parse(extract_json_object(text));
    } catch (const json::exception& e) {
        throw SerializeError(std::string("reply is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw SerializeError("reply is not a JSON object");
    }
    return doc;
}

std::string feedback_from(const std::vector<std::string>& findings) {
    std::string out = "## [Reviewer Feedback]\n"
                      "Your previous reply was rejected for these reasons:\n";
    for (const auto& f : findings) {
        out += "- " + f + "\n";
    }
    out += "Return a corrected reply that fixes every point above.";
    return out;
}

std::string ask(ChatClient& client, const PromptLibrary& prompts,
                const std::string& template_name,
                const std::map<std::string, std::string>& slots,
                const std::string& schema_hint) {
    ChatRequest request;
    request.messages.push_back({"user", prompts.render(template_name, slots)});
    request.schema_hint = schema_hint;
    return client.send(request);
}

[[noreturn]] void exhausted(const std::string& node_path, const std::string& step,
                            int attempts, const std::vector<std::string>& last_findings) {
    std::string msg = node_path + ": " + step + " failed after " +
                      std::to_string(attempts) + " attempt(s)";
    if (!last_findings.empty()) {
        msg += "; last rejection: " + last_findings.front();
    }
    throw PipelineError(msg);
}

std::string spec_as_requirements(const ModelSpecification& spec) {
    return to_json(spec);
}

} // namespace

Classification classify(const std::string& node_path, const std::string& name,
                        const std::string& requirements, const std::string& context,
                        ChatClient& client, const PromptLibrary& prompts,
                        const PlannerConfig& config) {
    if (requirements.empty()) {
        throw ConfigError(node_path + ": cannot classify a model with empty requirements");
    }
    std::string feedback;
    bool retried_notsure = false;
    std::vector<std::string> findings;
    int attempt = 0;
    for (; attempt < config.max_attempts; ++attempt) {
        const std::string reply = ask(client, prompts, "classifier",
                                      {{"name", name},
                                       {"req", requirements},
                                       {"context_str", context},
                                       {"feedback", feedback}},
                                      "classification");
        findings.clear();
        json doc;
        try {
            doc = parse_reply_object(reply);
        } catch (const SerializeError& e) {
            findings.push_back(e.what());
            feedback = feedback_from(findings);
            continue;
        }
        const auto verdict_it = doc.find("verdict");
        if (verdict_it == doc.end() || !verdict_it->is_string()) {
            findings.push_back("reply must carry a string \"verdict\" field");
            feedback = feedback_from(findings);
            continue;
        }
        const std::string verdict = verdict_it->get<std::string>();
        std::vector<std::string> submodels;
        if (const auto sub_it = doc.find("submodels"); sub_it != doc.end()) {
            if (!sub_it->is_array()) {
                findings.push_back("\"submodels\" must be an array of strings");
            } else {
                for (const auto& entry : *sub_it) {
                    if (!entry.is_string()) {
                        findings.push_back("\"submodels\" must contain only strings");
                        break;
                    }
                    submodels.push_back(entry.get<std::string>());
                }
            }
        }
        if (!findings.empty()) {
            feedback = feedback_from(findings);
            continue;
        }
        if (verdict == "atomic") {
            return Classification{NodeKind::atomic, {}};
        }
        if (verdict == "coupled") {
            if (submodels.empty()) {
                findings.push_back("a coupled verdict must name at least one candidate submodel");
                feedback = feedback_from(findings);
                continue;
            }
            return Classification{NodeKind::coupled, std::move(submodels)};
        }
        if (verdict == "notsure") {
            if (retried_notsure || attempt + 1 >= config.max_attempts) {
                // The tie-break after an unresolved re-query: treat the model
                // as decomposable so planning can continue.
                return Classification{NodeKind::coupled, std::move(submodels)};
            }
            retried_notsure = true;
            feedback = "## [Reviewer Feedback]\n"
                       "Your previous reply answered \"notsure\". Weigh the evidence again "
                       "and commit to either \"atomic\" or \"coupled\"; if the requirements "
                       "mention several interacting responsibilities, prefer \"coupled\".";
            continue;
        }
        findings.push_back("\"verdict\" must be one of atomic, coupled, notsure (got \"" +
                           verdict + "\")");
        feedback = feedback_from(findings);
    }
    exhausted(node_path, "classification", attempt, findings);
}

SplitResult split(const std::string& node_path, const std::string& name,
                  const ModelSpecification& parent_spec, const std::string& context,
                  const std::set<std::string>& taken, ChatClient& client,
                  const PromptLibrary& prompts, const PlannerConfig& config) {
    std::string feedback;
    std::vector<std::string> findings;
    int attempt = 0;
    for (; attempt < config.max_attempts; ++attempt) {
        const std::string reply = ask(client, prompts, "splitter",
                                      {{"name", name},
                                       {"spec", spec_as_requirements(parent_spec)},
                                       {"context_str", context},
                                       {"feedback", feedback}},
                                      "decomposition");
        findings.clear();
        SplitResult result;
        try {
            const json doc = parse_reply_object(reply);
            const auto children_it = doc.find("children");
            if (children_it == doc.end() || !children_it->is_array()) {
                throw SerializeError("reply must carry a \"children\" array");
            }
            const auto coupling_it = doc.find("coupling_specification");
            if (coupling_it == doc.end() || !coupling_it->is_string()) {
                throw SerializeError("reply must carry a string \"coupling_specification\"");
            }
            result.coupling_specification = coupling_it->get<std::string>();
            for (std::size_t i = 0; i < children_it->size(); ++i) {
                const json& entry = (*children_it)[i];
                const std::string where = "children[" + std::to_string(i) + "]";
                if (!entry.is_object()) {
                    throw SerializeError(where + " must be an object");
                }
                const auto name_it = entry.find("class_name");
                if (name_it == entry.end() || !name_it->is_string()) {
                    throw SerializeError(where + " must carry a string \"class_name\"");
                }
                const auto spec_it = entry.find("spec");
                if (spec_it == entry.end() || !spec_it->is_object()) {
                    throw SerializeError(where + " must carry an object \"spec\"");
                }
                SplitResult::Child child;
                child.class_name = name_it->get<std::string>();
                child.spec = model_spec_from_json(spec_it->dump());
                result.children.push_back(std::move(child));
            }
        } catch (const Error& e) {
            findings.push_back(e.what());
            feedback = feedback_from(findings);
            continue;
        }

        if (result.children.size() < 2) {
            findings.push_back("a coupled model needs at least two children (got " +
                               std::to_string(result.children.size()) + ")");
        }
        std::set<std::string> seen;
        for (const auto& child : result.children) {
            if (!is_identifier(child.class_name)) {
                findings.push_back("child class name \"" + child.class_name +
                                   "\" is not a valid identifier");
                continue;
            }
            if (!seen.insert(child.class_name).second) {
                findings.push_back("child class name \"" + child.class_name +
                                   "\" appears more than once");
            }
            if (taken.count(child.class_name) > 0) {
                findings.push_back("class name \"" + child.class_name +
                                   "\" is already used elsewhere in the plan; pick a fresh name");
            }
            for (auto& f : validate_spec("children \"" + child.class_name + "\"", child.spec)) {
                findings.push_back(std::move(f));
            }
        }
        for (const auto& ref : class_references(result.coupling_specification)) {
            if (ref != name && seen.count(ref) == 0) {
                findings.push_back("coupling_specification mentions `" + ref +
                                   "`, which is neither this model nor one of its children");
            }
        }
        if (findings.empty()) {
            return result;
        }
        feedback = feedback_from(findings);
    }
    exhausted(node_path, "decomposition", attempt, findings);
}

ModelSpecification formulate(const std::string& node_path, const std::string& name,
                             const std::string& requirements, const std::string& context,
                             ChatClient& client, const PromptLibrary& prompts,
                             const PlannerConfig& config) {
    if (requirements.empty()) {
        throw ConfigError(node_path + ": cannot formulate a model with empty requirements");
    }
    std::string feedback;
    std::vector<std::string> findings;
    int attempt = 0;
    for (; attempt < config.max_attempts; ++attempt) {
        const std::string reply = ask(client, prompts, "formulator",
                                      {{"name", name},
                                       {"req", requirements},
                                       {"context_str", context},
                                       {"feedback", feedback}},
                                      "model-specification");
        findings.clear();
        ModelSpecification spec;
        try {
            spec = model_spec_from_json(extract_json_object(reply));
        } catch (const Error& e) {
            findings.push_back(e.what());
            feedback = feedback_from(findings);
            continue;
        }
        findings = validate_spec("spec", spec);
        if (findings.empty()) {
            return spec;
        }
        feedback = feedback_from(findings);
    }
    exhausted(node_path, "formulation", attempt, findings);
}

namespace {

// Context handed to a child: everything the parent saw plus the slice of the
// parent's decomposition the child has to fit into.
std::string child_context(const std::string& parent_context, const std::string& parent_name,
                          const std::string& coupling_specification) {
    std::string out = parent_context;
    out += "\n\n## [Enclosing Model]\nThis model is one component of `" + parent_name +
           "`, whose internal wiring is described as follows.\n" + coupling_specification;
    return out;
}

PlanNode plan_node(const std::string& node_path, const std::string& name,
                   const std::string& requirements, const ModelSpecification* draft,
                   const std::string& context, int depth, std::set<std::string>& used_names,
                   ChatClient& client, const PromptLibrary& prompts,
                   const PlannerConfig& config) {
    if (depth > config.max_depth) {
        throw PipelineError(node_path + ": decomposition exceeded the depth limit of " +
                            std::to_string(config.max_depth));
    }
    const Classification verdict =
        classify(node_path, name, requirements, context, client, prompts, config);

    PlanNode node;
    node.class_name = name;
    if (verdict.kind == NodeKind::atomic) {
        node.kind = NodeKind::atomic;
        node.spec = formulate(node_path, name, requirements, context, client, prompts, config);
        return node;
    }

    node.kind = NodeKind::coupled;
    // Every node carries a specification; for a coupled node it describes the
    // container's external interface. A splitter draft already is one;
    // otherwise (the root) it has to be formulated first.
    node.spec = draft != nullptr
                    ? *draft
                    : formulate(node_path, name, requirements, context, client, prompts, config);

    std::exception_ptr deepest_failure;
    for (int round = 0;; ++round) {
        std::string split_context = context;
        if (round > 0) {
            try {
                std::rethrow_exception(deepest_failure);
            } catch (const std::exception& e) {
                split_context += "\n\n## [Failed Attempt]\nA previous decomposition of `" +
                                 name + "` could not be completed (" + e.what() +
                                 "). Choose a decomposition that avoids that structure.";
            }
        }
        const SplitResult parts = split(node_path, name, node.spec, split_context, used_names,
                                        client, prompts, config);
        node.coupling_specification = parts.coupling_specification;
        node.children.clear();

        std::set<std::string> claimed;
        for (const auto& child : parts.children) {
            used_names.insert(child.class_name);
            claimed.insert(child.class_name);
        }
        try {
            for (const auto& child : parts.children) {
                const std::string path = node_path + "/" + child.class_name;
                node.children.push_back(plan_node(
                    path, child.class_name, spec_as_requirements(child.spec), &child.spec,
                    child_context(context, name, parts.coupling_specification), depth + 1,
                    used_names, client, prompts, config));
            }
            return node;
        } catch (const PipelineError&) {
            for (const auto& claimed_name : claimed) {
                used_names.erase(claimed_name);
            }
            if (round >= config.subtree_retries) {
                throw;
            }
            deepest_failure = std::current_exception();
        }
    }
}

} // namespace

PlanNode plan(const std::string& spec_text, const std::string& contract_text,
              ChatClient& client, const PromptLibrary& prompts, const PlannerConfig& config) {
    if (spec_text.empty()) {
        throw ConfigError("cannot plan from an empty requirement document");
    }
    if (!is_identifier(config.root_name) ||
        !(config.root_name[0] >= 'A' && config.root_name[0] <= 'Z')) {
        throw ConfigError("root model name \"" + config.root_name +
                          "\" must be an uppercase-initial identifier");
    }
    std::set<std::string> used_names{config.root_name};
    PlanNode root = plan_node(config.root_name, config.root_name, spec_text,
                              /*draft=*/nullptr, contract_text, /*depth=*/1, used_names,
                              client, prompts, config);
    const auto findings = validate_plan(root);
    if (!findings.empty()) {
        throw PipelineError(config.root_name + ": planned tree failed validation: " +
                            findings.front());
    }
    return root;
}

} // namespace devskit::genpipe
