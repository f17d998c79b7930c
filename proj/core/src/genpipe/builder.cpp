#include "devskit/genpipe/builder.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <mutex>
#include <semaphore>
#include <utility>

#include "devskit/error.hpp"

namespace devskit::genpipe {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

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

std::string trim_copy(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return {};
    }
    const auto end = text.find_last_not_of(" \t\r\n");
    return text.substr(begin, end - begin + 1);
}

std::string first_json_object(const std::string& text) {
    const auto first = text.find('{');
    const auto last = text.rfind('}');
    if (first == std::string::npos || last == std::string::npos || last < first) {
        throw SerializeError("reply contains no JSON object");
    }
    return text.substr(first, last - first + 1);
}

// Child summaries rendered for a parent's prompt, in child order.
std::string summaries_block(const std::vector<const CodeArtifact*>& children) {
    if (children.empty()) {
        return "none";
    }
    ordered_json arr = ordered_json::array();
    for (const CodeArtifact* child : children) {
        ordered_json entry;
        entry["class_name"] = child->class_name;
        entry["spec"] = ordered_json::parse(to_json(child->summary));
        arr.push_back(std::move(entry));
    }
    return arr.dump(2);
}

std::string lower_copy(std::string text) {
    std::transform(text.begin(), text.end(), text.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return text;
}

std::string flags_block(const ModelSpecification& root_summary) {
    std::string out;
    for (const TypedEntity& arg : root_summary.model_init_args) {
        out += "- `--" + arg.name + "` (" + arg.type + "): " + arg.structure + "\n";
    }
    if (out.empty()) {
        out = "- (no model flags; honor whatever the experiment contract requires)\n";
    }
    return out;
}

struct BuildContext {
    ChatClient& client;
    const PromptLibrary& prompts;
    const BuilderConfig& config;
    const std::string& contract;
    ArtifactSet& out;
    std::mutex out_mutex;
    std::counting_semaphore<256> slots;

    BuildContext(ChatClient& c, const PromptLibrary& p, const BuilderConfig& cfg,
                 const std::string& contract_text, ArtifactSet& set)
        : client(c), prompts(p), config(cfg), contract(contract_text), out(set),
          slots(std::max(1, cfg.concurrency)) {}
};

class SlotGuard {
  public:
    explicit SlotGuard(std::counting_semaphore<256>& sem) : sem_(sem) { sem_.acquire(); }
    ~SlotGuard() { sem_.release(); }
    SlotGuard(const SlotGuard&) = delete;
    SlotGuard& operator=(const SlotGuard&) = delete;

  private:
    std::counting_semaphore<256>& sem_;
};

std::string generate_source(const std::string& node_path, const PlanNode& node,
                            const std::string& sub_models,
                            const std::vector<std::string>& required_tokens,
                            BuildContext& ctx) {
    const bool coupled = node.kind == NodeKind::coupled;
    const std::string template_name = coupled ? "generator_coupled" : "generator_atomic";
    std::string feedback;
    std::vector<std::string> findings;
    int attempt = 0;
    for (; attempt < ctx.config.max_attempts; ++attempt) {
        std::map<std::string, std::string> slot_map{
            {"name", node.class_name},
            {"feedback", feedback},
            {"sub_models", sub_models},
            {"context_str", ctx.contract},
            {"spec", to_json(node.spec)},
        };
        if (coupled) {
            slot_map.emplace("name_lower", lower_copy(node.class_name));
            slot_map.emplace("coupling", node.coupling_specification);
        }
        const std::string reply =
            ask(ctx.client, ctx.prompts, template_name, slot_map, "cpp-header");
        findings.clear();
        std::string source;
        try {
            source = extract_code(reply);
        } catch (const SerializeError& e) {
            findings.push_back(e.what());
            feedback = feedback_from(findings);
            continue;
        }
        for (const std::string& token : required_tokens) {
            if (source.find(token) == std::string::npos) {
                findings.push_back("the source never mentions \"" + token + "\"");
            }
        }
        if (findings.empty()) {
            return source;
        }
        feedback = feedback_from(findings);
    }
    exhausted(node_path, "code generation", attempt, findings);
}

std::string generate_controller(const std::string& node_path, const CodeArtifact& root,
                                BuildContext& ctx) {
    std::string feedback;
    std::vector<std::string> findings;
    int attempt = 0;
    for (; attempt < ctx.config.max_attempts; ++attempt) {
        const std::string reply = ask(ctx.client, ctx.prompts, "generator_controller",
                                      {{"name", root.class_name},
                                       {"flags", flags_block(root.summary)},
                                       {"feedback", feedback},
                                       {"spec", to_json(root.summary)},
                                       {"contract", ctx.contract}},
                                      "cpp-main");
        findings.clear();
        std::string source;
        try {
            source = extract_code(reply);
        } catch (const SerializeError& e) {
            findings.push_back(e.what());
            feedback = feedback_from(findings);
            continue;
        }
        if (source.find("int main") == std::string::npos) {
            findings.push_back("the source has no main() entry point");
        }
        if (source.find(root.class_name) == std::string::npos) {
            findings.push_back("the source never instantiates " + root.class_name);
        }
        if (findings.empty()) {
            return source;
        }
        feedback = feedback_from(findings);
    }
    exhausted(node_path, "controller generation", attempt, findings);
}

CodeArtifact build_node(const PlanNode& node, const std::string& node_path, BuildContext& ctx) {
    std::vector<const CodeArtifact*> child_artifacts;
    std::vector<CodeArtifact> owned_children;
    owned_children.reserve(node.children.size());

    if (!node.children.empty()) {
        if (ctx.config.concurrency > 1) {
            std::vector<std::future<CodeArtifact>> futures;
            futures.reserve(node.children.size());
            for (const PlanNode& child : node.children) {
                futures.push_back(std::async(std::launch::async, [&child, &node_path, &ctx] {
                    return build_node(child, node_path + "/" + child.class_name, ctx);
                }));
            }
            for (auto& future : futures) {
                owned_children.push_back(future.get());
            }
        } else {
            for (const PlanNode& child : node.children) {
                owned_children.push_back(
                    build_node(child, node_path + "/" + child.class_name, ctx));
            }
        }
        for (const CodeArtifact& child : owned_children) {
            child_artifacts.push_back(&child);
        }
    }

    const std::string sub_models = summaries_block(child_artifacts);
    std::vector<std::string> required_tokens{node.class_name};
    for (const PlanNode& child : node.children) {
        required_tokens.push_back(child.class_name); // a parent must instantiate each child
    }

    CodeArtifact artifact;
    artifact.class_name = node.class_name;
    {
        SlotGuard guard(ctx.slots);
        artifact.source = generate_source(node_path, node, sub_models, required_tokens, ctx);
        artifact.summary =
            summarize(node_path, artifact.source, sub_models, ctx.client, ctx.prompts,
                      ctx.config);
    }
    {
        std::lock_guard<std::mutex> lock(ctx.out_mutex);
        ctx.out.artifacts[artifact.class_name] = artifact;
    }
    return artifact;
}

} // namespace

std::string extract_code(const std::string& reply) {
    const std::string open_tag = "<cpp_code>";
    const std::string close_tag = "</cpp_code>";
    const auto open_at = reply.find(open_tag);
    if (open_at == std::string::npos) {
        throw SerializeError("reply has no <cpp_code> block");
    }
    const auto close_at = reply.find(close_tag, open_at + open_tag.size());
    if (close_at == std::string::npos) {
        throw SerializeError("reply's <cpp_code> block is never closed");
    }
    std::string body =
        trim_copy(reply.substr(open_at + open_tag.size(), close_at - open_at - open_tag.size()));
    if (body.rfind("```", 0) == 0) {
        const auto line_end = body.find('\n');
        body = line_end == std::string::npos ? std::string() : body.substr(line_end + 1);
        const auto fence = body.rfind("```");
        if (fence != std::string::npos) {
            body = body.substr(0, fence);
        }
        body = trim_copy(body);
    }
    if (body.empty()) {
        throw SerializeError("reply's <cpp_code> block is empty");
    }
    return body + "\n";
}

ModelSpecification summarize(const std::string& node_path, const std::string& source,
                             const std::string& sub_models, ChatClient& client,
                             const PromptLibrary& prompts, const BuilderConfig& config) {
    std::string feedback;
    std::vector<std::string> findings;
    int attempt = 0;
    for (; attempt < config.max_attempts; ++attempt) {
        const std::string reply = ask(client, prompts, "summarizer",
                                      {{"feedback", feedback},
                                       {"sub_models", sub_models},
                                       {"code", source}},
                                      "model-specification");
        findings.clear();
        ModelSpecification summary;
        try {
            summary = model_spec_from_json(first_json_object(reply));
        } catch (const Error& e) {
            findings.push_back(e.what());
            feedback = feedback_from(findings);
            continue;
        }
        findings = validate_spec("summary", summary);
        const auto check_ports = [&](const std::vector<PortEntity>& ports, const char* label) {
            for (const PortEntity& port : ports) {
                if (source.find('"' + port.name + '"') == std::string::npos) {
                    findings.push_back(std::string("the summary lists ") + label + " '" +
                                       port.name + "' but the source never declares it");
                }
            }
        };
        check_ports(summary.input_ports, "input port");
        check_ports(summary.output_ports, "output port");
        if (findings.empty()) {
            return summary;
        }
        feedback = feedback_from(findings);
    }
    exhausted(node_path, "summarization", attempt, findings);
}

void construct(const PlanNode& tree, const std::string& contract, ChatClient& client,
               const PromptLibrary& prompts, const BuilderConfig& config, ArtifactSet& out) {
    if (config.max_attempts < 1) {
        throw ConfigError("builder max_attempts must be at least 1");
    }
    if (config.concurrency < 1 || config.concurrency > 64) {
        throw ConfigError("builder concurrency must be between 1 and 64");
    }
    BuildContext ctx(client, prompts, config, contract, out);
    const CodeArtifact root = build_node(tree, tree.class_name, ctx);
    const std::string controller =
        generate_controller(tree.class_name, root, ctx);
    {
        std::lock_guard<std::mutex> lock(ctx.out_mutex);
        ctx.out.controller_source = controller;
    }
}

std::vector<std::string> write_artifacts(const ArtifactSet& set, const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec && !fs::is_directory(out_dir)) {
        throw ConfigError("cannot create output directory " + out_dir + ": " + ec.message());
    }
    std::vector<std::string> written;
    const auto emit = [&](const fs::path& path, const std::string& text) {
        std::ofstream file(path, std::ios::binary | std::ios::trunc);
        if (!file) {
            throw ConfigError("cannot write " + path.string());
        }
        file << text;
        if (!text.empty() && text.back() != '\n') {
            file << '\n';
        }
        written.push_back(path.string());
    };
    for (const auto& [class_name, artifact] : set.artifacts) {
        emit(fs::path(out_dir) / (class_name + ".hpp"), artifact.source);
    }
    if (!set.controller_source.empty()) {
        emit(fs::path(out_dir) / "main.cpp", set.controller_source);
    }
    return written;
}

} // namespace devskit::genpipe
