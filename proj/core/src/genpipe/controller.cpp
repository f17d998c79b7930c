#include "devskit/genpipe/controller.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "devskit/error.hpp"
#include "devskit/genpipe/builder.hpp"
#include "devskit/genpipe/client.hpp"
#include "devskit/genpipe/planner.hpp"
#include "devskit/genpipe/prompts.hpp"
#include "devskit/genpipe/schema.hpp"

namespace devskit::genpipe {
namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path, const char* label) {
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw ConfigError(std::string("cannot read ") + label + " file " + path);
    }
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

std::unique_ptr<ChatClient> make_client(const ControllerConfig& config) {
    if (config.backend == "mock") {
        if (config.mock_script_path.empty()) {
            throw ConfigError("the mock backend needs --mock-script pointing at a reply script");
        }
        return std::make_unique<MockChatClient>(config.mock_script_path);
    }
    if (config.backend == "http") {
        return std::make_unique<HttpChatClient>(http_config_from_env());
    }
    throw ConfigError("unknown chat backend \"" + config.backend +
                      "\" (expected \"mock\" or \"http\")");
}

std::string write_plan(const PlanNode& root, const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec && !fs::is_directory(out_dir)) {
        throw ConfigError("cannot create output directory " + out_dir + ": " + ec.message());
    }
    const fs::path path = fs::path(out_dir) / "plan.json";
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw ConfigError("cannot write " + path.string());
    }
    file << to_json(root) << "\n";
    return path.string();
}

} // namespace

GenerationResult generate(const ControllerConfig& config) {
    if (config.output_dir.empty()) {
        throw ConfigError("generation needs an output directory");
    }
    const std::string spec_text = read_file(config.spec_path, "specification");
    const std::string contract_text = read_file(config.contract_path, "contract");

    const PromptLibrary prompts = PromptLibrary::for_run(config.prompt_dir);
    const std::unique_ptr<ChatClient> client = make_client(config);

    const PlanNode tree = plan(spec_text, contract_text, *client, prompts);

    GenerationResult result;
    result.plan_path = write_plan(tree, config.output_dir);

    BuilderConfig builder_config;
    builder_config.concurrency = config.concurrency;
    ArtifactSet artifacts;
    try {
        construct(tree, contract_text, *client, prompts, builder_config, artifacts);
    } catch (...) {
        // Keep whatever finished; a partially generated tree is still worth
        // inspecting when one node fails for good.
        try {
            write_artifacts(artifacts, config.output_dir);
        } catch (...) {
        }
        throw;
    }
    result.artifact_paths = write_artifacts(artifacts, config.output_dir);
    return result;
}

} // namespace devskit::genpipe
