#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "devskit/conformance/runner.hpp"
#include "devskit/genpipe/builder.hpp"
#include "devskit/genpipe/client.hpp"
#include "devskit/genpipe/planner.hpp"
#include "devskit/genpipe/prompts.hpp"
#include "devskit/trace.hpp"
#include "support/genpipe_fixture.hpp"

namespace fs = std::filesystem;
using devskit::conformance::RunResult;
using devskit::conformance::RunSpec;
using devskit::conformance::run_process;

namespace {

RunResult cli(const std::vector<std::string>& args) {
    RunSpec spec;
    spec.argv = {DEVSKIT_CLI_PATH};
    spec.argv.insert(spec.argv.end(), args.begin(), args.end());
    spec.wall_timeout_s = 60.0;
    RunResult result = run_process(spec);
    REQUIRE(result.spawned);
    return result;
}

const fs::path& scratch_dir() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "devskit_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string write_file(const std::string& name, const std::string& content) {
    const fs::path path = scratch_dir() / name;
    std::ofstream out(path);
    out << content;
    REQUIRE(out.good());
    return path.string();
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("simulate emits nothing but the trace on stdout") {
    const RunResult result = cli({"simulate", "abp", "--total_packets", "2"});
    CHECK(result.exit_code == 0);
    CHECK(result.stderr_text.empty());
    const auto parsed = devskit::trace::parse_trace_text(result.stdout_text);
    CHECK(parsed.report.valid);
    CHECK(parsed.report.record_count == 14);
}

TEST_CASE("simulate keeps stdout clean on usage errors") {
    SUBCASE("unknown scenario") {
        const RunResult result = cli({"simulate", "parking-lot"});
        CHECK(result.exit_code == 2);
        CHECK(result.stdout_text.empty());
        CHECK(contains(result.stderr_text, "known scenarios"));
        CHECK(contains(result.stderr_text, "barbershop"));
    }
    SUBCASE("missing scenario name") {
        const RunResult result = cli({"simulate"});
        CHECK(result.exit_code == 2);
        CHECK(result.stdout_text.empty());
        CHECK(contains(result.stderr_text, "known scenarios"));
    }
    SUBCASE("missing required flag") {
        const RunResult result = cli({"simulate", "abp"});
        CHECK(result.exit_code == 2);
        CHECK(result.stdout_text.empty());
        CHECK(contains(result.stderr_text, "total_packets"));
    }
    SUBCASE("unknown flag") {
        const RunResult result = cli({"simulate", "abp", "--bogus", "1"});
        CHECK(result.exit_code == 2);
        CHECK(result.stdout_text.empty());
    }
    SUBCASE("flag without a value") {
        const RunResult result = cli({"simulate", "abp", "--total_packets"});
        CHECK(result.exit_code == 2);
        CHECK(result.stdout_text.empty());
    }
    SUBCASE("unparsable value") {
        const RunResult result = cli({"simulate", "abp", "--total_packets", "nope"});
        CHECK(result.exit_code == 2);
        CHECK(result.stdout_text.empty());
    }
    SUBCASE("value out of range") {
        const RunResult result = cli({"simulate", "abp", "--total_packets", "-3"});
        CHECK(result.exit_code == 2);
        CHECK(result.stdout_text.empty());
        CHECK(contains(result.stderr_text, ">= 0"));
    }
}

TEST_CASE("simulate prints per-scenario usage on request") {
    const RunResult result = cli({"simulate", "seird", "--help"});
    CHECK(result.exit_code == 0);
    CHECK(result.stdout_text.empty());
    CHECK(contains(result.stderr_text, "--beta"));
    CHECK(contains(result.stderr_text, "--horizon"));
}

TEST_CASE("check-trace accepts what simulate produced") {
    const RunResult sim = cli({"simulate", "abp", "--total_packets", "2"});
    REQUIRE(sim.exit_code == 0);
    const std::string path = write_file("roundtrip.jsonl", sim.stdout_text);
    const RunResult check =
        cli({"check-trace", path, "--scenario", "abp", "--set", "total_packets=2"});
    CHECK(check.exit_code == 0);
    CHECK(contains(check.stdout_text, "14 record(s), valid log"));
    CHECK(contains(check.stdout_text, "[pass] component abp.preparation-duration"));
    CHECK(contains(check.stdout_text, "[pass] system abp.monotone-time"));
    CHECK_FALSE(contains(check.stdout_text, "[FAIL]"));
}

TEST_CASE("check-trace names the record that breaks a rule") {
    const RunResult sim = cli({"simulate", "abp", "--total_packets", "2"});
    REQUIRE(sim.exit_code == 0);
    auto parsed = devskit::trace::parse_trace_text(sim.stdout_text);
    REQUIRE(parsed.report.valid);
    REQUIRE(parsed.records[3].entity == "receiver");
    parsed.records[3].time += 0.25; // delivery drifts off the channel delay
    std::ostringstream mutated;
    for (const auto& record : parsed.records) {
        mutated << devskit::trace::serialize_record(record) << "\n";
    }
    const std::string path = write_file("perturbed.jsonl", mutated.str());
    const RunResult check =
        cli({"check-trace", path, "--scenario", "abp", "--set", "total_packets=2"});
    CHECK(check.exit_code == 1);
    CHECK(contains(check.stdout_text, "[FAIL] system abp.channel-latency"));
    CHECK(contains(check.stdout_text, "at record 3"));
}

TEST_CASE("check-trace treats an empty file as a missing workload") {
    const std::string path = write_file("empty.jsonl", "");
    const RunResult check =
        cli({"check-trace", path, "--scenario", "abp", "--set", "total_packets=1"});
    CHECK(check.exit_code == 1);
    CHECK(contains(check.stdout_text, "0 record(s)"));
    CHECK(contains(check.stdout_text, "[FAIL] system abp.required-events"));
}

TEST_CASE("check-trace reports parse errors with line numbers") {
    const std::string path = write_file("garbage.jsonl", "not a trace\n");
    const RunResult check =
        cli({"check-trace", path, "--scenario", "abp", "--set", "total_packets=1"});
    CHECK(check.exit_code == 1);
    CHECK(contains(check.stdout_text, "invalid log"));
    CHECK(contains(check.stdout_text, "line 1 parse-error"));
}

TEST_CASE("check-trace usage errors") {
    const std::string path = write_file("tiny.jsonl", "");
    SUBCASE("missing file") {
        const RunResult result =
            cli({"check-trace", "/no/such/trace", "--scenario", "abp"});
        CHECK(result.exit_code == 2);
        CHECK(contains(result.stderr_text, "cannot read"));
    }
    SUBCASE("unknown scenario") {
        const RunResult result = cli({"check-trace", path, "--scenario", "chess"});
        CHECK(result.exit_code == 2);
    }
    SUBCASE("malformed --set pair") {
        const RunResult result = cli(
            {"check-trace", path, "--scenario", "seird", "--set", "dt-without-value"});
        CHECK(result.exit_code == 2);
        CHECK(contains(result.stderr_text, "flag=value"));
    }
    SUBCASE("--set with a foreign flag") {
        const RunResult result =
            cli({"check-trace", path, "--scenario", "seird", "--set", "volume=11"});
        CHECK(result.exit_code == 2);
        CHECK(contains(result.stderr_text, "unknown flag"));
    }
    SUBCASE("required flag left unset") {
        const RunResult result = cli({"check-trace", path, "--scenario", "abp"});
        CHECK(result.exit_code == 2);
        CHECK(contains(result.stderr_text, "--set total_packets"));
    }
}

TEST_CASE("evaluate scores a simulator end to end") {
    const std::string suite_path = write_file("suite.json", R"({
        "scenario": "abp",
        "cases": [
            {"id": "smoke", "args": {"total_packets": 1}},
            {"id": "pair", "args": {"total_packets": 3, "seed": 7}}
        ]
    })");
    const std::string report_path = (scratch_dir() / "report.json").string();
    const RunResult result =
        cli({"evaluate", "--suite", suite_path, "--report", report_path, "--jobs", "2",
             "--", DEVSKIT_CLI_PATH, "simulate", "abp"});
    CHECK(result.exit_code == 0);
    CHECK(contains(result.stdout_text, "scenario abp: 2 case(s)"));
    CHECK(contains(result.stdout_text, "oss=1 bcs=1"));

    std::ifstream report(report_path);
    REQUIRE(report.good());
    const auto document = nlohmann::json::parse(report);
    CHECK(document["oss"] == 1.0);
    CHECK(document["bcs"] == 1.0);
    CHECK(document["cases"].size() == 2);
}

TEST_CASE("evaluate reports a failing simulator without failing itself") {
    const std::string suite_path = write_file("false_suite.json", R"({
        "scenario": "abp",
        "cases": [{"id": "only", "args": {"total_packets": 1}}]
    })");
    const RunResult result =
        cli({"evaluate", "--suite", suite_path, "--", "/bin/false"});
    CHECK(result.exit_code == 0); // the evaluation itself succeeded
    CHECK(contains(result.stdout_text, "oss=0 bcs=0"));
    CHECK(contains(result.stdout_text, "exit-code 1"));
}

TEST_CASE("evaluate usage errors") {
    const std::string suite_path = write_file("usage_suite.json", R"({
        "scenario": "abp",
        "cases": [{"id": "only", "args": {"total_packets": 1}}]
    })");
    SUBCASE("no simulator command") {
        const RunResult result = cli({"evaluate", "--suite", suite_path});
        CHECK(result.exit_code == 2);
        CHECK(contains(result.stderr_text, "--"));
    }
    SUBCASE("missing suite file") {
        const RunResult result =
            cli({"evaluate", "--suite", "/no/such/suite.json", "--", "/bin/true"});
        CHECK(result.exit_code == 2);
    }
    SUBCASE("scenario mismatch") {
        const RunResult result = cli({"evaluate", "--suite", suite_path, "--scenario",
                                      "seird", "--", "/bin/true"});
        CHECK(result.exit_code == 2);
        CHECK(contains(result.stderr_text, "not 'seird'"));
    }
}

TEST_CASE("a trailing command belongs to evaluate alone") {
    const RunResult simulate =
        cli({"simulate", "abp", "--total_packets", "1", "--", "echo"});
    CHECK(simulate.exit_code == 2);
    CHECK(simulate.stdout_text.empty());
    CHECK(contains(simulate.stderr_text, "evaluate"));

    const std::string path = write_file("stray.jsonl", "");
    const RunResult check = cli({"check-trace", path, "--scenario", "seird", "--", "echo"});
    CHECK(check.exit_code == 2);
}

TEST_CASE("generate validates its configuration before any work") {
    SUBCASE("missing required options") {
        const RunResult result = cli({"generate"});
        CHECK(result.exit_code == 2);
    }
    SUBCASE("unreadable specification") {
        const RunResult result = cli({"generate", "--spec", "/no/such/spec", "--contract",
                                      "/no/such/contract", "--out",
                                      (scratch_dir() / "gen_none").string()});
        CHECK(result.exit_code == 2);
        CHECK(contains(result.stderr_text, "cannot read"));
    }
    SUBCASE("unknown backend") {
        const std::string spec_path = write_file("gen_spec.txt", "a model");
        const std::string contract_path = write_file("gen_contract.txt", "a contract");
        const RunResult result =
            cli({"generate", "--spec", spec_path, "--contract", contract_path, "--out",
                 (scratch_dir() / "gen_none").string(), "--backend", "carrier-pigeon"});
        CHECK(result.exit_code == 2);
        CHECK(contains(result.stderr_text, "backend"));
    }
    SUBCASE("mock backend without a script") {
        const std::string spec_path = write_file("gen_spec.txt", "a model");
        const std::string contract_path = write_file("gen_contract.txt", "a contract");
        const RunResult result =
            cli({"generate", "--spec", spec_path, "--contract", contract_path, "--out",
                 (scratch_dir() / "gen_none").string(), "--backend", "mock"});
        CHECK(result.exit_code == 2);
    }
}

TEST_CASE("generate runs the staged pipeline through the mock backend") {
    using devskit::genpipe::ArtifactSet;
    using devskit::genpipe::PatternChatClient;
    using devskit::genpipe::PromptLibrary;
    using devskit::genpipe::RecordingChatClient;

    // Drive the pipeline in process once to record the scripted replies the
    // spawned binary will replay.
    const std::string spec = devskit::test::fixture_spec_text();
    const std::string contract = devskit::test::fixture_contract_text();
    PatternChatClient pattern(devskit::test::fixture_rules());
    RecordingChatClient recorder(pattern);
    const PromptLibrary prompts = PromptLibrary::embedded();
    const devskit::genpipe::PlanNode tree =
        devskit::genpipe::plan(spec, contract, recorder, prompts);
    ArtifactSet artifacts;
    devskit::genpipe::construct(tree, contract, recorder, prompts, {}, artifacts);

    const std::string script_path = write_file("gen_script.json", recorder.script_json());
    const std::string spec_path = write_file("gen_model.txt", spec);
    const std::string contract_path = write_file("gen_terms.txt", contract);
    const fs::path out_dir = scratch_dir() / "generated";

    const RunResult result =
        cli({"generate", "--spec", spec_path, "--contract", contract_path, "--backend",
             "mock", "--mock-script", script_path, "--out", out_dir.string()});
    CHECK(result.exit_code == 0);
    CHECK(contains(result.stdout_text, "plan: "));
    CHECK(contains(result.stdout_text, "plan.json"));
    CHECK(contains(result.stdout_text, "main.cpp"));
    CHECK(fs::exists(out_dir / "plan.json"));
    for (const char* name : {"Receiver.hpp", "Sender.hpp", "System.hpp", "main.cpp"}) {
        INFO("artifact " << name);
        CHECK(fs::exists(out_dir / name));
    }

    // The written artifacts are byte-identical to the in-process construction.
    for (const auto& [class_name, artifact] : artifacts.artifacts) {
        std::ifstream in(out_dir / (class_name + ".hpp"));
        std::ostringstream content;
        content << in.rdbuf();
        CHECK(content.str() == artifact.source);
    }
}

TEST_CASE("the top level demands a subcommand") {
    const RunResult bare = cli({});
    CHECK(bare.exit_code == 2);

    const RunResult help = cli({"--help"});
    CHECK(help.exit_code == 0);
    CHECK(contains(help.stdout_text, "simulate"));
    CHECK(contains(help.stdout_text, "evaluate"));
}
