#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "devskit/conformance/suite.hpp"
#include "devskit/error.hpp"

using devskit::ConfigError;
using devskit::conformance::EvaluateOptions;
using devskit::conformance::Scores;
using devskit::conformance::Suite;
using devskit::conformance::evaluate_suite;
using devskit::conformance::load_suite;
using devskit::conformance::load_suite_file;
using devskit::conformance::summarize;
using devskit::conformance::write_report;
using ordered_json = nlohmann::ordered_json;

namespace {

Suite suite_from(const std::string& text) {
    std::istringstream in(text);
    return load_suite(in);
}

std::vector<std::string> cli_command() {
    return {DEVSKIT_CLI_PATH, "simulate", "abp"};
}

Suite small_abp_suite() {
    return suite_from(R"({
        "scenario": "abp",
        "cases": [
            {"id": "smoke", "args": {"total_packets": 1}},
            {"id": "pair", "args": {"total_packets": 3, "seed": 7}}
        ]
    })");
}

} // namespace

TEST_CASE("a well-formed suite file parses with typed flag values") {
    const Suite suite = suite_from(R"({
        "scenario": "abp",
        "cases": [
            {
                "id": "first",
                "args": {
                    "total_packets": 1600,
                    "timeout": 12.5,
                    "simulate_time": 3.0,
                    "verbose": true,
                    "label": "plain"
                },
                "timeout_s": 30,
                "stdin": "payload"
            },
            {"id": "second"}
        ]
    })");
    CHECK(suite.scenario == "abp");
    REQUIRE(suite.cases.size() == 2);
    const auto& first = suite.cases[0];
    CHECK(first.id == "first");
    REQUIRE(first.args.size() == 5);
    // Numbers are rendered the way the trace format renders them, so a float
    // flag survives the trip through a command line byte-identically.
    CHECK(first.args[0] == std::pair<std::string, std::string>{"total_packets", "1600"});
    CHECK(first.args[1] == std::pair<std::string, std::string>{"timeout", "12.5"});
    CHECK(first.args[2] == std::pair<std::string, std::string>{"simulate_time", "3.0"});
    CHECK(first.args[3] == std::pair<std::string, std::string>{"verbose", "true"});
    CHECK(first.args[4] == std::pair<std::string, std::string>{"label", "plain"});
    CHECK(first.wall_timeout_s == 30.0);
    CHECK(first.stdin_payload == "payload");
    CHECK(suite.cases[1].args.empty());
    CHECK(suite.cases[1].wall_timeout_s == 10.0);
}

TEST_CASE("malformed suite documents are rejected with the reason") {
    const char* bad[] = {
        "not json at all",
        R"([1, 2, 3])",
        R"({"cases": []})",
        R"({"scenario": "abp"})",
        R"({"scenario": "abp", "cases": []})",
        R"({"scenario": "abp", "cases": [{"args": {}}]})",
        R"({"scenario": "abp", "cases": [{"id": ""}]})",
        R"({"scenario": "abp", "cases": [{"id": "a"}, {"id": "a"}]})",
        R"({"scenario": "abp", "cases": [{"id": "a", "args": [1]}]})",
        R"({"scenario": "abp", "cases": [{"id": "a", "args": {"": 1}}]})",
        R"({"scenario": "abp", "cases": [{"id": "a", "args": {"x": null}}]})",
        R"({"scenario": "abp", "cases": [{"id": "a", "stdin": 5}]})",
        R"({"scenario": "abp", "cases": [{"id": "a", "timeout_s": "fast"}]})",
        R"({"scenario": "abp", "cases": [{"id": "a", "timeout_s": 0}]})",
        R"({"scenario": "abp", "cases": [{"id": "a", "surprise": 1}]})",
        R"({"scenario": "abp", "cases": [{"id": "a"}], "extra": 1})",
    };
    for (const char* text : bad) {
        INFO("document: " << text);
        CHECK_THROWS_AS((void)suite_from(text), ConfigError);
    }
}

TEST_CASE("suite files load from disk") {
    const auto path = std::filesystem::temp_directory_path() / "devskit_suite_roundtrip.json";
    {
        std::ofstream out(path);
        out << R"({"scenario": "seird", "cases": [{"id": "only"}]})";
    }
    const Suite suite = load_suite_file(path.string());
    CHECK(suite.scenario == "seird");
    CHECK(suite.cases.size() == 1);
    std::filesystem::remove(path);

    CHECK_THROWS_AS((void)load_suite_file("/no/such/suite.json"), ConfigError);
}

TEST_CASE("the bundled suites are loadable and named consistently") {
    for (const char* name : {"abp", "seird", "iobs", "barbershop"}) {
        const Suite suite =
            load_suite_file(std::string(DEVSKIT_SUITE_DIR) + "/" + name + ".json");
        CHECK(suite.scenario == name);
        CHECK_FALSE(suite.cases.empty());
    }
}

TEST_CASE("evaluation rejects impossible setups") {
    const Suite suite = small_abp_suite();
    CHECK_THROWS_AS((void)evaluate_suite({}, suite), ConfigError);

    Suite empty;
    empty.scenario = "abp";
    CHECK_THROWS_AS((void)evaluate_suite(cli_command(), empty), ConfigError);

    Suite unknown = suite;
    unknown.scenario = "chess";
    CHECK_THROWS_AS((void)evaluate_suite(cli_command(), unknown), ConfigError);
}

TEST_CASE("the reference simulator earns full marks") {
    const Scores scores = evaluate_suite(cli_command(), small_abp_suite());
    CHECK(scores.scenario == "abp");
    CHECK(scores.oss == 1.0);
    CHECK(scores.bcs == 1.0);
    REQUIRE(scores.cases.size() == 2);
    for (const auto& result : scores.cases) {
        CHECK(result.v == 1);
        CHECK(result.c == 1.0);
        CHECK(result.spawned);
        CHECK(result.exit_code == 0);
        CHECK(result.record_count > 0);
        CHECK(result.validity_notes.empty());
        CHECK(result.component_outcomes.size() == 5);
        CHECK(result.system_outcomes.size() == 8);
        CHECK(result.diagnostics.empty());
    }
}

TEST_CASE("a simulator that fails to launch or exit cleanly scores zero") {
    SUBCASE("nonzero exit") {
        const Scores scores = evaluate_suite({"/bin/false"}, small_abp_suite());
        CHECK(scores.oss == 0.0);
        CHECK(scores.bcs == 0.0);
        for (const auto& result : scores.cases) {
            CHECK(result.v == 0);
            CHECK(result.c == 0.0);
            CHECK(result.component_outcomes.empty());
            REQUIRE_FALSE(result.validity_notes.empty());
            CHECK(result.validity_notes.front().find("exit-code 1") != std::string::npos);
        }
    }
    SUBCASE("missing binary") {
        const Scores scores =
            evaluate_suite({"/no/such/simulator"}, small_abp_suite());
        CHECK(scores.oss == 0.0);
        for (const auto& result : scores.cases) {
            CHECK_FALSE(result.spawned);
            CHECK(result.validity_notes.front().find("spawn-failure") != std::string::npos);
        }
    }
    SUBCASE("stdout that is not a trace") {
        const Scores scores =
            evaluate_suite({"/bin/sh", "-c", "echo not-json"}, small_abp_suite());
        CHECK(scores.oss == 0.0);
        for (const auto& result : scores.cases) {
            CHECK(result.exit_code == 0);
            CHECK(result.validity_notes.front().find("trace-invalid") != std::string::npos);
        }
    }
    SUBCASE("wall-clock overrun") {
        const Suite suite = suite_from(R"({
            "scenario": "abp",
            "cases": [{"id": "slow", "args": {"total_packets": 1}, "timeout_s": 0.3}]
        })");
        const Scores scores = evaluate_suite({"/bin/sh", "-c", "sleep 30"}, suite);
        CHECK(scores.oss == 0.0);
        CHECK(scores.cases[0].timed_out);
        CHECK(scores.cases[0].validity_notes.front().find("timeout") != std::string::npos);
    }
    SUBCASE("output beyond the cap") {
        EvaluateOptions options;
        options.stdout_cap = 1000;
        const Suite suite = suite_from(R"({
            "scenario": "abp",
            "cases": [{"id": "chatty", "args": {"total_packets": 50}}]
        })");
        const Scores scores = evaluate_suite(cli_command(), suite, options);
        CHECK(scores.oss == 0.0);
        CHECK(scores.cases[0].output_capped);
    }
}

TEST_CASE("an empty but valid trace is scored by the rules, not waved through") {
    // /bin/true exits 0 with no output: formally a valid log, so v = 1, but
    // the required initial events are missing and the score shows it.
    const Suite suite = suite_from(R"({
        "scenario": "abp",
        "cases": [{"id": "mute", "args": {"total_packets": 1}}]
    })");
    const Scores scores = evaluate_suite({"/bin/true"}, suite);
    CHECK(scores.oss == 1.0);
    const auto& result = scores.cases[0];
    CHECK(result.v == 1);
    CHECK(result.record_count == 0);
    CHECK(result.c == 0.9375); // all component rules vacuous, 7 of 8 system rules
    bool required_events_failed = false;
    for (const auto& outcome : result.system_outcomes) {
        if (outcome.rule_id == "abp.required-events") {
            required_events_failed = !outcome.passed;
        }
    }
    CHECK(required_events_failed);
}

TEST_CASE("parallel evaluation is byte-deterministic") {
    const Suite suite = suite_from(R"({
        "scenario": "abp",
        "cases": [
            {"id": "a", "args": {"total_packets": 1}},
            {"id": "b", "args": {"total_packets": 2}},
            {"id": "c", "args": {"total_packets": 3}},
            {"id": "d", "args": {"total_packets": 2, "seed": 5}},
            {"id": "e", "args": {"total_packets": 2, "seed": 9}},
            {"id": "f", "args": {"total_packets": 4, "timeout": 25}}
        ]
    })");
    EvaluateOptions serial;
    serial.jobs = 1;
    EvaluateOptions wide;
    wide.jobs = 8;
    const Scores one = evaluate_suite(cli_command(), suite, serial);
    const Scores eight = evaluate_suite(cli_command(), suite, wide);
    CHECK(summarize(one) == summarize(eight));
    REQUIRE(one.cases.size() == eight.cases.size());
    for (std::size_t i = 0; i < one.cases.size(); ++i) {
        CHECK(one.cases[i].case_id == eight.cases[i].case_id);
        CHECK(one.cases[i].v == eight.cases[i].v);
        CHECK(one.cases[i].c == eight.cases[i].c);
        CHECK(one.cases[i].record_count == eight.cases[i].record_count);
    }
}

TEST_CASE("the report is machine-readable with a stable layout") {
    const Scores scores = evaluate_suite(cli_command(), small_abp_suite());
    std::ostringstream out;
    write_report(scores, cli_command(), out);
    const std::string text = out.str();
    REQUIRE_FALSE(text.empty());
    CHECK(text.back() == '\n');

    const ordered_json report = ordered_json::parse(text);
    std::vector<std::string> top_keys;
    for (const auto& [key, value] : report.items()) {
        (void)value;
        top_keys.push_back(key);
    }
    CHECK(top_keys ==
          std::vector<std::string>{"scenario", "command", "oss", "bcs", "cases"});
    CHECK(report["scenario"] == "abp");
    CHECK(report["command"][1] == "simulate");
    CHECK(report["oss"] == 1.0);
    REQUIRE(report["cases"].size() == 2);
    const auto& entry = report["cases"][0];
    std::vector<std::string> case_keys;
    for (const auto& [key, value] : entry.items()) {
        (void)value;
        case_keys.push_back(key);
    }
    CHECK(case_keys == std::vector<std::string>{
                           "id", "v", "c", "spawned", "exit_code", "timed_out",
                           "output_capped", "wall_seconds", "record_count",
                           "validity_notes", "component_outcomes", "system_outcomes",
                           "diagnostics"});
    CHECK(entry["id"] == "smoke");
    CHECK(entry["component_outcomes"].size() == 5);
    CHECK(entry["system_outcomes"].size() == 8);
    for (const auto& [rule, passed] : entry["system_outcomes"].items()) {
        INFO("rule " << rule);
        CHECK(passed == true);
    }
}

TEST_CASE("the summary names failing rules") {
    const Suite suite = suite_from(R"({
        "scenario": "abp",
        "cases": [{"id": "mute", "args": {"total_packets": 1}}]
    })");
    const Scores scores = evaluate_suite({"/bin/true"}, suite);
    const std::string text = summarize(scores);
    CHECK(text.find("scenario abp: 1 case(s)") != std::string::npos);
    CHECK(text.find("failing: abp.required-events") != std::string::npos);
    CHECK(text.find("oss=1 bcs=0.9375") != std::string::npos);
}
