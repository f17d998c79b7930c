#include "devskit/conformance/suite.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "devskit/conformance/runner.hpp"
#include "devskit/error.hpp"
#include "devskit/scenarios/registry.hpp"

namespace devskit::conformance {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string flag_value_to_string(const ordered_json& value, const std::string& flag) {
    if (value.is_string()) {
        return value.get<std::string>();
    }
    if (value.is_number_integer()) {
        return std::to_string(value.get<std::int64_t>());
    }
    if (value.is_number_float()) {
        return trace::format_double(value.get<double>());
    }
    if (value.is_boolean()) {
        return value.get<bool>() ? "true" : "false";
    }
    throw ConfigError("suite: flag '" + flag + "' must be a string or number");
}

TestCase parse_case(const ordered_json& entry) {
    if (!entry.is_object()) {
        throw ConfigError("suite: each case must be an object");
    }
    TestCase test_case;
    if (!entry.contains("id") || !entry["id"].is_string() ||
        entry["id"].get<std::string>().empty()) {
        throw ConfigError("suite: every case needs a non-empty string id");
    }
    test_case.id = entry["id"].get<std::string>();
    if (entry.contains("args")) {
        if (!entry["args"].is_object()) {
            throw ConfigError("suite: case '" + test_case.id + "' args must be an object");
        }
        for (const auto& [flag, value] : entry["args"].items()) {
            if (flag.empty()) {
                throw ConfigError("suite: case '" + test_case.id + "' has an empty flag name");
            }
            test_case.args.emplace_back(flag, flag_value_to_string(value, flag));
        }
    }
    if (entry.contains("stdin")) {
        if (!entry["stdin"].is_string()) {
            throw ConfigError("suite: case '" + test_case.id + "' stdin must be a string");
        }
        test_case.stdin_payload = entry["stdin"].get<std::string>();
    }
    if (entry.contains("timeout_s")) {
        if (!entry["timeout_s"].is_number()) {
            throw ConfigError("suite: case '" + test_case.id + "' timeout_s must be a number");
        }
        test_case.wall_timeout_s = entry["timeout_s"].get<double>();
        if (!(test_case.wall_timeout_s > 0.0)) {
            throw ConfigError("suite: case '" + test_case.id + "' timeout_s must be > 0");
        }
    }
    for (const auto& [key, value] : entry.items()) {
        (void)value;
        if (key != "id" && key != "args" && key != "stdin" && key != "timeout_s") {
            throw ConfigError("suite: case '" + test_case.id + "' has unknown key '" + key +
                              "'");
        }
    }
    return test_case;
}

} // namespace

Suite load_suite(std::istream& in) {
    ordered_json document;
    try {
        document = ordered_json::parse(in);
    } catch (const ordered_json::parse_error& error) {
        throw ConfigError(std::string("suite: not valid JSON: ") + error.what());
    }
    if (!document.is_object() || !document.contains("scenario") ||
        !document["scenario"].is_string()) {
        throw ConfigError("suite: top level must be an object with a 'scenario' string");
    }
    Suite suite;
    suite.scenario = document["scenario"].get<std::string>();
    if (!document.contains("cases") || !document["cases"].is_array() ||
        document["cases"].empty()) {
        throw ConfigError("suite: 'cases' must be a non-empty array");
    }
    std::set<std::string> seen;
    for (const auto& entry : document["cases"]) {
        TestCase test_case = parse_case(entry);
        if (!seen.insert(test_case.id).second) {
            throw ConfigError("suite: duplicate case id '" + test_case.id + "'");
        }
        suite.cases.push_back(std::move(test_case));
    }
    for (const auto& [key, value] : document.items()) {
        (void)value;
        if (key != "scenario" && key != "cases") {
            throw ConfigError("suite: unknown top-level key '" + key + "'");
        }
    }
    return suite;
}

Suite load_suite_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("suite: cannot open '" + path + "'");
    }
    return load_suite(in);
}

namespace {

CaseResult evaluate_case(const std::vector<std::string>& command, const TestCase& test_case,
                         const std::string& scenario, const ArgMap& defaults,
                         const RuleCatalog& catalog, const EvaluateOptions& options) {
    RunSpec spec;
    spec.argv = command;
    for (const auto& [flag, value] : test_case.args) {
        spec.argv.push_back("--" + flag);
        spec.argv.push_back(value);
    }
    spec.stdin_payload = test_case.stdin_payload;
    spec.wall_timeout_s = test_case.wall_timeout_s;
    spec.stdout_cap = options.stdout_cap;

    const RunResult run = run_process(spec);

    std::vector<std::string> notes;
    if (!run.spawned) {
        notes.push_back("spawn-failure: " + run.spawn_error);
    }
    if (run.timed_out) {
        notes.push_back("timeout: killed after " +
                        std::to_string(test_case.wall_timeout_s) + "s");
    }
    if (run.output_capped) {
        notes.push_back("output-cap-exceeded");
    }
    if (run.spawned && !run.timed_out && !run.exited_normally) {
        notes.push_back("killed by signal " + std::to_string(run.term_signal));
    }
    if (run.exited_normally && run.exit_code != 0) {
        std::string note = "exit-code " + std::to_string(run.exit_code);
        if (!run.stderr_text.empty()) {
            note += ": " + run.stderr_text.substr(0, 200);
            while (!note.empty() && (note.back() == '\n' || note.back() == '\r')) {
                note.pop_back();
            }
        }
        notes.push_back(std::move(note));
    }

    const trace::ParseResult parsed = trace::parse_trace_text(run.stdout_text);
    if (!parsed.report.valid) {
        std::string note = "trace-invalid: " + std::to_string(parsed.report.errors.size()) +
                           " bad line(s)";
        const std::size_t shown = std::min<std::size_t>(parsed.report.errors.size(), 3);
        for (std::size_t i = 0; i < shown; ++i) {
            const trace::LineError& error = parsed.report.errors[i];
            note += "; line " + std::to_string(error.line) + " " + error.kind + ": " +
                    error.message;
        }
        notes.push_back(std::move(note));
    }

    const int v = run.spawned && run.exited_normally && run.exit_code == 0 &&
                          !run.timed_out && !run.output_capped && parsed.report.valid
                      ? 1
                      : 0;

    ArgMap case_args;
    for (const auto& [flag, value] : test_case.args) {
        case_args.set(flag, value);
    }
    const EvalContext ctx{scenario, case_args.overlaid_on(defaults)};

    CaseResult result = score_case(parsed.records, catalog, v, ctx);
    result.case_id = test_case.id;
    result.validity_notes = std::move(notes);
    result.spawned = run.spawned;
    result.timed_out = run.timed_out;
    result.output_capped = run.output_capped;
    result.exit_code = run.exit_code;
    result.wall_seconds = run.wall_seconds;
    return result;
}

} // namespace

Scores evaluate_suite(const std::vector<std::string>& command, const Suite& suite,
                      const EvaluateOptions& options) {
    if (suite.cases.empty()) {
        throw ConfigError("cannot evaluate an empty suite");
    }
    if (command.empty()) {
        throw ConfigError("evaluate needs a simulator command");
    }
    const scenarios::Scenario* scenario = scenarios::find_scenario(suite.scenario);
    if (scenario == nullptr) {
        throw ConfigError("unknown scenario '" + suite.scenario + "'");
    }
    const ArgMap defaults = scenarios::scenario_defaults(*scenario);
    const RuleCatalog& catalog = rule_catalog(suite.scenario);

    Scores scores;
    scores.scenario = suite.scenario;
    scores.cases.resize(suite.cases.size());

    const int jobs = std::clamp<int>(options.jobs, 1, 64);
    const auto worker_count =
        static_cast<std::size_t>(std::min<std::size_t>(jobs, suite.cases.size()));
    std::atomic<std::size_t> next{0};
    auto drain = [&] {
        for (;;) {
            const std::size_t index = next.fetch_add(1);
            if (index >= suite.cases.size()) {
                break;
            }
            scores.cases[index] = evaluate_case(command, suite.cases[index], suite.scenario,
                                                defaults, catalog, options);
        }
    };
    if (worker_count <= 1) {
        drain();
    } else {
        std::vector<std::thread> workers;
        workers.reserve(worker_count - 1);
        for (std::size_t i = 0; i + 1 < worker_count; ++i) {
            workers.emplace_back(drain);
        }
        drain();
        for (auto& worker : workers) {
            worker.join();
        }
    }

    double v_sum = 0.0;
    double c_sum = 0.0;
    for (const CaseResult& result : scores.cases) {
        v_sum += result.v;
        c_sum += result.c;
    }
    scores.oss = v_sum / static_cast<double>(scores.cases.size());
    scores.bcs = c_sum / static_cast<double>(scores.cases.size());
    return scores;
}

namespace {

ordered_json outcomes_to_json(const std::vector<RuleOutcome>& outcomes) {
    ordered_json object = ordered_json::object();
    for (const RuleOutcome& outcome : outcomes) {
        object[outcome.rule_id] = outcome.passed;
    }
    return object;
}

} // namespace

void write_report(const Scores& scores, const std::vector<std::string>& command,
                  std::ostream& out) {
    ordered_json report;
    report["scenario"] = scores.scenario;
    report["command"] = command;
    report["oss"] = scores.oss;
    report["bcs"] = scores.bcs;
    report["cases"] = ordered_json::array();
    for (const CaseResult& result : scores.cases) {
        ordered_json entry;
        entry["id"] = result.case_id;
        entry["v"] = result.v;
        entry["c"] = result.c;
        entry["spawned"] = result.spawned;
        entry["exit_code"] = result.exit_code;
        entry["timed_out"] = result.timed_out;
        entry["output_capped"] = result.output_capped;
        entry["wall_seconds"] = result.wall_seconds;
        entry["record_count"] = result.record_count;
        entry["validity_notes"] = result.validity_notes;
        entry["component_outcomes"] = outcomes_to_json(result.component_outcomes);
        entry["system_outcomes"] = outcomes_to_json(result.system_outcomes);
        entry["diagnostics"] = ordered_json::array();
        for (const Diagnostic& diagnostic : result.diagnostics) {
            ordered_json d;
            d["rule_id"] = diagnostic.rule_id;
            if (diagnostic.record_index) {
                d["record_index"] = *diagnostic.record_index;
            } else {
                d["record_index"] = nullptr;
            }
            d["entities"] = diagnostic.entities;
            d["message"] = diagnostic.message;
            entry["diagnostics"].push_back(std::move(d));
        }
        report["cases"].push_back(std::move(entry));
    }
    out << report.dump(2) << "\n";
}

std::string summarize(const Scores& scores) {
    std::ostringstream out;
    out << "scenario " << scores.scenario << ": " << scores.cases.size() << " case(s)\n";
    for (const CaseResult& result : scores.cases) {
        out << "  " << result.case_id << ": v=" << result.v << " c=" << result.c
            << " records=" << result.record_count;
        if (!result.validity_notes.empty()) {
            out << " [" << result.validity_notes.front() << "]";
        }
        std::vector<std::string> failed;
        for (const auto& outcome : result.component_outcomes) {
            if (!outcome.passed) {
                failed.push_back(outcome.rule_id);
            }
        }
        for (const auto& outcome : result.system_outcomes) {
            if (!outcome.passed) {
                failed.push_back(outcome.rule_id);
            }
        }
        if (!failed.empty()) {
            out << " failing:";
            for (const std::string& rule_id : failed) {
                out << " " << rule_id;
            }
        }
        out << "\n";
    }
    out << "oss=" << scores.oss << " bcs=" << scores.bcs << "\n";
    return out.str();
}

} // namespace devskit::conformance
