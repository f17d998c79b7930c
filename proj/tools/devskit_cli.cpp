// devskit: one binary wrapping the toolkit's entry points.
//
//   devskit simulate <scenario> [--flag value ...]    trace JSONL on stdout
//   devskit evaluate --suite F [options] -- cmd ...   score a simulator
//   devskit check-trace <file> --scenario S [...]     apply rules offline
//   devskit generate [options]                        staged model generation
//
// Exit codes: 0 success, 1 a check or evaluation failed, 2 usage or
// configuration error. During simulate, standard output carries nothing but
// trace records; every diagnostic goes to standard error.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "devskit/args.hpp"
#include "devskit/conformance/rules.hpp"
#include "devskit/conformance/scoring.hpp"
#include "devskit/conformance/suite.hpp"
#include "devskit/error.hpp"
#include "devskit/genpipe/controller.hpp"
#include "devskit/scenarios/registry.hpp"
#include "devskit/trace.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

void print_scenario_usage(const devskit::scenarios::Scenario& scenario, std::ostream& out) {
    out << "usage: devskit simulate " << scenario.name << " [flags]\n";
    out << "  " << scenario.summary << "\n";
    for (const auto& flag : scenario.flags) {
        out << "  --" << flag.name;
        if (flag.default_value) {
            out << " <value=" << *flag.default_value << ">";
        } else {
            out << " <value, required>";
        }
        out << "  " << flag.help << "\n";
    }
}

void print_scenario_list(std::ostream& out) {
    out << "known scenarios:\n";
    for (const auto& scenario : devskit::scenarios::all_scenarios()) {
        out << "  " << scenario.name << "  " << scenario.summary << "\n";
    }
}

// Writes each record and flushes the line, so a run that dies mid-way leaves
// a prefix of whole lines — still valid JSONL.
class LineFlushSink final : public devskit::trace::TraceSink {
public:
    explicit LineFlushSink(std::ostream& out) : out_(out) {}
    void record(const devskit::trace::TraceRecord& record) override {
        out_ << devskit::trace::serialize_record(record) << '\n';
        out_.flush();
    }

private:
    std::ostream& out_;
};

int run_simulate(const std::string& scenario_name, const std::vector<std::string>& tokens) {
    const devskit::scenarios::Scenario* scenario =
        devskit::scenarios::find_scenario(scenario_name);
    if (scenario == nullptr) {
        std::cerr << "devskit simulate: unknown scenario '" << scenario_name << "'\n";
        print_scenario_list(std::cerr);
        return kExitUsage;
    }
    for (const std::string& token : tokens) {
        if (token == "--help" || token == "-h") {
            print_scenario_usage(*scenario, std::cerr);
            return kExitOk;
        }
    }
    try {
        const devskit::ArgMap args = devskit::parse_flag_pairs(
            tokens, devskit::scenarios::scenario_flag_names(*scenario));
        LineFlushSink sink(std::cout);
        devskit::scenarios::run_scenario(*scenario, args, sink);
        return kExitOk;
    } catch (const devskit::ConfigError& error) {
        std::cerr << "devskit simulate: " << error.what() << "\n";
        print_scenario_usage(*scenario, std::cerr);
        return kExitUsage;
    } catch (const devskit::Error& error) {
        std::cout.flush();
        std::cerr << "devskit simulate: " << error.what() << "\n";
        return kExitCheckFailed;
    }
}

int run_evaluate(const std::string& suite_path, const std::optional<std::string>& scenario,
                 const std::optional<std::string>& report_path, int jobs,
                 const std::vector<std::string>& command) {
    try {
        const devskit::conformance::Suite suite =
            devskit::conformance::load_suite_file(suite_path);
        if (scenario && *scenario != suite.scenario) {
            throw devskit::ConfigError("suite '" + suite_path + "' is for scenario '" +
                                       suite.scenario + "', not '" + *scenario + "'");
        }
        if (command.empty()) {
            throw devskit::ConfigError(
                "no simulator command; pass it after \"--\", e.g. devskit evaluate "
                "--suite S -- ./simulator");
        }
        devskit::conformance::EvaluateOptions options;
        options.jobs = jobs;
        const devskit::conformance::Scores scores =
            devskit::conformance::evaluate_suite(command, suite, options);
        if (report_path) {
            std::ofstream out(*report_path);
            if (!out) {
                throw devskit::ConfigError("cannot write report to '" + *report_path + "'");
            }
            devskit::conformance::write_report(scores, command, out);
        }
        std::cout << devskit::conformance::summarize(scores);
        return kExitOk;
    } catch (const devskit::ConfigError& error) {
        std::cerr << "devskit evaluate: " << error.what() << "\n";
        return kExitUsage;
    } catch (const devskit::Error& error) {
        std::cerr << "devskit evaluate: " << error.what() << "\n";
        return kExitCheckFailed;
    }
}

int run_check_trace(const std::string& trace_path, const std::string& scenario_name,
                    const std::vector<std::string>& overrides) {
    try {
        const devskit::conformance::RuleCatalog& catalog =
            devskit::conformance::rule_catalog(scenario_name);
        const devskit::scenarios::Scenario* scenario =
            devskit::scenarios::find_scenario(scenario_name);
        if (scenario == nullptr) {
            throw devskit::ConfigError("unknown scenario '" + scenario_name + "'");
        }

        std::ifstream in(trace_path);
        if (!in) {
            std::cerr << "devskit check-trace: cannot read '" << trace_path << "'\n";
            return kExitUsage;
        }

        devskit::ArgMap set_args;
        const std::vector<std::string> known =
            devskit::scenarios::scenario_flag_names(*scenario);
        for (const std::string& pair : overrides) {
            const auto eq = pair.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw devskit::ConfigError("--set expects flag=value, got '" + pair + "'");
            }
            const std::string key = pair.substr(0, eq);
            if (std::find(known.begin(), known.end(), key) == known.end()) {
                throw devskit::ConfigError("--set names unknown flag '" + key +
                                           "' for scenario '" + scenario_name + "'");
            }
            set_args.set(key, pair.substr(eq + 1));
        }
        const devskit::ArgMap args =
            set_args.overlaid_on(devskit::scenarios::scenario_defaults(*scenario));
        for (const auto& flag : scenario->flags) {
            if (!flag.default_value && !args.has(flag.name)) {
                throw devskit::ConfigError("scenario '" + scenario_name +
                                           "' has no default for --" + flag.name +
                                           "; pass --set " + flag.name + "=<value>");
            }
        }

        const devskit::trace::ParseResult parsed = devskit::trace::parse_trace(in);
        const devskit::conformance::EvalContext ctx{scenario_name, args};
        const devskit::conformance::CaseResult result =
            devskit::conformance::score_case(parsed.records, catalog, 1, ctx);

        std::cout << trace_path << ": " << parsed.report.record_count << " record(s), "
                  << (parsed.report.valid ? "valid" : "invalid") << " log\n";
        for (const devskit::trace::LineError& error : parsed.report.errors) {
            std::cout << "  line " << error.line << " " << error.kind << ": "
                      << error.message << "\n";
        }
        bool all_passed = true;
        const auto print_outcomes =
            [&](const char* label,
                const std::vector<devskit::conformance::RuleOutcome>& outcomes) {
                for (const auto& outcome : outcomes) {
                    std::cout << "  [" << (outcome.passed ? "pass" : "FAIL") << "] "
                              << label << " " << outcome.rule_id << "\n";
                    all_passed = all_passed && outcome.passed;
                }
            };
        print_outcomes("component", result.component_outcomes);
        print_outcomes("system", result.system_outcomes);
        for (const devskit::conformance::Diagnostic& diagnostic : result.diagnostics) {
            std::cout << "  " << diagnostic.rule_id;
            if (diagnostic.record_index) {
                std::cout << " at record " << *diagnostic.record_index;
            }
            std::cout << ": " << diagnostic.message << "\n";
        }
        return parsed.report.valid && all_passed ? kExitOk : kExitCheckFailed;
    } catch (const devskit::ConfigError& error) {
        std::cerr << "devskit check-trace: " << error.what() << "\n";
        return kExitUsage;
    } catch (const devskit::Error& error) {
        std::cerr << "devskit check-trace: " << error.what() << "\n";
        return kExitCheckFailed;
    }
}

int run_generate(const devskit::genpipe::ControllerConfig& config) {
    try {
        const devskit::genpipe::GenerationResult result = devskit::genpipe::generate(config);
        std::cout << "plan: " << result.plan_path << "\n";
        for (const std::string& artifact : result.artifact_paths) {
            std::cout << "artifact: " << artifact << "\n";
        }
        return kExitOk;
    } catch (const devskit::ConfigError& error) {
        std::cerr << "devskit generate: " << error.what() << "\n";
        return kExitUsage;
    } catch (const devskit::Error& error) {
        std::cerr << "devskit generate: " << error.what() << "\n";
        return kExitCheckFailed;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete-event simulation toolkit"};
    app.require_subcommand(1);

    // --- simulate ----------------------------------------------------------
    auto* simulate = app.add_subcommand("simulate", "run a reference scenario to JSONL");
    std::string scenario_name;
    simulate->add_option("scenario", scenario_name, "registered scenario name");
    simulate->allow_extras(); // per-scenario flags are parsed by the scenario

    // --- evaluate ----------------------------------------------------------
    auto* evaluate = app.add_subcommand(
        "evaluate", "run a simulator over a suite and score it; pass the simulator "
                    "command after \"--\"");
    std::string suite_path;
    std::optional<std::string> eval_scenario;
    std::optional<std::string> report_path;
    int jobs = 1;
    evaluate->add_option("--suite", suite_path, "suite definition file (JSON)")
        ->required();
    evaluate->add_option("--scenario", eval_scenario,
                         "rule catalog to apply (defaults to the suite's scenario)");
    evaluate->add_option("--report", report_path, "write the JSON report here");
    evaluate->add_option("--jobs", jobs, "concurrent simulator processes")
        ->check(CLI::Range(1, 64));

    // --- check-trace -------------------------------------------------------
    auto* check = app.add_subcommand("check-trace", "apply a scenario's rules to a trace file");
    std::string trace_path;
    std::string check_scenario;
    std::vector<std::string> set_pairs;
    check->add_option("trace", trace_path, "JSONL trace file")->required();
    check->add_option("--scenario", check_scenario, "rule catalog to apply")->required();
    check->add_option("--set", set_pairs,
                      "flag=value the trace was produced with (repeatable); unset flags "
                      "use the scenario defaults");

    // --- generate ----------------------------------------------------------
    auto* generate = app.add_subcommand(
        "generate", "generate a simulator from a model specification via a chat backend");
    devskit::genpipe::ControllerConfig generate_config;
    generate->add_option("--spec", generate_config.spec_path, "model specification (JSON)")
        ->required();
    generate
        ->add_option("--contract", generate_config.contract_path,
                     "experiment contract / trace requirements (text)")
        ->required();
    generate->add_option("--out", generate_config.output_dir, "artifact output directory")
        ->required();
    generate->add_option("--backend", generate_config.backend,
                         "chat backend: 'http' (DEVSKIT_CHAT_* env) or 'mock'");
    generate->add_option("--mock-script", generate_config.mock_script_path,
                         "scripted replies for the mock backend (JSON)");
    generate->add_option("--concurrency", generate_config.concurrency,
                         "sibling construction parallelism")
        ->check(CLI::Range(1, 64));
    generate->add_option("--prompt-dir", generate_config.prompt_dir,
                         "directory overriding the embedded prompt templates");

    // Everything after a literal "--" is a simulator command line for
    // `evaluate`; split it off before CLI parsing so its flags stay untouched.
    std::vector<std::string> args(argv + 1, argv + argc);
    std::vector<std::string> command_tail;
    if (const auto split = std::find(args.begin(), args.end(), "--"); split != args.end()) {
        command_tail.assign(split + 1, args.end());
        args.erase(split, args.end());
    }
    std::reverse(args.begin(), args.end()); // parse(vector) consumes back-to-front

    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& help) {
        return app.exit(help);
    } catch (const CLI::CallForAllHelp& help) {
        return app.exit(help);
    } catch (const CLI::ParseError& error) {
        std::cerr << "devskit: " << error.what() << "\n";
        std::cerr << "run 'devskit --help' for usage\n";
        return kExitUsage;
    }

    if (simulate->parsed()) {
        if (scenario_name.empty()) {
            std::cerr << "devskit simulate: missing scenario name\n";
            print_scenario_list(std::cerr);
            return kExitUsage;
        }
        if (!command_tail.empty()) {
            std::cerr << "devskit: a trailing \"--\" command only belongs to 'evaluate'\n";
            return kExitUsage;
        }
        return run_simulate(scenario_name, simulate->remaining());
    }
    if (evaluate->parsed()) {
        return run_evaluate(suite_path, eval_scenario, report_path, jobs, command_tail);
    }
    if (!command_tail.empty()) {
        std::cerr << "devskit: a trailing \"--\" command only belongs to 'evaluate'\n";
        return kExitUsage;
    }
    if (check->parsed()) {
        return run_check_trace(trace_path, check_scenario, set_pairs);
    }
    if (generate->parsed()) {
        return run_generate(generate_config);
    }
    return kExitUsage;
}
