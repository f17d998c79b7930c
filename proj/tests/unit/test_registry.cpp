#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include <devskit/error.hpp>
#include <devskit/scenarios/registry.hpp>
#include <devskit/trace.hpp>

using namespace devskit;
using scenarios::Scenario;
namespace trace = devskit::trace;

TEST_CASE("all four reference scenarios are registered") {
    std::vector<std::string> names;
    for (const auto& s : scenarios::all_scenarios()) {
        names.push_back(s.name);
        CHECK_FALSE(s.summary.empty());
        CHECK(s.run != nullptr);
        CHECK_FALSE(s.flags.empty());
    }
    const std::vector<std::string> expected{"abp", "barbershop", "iobs", "seird"};
    std::vector<std::string> sorted = names;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == expected);

    CHECK(scenarios::find_scenario("abp") != nullptr);
    CHECK(scenarios::find_scenario("nope") == nullptr);
}

TEST_CASE("abp exposes its documented flags with total_packets required") {
    const Scenario* abp = scenarios::find_scenario("abp");
    REQUIRE(abp != nullptr);

    const std::vector<std::string> names = scenarios::scenario_flag_names(*abp);
    const std::vector<std::string> expected{"total_packets", "seed",          "timeout",
                                            "sender_delay",  "receiver_delay", "channel_delay",
                                            "simulate_time"};
    CHECK(names == expected);

    const ArgMap defaults = scenarios::scenario_defaults(*abp);
    CHECK_FALSE(defaults.has("total_packets")); // required, no default
    CHECK(defaults.get_string("seed") == "42");
    CHECK(defaults.get_string("timeout") == "20");
    CHECK(defaults.get_string("sender_delay") == "10");
    CHECK(defaults.get_string("channel_delay") == "3");
    CHECK(defaults.get_string("simulate_time") == "1000");
}

TEST_CASE("run_scenario overlays arguments onto the defaults") {
    const Scenario* abp = scenarios::find_scenario("abp");
    REQUIRE(abp != nullptr);

    ArgMap args;
    args.set("total_packets", "1");
    trace::CollectSink sink;
    scenarios::run_scenario(*abp, args, sink);
    REQUIRE_FALSE(sink.records().empty());
    CHECK(sink.records().back().event == "ack_received");
    CHECK(sink.records().back().time == 26.0);
}

TEST_CASE("a missing required flag is reported by name") {
    const Scenario* abp = scenarios::find_scenario("abp");
    REQUIRE(abp != nullptr);
    trace::CollectSink sink;
    CHECK_THROWS_WITH_AS(scenarios::run_scenario(*abp, ArgMap{}, sink),
                         doctest::Contains("total_packets"), ConfigError);
}

TEST_CASE("every optional default parses under the scenario's own types") {
    for (const auto& s : scenarios::all_scenarios()) {
        ArgMap args;
        if (s.name == "abp") {
            args.set("total_packets", "1");
        }
        // Overlaying nothing else must yield a runnable configuration.
        trace::CollectSink sink;
        CHECK_NOTHROW(scenarios::run_scenario(s, args, sink));
    }
}
