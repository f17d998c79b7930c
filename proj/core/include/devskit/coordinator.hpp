#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "devskit/kernel.hpp"
#include "devskit/time.hpp"
#include "devskit/trace.hpp"

namespace devskit::devs {

// An exogenous event scheduled for injection on one of the root model's input
// ports. Schedules handed to run_until must be ordered by time.
struct ExternalEvent {
    SimTime time;
    std::string port;
    EventValue value;
};

// A value that left the simulation through one of the root model's output
// ports.
struct EmittedEvent {
    SimTime time;
    std::string port;
    EventValue value;

    friend bool operator==(const EmittedEvent&, const EmittedEvent&) = default;
};

struct CoordinatorOptions {
    trace::TraceSink* sink = nullptr;
    // Re-evaluate every output function and compare, to catch impure lambdas.
    bool check_output_purity = true;
    // Upper bound on consecutive micro-steps at a single instant before the
    // run is declared livelocked.
    int max_zero_delay_rounds = 1000;
};

// Root coordinator for a coupled model. Flattens the hierarchy once at
// construction, then drives the classic cycle: at each instant, collect the
// imminent models' outputs, route them (transitively through coupled
// boundaries, including injected exogenous events), then run exactly one
// transition per participating model.
//
// Every choice with observable order is deterministic: models transition in
// lexicographic order of their full path, and bag contents are delivered in
// source-path order with injected events first.
class Coordinator {
public:
    explicit Coordinator(CoupledModel& root, CoordinatorOptions options = {});

    [[nodiscard]] SimTime now() const { return now_; }

    // Earliest pending instant: internal schedule merged with not-yet-consumed
    // injected events. Passive when nothing is pending.
    [[nodiscard]] SimTime next_event_time() const;

    struct StepResult {
        SimTime time;                      // instant just executed; passive if none
        std::vector<EmittedEvent> outputs; // root boundary emissions of this step
    };

    // Execute the earliest pending instant. A no-op returning passive time
    // when nothing is scheduled.
    StepResult step();

    // Run every instant up to and including t_end, injecting `schedule` along
    // the way, then advance the clock to t_end and run each model's finalize
    // hook once. The coordinator refuses to run further afterwards.
    // Throws ConfigError if the schedule is not time-ordered or addresses an
    // unknown root input port.
    SimTime run_until(SimTime t_end, std::span<const ExternalEvent> schedule = {});

    // Introspection for tests: last transition time of an atomic, by path.
    [[nodiscard]] SimTime last_transition_time(std::string_view path) const;
    [[nodiscard]] const std::vector<std::string>& atomic_paths() const { return paths_; }

private:
    struct Node {
        AtomicModel* model = nullptr;
        CoupledModel* parent = nullptr;
        std::string path;
        SimTime t_last{};
        SimTime t_next = SimTime::passive();
    };

    void flatten(CoupledModel& scope, const std::string& prefix);
    void refresh_schedule(Node& node);
    void feed(CoupledModel* scope, const CoupledModel::Endpoint& source, const Bag& values,
              std::vector<EmittedEvent>& outputs);
    [[nodiscard]] std::size_t node_index(std::string_view path) const;

    CoupledModel& root_;
    CoordinatorOptions options_;
    AtomicModel::TraceContext trace_;
    std::vector<Node> nodes_;                       // sorted by path
    std::vector<std::string> paths_;                // parallel to nodes_
    std::unordered_map<const AtomicModel*, std::size_t> index_of_;
    std::unordered_map<const CoupledModel*, CoupledModel*> parent_of_;
    std::unordered_map<const CoupledModel*, std::string> coupled_name_;
    std::unordered_map<const AtomicModel*, MessageBags> inbox_;
    std::span<const ExternalEvent> schedule_;
    std::size_t schedule_pos_ = 0;
    SimTime now_{};
    SimTime last_instant_ = SimTime::passive();
    int rounds_at_instant_ = 0;
    bool finalized_ = false;
};

} // namespace devskit::devs
