#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "devskit/time.hpp"
#include "devskit/trace.hpp"
#include "devskit/value.hpp"

namespace devskit::devs {

// A bag of messages on one port: a multiset, realized as a vector whose order
// is the deterministic delivery order chosen by the coordinator.
using Bag = std::vector<EventValue>;

// Messages grouped by port, in first-touched order. Used both for the inputs
// handed to delta_ext/delta_con and for the outputs a model emits.
class MessageBags {
public:
    using Entry = std::pair<std::string, Bag>;

    void push(std::string_view port, EventValue value);
    void append(std::string_view port, const Bag& values);

    [[nodiscard]] bool has(std::string_view port) const;
    // Bag for a port; an empty bag if the port received nothing.
    [[nodiscard]] const Bag& at(std::string_view port) const;
    [[nodiscard]] bool empty() const { return entries_.empty(); }
    [[nodiscard]] const std::vector<Entry>& entries() const { return entries_; }
    void clear() { entries_.clear(); }

    friend bool operator==(const MessageBags&, const MessageBags&) = default;

private:
    std::vector<Entry> entries_;
};

class Coordinator;

// ---------------------------------------------------------------------------
// Atomic model
//
// Subclasses declare ports in their constructor and implement the transition
// functions. The kernel calls them in the classic order at each instant the
// model participates in: collect_outputs (for imminent models, before any
// state change), then exactly one of delta_int / delta_ext / delta_con.
// Anything a model wants to emit at its next internal event must therefore be
// prepared in an earlier transition — collect_outputs is const and must not
// mutate state.

class AtomicModel {
public:
    explicit AtomicModel(std::string name);
    virtual ~AtomicModel() = default;

    AtomicModel(const AtomicModel&) = delete;
    AtomicModel& operator=(const AtomicModel&) = delete;

    [[nodiscard]] const std::string& name() const { return name_; }

    // --- transition interface -------------------------------------------

    // Called once at t=0 before the first step; may schedule and log.
    virtual void initialize() {}

    virtual void delta_int() {}

    // Default rejects input: a model that can receive must say what happens.
    virtual void delta_ext(SimTime elapsed, const MessageBags& input);

    // Confluent default: internal transition first, then the external one at
    // zero elapsed time. Override to give the external event precedence.
    virtual void delta_con(const MessageBags& input);

    // The output function (lambda). Must be pure: the coordinator may invoke
    // it repeatedly and compares the results.
    virtual void collect_outputs(MessageBags& out) const;

    // Time until the next internal event. Defaults to the sigma managed by
    // hold_in/passivate.
    [[nodiscard]] virtual SimTime time_advance() const { return sigma_; }

    // Called once when a run completes.
    virtual void finalize() {}

    // --- scheduling helpers ---------------------------------------------

    // Enter `phase` and schedule the next internal event `sigma` from now.
    // A negative finite sigma is an invalid schedule.
    void hold_in(std::string phase, SimTime sigma);
    void passivate(std::string phase = "passive");

    [[nodiscard]] const std::string& phase() const { return phase_; }
    [[nodiscard]] SimTime sigma() const { return sigma_; }

    // --- ports -----------------------------------------------------------

    void add_in_port(std::string port);
    void add_out_port(std::string port);
    [[nodiscard]] bool has_in_port(std::string_view port) const;
    [[nodiscard]] bool has_out_port(std::string_view port) const;
    [[nodiscard]] const std::vector<std::string>& in_ports() const { return in_ports_; }
    [[nodiscard]] const std::vector<std::string>& out_ports() const { return out_ports_; }

    // --- tracing ---------------------------------------------------------

    // Label used as the "entity" of logged records; defaults to the model
    // name (several instances may deliberately share a label).
    void set_trace_entity(std::string entity) { entity_ = std::move(entity); }
    [[nodiscard]] const std::string& trace_entity() const { return entity_; }

protected:
    // Append a record at the current simulation time. A no-op when the model
    // runs without a sink attached.
    void log(std::string_view event, EventValue::Object payload) const;

private:
    friend class Coordinator;

    struct TraceContext {
        trace::TraceSink* sink = nullptr;
        SimTime now{};
    };

    std::string name_;
    std::string entity_;
    std::vector<std::string> in_ports_;
    std::vector<std::string> out_ports_;
    std::string phase_ = "passive";
    SimTime sigma_ = SimTime::passive();
    const TraceContext* trace_ = nullptr;
};

// ---------------------------------------------------------------------------
// Coupled model
//
// A named container of components plus the couplings that wire them. Coupling
// endpoints are written "component.port", or just "port" for the coupled
// model's own boundary ports. Three classes are accepted and classified
// automatically:
//
//   own input  -> child input    (external input coupling)
//   child output -> child input  (internal coupling)
//   child output -> own output   (external output coupling)
//
// Anything else — and any reference to a missing component or port — is a
// CouplingError at wiring time, not at simulation time.

class CoupledModel {
public:
    explicit CoupledModel(std::string name);

    CoupledModel(const CoupledModel&) = delete;
    CoupledModel& operator=(const CoupledModel&) = delete;

    [[nodiscard]] const std::string& name() const { return name_; }

    void add_in_port(std::string port);
    void add_out_port(std::string port);
    [[nodiscard]] bool has_in_port(std::string_view port) const;
    [[nodiscard]] bool has_out_port(std::string_view port) const;

    AtomicModel& add_component(std::unique_ptr<AtomicModel> model);
    CoupledModel& add_component(std::unique_ptr<CoupledModel> model);

    void couple(std::string_view src, std::string_view dst);

    // --- introspection ---------------------------------------------------

    enum class CouplingClass { external_input, internal, external_output };

    struct Endpoint {
        std::string component; // empty = the coupled model itself
        std::string port;
        [[nodiscard]] bool is_self() const { return component.empty(); }
        friend bool operator==(const Endpoint&, const Endpoint&) = default;
    };

    struct Coupling {
        CouplingClass cls;
        Endpoint src;
        Endpoint dst;
    };

    [[nodiscard]] const std::vector<Coupling>& couplings() const { return couplings_; }

    using Component = std::variant<std::unique_ptr<AtomicModel>, std::unique_ptr<CoupledModel>>;
    [[nodiscard]] const std::vector<Component>& components() const { return components_; }

    [[nodiscard]] AtomicModel* find_atomic(std::string_view name) const;
    [[nodiscard]] CoupledModel* find_coupled(std::string_view name) const;
    [[nodiscard]] bool has_component(std::string_view name) const;

private:
    void check_component_name(const std::string& name) const;
    [[nodiscard]] Endpoint parse_endpoint(std::string_view text) const;

    std::string name_;
    std::vector<std::string> in_ports_;
    std::vector<std::string> out_ports_;
    std::vector<Component> components_;
    std::vector<Coupling> couplings_;
};

} // namespace devskit::devs
