#include "devskit/coordinator.hpp"

#include <algorithm>

#include "devskit/error.hpp"

namespace devskit::devs {

Coordinator::Coordinator(CoupledModel& root, CoordinatorOptions options)
    : root_(root), options_(options) {
    trace_.sink = options_.sink;
    trace_.now = SimTime(0.0);

    flatten(root_, root_.name());
    std::sort(nodes_.begin(), nodes_.end(),
              [](const Node& a, const Node& b) { return a.path < b.path; });
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        paths_.push_back(nodes_[i].path);
        index_of_[nodes_[i].model] = i;
        nodes_[i].model->trace_ = &trace_;
    }

    for (auto& node : nodes_) {
        node.model->initialize();
        node.t_last = SimTime(0.0);
        refresh_schedule(node);
    }
}

void Coordinator::flatten(CoupledModel& scope, const std::string& prefix) {
    for (const auto& component : scope.components()) {
        if (const auto* a = std::get_if<std::unique_ptr<AtomicModel>>(&component)) {
            Node node;
            node.model = a->get();
            node.parent = &scope;
            node.path = prefix + "." + (*a)->name();
            nodes_.push_back(std::move(node));
        } else {
            auto& coupled = *std::get<std::unique_ptr<CoupledModel>>(component);
            parent_of_[&coupled] = &scope;
            coupled_name_[&coupled] = coupled.name();
            flatten(coupled, prefix + "." + coupled.name());
        }
    }
}

void Coordinator::refresh_schedule(Node& node) {
    const SimTime ta = node.model->time_advance();
    if (ta.is_finite() && ta.value() < 0.0) {
        throw ScheduleError("model \"" + node.path + "\" returned a negative time advance (" +
                            std::to_string(ta.value()) + ")");
    }
    node.t_next = node.t_last + ta;
}

std::size_t Coordinator::node_index(std::string_view path) const {
    const auto it = std::lower_bound(paths_.begin(), paths_.end(), path);
    if (it == paths_.end() || *it != path) {
        throw ConfigError("unknown atomic model path \"" + std::string(path) + "\"");
    }
    return static_cast<std::size_t>(it - paths_.begin());
}

SimTime Coordinator::last_transition_time(std::string_view path) const {
    return nodes_[node_index(path)].t_last;
}

SimTime Coordinator::next_event_time() const {
    SimTime next = SimTime::passive();
    for (const auto& node : nodes_) {
        next = std::min(next, node.t_next);
    }
    if (schedule_pos_ < schedule_.size()) {
        next = std::min(next, schedule_[schedule_pos_].time);
    }
    return next;
}

// Deliver `values`, flowing out of `source` within `scope`, to every coupled
// destination. `source` is either a child's output port or the scope's own
// input port; traversal follows external-input chains down, internal
// couplings across, and external-output chains up until every path lands on
// an atomic input port or leaves through the root boundary.
void Coordinator::feed(CoupledModel* scope, const CoupledModel::Endpoint& source,
                       const Bag& values, std::vector<EmittedEvent>& outputs) {
    for (const auto& coupling : scope->couplings()) {
        if (!(coupling.src == source)) {
            continue;
        }
        const auto& dst = coupling.dst;
        if (dst.is_self()) {
            // Flowing out through this scope's own output port.
            if (scope == &root_) {
                for (const auto& value : values) {
                    outputs.push_back(EmittedEvent{now_, dst.port, value});
                }
            } else {
                feed(parent_of_.at(scope), CoupledModel::Endpoint{scope->name(), dst.port},
                     values, outputs);
            }
        } else if (AtomicModel* atomic = scope->find_atomic(dst.component)) {
            inbox_[atomic].append(dst.port, values);
        } else {
            CoupledModel* inner = scope->find_coupled(dst.component);
            feed(inner, CoupledModel::Endpoint{"", dst.port}, values, outputs);
        }
    }
}

Coordinator::StepResult Coordinator::step() {
    if (finalized_) {
        throw Error("coordinator already finalized");
    }
    const SimTime t = next_event_time();
    if (t.is_passive()) {
        return StepResult{SimTime::passive(), {}};
    }

    // Livelock guard: count successive micro-steps at one instant.
    if (t == last_instant_) {
        ++rounds_at_instant_;
    } else {
        last_instant_ = t;
        rounds_at_instant_ = 1;
    }

    now_ = t;
    trace_.now = t;

    std::vector<EmittedEvent> outputs;
    inbox_.clear();

    // Exogenous events land first so their bag entries precede model output.
    while (schedule_pos_ < schedule_.size() && schedule_[schedule_pos_].time == t) {
        const auto& event = schedule_[schedule_pos_];
        if (!root_.has_in_port(event.port)) {
            throw ConfigError("exogenous event addresses unknown root input port \"" + event.port +
                              "\"");
        }
        feed(&root_, CoupledModel::Endpoint{"", event.port}, Bag{event.value}, outputs);
        ++schedule_pos_;
    }

    // Output phase: imminent models emit (in path order) before any state
    // changes anywhere.
    std::vector<std::size_t> imminent;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].t_next == t) {
            imminent.push_back(i);
        }
    }
    if (rounds_at_instant_ > options_.max_zero_delay_rounds) {
        std::string involved;
        for (const std::size_t i : imminent) {
            if (!involved.empty()) involved += ", ";
            involved += nodes_[i].path;
        }
        throw LivelockError("no time advance after " + std::to_string(rounds_at_instant_) +
                            " micro-steps at t=" + std::to_string(t.value()) +
                            "; imminent models: " + involved);
    }

    for (const std::size_t i : imminent) {
        Node& node = nodes_[i];
        MessageBags out;
        node.model->collect_outputs(out);
        if (options_.check_output_purity) {
            MessageBags again;
            node.model->collect_outputs(again);
            if (!(out == again)) {
                throw OutputPurityError("output function of \"" + node.path +
                                        "\" is not pure: repeated evaluation differs");
            }
        }
        for (const auto& [port, bag] : out.entries()) {
            if (!node.model->has_out_port(port)) {
                throw CouplingError("model \"" + node.path + "\" emitted on undeclared port \"" +
                                    port + "\"");
            }
            feed(node.parent, CoupledModel::Endpoint{node.model->name(), port}, bag, outputs);
        }
    }

    // Transition phase, in path order.
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        Node& node = nodes_[i];
        const bool is_imminent = node.t_next == t;
        const auto inbox_it = inbox_.find(node.model);
        const bool has_input = inbox_it != inbox_.end() && !inbox_it->second.empty();
        if (!is_imminent && !has_input) {
            continue;
        }
        if (is_imminent && has_input) {
            node.model->delta_con(inbox_it->second);
        } else if (is_imminent) {
            node.model->delta_int();
        } else {
            node.model->delta_ext(t - node.t_last, inbox_it->second);
        }
        node.t_last = t;
        refresh_schedule(node);
    }

    return StepResult{t, std::move(outputs)};
}

SimTime Coordinator::run_until(SimTime t_end, std::span<const ExternalEvent> schedule) {
    if (finalized_) {
        throw Error("coordinator already finalized");
    }
    for (std::size_t i = 1; i < schedule.size(); ++i) {
        if (schedule[i].time < schedule[i - 1].time) {
            throw ConfigError("exogenous schedule out of order at entry " + std::to_string(i));
        }
    }
    schedule_ = schedule;
    schedule_pos_ = 0;

    while (true) {
        const SimTime next = next_event_time();
        if (next.is_passive() || next > t_end) {
            break;
        }
        step();
    }

    now_ = std::max(now_, t_end);
    trace_.now = now_;
    for (auto& node : nodes_) {
        node.model->finalize();
    }
    finalized_ = true;
    return now_;
}

} // namespace devskit::devs
