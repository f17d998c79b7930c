#include "devskit/kernel.hpp"

#include <algorithm>

#include "devskit/error.hpp"

namespace devskit::devs {

// --- MessageBags -----------------------------------------------------------

void MessageBags::push(std::string_view port, EventValue value) {
    for (auto& [name, bag] : entries_) {
        if (name == port) {
            bag.push_back(std::move(value));
            return;
        }
    }
    entries_.emplace_back(std::string(port), Bag{std::move(value)});
}

void MessageBags::append(std::string_view port, const Bag& values) {
    for (const auto& value : values) {
        push(port, value);
    }
}

bool MessageBags::has(std::string_view port) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const Entry& e) { return e.first == port; });
}

const Bag& MessageBags::at(std::string_view port) const {
    for (const auto& [name, bag] : entries_) {
        if (name == port) {
            return bag;
        }
    }
    static const Bag empty;
    return empty;
}

// --- AtomicModel -----------------------------------------------------------

AtomicModel::AtomicModel(std::string name) : name_(std::move(name)), entity_(name_) {
    if (name_.empty() || name_.find('.') != std::string::npos) {
        throw ConfigError("model name must be non-empty and not contain '.': \"" + name_ + "\"");
    }
}

void AtomicModel::delta_ext(SimTime, const MessageBags&) {
    throw Error("model \"" + name_ + "\" received input but defines no delta_ext");
}

void AtomicModel::delta_con(const MessageBags& input) {
    delta_int();
    delta_ext(SimTime(0.0), input);
}

void AtomicModel::collect_outputs(MessageBags&) const {}

void AtomicModel::hold_in(std::string phase, SimTime sigma) {
    if (sigma.is_finite() && sigma.value() < 0.0) {
        throw ScheduleError("model \"" + name_ + "\" scheduled a negative sigma (" +
                            std::to_string(sigma.value()) + ") in phase \"" + phase + "\"");
    }
    phase_ = std::move(phase);
    sigma_ = sigma;
}

void AtomicModel::passivate(std::string phase) {
    phase_ = std::move(phase);
    sigma_ = SimTime::passive();
}

void AtomicModel::add_in_port(std::string port) {
    if (port.empty() || has_in_port(port)) {
        throw ConfigError("bad or duplicate input port \"" + port + "\" on model \"" + name_ + "\"");
    }
    in_ports_.push_back(std::move(port));
}

void AtomicModel::add_out_port(std::string port) {
    if (port.empty() || has_out_port(port)) {
        throw ConfigError("bad or duplicate output port \"" + port + "\" on model \"" + name_ + "\"");
    }
    out_ports_.push_back(std::move(port));
}

bool AtomicModel::has_in_port(std::string_view port) const {
    return std::find(in_ports_.begin(), in_ports_.end(), port) != in_ports_.end();
}

bool AtomicModel::has_out_port(std::string_view port) const {
    return std::find(out_ports_.begin(), out_ports_.end(), port) != out_ports_.end();
}

void AtomicModel::log(std::string_view event, EventValue::Object payload) const {
    if (trace_ != nullptr && trace_->sink != nullptr) {
        trace::TraceRecord record;
        record.time = trace_->now.value();
        record.entity = entity_;
        record.event = std::string(event);
        record.payload = std::move(payload);
        trace_->sink->record(record);
    }
}

// --- CoupledModel ----------------------------------------------------------

CoupledModel::CoupledModel(std::string name) : name_(std::move(name)) {
    if (name_.empty() || name_.find('.') != std::string::npos) {
        throw ConfigError("model name must be non-empty and not contain '.': \"" + name_ + "\"");
    }
}

void CoupledModel::add_in_port(std::string port) {
    if (port.empty() || has_in_port(port)) {
        throw ConfigError("bad or duplicate input port \"" + port + "\" on model \"" + name_ + "\"");
    }
    in_ports_.push_back(std::move(port));
}

void CoupledModel::add_out_port(std::string port) {
    if (port.empty() || has_out_port(port)) {
        throw ConfigError("bad or duplicate output port \"" + port + "\" on model \"" + name_ + "\"");
    }
    out_ports_.push_back(std::move(port));
}

bool CoupledModel::has_in_port(std::string_view port) const {
    return std::find(in_ports_.begin(), in_ports_.end(), port) != in_ports_.end();
}

bool CoupledModel::has_out_port(std::string_view port) const {
    return std::find(out_ports_.begin(), out_ports_.end(), port) != out_ports_.end();
}

void CoupledModel::check_component_name(const std::string& name) const {
    if (has_component(name)) {
        throw ConfigError("duplicate component \"" + name + "\" in coupled model \"" + name_ + "\"");
    }
}

AtomicModel& CoupledModel::add_component(std::unique_ptr<AtomicModel> model) {
    check_component_name(model->name());
    auto& ref = *model;
    components_.emplace_back(std::move(model));
    return ref;
}

CoupledModel& CoupledModel::add_component(std::unique_ptr<CoupledModel> model) {
    check_component_name(model->name());
    auto& ref = *model;
    components_.emplace_back(std::move(model));
    return ref;
}

AtomicModel* CoupledModel::find_atomic(std::string_view name) const {
    for (const auto& component : components_) {
        if (const auto* p = std::get_if<std::unique_ptr<AtomicModel>>(&component)) {
            if ((*p)->name() == name) {
                return p->get();
            }
        }
    }
    return nullptr;
}

CoupledModel* CoupledModel::find_coupled(std::string_view name) const {
    for (const auto& component : components_) {
        if (const auto* p = std::get_if<std::unique_ptr<CoupledModel>>(&component)) {
            if ((*p)->name() == name) {
                return p->get();
            }
        }
    }
    return nullptr;
}

bool CoupledModel::has_component(std::string_view name) const {
    return find_atomic(name) != nullptr || find_coupled(name) != nullptr;
}

CoupledModel::Endpoint CoupledModel::parse_endpoint(std::string_view text) const {
    const auto dot = text.find('.');
    if (dot == std::string_view::npos) {
        return Endpoint{"", std::string(text)};
    }
    Endpoint ep{std::string(text.substr(0, dot)), std::string(text.substr(dot + 1))};
    if (ep.component.empty() || ep.port.empty()) {
        throw CouplingError("malformed endpoint \"" + std::string(text) + "\" in coupled model \"" +
                            name_ + "\"");
    }
    return ep;
}

void CoupledModel::couple(std::string_view src_text, std::string_view dst_text) {
    const Endpoint src = parse_endpoint(src_text);
    const Endpoint dst = parse_endpoint(dst_text);

    auto describe = [&]() {
        return "\"" + std::string(src_text) + "\" -> \"" + std::string(dst_text) +
               "\" in coupled model \"" + name_ + "\"";
    };

    // Classify each endpoint: which side of which boundary it can sit on.
    auto child_has_in = [&](const Endpoint& ep) {
        if (const auto* a = find_atomic(ep.component)) return a->has_in_port(ep.port);
        if (const auto* c = find_coupled(ep.component)) return c->has_in_port(ep.port);
        return false;
    };
    auto child_has_out = [&](const Endpoint& ep) {
        if (const auto* a = find_atomic(ep.component)) return a->has_out_port(ep.port);
        if (const auto* c = find_coupled(ep.component)) return c->has_out_port(ep.port);
        return false;
    };
    auto require_child = [&](const Endpoint& ep) {
        if (!ep.is_self() && !has_component(ep.component)) {
            throw CouplingError("unknown component \"" + ep.component + "\" in coupling " +
                                describe());
        }
    };
    require_child(src);
    require_child(dst);

    CouplingClass cls;
    if (src.is_self()) {
        if (!has_in_port(src.port)) {
            throw CouplingError("unknown input port \"" + src.port + "\" in coupling " + describe());
        }
        if (dst.is_self() || !child_has_in(dst)) {
            throw CouplingError("an external input coupling must target a child input port: " +
                                describe());
        }
        cls = CouplingClass::external_input;
    } else {
        if (!child_has_out(src)) {
            throw CouplingError("source is not a child output port in coupling " + describe());
        }
        if (dst.is_self()) {
            if (!has_out_port(dst.port)) {
                throw CouplingError("unknown output port \"" + dst.port + "\" in coupling " +
                                    describe());
            }
            cls = CouplingClass::external_output;
        } else {
            if (!child_has_in(dst)) {
                throw CouplingError("destination is not a child input port in coupling " +
                                    describe());
            }
            cls = CouplingClass::internal;
        }
    }

    for (const auto& existing : couplings_) {
        if (existing.src == src && existing.dst == dst) {
            throw CouplingError("duplicate coupling " + describe());
        }
    }
    couplings_.push_back(Coupling{cls, src, dst});
}

} // namespace devskit::devs
