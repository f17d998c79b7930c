#pragma once

// Small instrumented models shared by the kernel tests: a periodic generator,
// a recording collector, and a few deliberately misbehaving models. They log
// into plain vectors owned by the test so assertions stay direct.

#include <memory>
#include <string>
#include <vector>

#include <devskit/coordinator.hpp>
#include <devskit/kernel.hpp>

namespace devskit::testing {

// Appends one entry per lifecycle call so tests can assert global ordering.
using CallLog = std::vector<std::string>;

// Emits consecutive integers 1, 2, 3... on "out" every `period`.
class Generator : public devs::AtomicModel {
public:
    Generator(std::string name, double period, int limit = -1, CallLog* calls = nullptr)
        : AtomicModel(std::move(name)), period_(period), limit_(limit), calls_(calls) {
        add_out_port("out");
    }

    void initialize() override { hold_in("emitting", SimTime(period_)); }

    void collect_outputs(devs::MessageBags& out) const override {
        if (calls_ != nullptr) {
            calls_->push_back(name() + ":lambda");
        }
        out.push(
            "out", EventValue(static_cast<std::int64_t>(emitted_ + 1)));
    }

    void delta_int() override {
        if (calls_ != nullptr) {
            calls_->push_back(name() + ":delta_int");
        }
        ++emitted_;
        if (limit_ >= 0 && emitted_ >= limit_) {
            passivate("done");
        } else {
            hold_in("emitting", SimTime(period_));
        }
    }

    [[nodiscard]] int emitted() const { return emitted_; }

private:
    double period_;
    int limit_;
    int emitted_ = 0;
    CallLog* calls_;
};

// Remembers everything it receives, with the elapsed time reported by the
// kernel and an independently maintained wall clock for cross-checking.
class Collector : public devs::AtomicModel {
public:
    struct Arrival {
        double time = 0.0;
        double elapsed = 0.0;
        std::string port;
        EventValue value;
    };

    explicit Collector(std::string name, CallLog* calls = nullptr)
        : AtomicModel(std::move(name)), calls_(calls) {
        add_in_port("in");
    }

    void delta_ext(SimTime elapsed, const devs::MessageBags& input) override {
        if (calls_ != nullptr) {
            calls_->push_back(name() + ":delta_ext");
        }
        clock_ += elapsed.value();
        for (const auto& [port, bag] : input.entries()) {
            for (const auto& value : bag) {
                arrivals_.push_back(Arrival{clock_, elapsed.value(), port, value});
            }
        }
    }

    [[nodiscard]] const std::vector<Arrival>& arrivals() const { return arrivals_; }

private:
    double clock_ = 0.0;
    std::vector<Arrival> arrivals_;
    CallLog* calls_;
};

// Forwards inputs to "out" after a fixed delay; single-slot, drops overlaps.
class Relay : public devs::AtomicModel {
public:
    Relay(std::string name, double delay) : AtomicModel(std::move(name)), delay_(delay) {
        add_in_port("in");
        add_out_port("out");
    }

    void delta_ext(SimTime, const devs::MessageBags& input) override {
        if (phase() == "holding") {
            return; // busy; drop
        }
        pending_ = input.at("in").front();
        hold_in("holding", SimTime(delay_));
    }

    void collect_outputs(devs::MessageBags& out) const override { out.push("out", pending_); }

    void delta_int() override { passivate(); }

private:
    double delay_;
    EventValue pending_;
};

// Counts transition kinds; used for confluent-order assertions.
class ConfluenceProbe : public devs::AtomicModel {
public:
    ConfluenceProbe(std::string name, double period, CallLog* calls)
        : AtomicModel(std::move(name)), period_(period), calls_(calls) {
        add_in_port("in");
        add_out_port("out");
    }

    void initialize() override { hold_in("active", SimTime(period_)); }

    void collect_outputs(devs::MessageBags& out) const override {
        out.push("out", EventValue("tick"));
    }

    void delta_int() override {
        calls_->push_back(name() + ":delta_int");
        hold_in("active", SimTime(period_));
    }

    void delta_ext(SimTime elapsed, const devs::MessageBags&) override {
        calls_->push_back(name() + ":delta_ext@" + std::to_string(elapsed.value()));
        hold_in("active", SimTime(period_)); // restart the period on input
    }

    void delta_con(const devs::MessageBags& input) override {
        calls_->push_back(name() + ":delta_con");
        AtomicModel::delta_con(input); // keep the default ordering visible
    }

private:
    double period_;
    CallLog* calls_;
};

// Output function with a side effect: the purity check must reject it.
class ImpureModel : public devs::AtomicModel {
public:
    explicit ImpureModel(std::string name) : AtomicModel(std::move(name)) {
        add_out_port("out");
    }

    void initialize() override { hold_in("active", SimTime(1.0)); }

    void collect_outputs(devs::MessageBags& out) const override {
        out.push("out", EventValue(static_cast<std::int64_t>(++counter_)));
    }

    void delta_int() override { passivate(); }

private:
    mutable std::int64_t counter_ = 0;
};

// Emits immediately whenever poked: two of these wired in a loop livelock.
class ZeroDelayEcho : public devs::AtomicModel {
public:
    explicit ZeroDelayEcho(std::string name, bool start = false)
        : AtomicModel(std::move(name)), start_(start) {
        add_in_port("in");
        add_out_port("out");
    }

    void initialize() override {
        if (start_) {
            hold_in("firing", SimTime(0.0));
        }
    }

    void collect_outputs(devs::MessageBags& out) const override {
        out.push("out", EventValue("ping"));
    }

    void delta_int() override { passivate(); }

    void delta_ext(SimTime, const devs::MessageBags&) override {
        hold_in("firing", SimTime(0.0));
    }

private:
    bool start_;
};

} // namespace devskit::testing
