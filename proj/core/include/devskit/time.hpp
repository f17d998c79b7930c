#pragma once

#include <cmath>
#include <limits>

#include "devskit/error.hpp"

namespace devskit {

// Simulation time: a non-negative real or "passive" (+infinity, the time
// advance of a model with nothing scheduled). Comparisons and addition behave
// like IEEE doubles, so min-scans and +inf propagation need no special cases;
// the type exists to keep passivity explicit and NaN out of the clock.
class SimTime {
public:
    constexpr SimTime() = default;

    explicit SimTime(double value) : value_(value) {
        if (std::isnan(value)) {
            throw ScheduleError("SimTime cannot be NaN");
        }
    }

    [[nodiscard]] static constexpr SimTime passive() {
        SimTime t;
        t.value_ = std::numeric_limits<double>::infinity();
        return t;
    }

    [[nodiscard]] constexpr double value() const { return value_; }
    [[nodiscard]] constexpr bool is_passive() const {
        return value_ == std::numeric_limits<double>::infinity();
    }
    [[nodiscard]] constexpr bool is_finite() const { return !is_passive(); }

    friend constexpr bool operator==(SimTime a, SimTime b) { return a.value_ == b.value_; }
    friend constexpr bool operator!=(SimTime a, SimTime b) { return a.value_ != b.value_; }
    friend constexpr bool operator<(SimTime a, SimTime b) { return a.value_ < b.value_; }
    friend constexpr bool operator<=(SimTime a, SimTime b) { return a.value_ <= b.value_; }
    friend constexpr bool operator>(SimTime a, SimTime b) { return a.value_ > b.value_; }
    friend constexpr bool operator>=(SimTime a, SimTime b) { return a.value_ >= b.value_; }

    friend SimTime operator+(SimTime a, SimTime b) {
        SimTime t;
        t.value_ = a.value_ + b.value_;
        return t;
    }

    // Elapsed-time difference; callers only ever subtract an earlier finite
    // time from a later one.
    friend SimTime operator-(SimTime a, SimTime b) {
        SimTime t;
        t.value_ = a.value_ - b.value_;
        return t;
    }

private:
    double value_ = 0.0;
};

} // namespace devskit
