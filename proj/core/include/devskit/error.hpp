#pragma once

#include <stdexcept>
#include <string>

namespace devskit {

// Root of every exception thrown by this library. Catching devskit::Error at a
// process boundary is sufficient to turn any internal failure into a clean
// nonzero exit.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A model asked for an impossible schedule (negative or NaN time advance).
class ScheduleError : public Error {
public:
    using Error::Error;
};

// A coupling references a missing component/port or pairs ports of
// incompatible directions.
class CouplingError : public Error {
public:
    using Error::Error;
};

// The simulation stopped advancing: more zero-delay micro-steps at a single
// instant than the configured bound.
class LivelockError : public Error {
public:
    using Error::Error;
};

// An output function mutated state or produced different bags on re-evaluation.
class OutputPurityError : public Error {
public:
    using Error::Error;
};

// A trace record cannot be put on the wire (non-finite time, NaN payload...).
class SerializeError : public Error {
public:
    using Error::Error;
};

// Bad configuration: scenario parameters, suite files, rule sets.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Failure inside the staged generation pipeline. Messages name the node path
// ("Root/Sender") whose step failed.
class PipelineError : public Error {
public:
    using Error::Error;
};

} // namespace devskit
