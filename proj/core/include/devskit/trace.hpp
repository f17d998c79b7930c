#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "devskit/value.hpp"

namespace devskit::trace {

// One observable event. On the wire this is a single JSONL line with exactly
// the keys time/entity/event/payload in that order; payload keys appear in
// the order the producer inserted them.
struct TraceRecord {
    double time = 0.0;
    std::string entity;
    std::string event;
    EventValue::Object payload;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

// Serialize one record to its canonical line (no trailing newline). The
// rendering is byte-stable: shortest round-trip float form with a guaranteed
// decimal point (3 -> "3.0"), integers unadorned, '", "' / '": "' separators.
// Throws SerializeError on non-finite time, negative time, empty entity or
// event, or NaN/infinite floats anywhere in the payload.
std::string serialize_record(const TraceRecord& record);

// Canonical rendering of a bare float (shared with serialize_record): the
// shortest digit string that parses back exactly, with ".0" appended when no
// fractional part or exponent is present.
std::string format_double(double value);

// One problem found while parsing or validating a trace line. `line` is
// 1-based. `kind` is a stable machine-readable tag: "parse-error",
// "missing-field", "extra-field", "type-mismatch", "invalid-value".
struct LineError {
    std::size_t line = 0;
    std::string kind;
    std::string message;

    friend bool operator==(const LineError&, const LineError&) = default;
};

struct ValidationReport {
    bool valid = true; // true iff no line produced an error
    std::size_t record_count = 0;
    std::vector<LineError> errors;
};

struct ParseResult {
    std::vector<TraceRecord> records; // records from lines that parsed cleanly
    ValidationReport report;
};

// Parse a full JSONL stream. Malformed lines are reported and skipped — the
// caller still gets every record that did parse. Blank lines are tolerated
// and produce neither records nor errors. A record's time must be a finite
// non-negative number; integer literals are accepted ("3" and "3.0" both
// parse to 3.0).
ParseResult parse_trace(std::istream& in);
ParseResult parse_trace_text(std::string_view text);

// Indices i where records[i].time < records[i-1].time. Empty result means the
// trace is non-decreasing in time.
std::vector<std::size_t> check_monotonic(std::span<const TraceRecord> records);

// ---------------------------------------------------------------------------
// Sinks

class TraceSink {
public:
    virtual ~TraceSink() = default;
    virtual void record(const TraceRecord& record) = 0;
};

// Serializes each record to an ostream, one line per record.
class JsonlSink final : public TraceSink {
public:
    explicit JsonlSink(std::ostream& out) : out_(out) {}
    void record(const TraceRecord& record) override;

private:
    std::ostream& out_;
};

// Accumulates records in memory (tests, rule evaluation on in-process runs).
class CollectSink final : public TraceSink {
public:
    void record(const TraceRecord& record) override { records_.push_back(record); }
    [[nodiscard]] const std::vector<TraceRecord>& records() const { return records_; }

private:
    std::vector<TraceRecord> records_;
};

} // namespace devskit::trace
