#include "devskit/trace.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "devskit/error.hpp"

namespace devskit::trace {
namespace {

void write_escaped(std::string& out, std::string_view s) {
    out.push_back('"');
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\b': out += "\\b"; break;
        case '\f': out += "\\f"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out.push_back(c); // UTF-8 bytes pass through untouched
            }
        }
    }
    out.push_back('"');
}

void write_value(std::string& out, const EventValue& v) {
    switch (v.kind()) {
    case EventValue::Kind::null:
        out += "null";
        break;
    case EventValue::Kind::boolean:
        out += v.as_bool() ? "true" : "false";
        break;
    case EventValue::Kind::integer: {
        char buf[24];
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v.as_int());
        out.append(buf, p);
        break;
    }
    case EventValue::Kind::real:
        out += format_double(v.as_double());
        break;
    case EventValue::Kind::string:
        write_escaped(out, v.as_string());
        break;
    case EventValue::Kind::array: {
        out.push_back('[');
        bool first = true;
        for (const auto& item : v.as_array()) {
            if (!first) out += ", ";
            first = false;
            write_value(out, item);
        }
        out.push_back(']');
        break;
    }
    case EventValue::Kind::object: {
        out.push_back('{');
        bool first = true;
        for (const auto& [key, value] : v.as_object().entries()) {
            if (!first) out += ", ";
            first = false;
            write_escaped(out, key);
            out += ": ";
            write_value(out, value);
        }
        out.push_back('}');
        break;
    }
    }
}

void check_serializable(const EventValue& v, const std::string& where) {
    switch (v.kind()) {
    case EventValue::Kind::real:
        if (!std::isfinite(v.as_double())) {
            throw SerializeError("non-finite float in payload at " + where);
        }
        break;
    case EventValue::Kind::array: {
        std::size_t i = 0;
        for (const auto& item : v.as_array()) {
            check_serializable(item, where + "[" + std::to_string(i++) + "]");
        }
        break;
    }
    case EventValue::Kind::object:
        for (const auto& [key, value] : v.as_object().entries()) {
            check_serializable(value, where.empty() ? key : where + "." + key);
        }
        break;
    default:
        break;
    }
}

// --- parsing ---------------------------------------------------------------

using json = nlohmann::ordered_json;

EventValue to_event_value(const json& j) {
    switch (j.type()) {
    case json::value_t::null:
        return EventValue(nullptr);
    case json::value_t::boolean:
        return EventValue(j.get<bool>());
    case json::value_t::number_integer:
    case json::value_t::number_unsigned:
        return EventValue(j.get<std::int64_t>());
    case json::value_t::number_float:
        return EventValue(j.get<double>());
    case json::value_t::string:
        return EventValue(j.get<std::string>());
    case json::value_t::array: {
        EventValue::Array arr;
        arr.reserve(j.size());
        for (const auto& item : j) {
            arr.push_back(to_event_value(item));
        }
        return EventValue(std::move(arr));
    }
    case json::value_t::object: {
        EventValue::Object obj;
        for (const auto& [key, value] : j.items()) {
            obj.set(key, to_event_value(value));
        }
        return EventValue(std::move(obj));
    }
    default:
        throw SerializeError("unsupported JSON value type");
    }
}

bool is_blank(std::string_view line) {
    return line.find_first_not_of(" \t\r\f\v") == std::string_view::npos;
}

// Parse one non-blank line; either appends a record or appends errors.
void parse_line(std::string_view line, std::size_t lineno, ParseResult& result) {
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    auto fail = [&](std::string kind, std::string message) {
        result.report.errors.push_back({lineno, std::move(kind), std::move(message)});
    };

    if (j.is_discarded()) {
        fail("parse-error", "line is not valid JSON");
        return;
    }
    if (!j.is_object()) {
        fail("type-mismatch", "line is not a JSON object");
        return;
    }

    bool ok = true;
    for (const char* key : {"time", "entity", "event", "payload"}) {
        if (!j.contains(key)) {
            fail("missing-field", std::string("missing required key \"") + key + "\"");
            ok = false;
        }
    }
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "time" && key != "entity" && key != "event" && key != "payload") {
            fail("extra-field", "unexpected key \"" + key + "\"");
            ok = false;
        }
    }
    if (!ok) {
        return;
    }

    if (!j["time"].is_number()) {
        fail("type-mismatch", "\"time\" must be a number");
        ok = false;
    }
    if (!j["entity"].is_string()) {
        fail("type-mismatch", "\"entity\" must be a string");
        ok = false;
    }
    if (!j["event"].is_string()) {
        fail("type-mismatch", "\"event\" must be a string");
        ok = false;
    }
    if (!j["payload"].is_object()) {
        fail("type-mismatch", "\"payload\" must be an object");
        ok = false;
    }
    if (!ok) {
        return;
    }

    const double time = j["time"].get<double>();
    if (!std::isfinite(time) || time < 0.0) {
        fail("invalid-value", "\"time\" must be finite and non-negative");
        ok = false;
    }
    if (j["entity"].get_ref<const std::string&>().empty()) {
        fail("invalid-value", "\"entity\" must be non-empty");
        ok = false;
    }
    if (j["event"].get_ref<const std::string&>().empty()) {
        fail("invalid-value", "\"event\" must be non-empty");
        ok = false;
    }
    if (!ok) {
        return;
    }

    TraceRecord record;
    record.time = time;
    record.entity = j["entity"].get<std::string>();
    record.event = j["event"].get<std::string>();
    record.payload = to_event_value(j["payload"]).as_object();
    result.records.push_back(std::move(record));
    result.report.record_count += 1;
}

} // namespace

std::string format_double(double value) {
    if (!std::isfinite(value)) {
        throw SerializeError("cannot format non-finite float");
    }
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, value);
    std::string s(buf, p);
    if (s.find_first_of(".eE") == std::string::npos) {
        s += ".0";
    }
    return s;
}

std::string serialize_record(const TraceRecord& record) {
    if (!std::isfinite(record.time) || record.time < 0.0) {
        throw SerializeError("record time must be finite and non-negative");
    }
    if (record.entity.empty()) {
        throw SerializeError("record entity must be non-empty");
    }
    if (record.event.empty()) {
        throw SerializeError("record event must be non-empty");
    }
    check_serializable(EventValue(record.payload), "");

    std::string out;
    out.reserve(64 + 16 * record.payload.size());
    out += "{\"time\": ";
    out += format_double(record.time);
    out += ", \"entity\": ";
    write_escaped(out, record.entity);
    out += ", \"event\": ";
    write_escaped(out, record.event);
    out += ", \"payload\": ";
    write_value(out, EventValue(record.payload));
    out.push_back('}');
    return out;
}

ParseResult parse_trace(std::istream& in) {
    ParseResult result;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_blank(line)) {
            continue;
        }
        parse_line(line, lineno, result);
    }
    result.report.valid = result.report.errors.empty();
    return result;
}

ParseResult parse_trace_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_trace(in);
}

std::vector<std::size_t> check_monotonic(std::span<const TraceRecord> records) {
    std::vector<std::size_t> violations;
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].time < records[i - 1].time) {
            violations.push_back(i);
        }
    }
    return violations;
}

void JsonlSink::record(const TraceRecord& record) {
    out_ << serialize_record(record) << '\n';
}

} // namespace devskit::trace
