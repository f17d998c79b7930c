#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "devskit/error.hpp"

namespace devskit {

// The value type carried by messages and trace payloads: JSON's data model
// with one deliberate difference — objects remember insertion order, because
// the trace contract serializes payload keys in the order the producer set
// them. Integers and floats are distinct kinds (3 and 3.0 serialize
// differently), matching what a JSON round trip preserves.
class EventValue {
public:
    enum class Kind { null, boolean, integer, real, string, array, object };

    using Array = std::vector<EventValue>;

    class Object {
    public:
        using Entry = std::pair<std::string, EventValue>;

        Object() = default;
        Object(std::initializer_list<Entry> entries);

        // Insert or overwrite; insertion order is preserved, overwriting keeps
        // the original position.
        void set(std::string key, EventValue value);

        [[nodiscard]] bool contains(std::string_view key) const;
        [[nodiscard]] const EventValue* find(std::string_view key) const;
        // Checked lookup; throws Error when the key is absent.
        [[nodiscard]] const EventValue& at(std::string_view key) const;

        [[nodiscard]] std::size_t size() const { return entries_.size(); }
        [[nodiscard]] bool empty() const { return entries_.empty(); }
        [[nodiscard]] const std::vector<Entry>& entries() const { return entries_; }

        friend bool operator==(const Object& a, const Object& b) {
            return a.entries_ == b.entries_;
        }

    private:
        std::vector<Entry> entries_;
    };

    EventValue() = default;
    EventValue(std::nullptr_t) {}
    EventValue(bool b) : data_(b) {}
    EventValue(std::int64_t i) : data_(i) {}
    EventValue(int i) : data_(static_cast<std::int64_t>(i)) {}
    EventValue(long long i) : data_(static_cast<std::int64_t>(i)) {}
    EventValue(std::size_t i) : data_(static_cast<std::int64_t>(i)) {}
    EventValue(double d) : data_(d) {}
    EventValue(std::string s) : data_(std::move(s)) {}
    EventValue(std::string_view s) : data_(std::string(s)) {}
    EventValue(const char* s) : data_(std::string(s)) {}
    EventValue(Array a) : data_(std::move(a)) {}
    EventValue(Object o) : data_(std::move(o)) {}

    [[nodiscard]] Kind kind() const { return static_cast<Kind>(data_.index()); }
    [[nodiscard]] bool is_null() const { return kind() == Kind::null; }

    [[nodiscard]] bool as_bool() const { return get<bool>("boolean"); }
    [[nodiscard]] std::int64_t as_int() const { return get<std::int64_t>("integer"); }
    [[nodiscard]] double as_double() const { return get<double>("real"); }
    // Numeric convenience: integers widen to double, reals pass through.
    [[nodiscard]] double as_number() const;
    [[nodiscard]] const std::string& as_string() const { return get<std::string>("string"); }
    [[nodiscard]] const Array& as_array() const { return get<Array>("array"); }
    [[nodiscard]] const Object& as_object() const { return get<Object>("object"); }

    friend bool operator==(const EventValue& a, const EventValue& b) {
        return a.data_ == b.data_;
    }

private:
    template <typename T>
    [[nodiscard]] const T& get(const char* label) const {
        if (const T* p = std::get_if<T>(&data_)) {
            return *p;
        }
        throw Error(std::string("EventValue is not a ") + label);
    }

    std::variant<std::monostate, bool, std::int64_t, double, std::string, Array, Object> data_;
};

} // namespace devskit
