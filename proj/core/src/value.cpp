#include "devskit/value.hpp"

namespace devskit {

EventValue::Object::Object(std::initializer_list<Entry> entries) {
    for (const auto& entry : entries) {
        set(entry.first, entry.second);
    }
}

void EventValue::Object::set(std::string key, EventValue value) {
    for (auto& entry : entries_) {
        if (entry.first == key) {
            entry.second = std::move(value);
            return;
        }
    }
    entries_.emplace_back(std::move(key), std::move(value));
}

bool EventValue::Object::contains(std::string_view key) const {
    return find(key) != nullptr;
}

const EventValue* EventValue::Object::find(std::string_view key) const {
    for (const auto& entry : entries_) {
        if (entry.first == key) {
            return &entry.second;
        }
    }
    return nullptr;
}

const EventValue& EventValue::Object::at(std::string_view key) const {
    if (const EventValue* v = find(key)) {
        return *v;
    }
    throw Error("payload key not found: " + std::string(key));
}

double EventValue::as_number() const {
    if (kind() == Kind::integer) {
        return static_cast<double>(as_int());
    }
    return as_double();
}

} // namespace devskit
