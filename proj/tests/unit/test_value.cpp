#include <doctest.h>

#include <devskit/error.hpp>
#include <devskit/value.hpp>

using devskit::Error;
using devskit::EventValue;

TEST_CASE("object preserves insertion order") {
    EventValue::Object obj;
    obj.set("seq_num", EventValue(1));
    obj.set("bit", EventValue(0));
    obj.set("is_retry", EventValue(false));

    REQUIRE(obj.size() == 3);
    CHECK(obj.entries()[0].first == "seq_num");
    CHECK(obj.entries()[1].first == "bit");
    CHECK(obj.entries()[2].first == "is_retry");
}

TEST_CASE("overwriting a key keeps its original position") {
    EventValue::Object obj{{"a", EventValue(1)}, {"b", EventValue(2)}};
    obj.set("a", EventValue(10));

    CHECK(obj.entries()[0].first == "a");
    CHECK(obj.at("a").as_int() == 10);
    CHECK(obj.entries()[1].first == "b");
}

TEST_CASE("kind accessors are strict") {
    const EventValue i(3);
    const EventValue d(3.0);
    CHECK(i.kind() == EventValue::Kind::integer);
    CHECK(d.kind() == EventValue::Kind::real);
    CHECK(i.as_number() == 3.0);
    CHECK(d.as_number() == 3.0);
    CHECK_THROWS_AS((void)i.as_double(), Error);
    CHECK_THROWS_AS((void)d.as_int(), Error);
    CHECK_THROWS_AS((void)d.as_string(), Error);
}

TEST_CASE("equality is type-strict") {
    CHECK(EventValue(3) == EventValue(3));
    CHECK_FALSE(EventValue(3) == EventValue(3.0));
    CHECK(EventValue("x") == EventValue(std::string("x")));

    EventValue::Object a{{"k", EventValue(1)}};
    EventValue::Object b{{"k", EventValue(1)}};
    CHECK(EventValue(a) == EventValue(b));

    // Same entries, different order: not equal — order is meaningful.
    EventValue::Object c{{"k", EventValue(1)}, {"j", EventValue(2)}};
    EventValue::Object d{{"j", EventValue(2)}, {"k", EventValue(1)}};
    CHECK_FALSE(EventValue(c) == EventValue(d));
}

TEST_CASE("missing object key throws") {
    const EventValue::Object obj{{"present", EventValue(1)}};
    CHECK(obj.contains("present"));
    CHECK_FALSE(obj.contains("absent"));
    CHECK(obj.find("absent") == nullptr);
    CHECK_THROWS_AS((void)obj.at("absent"), Error);
}
