#include <doctest.h>

#include <algorithm>
#include <map>
#include <string>

#include "devskit/error.hpp"
#include "devskit/genpipe/prompts.hpp"

using namespace devskit;
using namespace devskit::genpipe;

namespace {

// Superset of every template's slots; extra entries are ignored by render.
const std::map<std::string, std::string> kAllSlots{
    {"name", "Widget"},        {"name_lower", "widget"},
    {"req", "REQ-TEXT"},       {"context_str", "CTX-TEXT"},
    {"feedback", "FB-TEXT"},   {"spec", "SPEC-TEXT"},
    {"sub_models", "SUB-TEXT"}, {"coupling", "COUPLING-TEXT"},
    {"flags", "FLAGS-TEXT"},   {"contract", "CONTRACT-TEXT"},
    {"code", "CODE-TEXT"},
};

} // namespace

TEST_CASE("embedded library carries the full template set") {
    const PromptLibrary& lib = PromptLibrary::embedded();
    const auto names = lib.names();
    for (const char* expected :
         {"classifier", "splitter", "formulator", "generator_atomic", "generator_coupled",
          "generator_controller", "summarizer"}) {
        CHECK_MESSAGE(std::find(names.begin(), names.end(), expected) != names.end(),
                      "missing template ", expected);
    }
}

TEST_CASE("every embedded template renders with the standard slots") {
    // This is the stray-brace check: a single unmatched brace anywhere in a
    // template makes render throw.
    const PromptLibrary& lib = PromptLibrary::embedded();
    for (const std::string& name : lib.names()) {
        CAPTURE(name);
        const std::string text = lib.render(name, kAllSlots);
        CHECK_FALSE(text.empty());
        CHECK(text.find("{name}") == std::string::npos);
    }
    // Spot-check substitution actually happened.
    const std::string classifier = lib.render("classifier", kAllSlots);
    CHECK(classifier.find("`Widget`") != std::string::npos);
    CHECK(classifier.find("REQ-TEXT") != std::string::npos);
}

TEST_CASE("render failures are loud") {
    const PromptLibrary& lib = PromptLibrary::embedded();
    CHECK_THROWS_AS(static_cast<void>(lib.raw("no_such_template")), ConfigError);
    CHECK_THROWS_AS(lib.render("no_such_template", kAllSlots), ConfigError);
    // A slot the caller did not provide.
    CHECK_THROWS_WITH_AS(render_template("t", "hello {missing}", {}),
                         doctest::Contains("missing"), ConfigError);
}

TEST_CASE("template grammar: doubled braces and malformed slots") {
    CHECK(render_template("t", "a {{literal}} brace", {}) == "a {literal} brace");
    CHECK(render_template("t", "{x} and {x}", {{"x", "v"}}) == "v and v");
    CHECK_THROWS_AS(render_template("t", "unclosed {", {}), ConfigError);
    CHECK_THROWS_AS(render_template("t", "stray } here", {}), ConfigError);
    CHECK_THROWS_AS(render_template("t", "bad {sl ot}", {{"sl ot", "v"}}), ConfigError);
    CHECK_THROWS_AS(render_template("t", "empty {} slot", {}), ConfigError);
}

TEST_CASE("directory overrides replace the embedded set") {
    const PromptLibrary lib = PromptLibrary::from_directory(DEVSKIT_PROMPT_DIR);
    const PromptLibrary& embedded = PromptLibrary::embedded();
    REQUIRE(lib.names() == embedded.names());
    for (const std::string& name : lib.names()) {
        CHECK(lib.raw(name) == embedded.raw(name));
    }
    CHECK_THROWS_AS(PromptLibrary::from_directory("/nonexistent/prompt/dir"), ConfigError);

    // for_run: empty selector means embedded, a directory means overrides.
    CHECK(PromptLibrary::for_run("").names() == embedded.names());
    CHECK(PromptLibrary::for_run(DEVSKIT_PROMPT_DIR).names() == embedded.names());
}
