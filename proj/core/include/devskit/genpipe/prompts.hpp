#pragma once

#include <map>
#include <string>
#include <vector>

namespace devskit::genpipe {

// The agent prompt templates. Templates are data: the pipeline ships a
// compiled-in set (from core/resources/prompts), and a directory of *.txt
// files can replace them wholesale for experiments. Placeholders are written
// {slot_name}; literal braces are doubled ({{ and }}). Rendering with a slot
// the template doesn't define is fine; a slot the template uses but the
// caller didn't provide — or a stray single brace — is a ConfigError, so a
// malformed template fails loudly at render time, not by leaking braces into
// a prompt.
class PromptLibrary {
public:
    // The templates compiled into the library.
    static PromptLibrary embedded();

    // Every *.txt in `dir` (basename without extension becomes the template
    // name). Throws ConfigError when the directory is missing or empty.
    static PromptLibrary from_directory(const std::string& dir);

    // embedded() unless `dir` is non-empty.
    static PromptLibrary for_run(const std::string& dir);

    [[nodiscard]] const std::string& raw(const std::string& name) const;
    [[nodiscard]] std::string render(const std::string& name,
                                     const std::map<std::string, std::string>& slots) const;
    [[nodiscard]] std::vector<std::string> names() const;

private:
    explicit PromptLibrary(std::map<std::string, std::string> templates)
        : templates_(std::move(templates)) {}

    std::map<std::string, std::string> templates_;
};

// Exposed for tests: render one template string directly.
std::string render_template(const std::string& name, const std::string& text,
                            const std::map<std::string, std::string>& slots);

} // namespace devskit::genpipe
