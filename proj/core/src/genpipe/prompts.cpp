#include "devskit/genpipe/prompts.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "devskit/error.hpp"

namespace devskit::genpipe {

namespace detail {
const std::map<std::string, std::string>& embedded_prompts(); // generated at build time
}

PromptLibrary PromptLibrary::embedded() { return PromptLibrary(detail::embedded_prompts()); }

PromptLibrary PromptLibrary::from_directory(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) {
        throw ConfigError("prompt directory '" + dir + "' does not exist");
    }
    std::map<std::string, std::string> templates;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") {
            continue;
        }
        std::ifstream in(entry.path());
        std::ostringstream content;
        content << in.rdbuf();
        templates[entry.path().stem().string()] = content.str();
    }
    if (templates.empty()) {
        throw ConfigError("prompt directory '" + dir + "' holds no *.txt templates");
    }
    return PromptLibrary(std::move(templates));
}

PromptLibrary PromptLibrary::for_run(const std::string& dir) {
    return dir.empty() ? embedded() : from_directory(dir);
}

const std::string& PromptLibrary::raw(const std::string& name) const {
    const auto it = templates_.find(name);
    if (it == templates_.end()) {
        throw ConfigError("no prompt template named '" + name + "'");
    }
    return it->second;
}

std::string PromptLibrary::render(const std::string& name,
                                  const std::map<std::string, std::string>& slots) const {
    return render_template(name, raw(name), slots);
}

std::vector<std::string> PromptLibrary::names() const {
    std::vector<std::string> out;
    out.reserve(templates_.size());
    for (const auto& [name, text] : templates_) {
        out.push_back(name);
    }
    return out;
}

std::string render_template(const std::string& name, const std::string& text,
                            const std::map<std::string, std::string>& slots) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '{') {
            if (i + 1 < text.size() && text[i + 1] == '{') {
                out.push_back('{');
                ++i;
                continue;
            }
            const std::size_t close = text.find('}', i + 1);
            if (close == std::string::npos) {
                throw ConfigError("template '" + name + "': unclosed '{' at offset " +
                                  std::to_string(i));
            }
            const std::string slot = text.substr(i + 1, close - i - 1);
            const bool well_formed =
                !slot.empty() &&
                std::all_of(slot.begin(), slot.end(), [](char s) {
                    return std::isalnum(static_cast<unsigned char>(s)) != 0 || s == '_';
                });
            if (!well_formed) {
                throw ConfigError("template '" + name + "': malformed slot '{" + slot +
                                  "}' (double literal braces)");
            }
            const auto it = slots.find(slot);
            if (it == slots.end()) {
                throw ConfigError("template '" + name + "': no value for slot '{" + slot +
                                  "}'");
            }
            out += it->second;
            i = close;
        } else if (c == '}') {
            if (i + 1 < text.size() && text[i + 1] == '}') {
                out.push_back('}');
                ++i;
                continue;
            }
            throw ConfigError("template '" + name + "': stray '}' at offset " +
                              std::to_string(i));
        } else {
            out.push_back(c);
        }
    }
    return out;
}

} // namespace devskit::genpipe
