#include "devskit/genpipe/client.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "devskit/error.hpp"

namespace devskit::genpipe {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string head_of(const ChatRequest& request) {
    for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
        if (it->role == "user") {
            return it->content.substr(0, 160);
        }
    }
    return request.messages.empty() ? std::string()
                                    : request.messages.front().content.substr(0, 160);
}

std::string hex(const unsigned char* bytes, unsigned int length) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(static_cast<std::size_t>(length) * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(digits[bytes[i] >> 4]);
        out.push_back(digits[bytes[i] & 0x0f]);
    }
    return out;
}

} // namespace

std::string request_digest(const ChatRequest& request) {
    // Unambiguous canonical form: each message as role \x1f content \x1e,
    // then the schema hint.
    std::string canonical;
    for (const ChatMessage& message : request.messages) {
        canonical += message.role;
        canonical += '\x1f';
        canonical += message.content;
        canonical += '\x1e';
    }
    canonical += request.schema_hint;

    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(canonical.data(), canonical.size(), digest, &length, EVP_sha256(),
                   nullptr) != 1) {
        throw PipelineError("SHA-256 digest computation failed");
    }
    return hex(digest, length);
}

// --- HTTP -------------------------------------------------------------------

HttpChatConfig http_config_from_env() {
    HttpChatConfig config;
    const char* url = std::getenv("DEVSKIT_CHAT_URL");
    if (url == nullptr || *url == '\0') {
        throw ConfigError("DEVSKIT_CHAT_URL is not set; the http backend needs an endpoint");
    }
    config.base_url = url;
    if (const char* path = std::getenv("DEVSKIT_CHAT_PATH"); path != nullptr && *path) {
        config.path = path;
    }
    if (const char* model = std::getenv("DEVSKIT_CHAT_MODEL"); model != nullptr && *model) {
        config.model = model;
    }
    if (const char* token = std::getenv("DEVSKIT_CHAT_TOKEN"); token != nullptr) {
        config.token = token;
    }
    return config;
}

HttpChatClient::HttpChatClient(HttpChatConfig config) : config_(std::move(config)) {
    constexpr std::string_view scheme = "http://";
    if (config_.base_url.rfind(scheme, 0) != 0) {
        throw ConfigError("chat endpoint must start with http:// (got '" +
                          config_.base_url + "')");
    }
    std::string rest = config_.base_url.substr(scheme.size());
    if (const auto slash = rest.find('/'); slash != std::string::npos) {
        rest.resize(slash); // path beyond the authority is ignored; use DEVSKIT_CHAT_PATH
    }
    if (const auto colon = rest.find(':'); colon != std::string::npos) {
        host_ = rest.substr(0, colon);
        try {
            port_ = std::stoi(rest.substr(colon + 1));
        } catch (const std::exception&) {
            throw ConfigError("chat endpoint has a malformed port: '" + rest + "'");
        }
    } else {
        host_ = rest;
    }
    if (host_.empty()) {
        throw ConfigError("chat endpoint has no host: '" + config_.base_url + "'");
    }
}

std::string HttpChatClient::send(const ChatRequest& request) {
    ordered_json body;
    body["model"] = config_.model;
    body["messages"] = ordered_json::array();
    for (const ChatMessage& message : request.messages) {
        body["messages"].push_back({{"role", message.role}, {"content", message.content}});
    }
    body["schema_hint"] = request.schema_hint;
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
        httplib::Client client(host_, port_);
        client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_seconds));
        client.set_read_timeout(std::chrono::duration<double>(config_.timeout_seconds));
        httplib::Headers headers;
        if (!config_.token.empty()) {
            headers.emplace("Authorization", "Bearer " + config_.token);
        }
        auto result = client.Post(config_.path, headers, payload, "application/json");
        if (!result) {
            last_error = "transport error: " + httplib::to_string(result.error());
        } else if (result->status >= 500) {
            last_error = "server error: HTTP " + std::to_string(result->status);
        } else if (result->status != 200) {
            throw PipelineError("chat backend rejected the request: HTTP " +
                                std::to_string(result->status));
        } else {
            ordered_json reply;
            try {
                reply = ordered_json::parse(result->body);
            } catch (const ordered_json::parse_error& error) {
                throw PipelineError(std::string("chat backend returned invalid JSON: ") +
                                    error.what());
            }
            if (!reply.is_object() || !reply.contains("content") ||
                !reply["content"].is_string()) {
                throw PipelineError("chat backend reply has no string 'content' field");
            }
            return reply["content"].get<std::string>();
        }
        if (attempt < config_.max_attempts) {
            std::this_thread::sleep_for(std::chrono::milliseconds(50 * attempt));
        }
    }
    throw PipelineError("chat backend unreachable after " +
                        std::to_string(config_.max_attempts) + " attempts: " + last_error);
}

// --- scripted ---------------------------------------------------------------

MockChatClient::MockChatClient(const std::string& script_path) {
    std::ifstream in(script_path);
    if (!in) {
        throw ConfigError("cannot open mock script '" + script_path + "'");
    }
    ordered_json document;
    try {
        document = ordered_json::parse(in);
    } catch (const ordered_json::parse_error& error) {
        throw ConfigError("mock script '" + script_path +
                          "' is not valid JSON: " + error.what());
    }
    if (!document.is_object() || !document.contains("replies") ||
        !document["replies"].is_object()) {
        throw ConfigError("mock script '" + script_path +
                          "' must be {\"replies\": {digest: response, ...}}");
    }
    for (const auto& [digest, response] : document["replies"].items()) {
        if (!response.is_string()) {
            throw ConfigError("mock script '" + script_path + "': reply for " + digest +
                              " must be a string");
        }
        replies_.emplace(digest, response.get<std::string>());
    }
}

std::string MockChatClient::send(const ChatRequest& request) {
    const std::string digest = request_digest(request);
    const auto it = replies_.find(digest);
    if (it == replies_.end()) {
        throw PipelineError("mock script has no reply for digest " + digest +
                            " (prompt head: \"" + head_of(request) + "\")");
    }
    return it->second;
}

std::string PatternChatClient::send(const ChatRequest& request) {
    std::string rendered = request.schema_hint;
    rendered += '\n';
    for (const ChatMessage& message : request.messages) {
        rendered += message.content;
        rendered += '\n';
    }
    for (const auto& [needle, response] : rules_) {
        if (rendered.find(needle) != std::string::npos) {
            return response;
        }
    }
    throw PipelineError("no pattern rule matches the request (prompt head: \"" +
                        head_of(request) + "\")");
}

std::string RecordingChatClient::send(const ChatRequest& request) {
    const std::string response = inner_.send(request);
    const std::lock_guard<std::mutex> lock(mutex_);
    ++calls_;
    replies_[request_digest(request)] = response;
    return response;
}

std::string RecordingChatClient::script_json() const {
    const std::lock_guard<std::mutex> lock(mutex_);
    ordered_json document;
    document["replies"] = ordered_json::object();
    for (const auto& [digest, response] : replies_) {
        document["replies"][digest] = response;
    }
    return document.dump(2);
}

std::size_t RecordingChatClient::call_count() const {
    const std::lock_guard<std::mutex> lock(mutex_);
    return calls_;
}

} // namespace devskit::genpipe
