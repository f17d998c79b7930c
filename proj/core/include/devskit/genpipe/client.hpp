#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace devskit::genpipe {

// One request to a chat backend: an ordered list of role-tagged messages plus
// a short hint naming the response schema the caller will try to parse
// ("classification json", "model specification json", "cpp source in
// <cpp_code> tags", ...). The hint is part of the request identity.
struct ChatMessage {
    std::string role; // "system" or "user"
    std::string content;

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    std::string schema_hint;

    friend bool operator==(const ChatRequest&, const ChatRequest&) = default;
};

// Stable fingerprint of a request (SHA-256 over roles, contents, and the
// schema hint, hex-encoded). The mock client keys its scripted replies by
// this digest, which makes replay independent of call order — and therefore
// identical under serial and concurrent generation.
std::string request_digest(const ChatRequest& request);

// Abstract backend. Implementations must be safe to call from several
// threads at once. send() either returns the assistant text or throws
// (PipelineError for exhausted scripts / transport failures).
class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual std::string send(const ChatRequest& request) = 0;
};

// ---------------------------------------------------------------------------
// HTTP backend
//
// Wire protocol: POST {base_url}{path} with JSON
//   {"model": "...", "messages": [{"role": "...", "content": "..."}, ...],
//    "schema_hint": "..."}
// expecting a JSON object whose "content" field holds the assistant text.
// Configuration comes from the environment:
//   DEVSKIT_CHAT_URL    e.g. http://localhost:8089   (required)
//   DEVSKIT_CHAT_PATH   request path, default /chat
//   DEVSKIT_CHAT_MODEL  model name forwarded verbatim, default "default"
//   DEVSKIT_CHAT_TOKEN  bearer token, omitted when empty

struct HttpChatConfig {
    std::string base_url;
    std::string path = "/chat";
    std::string model = "default";
    std::string token;
    int max_attempts = 3;      // transport retries per request
    double timeout_seconds = 60.0;
};

// Reads the DEVSKIT_CHAT_* variables; throws ConfigError when the URL is
// missing or malformed.
HttpChatConfig http_config_from_env();

class HttpChatClient final : public ChatClient {
public:
    explicit HttpChatClient(HttpChatConfig config);
    std::string send(const ChatRequest& request) override;

private:
    HttpChatConfig config_;
    std::string host_;
    int port_ = 80;
};

// ---------------------------------------------------------------------------
// Scripted backends

// Replays a script file of digest-keyed responses:
//   {"replies": {"<sha256 hex>": "response text", ...}}
// A request whose digest is absent throws PipelineError quoting the digest
// and the head of the prompt, so the failing call is easy to find and add.
class MockChatClient final : public ChatClient {
public:
    explicit MockChatClient(const std::string& script_path);
    std::string send(const ChatRequest& request) override;

    [[nodiscard]] std::size_t reply_count() const { return replies_.size(); }

private:
    std::map<std::string, std::string> replies_;
};

// Answers from a fixed list of (substring, response) rules: the first rule
// whose substring occurs in the rendered request wins. This is the
// programmable client tests build fixtures with; pair it with a
// RecordingChatClient to produce a digest-keyed script for MockChatClient.
class PatternChatClient final : public ChatClient {
public:
    using Rule = std::pair<std::string, std::string>;
    explicit PatternChatClient(std::vector<Rule> rules) : rules_(std::move(rules)) {}
    std::string send(const ChatRequest& request) override;

private:
    std::vector<Rule> rules_;
};

// Decorator that remembers every (digest, response) pair passing through.
class RecordingChatClient final : public ChatClient {
public:
    explicit RecordingChatClient(ChatClient& inner) : inner_(inner) {}
    std::string send(const ChatRequest& request) override;

    // Serialize what was seen so far as a MockChatClient script.
    [[nodiscard]] std::string script_json() const;
    [[nodiscard]] std::size_t call_count() const;

private:
    ChatClient& inner_;
    mutable std::mutex mutex_;
    std::map<std::string, std::string> replies_;
    std::size_t calls_ = 0;
};

} // namespace devskit::genpipe
