#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pddlkit {

struct Message {
    std::string role;  // "system", "user" or "assistant"
    std::string content;

    friend bool operator==(const Message&, const Message&) = default;
};

struct CompletionParams {
    double temperature = 0.0;
    int max_tokens = 2048;
};

/// Transport or protocol failure talking to a model or embedding service.
class BackendError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Append-only JSON-lines record of every external call (model completions,
/// embedding requests, solver runs). Safe to share between threads.
class CallLog {
public:
    explicit CallLog(std::ostream& out) : out_(&out) {}
    CallLog() = default;

    /// Writes one already-serialized JSON object as a line. A default
    /// constructed log only counts.
    void record(const std::string& json_line);
    std::size_t count() const;

private:
    mutable std::mutex mu_;
    std::ostream* out_ = nullptr;
    std::size_t count_ = 0;
};

class LLMBackend {
public:
    virtual ~LLMBackend() = default;
    virtual std::string complete(const std::vector<Message>& messages, const CompletionParams& params) = 0;
    virtual std::string name() const = 0;
};

struct HttpBackendConfig {
    /// OpenAI-compatible base URL, e.g. "https://api.openai.com/v1".
    std::string base_url;
    std::string model;
    std::string api_key;
    std::chrono::seconds timeout{120};
    /// Extra attempts after a transport failure or 5xx/429 reply.
    int retries = 2;
};

/// Chat-completions client (`POST {base_url}/chat/completions`).
class HttpBackend : public LLMBackend {
public:
    explicit HttpBackend(HttpBackendConfig cfg, std::shared_ptr<CallLog> log = nullptr);
    std::string complete(const std::vector<Message>& messages, const CompletionParams& params) override;
    std::string name() const override { return "http:" + cfg_.model; }

private:
    HttpBackendConfig cfg_;
    std::shared_ptr<CallLog> log_;
};

/// Replays canned completions. Each rule lists substrings that must all occur
/// somewhere in the conversation; the first matching rule answers with its
/// next response, and its last response repeats once the list is used up.
///
/// Script file (JSON):
///   {"rules": [{"contains": ["Target action: fly"], "responses": ["...", "..."]}],
///    "default": "..."}
/// `contains` may also be a single string. Without a default, an unmatched
/// conversation raises BackendError.
class ScriptedBackend : public LLMBackend {
public:
    struct Rule {
        std::vector<std::string> contains;
        std::vector<std::string> responses;
    };

    ScriptedBackend() = default;
    explicit ScriptedBackend(std::vector<Rule> rules, std::optional<std::string> fallback = std::nullopt,
                             std::shared_ptr<CallLog> log = nullptr);

    static ScriptedBackend from_json(std::string_view text, std::shared_ptr<CallLog> log = nullptr);
    static ScriptedBackend from_file(const std::filesystem::path& path, std::shared_ptr<CallLog> log = nullptr);

    void add_rule(Rule r);
    void set_default(std::string response);

    std::string complete(const std::vector<Message>& messages, const CompletionParams& params) override;
    std::string name() const override { return "mock"; }

    /// Total completions served so far.
    std::size_t calls() const;

private:
    mutable std::mutex mu_;
    std::vector<Rule> rules_;
    std::vector<std::size_t> used_;
    std::optional<std::string> default_;
    std::shared_ptr<CallLog> log_;
    std::size_t calls_ = 0;
};

}  // namespace pddlkit
