#include "pddlkit/llm.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "http.hpp"

namespace pddlkit {

using json = nlohmann::json;

void CallLog::record(const std::string& json_line) {
    std::lock_guard lock(mu_);
    ++count_;
    if (out_) *out_ << json_line << '\n' << std::flush;
}

std::size_t CallLog::count() const {
    std::lock_guard lock(mu_);
    return count_;
}

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig cfg, std::shared_ptr<CallLog> log)
    : cfg_(std::move(cfg)), log_(std::move(log)) {}

std::string HttpBackend::complete(const std::vector<Message>& messages, const CompletionParams& params) {
    json body = {{"model", cfg_.model}, {"temperature", params.temperature}, {"max_tokens", params.max_tokens}};
    body["messages"] = json::array();
    for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(500 << (attempt - 1)));
        const auto start = std::chrono::steady_clock::now();
        json entry = {{"kind", "llm"}, {"backend", "http"}, {"model", cfg_.model}, {"attempt", attempt + 1}};
        detail::HttpResponse res;
        try {
            res = detail::post_json(cfg_.base_url, "/chat/completions", payload, cfg_.api_key, cfg_.timeout);
        } catch (const BackendError& e) {
            last_error = e.what();
            entry.update({{"ok", false}, {"error", last_error}, {"ms", elapsed_ms(start)}});
            if (log_) log_->record(entry.dump());
            continue;
        }
        entry.update({{"status", res.status}, {"ms", elapsed_ms(start)}});
        if (res.status == 429 || res.status >= 500) {
            last_error = "HTTP " + std::to_string(res.status);
            entry["ok"] = false;
            if (log_) log_->record(entry.dump());
            continue;
        }
        auto reply = json::parse(res.body, nullptr, false);
        const bool ok = res.status == 200 && !reply.is_discarded() && reply.contains("choices") &&
                        !reply["choices"].empty();
        entry["ok"] = ok;
        if (log_) log_->record(entry.dump());
        if (res.status != 200) {
            throw BackendError("completion request rejected with HTTP " + std::to_string(res.status) + ": " +
                               res.body.substr(0, 300));
        }
        if (!ok) throw BackendError("malformed completion response");
        try {
            return reply["choices"][0]["message"].value("content", "");
        } catch (const json::exception& e) {
            throw BackendError(std::string("malformed completion response: ") + e.what());
        }
    }
    throw BackendError("completion failed after " + std::to_string(cfg_.retries + 1) + " attempts: " + last_error);
}

ScriptedBackend::ScriptedBackend(std::vector<Rule> rules, std::optional<std::string> fallback,
                                 std::shared_ptr<CallLog> log)
    : rules_(std::move(rules)), used_(rules_.size(), 0), default_(std::move(fallback)), log_(std::move(log)) {}

ScriptedBackend ScriptedBackend::from_json(std::string_view text, std::shared_ptr<CallLog> log) {
    auto doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw BackendError("mock script is not a JSON object");
    std::vector<Rule> rules;
    for (const auto& r : doc.value("rules", json::array())) {
        Rule rule;
        const auto& c = r.at("contains");
        if (c.is_string()) {
            rule.contains.push_back(c.get<std::string>());
        } else {
            rule.contains = c.get<std::vector<std::string>>();
        }
        rule.responses = r.at("responses").get<std::vector<std::string>>();
        if (rule.responses.empty()) throw BackendError("mock script rule without responses");
        rules.push_back(std::move(rule));
    }
    std::optional<std::string> fallback;
    if (doc.contains("default")) fallback = doc["default"].get<std::string>();
    return ScriptedBackend(std::move(rules), std::move(fallback), std::move(log));
}

ScriptedBackend ScriptedBackend::from_file(const std::filesystem::path& path, std::shared_ptr<CallLog> log) {
    std::ifstream in(path);
    if (!in) throw BackendError("cannot read mock script " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return from_json(ss.str(), std::move(log));
    } catch (const json::exception& e) {
        throw BackendError("bad mock script " + path.string() + ": " + e.what());
    }
}

void ScriptedBackend::add_rule(Rule r) {
    std::lock_guard lock(mu_);
    rules_.push_back(std::move(r));
    used_.push_back(0);
}

void ScriptedBackend::set_default(std::string response) {
    std::lock_guard lock(mu_);
    default_ = std::move(response);
}

std::string ScriptedBackend::complete(const std::vector<Message>& messages, const CompletionParams&) {
    std::string convo;
    for (const auto& m : messages) {
        convo += m.content;
        convo += '\n';
    }
    std::lock_guard lock(mu_);
    ++calls_;
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        const auto& r = rules_[i];
        bool match = true;
        for (const auto& needle : r.contains) {
            if (convo.find(needle) == std::string::npos) {
                match = false;
                break;
            }
        }
        if (!match) continue;
        const std::size_t k = std::min(used_[i], r.responses.size() - 1);
        ++used_[i];
        if (log_) log_->record(json{{"kind", "llm"}, {"backend", "mock"}, {"rule", i}, {"ok", true}}.dump());
        return r.responses[k];
    }
    if (default_) {
        if (log_) log_->record(json{{"kind", "llm"}, {"backend", "mock"}, {"rule", "default"}, {"ok", true}}.dump());
        return *default_;
    }
    if (log_) log_->record(json{{"kind", "llm"}, {"backend", "mock"}, {"ok", false}}.dump());
    throw BackendError("mock backend has no rule matching the conversation");
}

std::size_t ScriptedBackend::calls() const {
    std::lock_guard lock(mu_);
    return calls_;
}

}  // namespace pddlkit
