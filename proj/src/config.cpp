#include "pddlkit/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <sstream>

#include "pddlkit/io.hpp"

namespace pddlkit {

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

long long to_int(std::string_view key, std::string_view v, long long min) {
    long long out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(std::string(key) + ": not an integer: " + std::string(v));
    if (out < min) throw ConfigError(std::string(key) + " must be at least " + std::to_string(min));
    return out;
}

double to_double(std::string_view key, std::string_view v, double min) {
    auto r = Rational::parse(v);
    if (!r) throw ConfigError(std::string(key) + ": not a number: " + std::string(v));
    const double d = r->to_double();
    if (d < min) throw ConfigError(std::string(key) + " must be at least " + std::to_string(min));
    return d;
}

template <class T>
void choose(std::string_view key, std::string_view v, std::initializer_list<const char*> allowed, T& out) {
    for (const char* a : allowed) {
        if (v == a) {
            out = std::string(v);
            return;
        }
    }
    std::string list;
    for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
    throw ConfigError(std::string(key) + ": expected one of " + list + ", got " + std::string(v));
}

}  // namespace

ToolkitConfig::ToolkitConfig() {
    llm.model = "gpt-4.1-mini";
    llm.base_url = "https://api.openai.com/v1";
    embedding.model = "all-mpnet-base-v2";
}

const std::vector<std::string>& ToolkitConfig::keys() {
    static const std::vector<std::string> k = [] {
        std::vector<std::string> v = {
            "backend",          "mock.script",          "llm.base_url",        "llm.model",
            "llm.api_key_env",  "llm.timeout",          "llm.retries",         "llm.temperature",
            "llm.max_tokens",   "embedding.provider",   "embedding.base_url",  "embedding.model",
            "embedding.api_key_env", "embedding.timeout", "embedding.dimension", "abstraction",
            "solver.engine",    "solver.command",       "solver.timeout",      "search.max_expanded",
            "search.max_plan_length", "search.max_ground_actions", "search.wall_clock", "complexity.threshold",
            "generation.max_iter", "generation.preset", "retrieval.k",       "jobs",
            "call_log",
        };
        for (auto n : component_names()) v.push_back("weights." + std::string(n));
        return v;
    }();
    return k;
}

void ToolkitConfig::set(std::string_view key, std::string_view raw) {
    const std::string v = trim(raw);
    if (key == "backend") {
        choose(key, v, {"mock", "http"}, backend);
    } else if (key == "mock.script") {
        mock_script = v;
    } else if (key == "llm.base_url") {
        llm.base_url = v;
    } else if (key == "llm.model") {
        llm.model = v;
    } else if (key == "llm.api_key_env") {
        llm_api_key_env = v;
    } else if (key == "llm.timeout") {
        llm.timeout = std::chrono::seconds(to_int(key, v, 1));
    } else if (key == "llm.retries") {
        llm.retries = static_cast<int>(to_int(key, v, 0));
    } else if (key == "llm.temperature") {
        params.temperature = to_double(key, v, 0.0);
    } else if (key == "llm.max_tokens") {
        params.max_tokens = static_cast<int>(to_int(key, v, 1));
    } else if (key == "embedding.provider") {
        choose(key, v, {"hash", "http"}, embedding_provider);
    } else if (key == "embedding.base_url") {
        embedding.base_url = v;
    } else if (key == "embedding.model") {
        embedding.model = v;
    } else if (key == "embedding.api_key_env") {
        embedding_api_key_env = v;
    } else if (key == "embedding.timeout") {
        embedding.timeout = std::chrono::seconds(to_int(key, v, 1));
    } else if (key == "embedding.dimension") {
        embedding.dimension = static_cast<std::size_t>(to_int(key, v, 1));
    } else if (key == "abstraction") {
        choose(key, v, {"rules", "llm"}, abstraction);
    } else if (key == "solver.engine") {
        choose(key, v, {"builtin", "external"}, solver_engine);
    } else if (key == "solver.command") {
        solver.command_template = v;
    } else if (key == "solver.timeout") {
        solver.timeout = std::chrono::seconds(to_int(key, v, 1));
    } else if (key == "search.max_expanded") {
        limits.max_expanded_states = static_cast<std::size_t>(to_int(key, v, 1));
    } else if (key == "search.max_plan_length") {
        limits.max_plan_length = static_cast<std::size_t>(to_int(key, v, 1));
    } else if (key == "search.max_ground_actions") {
        limits.max_ground_actions = static_cast<std::size_t>(to_int(key, v, 1));
    } else if (key == "search.wall_clock") {
        limits.wall_clock_budget = std::chrono::milliseconds(static_cast<long long>(to_double(key, v, 0.001) * 1000));
    } else if (key == "complexity.threshold") {
        auto r = Rational::parse(v);
        if (!r) throw ConfigError("complexity.threshold: not a number: " + v);
        threshold = *r;
    } else if (key == "generation.max_iter") {
        max_iter = static_cast<std::size_t>(to_int(key, v, 1));
    } else if (key == "generation.preset") {
        auto p = preset_from_string(v);
        if (!p) throw ConfigError("generation.preset: expected format, fcot, fs or ours, got " + v);
        preset = *p;
    } else if (key == "retrieval.k") {
        retrieval_k = static_cast<std::size_t>(to_int(key, v, 1));
    } else if (key == "jobs") {
        jobs = static_cast<int>(to_int(key, v, 1));
    } else if (key == "call_log") {
        call_log = v;
    } else if (key.rfind("weights.", 0) == 0) {
        const auto name = key.substr(8);
        const auto& names = component_names();
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw ConfigError("unknown complexity component in " + std::string(key));
        auto r = Rational::parse(v);
        if (!r || *r < Rational(0)) throw ConfigError(std::string(key) + " must be a nonnegative number");
        weights.values[static_cast<std::size_t>(it - names.begin())] = *r;
        if (std::all_of(weights.values.begin(), weights.values.end(), [](const Rational& x) { return x.is_zero(); })) {
            throw ConfigError("at least one complexity weight must be positive");
        }
    } else {
        throw ConfigError("unknown configuration key `" + std::string(key) + "`");
    }
}

void ToolkitConfig::apply_text(std::string_view text, std::string_view origin) {
    std::istringstream in{std::string(text)};
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto hash = line.find('#');
        const std::string body = trim(std::string_view(line).substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(std::string(origin) + ":" + std::to_string(n) + ": expected `key = value`");
        }
        try {
            set(trim(std::string_view(body).substr(0, eq)), std::string_view(body).substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(std::string(origin) + ":" + std::to_string(n) + ": " + e.what());
        }
    }
}

void ToolkitConfig::apply_file(const std::filesystem::path& path) {
    try {
        apply_text(read_text_file(path), path.string());
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    }
}

void ToolkitConfig::resolve_credentials() {
    auto env = [](const std::string& name) -> std::string {
        const char* v = name.empty() ? nullptr : std::getenv(name.c_str());
        return v ? v : "";
    };
    llm.api_key = env(llm_api_key_env);
    embedding.api_key = env(embedding_api_key_env);
    if (backend == "http" && llm.api_key.empty()) {
        throw ConfigError("backend is http but environment variable " + llm_api_key_env + " is not set");
    }
    if (embedding_provider == "http" && embedding.base_url.empty()) {
        throw ConfigError("embedding.provider is http but embedding.base_url is empty");
    }
    if (solver_engine == "external" && solver.command_template.empty()) {
        throw ConfigError("solver.engine is external but solver.command is empty");
    }
}

std::string config_template() {
    std::string out = R"(# pddlkit configuration. One `key = value` per line; unknown keys are errors.
# Command-line flags override these values.

# Model backend: mock (scripted, no network) or http (OpenAI-compatible chat API).
backend = mock
# JSON script for the mock backend; empty means "answer from the corpus ground truth".
mock.script =
llm.base_url = https://api.openai.com/v1
llm.model = gpt-4.1-mini
# Name of the environment variable holding the API key (the key itself never goes here).
llm.api_key_env = PDDLKIT_API_KEY
llm.timeout = 120
llm.retries = 2
llm.temperature = 0
llm.max_tokens = 2048

# Embeddings: hash (local, 768-dim bag of tokens) or http ({model, input} -> {vector}).
embedding.provider = hash
embedding.base_url =
embedding.model = all-mpnet-base-v2
embedding.api_key_env = PDDLKIT_EMBEDDING_API_KEY
embedding.timeout = 60
embedding.dimension = 768
# Description abstraction for retrieval: rules or llm.
abstraction = rules

# Planner: builtin breadth-first search or an external command with
# {domain} and {problem} placeholders.
solver.engine = builtin
solver.command =
solver.timeout = 60
search.max_expanded = 200000
search.max_plan_length = 64
search.max_ground_actions = 1000000
# seconds
search.wall_clock = 60

# Domain complexity: score = sum of weight * component; simple iff score <= threshold.
complexity.threshold = 5.23
)";
    for (auto n : component_names()) out += "weights." + std::string(n) + " = 1\n";
    out += R"(
generation.max_iter = 3
# format | fcot | fs | ours
generation.preset = ours
retrieval.k = 5
jobs = 1
# JSON-lines log of every model, embedding and solver call.
call_log =
)";
    return out;
}

}  // namespace pddlkit
