#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pddlkit/complexity.hpp"
#include "pddlkit/generation.hpp"
#include "pddlkit/llm.hpp"
#include "pddlkit/planner.hpp"
#include "pddlkit/retrieval.hpp"

namespace pddlkit {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Settings shared by all CLI subcommands. The file format is one
/// `key = value` per line, `#` starts a comment; see config_template().
/// Secrets are never stored in the file: `llm.api_key_env` and
/// `embedding.api_key_env` name the environment variables to read.
struct ToolkitConfig {
    std::string backend = "mock";  // mock | http
    std::string mock_script;       // empty: answer from the corpus ground truth
    HttpBackendConfig llm;
    std::string llm_api_key_env = "PDDLKIT_API_KEY";
    CompletionParams params;

    std::string embedding_provider = "hash";  // hash | http
    HttpEmbedderConfig embedding;
    std::string embedding_api_key_env = "PDDLKIT_EMBEDDING_API_KEY";
    std::string abstraction = "rules";  // rules | llm

    std::string solver_engine = "builtin";  // builtin | external
    ExternalSolverConfig solver;
    SearchLimits limits;

    Weights weights = Weights::unit();
    Rational threshold = kDefaultThreshold;

    std::size_t max_iter = 3;
    Preset preset = Preset::Ours;
    std::size_t retrieval_k = 5;
    int jobs = 1;
    std::string call_log;

    ToolkitConfig();

    /// Applies one setting. Unknown keys and invalid values throw.
    void set(std::string_view key, std::string_view value);

    /// Applies a whole file on top of the current values.
    void apply_text(std::string_view text, std::string_view origin = "config");
    void apply_file(const std::filesystem::path& path);

    /// Fills API keys from the environment. Missing keys are only an error
    /// when the corresponding remote service is selected.
    void resolve_credentials();

    static const std::vector<std::string>& keys();
};

/// Commented configuration file listing every key with its default.
std::string config_template();

}  // namespace pddlkit
