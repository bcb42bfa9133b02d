#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pddlkit/ast.hpp"
#include "pddlkit/checker.hpp"
#include "pddlkit/corpus.hpp"
#include "pddlkit/llm.hpp"
#include "pddlkit/retrieval.hpp"

namespace pddlkit {

class GenerationError : public std::runtime_error {
public:
    GenerationError(const std::string& what, std::vector<Diagnostic> diags = {})
        : std::runtime_error(what), diagnostics(std::move(diags)) {}
    std::vector<Diagnostic> diagnostics;
};

struct GenerationInput {
    std::string domain_id;    // used to exclude the domain from retrieval
    std::string domain_name;  // name of the produced (define (domain ...))
    std::string domain_description;
    std::vector<ActionDescription> actions;  // target names and descriptions, in generation order
    Extern ext;
};

enum class Preset { Format, FCoT, FS, Ours };

std::string_view to_string(Preset p);
std::optional<Preset> preset_from_string(std::string_view s);
bool uses_cot(Preset p);
bool uses_retrieval(Preset p);

/// One in-context example: an action description and its PDDL fragment
/// (fluent declarations followed by the action).
struct PromptExample {
    std::string label;  // "format" or "semantic"
    std::string action_name;
    std::string description;
    std::string fragment;
    std::string source;  // "builtin" or "<domain_id>/<action>"
};

/// The two bundled format examples (non-UAV actions).
const std::vector<PromptExample>& builtin_format_examples();

inline constexpr std::string_view kCotObjectsQuestion = "What are the objects?";
inline constexpr std::string_view kCotPreconditionsQuestion =
    "For each object, what are the preconditions? State them using predicates or functions.";
inline constexpr std::string_view kCotEffectsQuestion =
    "For each object, what are the effects? State them using predicates or functions.";
inline constexpr std::string_view kCotFormatInstruction = "Write the action in the following format";
inline constexpr std::string_view kNoFluentsYet = "No fluents defined yet.";

/// Chain-of-thought answers for an example, derived from its action.
std::string cot_answers(const PromptExample& ex);

/// Declarations of every fluent `act` mentions, then the action itself.
std::string action_fragment(const Domain& dom, const Action& act);

/// Prompt for one target action. Sections, in order: domain description,
/// extern, current fluents, examples, target action.
std::vector<Message> build_prompt(const GenerationInput& inp, std::size_t action_index, const FluentRegistry& registry,
                                  const std::vector<PromptExample>& examples, Preset preset);

/// The PDDL part of a completion: the first fenced block mentioning
/// `(:action`, else the top-level (:predicates/:functions/:action) forms.
std::string extract_fragment(std::string_view completion);

struct IterationRecord {
    std::vector<Message> prompt;  // conversation sent for this attempt
    std::string completion;
    std::string fragment;
    std::vector<Diagnostic> diagnostics;
};

struct RetrievalRecord {
    std::vector<std::pair<std::string, double>> candidates;  // "<domain>/<action>", similarity
    std::string query_abstracted;
    std::string chosen;
    std::vector<std::string> warnings;
};

struct ActionTrace {
    enum class Status { Accepted, NeedsHuman };

    std::string action_name;
    std::vector<std::string> examples;  // sources of the in-context examples
    std::optional<RetrievalRecord> retrieval;
    std::vector<IterationRecord> iterations;
    Status status = Status::NeedsHuman;
    std::vector<std::string> new_fluents;
    std::string registry_after;
    std::vector<std::string> warnings;
};

struct GenerationTrace {
    std::string domain_id;
    std::string preset;
    std::string backend;
    std::size_t max_iter = 0;
    std::vector<ActionTrace> actions;

    bool complete() const;
    std::size_t total_iterations() const;
    /// Deterministic JSON (no timestamps).
    std::string to_json() const;
    static GenerationTrace from_json(std::string_view text);
};

std::string_view to_string(ActionTrace::Status s);

struct GenerationOptions {
    std::size_t max_iter = 3;
    CompletionParams params;
    std::size_t coarse_k = 5;
    /// Needed by FS and Ours.
    const Index* index = nullptr;
    const Embedder* embedder = nullptr;
    /// Abstraction of target descriptions for retrieval; null = rule-based.
    LLMBackend* abstraction_backend = nullptr;
};

struct ActionOutcome {
    std::optional<Action> action;  // set when accepted
    ActionTrace trace;
};

/// Generates one action with checker feedback. Accepted fragments add their
/// new fluents to `registry`. BackendError propagates.
ActionOutcome generate_action(const GenerationInput& inp, std::size_t action_index, FluentRegistry& registry,
                              Preset preset, const std::vector<PromptExample>& examples, LLMBackend& backend,
                              const GenerationOptions& opts);

/// Picks in-context examples for a target action according to the preset.
std::vector<PromptExample> select_examples(const GenerationInput& inp, std::size_t action_index, Preset preset,
                                           LLMBackend& backend, const GenerationOptions& opts,
                                           std::optional<RetrievalRecord>& record);

struct DomainGeneration {
    Domain domain;  // partial when some action needs a human
    GenerationTrace trace;
    FluentRegistry registry;

    bool complete() const { return trace.complete(); }
};

DomainGeneration generate_domain(const GenerationInput& inp, Preset preset, LLMBackend& backend,
                                 const GenerationOptions& opts = {});

std::vector<Message> problem_prompt(const Domain& dom, std::string_view problem_description);

/// Asks for a problem file, parses it against `dom`, and retries once with
/// checker feedback. Throws GenerationError when both attempts fail.
Problem generate_problem(const Domain& dom, std::string_view problem_description, LLMBackend& backend,
                         const CompletionParams& params = {});

/// Generation input for a corpus domain: its description, action
/// descriptions in manifest order and its extern.
GenerationInput generation_input(const ManifestEntry& e);

/// One index card source per described action of every entry.
std::vector<CardSource> corpus_card_sources(const std::vector<ManifestEntry>& entries);

/// Mock backend that answers every generation, rerank and problem request
/// with the corpus ground truth. Used for hermetic end-to-end runs.
ScriptedBackend reference_backend(const std::vector<ManifestEntry>& entries, std::shared_ptr<CallLog> log = nullptr);

}  // namespace pddlkit
