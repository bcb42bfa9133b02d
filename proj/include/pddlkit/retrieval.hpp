#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pddlkit/llm.hpp"

namespace pddlkit {

class RetrievalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Canonical verbs seen so far while abstracting. Lowercase, unique, in
/// insertion order. The rule-based abstraction merges only exact matches.
struct VerbLexicon {
    std::vector<std::string> verbs;

    bool contains(std::string_view v) const;
    /// Adds `v` (lowercased) unless present. Returns the canonical form.
    std::string add(std::string_view v);

    friend bool operator==(const VerbLexicon&, const VerbLexicon&) = default;
};

struct AbstractionResult {
    std::string text;
    VerbLexicon lexicon;
    /// Non-fatal problems, e.g. the model answer was unusable and the
    /// rule-based abstraction was used instead.
    std::vector<std::string> warnings;
};

/// Replaces concrete nouns, states and quantities in an action description
/// with numbered placeholders ([positionN], [objectN], [stateN], [valueN])
/// while keeping the acting subject and the verbs.
///
/// `vocabulary` lists domain words (type and object names) that count as
/// nouns to abstract. With a backend the model does the rewriting and the
/// rule-based version is only the fallback.
AbstractionResult abstract_description(std::string_view desc, const VerbLexicon& lex,
                                       const std::vector<std::string>& vocabulary = {},
                                       LLMBackend* backend = nullptr);

/// The deterministic rule-based abstraction on its own.
AbstractionResult abstract_rule_based(std::string_view desc, const VerbLexicon& lex,
                                      const std::vector<std::string>& vocabulary = {});

using Vector = std::vector<float>;

class Embedder {
public:
    virtual ~Embedder() = default;
    /// Throws RetrievalError on empty input, BackendError on service failure.
    virtual Vector embed(std::string_view text) const = 0;
    virtual std::size_t dimension() const = 0;
    virtual std::string name() const = 0;
};

/// Bag-of-tokens vector: each lowercase token (or placeholder) is hashed
/// with 64-bit FNV-1a into one of `dim` buckets, then the counts are
/// L2-normalized.
class HashingEmbedder : public Embedder {
public:
    explicit HashingEmbedder(std::size_t dim = 768) : dim_(dim) {}
    Vector embed(std::string_view text) const override;
    std::size_t dimension() const override { return dim_; }
    std::string name() const override { return "hash-" + std::to_string(dim_); }

    static std::uint64_t fnv1a(std::string_view s);
    static std::vector<std::string> tokens(std::string_view text);

private:
    std::size_t dim_;
};

struct HttpEmbedderConfig {
    std::string base_url;  // POST {base_url}/embeddings
    std::string model;
    std::string api_key;
    std::chrono::seconds timeout{60};
    std::size_t dimension = 768;
};

/// Remote embedding service. The request body is {"model", "input"}; the
/// response may be {"vector": [...]} or the OpenAI shape
/// {"data": [{"embedding": [...]}]}.
class HttpEmbedder : public Embedder {
public:
    explicit HttpEmbedder(HttpEmbedderConfig cfg, std::shared_ptr<CallLog> log = nullptr);
    Vector embed(std::string_view text) const override;
    std::size_t dimension() const override { return cfg_.dimension; }
    std::string name() const override { return "http:" + cfg_.model; }

private:
    HttpEmbedderConfig cfg_;
    std::shared_ptr<CallLog> log_;
};

double cosine(const Vector& a, const Vector& b);

struct ActionCard {
    std::string domain_id;
    std::string action_name;
    std::string description;
    std::string abstracted;
    std::string pddl_body;
    Vector embedding;

    friend bool operator==(const ActionCard&, const ActionCard&) = default;
};

struct Index {
    std::size_t dimension = 0;
    std::string embedder;
    std::vector<ActionCard> cards;
    /// Domains never returned by queries on this index.
    std::set<std::string> exclusion;

    std::string to_json() const;
    static Index from_json(std::string_view text);
    void save(const std::filesystem::path& path) const;
    static Index load(const std::filesystem::path& path);

    friend bool operator==(const Index&, const Index&) = default;
};

/// One action to put into an index.
struct CardSource {
    std::string domain_id;
    std::string action_name;
    std::string description;
    std::string pddl_body;
    std::vector<std::string> vocabulary;
};

/// Abstracts every source in order (the lexicon is threaded through), then
/// embeds them, up to `jobs` at a time.
Index build_index(const std::vector<CardSource>& sources, const Embedder& embedder, VerbLexicon& lexicon,
                  LLMBackend* abstraction_backend = nullptr, std::vector<std::string>* warnings = nullptr,
                  int jobs = 1);

struct ScoredCard {
    const ActionCard* card = nullptr;
    double similarity = 0.0;
};

/// Top-K cards by cosine similarity, descending, ties broken by
/// (domain_id, action_name). Cards of excluded domains (the index's own
/// exclusion set plus `exclude`) are skipped. Parallel scan.
std::vector<ScoredCard> query_coarse(const Index& idx, const Vector& query, std::size_t k,
                                     const std::set<std::string>& exclude = {});

/// Same contract as query_coarse, single-threaded full sort. Reference for
/// tests and benchmarks.
std::vector<ScoredCard> query_coarse_serial(const Index& idx, const Vector& query, std::size_t k,
                                            const std::set<std::string>& exclude = {});

/// Embeds an abstracted query and runs query_coarse.
std::vector<ScoredCard> query_coarse(const Index& idx, const Embedder& embedder, std::string_view query_abstracted,
                                     std::size_t k, const std::set<std::string>& exclude = {});

struct RerankResult {
    std::size_t chosen = 0;  // index into the candidate list
    bool backend_called = false;
    std::string warning;
};

/// Asks the model which candidate best matches the raw query description.
/// Unusable answers and backend failures fall back to candidate 0.
RerankResult rerank_fine(const std::vector<ScoredCard>& candidates, std::string_view query_desc,
                         LLMBackend& backend);

/// The rerank prompt, exposed so scripted backends can be written against it.
std::vector<Message> rerank_prompt(const std::vector<ScoredCard>& candidates, std::string_view query_desc);

}  // namespace pddlkit
