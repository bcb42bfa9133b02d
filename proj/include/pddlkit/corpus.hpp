#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pddlkit/ast.hpp"
#include "pddlkit/checker.hpp"
#include "pddlkit/complexity.hpp"

namespace pddlkit {

class CorpusError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Tier { Simple, Medium, Hard };

inline constexpr std::array<Tier, 3> kAllTiers = {Tier::Simple, Tier::Medium, Tier::Hard};
inline constexpr std::size_t kProblemsPerTier = 3;

std::string_view to_string(Tier t);
std::optional<Tier> tier_from_string(std::string_view s);

/// The seven domain categories used to group benchmark domains.
const std::vector<std::string>& corpus_categories();

struct CorpusProblem {
    Tier tier = Tier::Simple;
    std::size_t index = 0;  // 0-based within the tier
    std::filesystem::path file;
    std::string text;
    Problem problem;
    std::optional<std::filesystem::path> plan_file;
    std::optional<Plan> gt_plan;

    friend bool operator==(const CorpusProblem&, const CorpusProblem&) = default;
    /// "simple-1" style label.
    std::string label() const;
};

struct ActionDescription {
    std::string action;
    std::string text;

    friend bool operator==(const ActionDescription&, const ActionDescription&) = default;
};

/// Contents of a descriptions file:
///
///   [domain]
///   free text ...
///   [action NAME]
///   free text ...
///
/// Lines starting with `#` are comments.
struct Descriptions {
    std::string domain;
    std::vector<ActionDescription> actions;

    static Descriptions parse(std::string_view text);
    const std::string* find(std::string_view action) const;
};

struct ManifestEntry {
    std::string domain_id;
    std::string category;
    std::filesystem::path domain_file;
    std::string domain_text;
    Domain domain;
    std::vector<CorpusProblem> problems;  // simple, medium, hard; 3 each
    std::string domain_description;
    std::vector<ActionDescription> action_descriptions;  // generation order
    Extern ext;

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;

    std::vector<const CorpusProblem*> tier(Tier t) const;
};

/// Loads and cross-validates a corpus manifest (JSON; see README). Every
/// domain and problem must parse, each tier must list exactly three
/// problems, every domain action needs a description, and ground-truth plans
/// must be valid for their problem. Violations throw CorpusError.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

/// Stable partition into (simple, complex) by complexity class.
std::pair<std::vector<const ManifestEntry*>, std::vector<const ManifestEntry*>> split_by_complexity(
    const std::vector<ManifestEntry>& entries, const Weights& w, const Rational& threshold = kDefaultThreshold);

/// Type and object words of a domain, for the rule-based abstraction.
std::vector<std::string> domain_vocabulary(const Domain& dom);

}  // namespace pddlkit
