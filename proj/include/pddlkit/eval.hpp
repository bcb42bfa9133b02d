#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pddlkit/ast.hpp"
#include "pddlkit/complexity.hpp"
#include "pddlkit/corpus.hpp"
#include "pddlkit/generation.hpp"
#include "pddlkit/planner.hpp"

namespace pddlkit {

class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A rate always travels with its counts.
struct Rate {
    std::size_t num = 0;
    std::size_t den = 0;

    double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }
    Rate& operator+=(const Rate& o) {
        num += o.num;
        den += o.den;
        return *this;
    }
    friend bool operator==(const Rate&, const Rate&) = default;
};

/// Fraction of problems the engine solves in the generated domain.
Rate executability(const Domain& gen_dom, const std::vector<Problem>& gen_problems, const PlanningEngine& engine,
                   int jobs = 1);

/// Plans found in the generated domain, replayed on the ground truth.
/// Unsolved problems count as infeasible.
Rate feasibility(const Domain& gen_dom, const std::vector<Problem>& gen_problems, const Domain& gt_dom,
                 const std::vector<Problem>& gt_problems, const PlanningEngine& engine, int jobs = 1);

/// Ground-truth plans replayed in the generated domain. Plans that do not
/// solve their own ground-truth problem are left out of the denominator
/// and reported in `warnings`.
Rate interpretability(const Domain& gt_dom, const std::vector<Problem>& gt_problems, const std::vector<Plan>& gt_plans,
                      const Domain& gen_dom, const std::vector<Problem>& gen_problems,
                      std::vector<std::string>* warnings = nullptr);

struct ProblemOutcome {
    Tier tier = Tier::Simple;
    std::size_t index = 0;
    bool generated = false;  // a generated problem was available
    std::string solve_outcome;  // solved / unsolvable / limit-exceeded / error / not-generated
    std::size_t plan_length = 0;
    bool solved = false;
    bool feasible = false;
    std::optional<bool> interpretable;  // unset when no verified GT plan exists
    std::string note;
};

struct Metrics {
    Rate executability;
    Rate feasibility;
    Rate feasibility_among_solved;
    Rate interpretability;
    std::size_t generation_failures = 0;

    Metrics& operator+=(const Metrics& o);
};

struct DomainEvaluation {
    std::string domain_id;
    std::string category;
    ComplexityClass cls = ComplexityClass::Simple;
    Rational score;
    bool domain_complete = true;  // every action was accepted
    std::array<Metrics, 3> tiers;
    std::vector<ProblemOutcome> problems;
    std::vector<std::string> warnings;

    Metrics total() const;
};

/// Syntax errors seen during generation, split by complexity class.
struct ErrorTable {
    struct Row {
        std::size_t simple = 0;
        std::size_t complex = 0;
        std::size_t total() const { return simple + complex; }
    };
    std::map<Category, Row> counts;  // every category present, zero rows included
    Row iterations;   // LLM attempts
    Row corrections;  // attempts after the first, per action
    Row needs_human;

    Row total_errors() const;
};

struct ClassifiedTrace {
    const GenerationTrace* trace;
    ComplexityClass cls;
};

ErrorTable tally_errors(const std::vector<ClassifiedTrace>& traces);

/// What the generator produced for one corpus domain. Problems are aligned
/// with the manifest order; nullopt marks a problem that failed to generate.
struct GeneratedDomain {
    Domain domain;
    bool complete = true;
    std::vector<std::optional<Problem>> problems;
    std::optional<GenerationTrace> trace;
};

struct EvalOptions {
    Weights weights = Weights::unit();
    Rational threshold = kDefaultThreshold;
    int jobs = 1;
};

DomainEvaluation evaluate_domain(const ManifestEntry& gt, const GeneratedDomain& gen, const PlanningEngine& engine,
                                 const EvalOptions& opts = {});

struct EvaluationReport {
    std::vector<DomainEvaluation> domains;
    /// [class][tier]; class 0 = simple, 1 = complex.
    std::array<std::array<Metrics, 3>, 2> by_class{};
    std::optional<ErrorTable> errors;
    std::string engine;

    Metrics class_total(ComplexityClass c) const;
    Metrics overall() const;

    std::string to_json() const;
    std::string to_table() const;
};

/// Evaluates every manifest entry that has a generated counterpart in
/// `generated` (keyed by domain id). Missing entries raise EvaluationError.
EvaluationReport evaluate_corpus(const std::vector<ManifestEntry>& entries,
                                 const std::map<std::string, GeneratedDomain>& generated, const PlanningEngine& engine,
                                 const EvalOptions& opts = {});

/// On-disk layout of generator output, one directory per domain id:
///
///   <dir>/<domain_id>/domain.pddl
///   <dir>/<domain_id>/problems/<tier>-<n>.pddl   (absent when generation failed)
///   <dir>/<domain_id>/trace.json                 (optional)
void save_generated(const std::filesystem::path& dir, const std::string& domain_id, const GeneratedDomain& gen,
                    const std::vector<ManifestEntry>& entries);

/// Reads the layout above for every manifest entry. A domain file that is
/// missing or does not parse becomes an empty domain (nothing solves) and a
/// warning; so does a problem that does not parse against it.
std::map<std::string, GeneratedDomain> load_generated(const std::filesystem::path& dir,
                                                      const std::vector<ManifestEntry>& entries,
                                                      std::vector<std::string>* warnings = nullptr);

}  // namespace pddlkit
