#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pddlkit/ast.hpp"

namespace pddlkit {

struct SearchLimits {
    std::size_t max_expanded_states = 200'000;
    std::chrono::milliseconds wall_clock_budget{60'000};
    std::size_t max_plan_length = 64;
    /// Upper bound on ground actions produced before search starts.
    std::size_t max_ground_actions = 1'000'000;
};

struct SearchStats {
    std::size_t expanded = 0;
    std::size_t generated = 0;
    std::chrono::duration<double> duration{0};
    /// Why a search stopped early, or the stderr of an external solver.
    std::string message;
};

struct SolveResult {
    enum class Outcome { Solved, ProvedUnsolvable, LimitExceeded };

    Outcome outcome = Outcome::LimitExceeded;
    Plan plan;
    SearchStats stats;

    bool solved() const { return outcome == Outcome::Solved; }
};

std::string_view to_string(SolveResult::Outcome o);

/// Breadth-first forward search over ground states. Successors are generated
/// with actions in declaration order and objects in declaration order
/// (domain constants first), so results are deterministic and shortest by
/// step count.
SolveResult solve(const Domain& dom, const Problem& prob, const SearchLimits& limits = {});

/// Failure to run an external solver at all (as opposed to it not finding a
/// plan, which is a SolveResult outcome).
class SolverError : public std::runtime_error {
public:
    enum class Kind { MissingExecutable, Timeout, SpawnFailed };

    SolverError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct ExternalSolverConfig {
    /// Shell command with `{domain}` and `{problem}` placeholders, e.g.
    /// "java -jar enhsp.jar -o {domain} -f {problem}".
    std::string command_template;
    std::chrono::seconds timeout{60};
};

SolveResult external_solve(const ExternalSolverConfig& cfg, const std::filesystem::path& domain_file,
                           const std::filesystem::path& problem_file);

/// Pulls plan steps out of free-form solver output: every line containing a
/// parenthesized `(action arg ...)` becomes a step; `;` comments and other
/// lines are skipped. Returns nullopt when a parenthesized line is malformed.
std::optional<Plan> extract_plan(std::string_view solver_output);

/// Something that can solve a (domain, problem) pair. Evaluation code is
/// written against this so the built-in search and an external solver are
/// interchangeable.
class PlanningEngine {
public:
    virtual ~PlanningEngine() = default;
    virtual SolveResult solve(const Domain& dom, const Problem& prob) const = 0;
    virtual std::string name() const = 0;
    /// False when calls must not run concurrently.
    virtual bool thread_safe() const { return true; }
};

class BuiltinEngine : public PlanningEngine {
public:
    explicit BuiltinEngine(SearchLimits limits = {}) : limits_(limits) {}
    SolveResult solve(const Domain& dom, const Problem& prob) const override;
    std::string name() const override { return "builtin"; }

private:
    SearchLimits limits_;
};

/// Renders the task to temporary files and runs an external solver on them.
class ExternalEngine : public PlanningEngine {
public:
    explicit ExternalEngine(ExternalSolverConfig cfg) : cfg_(std::move(cfg)) {}
    SolveResult solve(const Domain& dom, const Problem& prob) const override;
    std::string name() const override { return "external"; }

private:
    ExternalSolverConfig cfg_;
};

}  // namespace pddlkit
