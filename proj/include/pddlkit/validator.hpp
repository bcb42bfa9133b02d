#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pddlkit/ast.hpp"

namespace pddlkit {

/// Raised when a numeric expression cannot be evaluated (division by zero,
/// read of an unassigned fluent) or an effect cannot be applied.
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct State {
    std::set<Atom> atoms;
    std::map<Atom, Rational> fluents;

    friend bool operator==(const State& a, const State& b) { return a.atoms == b.atoms && a.fluents == b.fluents; }

    bool holds(const Atom& a) const { return atoms.count(a) > 0; }
    std::optional<Rational> value(const Atom& f) const;

    /// Compact one-line description, e.g. "3 atoms, 1 fluents".
    std::string summary() const;
    std::string to_string() const;
};

struct StateHash {
    std::size_t operator()(const State& s) const;
};

using Binding = std::map<std::string, std::string>;

/// Substitutes bound variables in an atom; unbound terms are kept as is.
Atom ground(const Atom& a, const Binding& b);

State initial_state(const Problem& prob);

Rational evaluate_numeric(const NumExpr& e, const State& s, const Binding& binding);

/// Truth of a condition in a state under closed-world semantics.
bool holds(const Condition& c, const State& s, const Binding& binding);

/// Binding of an action's parameters to `args`. Throws std::invalid_argument
/// on arity mismatch.
Binding bind(const Action& act, const std::vector<std::string>& args);

bool applicable(const State& s, const Action& act, const std::vector<std::string>& args);

/// Successor state. Deletes are applied before adds; numeric effects read the
/// pre-action state. The input state is left untouched.
State apply(const State& s, const Action& act, const std::vector<std::string>& args);

struct TraceEntry {
    std::size_t step = 0;
    bool applicable = false;
    std::string state_summary;
};

struct ValidationReport {
    enum class Outcome { Valid, Failed };

    Outcome outcome = Outcome::Valid;
    std::size_t failed_step = 0;  // == plan size when only the goal failed
    std::string reason;
    std::vector<TraceEntry> trace;
    bool goal_satisfied = false;

    bool valid() const { return outcome == Outcome::Valid; }
};

struct ValidateOptions {
    /// Skip the final goal test; Valid then means "every step applied".
    bool steps_only = false;
};

ValidationReport validate_plan(const Domain& dom, const Problem& prob, const Plan& plan,
                               const ValidateOptions& opts = {});

}  // namespace pddlkit
