#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pddlkit/diagnostic.hpp"
#include "pddlkit/rational.hpp"

namespace pddlkit {

inline constexpr std::string_view kRootType = "object";

/// `name - type`. Used for parameters, constants and problem objects.
struct TypedName {
    std::string name;
    std::string type{kRootType};

    friend bool operator==(const TypedName&, const TypedName&) = default;
};

struct TypeDecl {
    std::string name;
    std::string parent{kRootType};
    SourceLoc loc;

    friend bool operator==(const TypeDecl&, const TypeDecl&) = default;
};

/// Declaration of a fluent. Predicates are boolean fluents, functions are
/// numeric fluents; both share the same shape.
struct FluentDecl {
    std::string name;
    std::vector<TypedName> params;
    SourceLoc loc;

    friend bool operator==(const FluentDecl&, const FluentDecl&) = default;

    /// True when the parameter type lists agree (variable names may differ).
    bool same_signature(const FluentDecl& other) const;
};

using PredicateDecl = FluentDecl;
using FunctionDecl = FluentDecl;

/// `(name arg...)`. Arguments are variables (`?x`) or object names. Also
/// used for ground atoms and ground fluent references.
struct Atom {
    std::string name;
    std::vector<std::string> args;
    SourceLoc loc;

    friend bool operator==(const Atom& a, const Atom& b) { return a.name == b.name && a.args == b.args; }
    friend std::strong_ordering operator<=>(const Atom& a, const Atom& b) {
        if (auto c = a.name <=> b.name; c != 0) return c;
        return a.args <=> b.args;
    }

    std::string to_string() const;
};

inline bool is_variable(std::string_view term) { return !term.empty() && term.front() == '?'; }

/// Arithmetic tree. Leaves are constants and fluent references; there is no
/// way to place a predicate atom here, only a reference whose name the
/// checker may later find to be a predicate.
struct NumExpr {
    enum class Kind { Constant, Fluent, Binary };

    Kind kind = Kind::Constant;
    Rational value;
    Atom fluent;
    char op = '+';  // one of + - * /
    std::vector<NumExpr> operands;
    SourceLoc loc;

    static NumExpr constant(Rational v);
    static NumExpr ref(Atom f);
    static NumExpr binary(char op, NumExpr lhs, NumExpr rhs);

    friend bool operator==(const NumExpr&, const NumExpr&) = default;
};

enum class CompareOp { Less, LessEq, Equal, GreaterEq, Greater };
std::string_view to_string(CompareOp op);

struct Condition {
    enum class Kind { Atom, Not, And, Compare };

    Kind kind = Kind::And;
    Atom atom;
    std::vector<Condition> children;  // Not: one child, And: any number
    CompareOp cmp = CompareOp::Equal;
    std::vector<NumExpr> sides;  // Compare: lhs, rhs
    SourceLoc loc;

    static Condition make_atom(Atom a);
    static Condition negate(Condition c);
    static Condition conjunction(std::vector<Condition> cs);
    static Condition compare(CompareOp op, NumExpr lhs, NumExpr rhs);

    friend bool operator==(const Condition&, const Condition&) = default;
};

enum class NumericOp { Increase, Decrease, Assign };
std::string_view to_string(NumericOp op);

struct Effect {
    enum class Kind { Add, Delete, Numeric, And };

    Kind kind = Kind::And;
    Atom atom;  // Add/Delete atom, or Numeric target fluent
    NumericOp op = NumericOp::Increase;
    NumExpr value;
    std::vector<Effect> children;
    SourceLoc loc;

    static Effect add(Atom a);
    static Effect del(Atom a);
    static Effect numeric(NumericOp op, Atom target, NumExpr value);
    static Effect conjunction(std::vector<Effect> es);

    friend bool operator==(const Effect&, const Effect&) = default;
};

struct Action {
    std::string name;
    std::vector<TypedName> params;
    Condition precondition;
    Effect effect;
    SourceLoc loc;

    friend bool operator==(const Action&, const Action&) = default;
};

struct Domain {
    std::string name;
    std::vector<std::string> requirements;  // e.g. ":strips", in source order
    std::vector<TypeDecl> types;
    std::vector<TypedName> constants;
    std::vector<PredicateDecl> predicates;
    std::vector<FunctionDecl> functions;
    std::vector<Action> actions;

    friend bool operator==(const Domain&, const Domain&) = default;

    const Action* find_action(std::string_view name) const;
    const PredicateDecl* find_predicate(std::string_view name) const;
    const FunctionDecl* find_function(std::string_view name) const;
};

struct Problem {
    std::string name;
    std::string domain_name;
    std::vector<TypedName> objects;
    std::set<Atom> init_atoms;
    std::map<Atom, Rational> init_fluents;
    Condition goal;

    friend bool operator==(const Problem&, const Problem&) = default;
};

struct PlanStep {
    std::string action;
    std::vector<std::string> args;

    friend bool operator==(const PlanStep&, const PlanStep&) = default;
    std::string to_string() const;
};

struct Plan {
    std::vector<PlanStep> steps;

    friend bool operator==(const Plan&, const Plan&) = default;
    std::size_t size() const { return steps.size(); }
    bool empty() const { return steps.empty(); }
};

/// Flattens nested `and` nodes into the list of conjuncts.
std::vector<const Condition*> conjuncts(const Condition& c);
std::vector<const Effect*> conjuncts(const Effect& e);

/// Type hierarchy lookup: `sub` is `super` or one of its descendants.
class TypeHierarchy {
public:
    TypeHierarchy() = default;
    explicit TypeHierarchy(const std::vector<TypeDecl>& types);

    bool is_declared(std::string_view type) const;
    bool is_subtype(std::string_view sub, std::string_view super) const;

private:
    std::map<std::string, std::string, std::less<>> parent_;
};

}  // namespace pddlkit
