#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pddlkit/ast.hpp"
#include "pddlkit/diagnostic.hpp"

namespace pddlkit {

/// What the generator is told about a domain before any action exists: the
/// object types, requirement flags and (for domains that need them) the
/// typed constants.
struct Extern {
    std::vector<TypeDecl> types;
    std::vector<std::string> requirements;
    std::vector<TypedName> constants;

    friend bool operator==(const Extern&, const Extern&) = default;

    static Extern from_domain(const Domain& dom);

    /// Reads `(:requirements ...)`, `(:types ...)` and `(:constants ...)`
    /// forms, in any order.
    static Parsed<Extern> parse(std::string_view text);
    std::string render() const;

    bool has_type(std::string_view name) const;
    std::vector<std::string> type_names() const;  // includes `object`
};

/// Fluents known during an action-by-action generation session. Entries are
/// only ever added.
class FluentRegistry {
public:
    const std::vector<PredicateDecl>& predicates() const { return predicates_; }
    const std::vector<FunctionDecl>& functions() const { return functions_; }

    /// Action that introduced the fluent; empty for seeded entries.
    std::string provenance(std::string_view name) const;

    const PredicateDecl* find_predicate(std::string_view name) const;
    const FunctionDecl* find_function(std::string_view name) const;

    /// Adds a declaration. Identical re-declarations are ignored; a
    /// conflicting one throws std::invalid_argument.
    void add_predicate(PredicateDecl d, std::string origin = {});
    void add_function(FunctionDecl d, std::string origin = {});

    std::size_t size() const { return predicates_.size() + functions_.size(); }
    bool empty() const { return size() == 0; }

    /// One declaration per line, predicates first.
    std::string listing() const;

    friend bool operator==(const FluentRegistry&, const FluentRegistry&) = default;

private:
    std::vector<PredicateDecl> predicates_;
    std::vector<FunctionDecl> functions_;
    std::map<std::string, std::string, std::less<>> provenance_;
};

/// Checks a domain against an extern. Empty result iff the domain is
/// accepted. At most one diagnostic is produced per AST node.
std::vector<Diagnostic> check_domain(const Domain& dom, const Extern& ext);

/// Type-checks a problem's objects, initial state and goal against a domain.
std::vector<Diagnostic> check_problem(const Problem& prob, const Domain& dom);

struct FragmentResult {
    std::optional<Action> action;
    std::vector<PredicateDecl> new_predicates;
    std::vector<FunctionDecl> new_functions;
    std::vector<Diagnostic> diagnostics;

    bool accepted() const { return action.has_value() && diagnostics.empty(); }
};

/// Validates one generated action. A fragment is a sequence of top-level
/// forms: optional `(:predicates ...)` and `(:functions ...)` blocks
/// declaring new fluents, then exactly one `(:action ...)`.
FragmentResult check_action_fragment(std::string_view fragment, const FluentRegistry& registry, const Extern& ext);

/// Feedback text for an LLM, one paragraph per diagnostic in input order.
std::string render_feedback(std::span<const Diagnostic> diags);

/// Reserved words a fluent may not be named after.
const std::vector<std::string>& pddl_keywords();

}  // namespace pddlkit
