#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pddlkit/ast.hpp"
#include "pddlkit/sexpr.hpp"

namespace pddlkit {

/// Requirement flags accepted by the reader.
const std::vector<std::string>& supported_requirements();

/// Reads a domain without semantic checking. Structural problems (lexical
/// errors, malformed fluents, misplaced numeric operators, unknown sections,
/// duplicate declarations) are reported, and whatever could be built is
/// returned alongside them.
Parsed<Domain> read_domain(std::string_view text);

/// Full domain parse: read_domain plus every checker rule, using the
/// domain's own types, constants and requirements as the extern. Fails
/// (no value) when any diagnostic is produced.
Parsed<Domain> parse_domain(std::string_view text);

/// Parses and type-checks a problem against `dom`.
Parsed<Problem> parse_problem(std::string_view text, const Domain& dom);

/// Plan files: one `(action arg...)` per line, `;` lines ignored. Text
/// around the parentheses (e.g. a planner's "0.0: " prefix) is tolerated.
Parsed<Plan> parse_plan(std::string_view text);

std::string render_domain(const Domain& dom);
std::string render_problem(const Problem& prob);
std::string render_plan(const Plan& plan);
std::string render_action(const Action& act);
std::string render_condition(const Condition& c);
std::string render_effect(const Effect& e);
std::string render_num_expr(const NumExpr& e);
std::string render_fluent_decl(const FluentDecl& d);

namespace detail {

/// Builds AST fragments from s-expressions. Used by the domain reader and by
/// the action-fragment checker, which shares the same grammar.
class AstBuilder {
public:
    explicit AstBuilder(std::vector<Diagnostic>& sink) : diags_(sink) {}

    std::vector<TypedName> typed_list(const std::vector<SExpr>& items, std::size_t first, bool variables,
                                      Category fmt_category);
    bool fluent_decl(const SExpr& e, Category fmt_category, FluentDecl& out);
    std::vector<FluentDecl> fluent_decls(const SExpr& section, Category fmt_category);
    bool action(const SExpr& e, Action& out);
    bool condition(const SExpr& e, Condition& out);
    bool effect(const SExpr& e, Effect& out);
    bool num_expr(const SExpr& e, NumExpr& out);
    bool atom(const SExpr& e, Category fmt_category, Atom& out);

    void report(Category c, std::string code, const SExpr& at, std::string message, std::string suggestion = {});

private:
    std::vector<Diagnostic>& diags_;
};

}  // namespace detail

}  // namespace pddlkit
