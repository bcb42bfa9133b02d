#include "pddlkit/parser.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "pddlkit/checker.hpp"

namespace pddlkit {

const std::vector<std::string>& supported_requirements() {
    static const std::vector<std::string> flags = {
        ":strips", ":typing", ":negative-preconditions", ":fluents", ":numeric-fluents", ":equality",
    };
    return flags;
}

namespace {

bool is_number_atom(const SExpr& e) { return e.is_atom() && Rational::parse(e.atom).has_value(); }

bool is_compare_head(std::string_view h) { return h == "<" || h == "<=" || h == ">" || h == ">=" || h == "="; }
bool is_arith_head(std::string_view h) { return h == "+" || h == "-" || h == "*" || h == "/"; }
bool is_numeric_effect_head(std::string_view h) {
    return h == "increase" || h == "decrease" || h == "assign" || h == "scale-up" || h == "scale-down";
}
bool is_unsupported_head(std::string_view h) {
    return h == "or" || h == "imply" || h == "exists" || h == "forall" || h == "when" || h == "either";
}

CompareOp compare_op(std::string_view h) {
    if (h == "<") return CompareOp::Less;
    if (h == "<=") return CompareOp::LessEq;
    if (h == ">=") return CompareOp::GreaterEq;
    if (h == ">") return CompareOp::Greater;
    return CompareOp::Equal;
}

std::string format_suggestion(Category c) {
    if (c == Category::FunctionFormat) {
        return "Note that a function is declared as (name ?arg - type ...) and referenced as (name ?arg ...) "
               "inside a numeric expression.";
    }
    if (c == Category::PredicateFormat) {
        return "Note that a predicate is declared as (name ?arg - type ...) and used as (name ?arg ...) with "
               "variables or objects as arguments.";
    }
    if (c == Category::NumericUsage) {
        return "Note that numeric operators only take functions or numbers as operands.";
    }
    return "Please revise the PDDL text so that it follows the expected structure.";
}

}  // namespace

namespace detail {

void AstBuilder::report(Category c, std::string code, const SExpr& at, std::string message, std::string suggestion) {
    Diagnostic d;
    d.category = c;
    d.code = std::move(code);
    d.location = {at.loc.line, at.loc.column, at.to_string()};
    d.message = std::move(message);
    d.suggestion = suggestion.empty() ? format_suggestion(c) : std::move(suggestion);
    diags_.push_back(std::move(d));
}

std::vector<TypedName> AstBuilder::typed_list(const std::vector<SExpr>& items, std::size_t first, bool variables,
                                              Category fmt) {
    std::vector<TypedName> out;
    std::size_t pending_from = 0;  // index in `out` of the first untyped name
    for (std::size_t i = first; i < items.size(); ++i) {
        const SExpr& it = items[i];
        if (it.is_list) {
            report(fmt, "malformed-typed-list", it, "Expected a name in a typed list but found `" + it.to_string() + "`.");
            return out;
        }
        if (it.atom == "-") {
            if (i + 1 >= items.size() || items[i + 1].is_list || items[i + 1].atom == "-" ||
                is_variable(items[i + 1].atom) || pending_from == out.size()) {
                report(fmt, "malformed-typed-list", it, "Dangling `-` without a type name in a typed list.");
                return out;
            }
            const std::string& type = items[i + 1].atom;
            for (std::size_t k = pending_from; k < out.size(); ++k) out[k].type = type;
            pending_from = out.size();
            ++i;
            continue;
        }
        if (variables != is_variable(it.atom) || is_number_atom(it) || it.atom.front() == ':') {
            report(fmt, "malformed-typed-list", it,
                   variables ? "Parameter `" + it.atom + "` must be a variable starting with `?`."
                             : "`" + it.atom + "` is not a valid name here.");
            return out;
        }
        out.push_back(TypedName{it.atom, std::string(kRootType)});
    }
    return out;
}

bool AstBuilder::fluent_decl(const SExpr& e, Category fmt, FluentDecl& out) {
    if (!e.is_list || e.items.empty() || e.items.front().is_list || is_variable(e.items.front().atom) ||
        is_number_atom(e.items.front()) || e.items.front().atom.front() == ':') {
        report(fmt, "malformed-declaration", e, "Malformed declaration `" + e.to_string() + "`.");
        return false;
    }
    const std::size_t before = diags_.size();
    out.name = e.items.front().atom;
    out.loc = e.loc;
    out.params = typed_list(e.items, 1, true, fmt);
    return diags_.size() == before;
}

std::vector<FluentDecl> AstBuilder::fluent_decls(const SExpr& section, Category fmt) {
    std::vector<FluentDecl> out;
    for (std::size_t i = 1; i < section.items.size(); ++i) {
        const SExpr& it = section.items[i];
        if (it.is_atom("-") && i + 1 < section.items.size() && section.items[i + 1].is_atom("number")) {
            ++i;  // `- number` return type annotation on functions
            continue;
        }
        FluentDecl d;
        if (fluent_decl(it, fmt, d)) out.push_back(std::move(d));
    }
    return out;
}

bool AstBuilder::atom(const SExpr& e, Category fmt, Atom& out) {
    if (!e.is_list || e.items.empty() || e.items.front().is_list || is_variable(e.items.front().atom) ||
        is_number_atom(e.items.front())) {
        report(fmt, "malformed-fluent", e, "Malformed fluent `" + e.to_string() + "`.");
        return false;
    }
    out.name = e.items.front().atom;
    out.loc = e.loc;
    out.args.clear();
    for (std::size_t i = 1; i < e.items.size(); ++i) {
        const SExpr& a = e.items[i];
        if (a.is_list) {
            report(fmt, "malformed-fluent", e,
                   "Fluent `" + out.name + "` has a nested expression `" + a.to_string() +
                       "` as an argument; arguments must be variables or objects.");
            return false;
        }
        if (a.atom == "-") {
            report(fmt, "malformed-fluent", e,
                   "Fluent `" + out.name + "` uses declaration syntax (`- type`) where only arguments are allowed.");
            return false;
        }
        if (is_number_atom(a)) {
            report(fmt, "malformed-fluent", e,
                   "Fluent `" + out.name + "` has the number `" + a.atom + "` as an argument.");
            return false;
        }
        out.args.push_back(a.atom);
    }
    return true;
}

bool AstBuilder::num_expr(const SExpr& e, NumExpr& out) {
    if (e.is_atom()) {
        if (auto v = Rational::parse(e.atom)) {
            out = NumExpr::constant(*v);
            out.loc = e.loc;
            return true;
        }
        report(Category::NumericUsage, "non-numeric-operand", e,
               "`" + e.atom + "` is used as a numeric operand but is neither a number nor a function.");
        return false;
    }
    const std::string_view h = e.head();
    if (is_arith_head(h)) {
        const std::size_t n = e.items.size() - 1;
        if (n == 0 || (n == 1 && h != "-")) {
            report(Category::NumericUsage, "operator-arity", e,
                   "Operator `" + std::string(h) + "` needs at least two operands.");
            return false;
        }
        std::vector<NumExpr> args(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!num_expr(e.items[i + 1], args[i])) return false;
        }
        if (n == 1) {
            out = NumExpr::binary('-', NumExpr::constant(0), std::move(args[0]));
        } else {
            out = std::move(args[0]);
            for (std::size_t i = 1; i < n; ++i) out = NumExpr::binary(h.front(), std::move(out), std::move(args[i]));
        }
        out.loc = e.loc;
        return true;
    }
    if (is_compare_head(h) || is_numeric_effect_head(h) || h == "and" || h == "not" || is_unsupported_head(h)) {
        report(Category::NumericUsage, "misplaced-operator", e,
               "`" + std::string(h) + "` cannot appear inside a numeric expression.");
        return false;
    }
    Atom f;
    if (!atom(e, Category::FunctionFormat, f)) return false;
    out = NumExpr::ref(std::move(f));
    out.loc = e.loc;
    return true;
}

bool AstBuilder::condition(const SExpr& e, Condition& out) {
    if (e.is_atom()) {
        report(Category::PredicateFormat, "malformed-condition", e,
               "Expected a parenthesized condition but found `" + e.atom + "`.");
        return false;
    }
    if (e.items.empty()) {
        out = Condition::conjunction({});
        out.loc = e.loc;
        return true;
    }
    const std::string_view h = e.head();
    if (h == "and") {
        std::vector<Condition> kids;
        bool ok = true;
        for (std::size_t i = 1; i < e.items.size(); ++i) {
            Condition c;
            if (condition(e.items[i], c)) {
                kids.push_back(std::move(c));
            } else {
                ok = false;
            }
        }
        out = Condition::conjunction(std::move(kids));
        out.loc = e.loc;
        return ok;
    }
    if (h == "not") {
        if (e.items.size() != 2) {
            report(Category::PredicateFormat, "malformed-negation", e, "`not` takes exactly one condition.");
            return false;
        }
        Condition inner;
        if (!condition(e.items[1], inner)) return false;
        out = Condition::negate(std::move(inner));
        out.loc = e.loc;
        return true;
    }
    if (is_compare_head(h)) {
        if (e.items.size() != 3) {
            report(Category::NumericUsage, "operator-arity", e,
                   "Comparison `" + std::string(h) + "` takes exactly two operands.");
            return false;
        }
        const SExpr& l = e.items[1];
        const SExpr& r = e.items[2];
        if (h == "=" && l.is_atom() && r.is_atom() && !is_number_atom(l) && !is_number_atom(r)) {
            Atom eq;
            eq.name = "=";
            eq.args = {l.atom, r.atom};
            eq.loc = e.loc;
            out = Condition::make_atom(std::move(eq));
            return true;
        }
        NumExpr lhs, rhs;
        if (!num_expr(l, lhs) || !num_expr(r, rhs)) return false;
        out = Condition::compare(compare_op(h), std::move(lhs), std::move(rhs));
        out.loc = e.loc;
        return true;
    }
    if (is_numeric_effect_head(h)) {
        report(Category::NumericUsage, "effect-in-precondition", e,
               "`" + std::string(h) + "` is an effect operator and cannot be used in a precondition.");
        return false;
    }
    if (is_arith_head(h)) {
        report(Category::NumericUsage, "arithmetic-as-condition", e,
               "The arithmetic expression `" + e.to_string() + "` is not a condition; compare it with <, <=, =, >= or >.");
        return false;
    }
    if (is_unsupported_head(h)) {
        report(Category::PredicateFormat, "unsupported-construct", e,
               "`" + std::string(h) + "` is not supported; only conjunctions of (possibly negated) predicates and "
               "numeric comparisons are allowed.");
        return false;
    }
    Atom a;
    if (!atom(e, Category::PredicateFormat, a)) return false;
    out = Condition::make_atom(std::move(a));
    return true;
}

bool AstBuilder::effect(const SExpr& e, Effect& out) {
    if (e.is_atom()) {
        report(Category::PredicateFormat, "malformed-effect", e,
               "Expected a parenthesized effect but found `" + e.atom + "`.");
        return false;
    }
    if (e.items.empty()) {
        out = Effect::conjunction({});
        out.loc = e.loc;
        return true;
    }
    const std::string_view h = e.head();
    if (h == "and") {
        std::vector<Effect> kids;
        bool ok = true;
        for (std::size_t i = 1; i < e.items.size(); ++i) {
            Effect x;
            if (effect(e.items[i], x)) {
                kids.push_back(std::move(x));
            } else {
                ok = false;
            }
        }
        out = Effect::conjunction(std::move(kids));
        out.loc = e.loc;
        return ok;
    }
    if (h == "not") {
        if (e.items.size() != 2 || !e.items[1].is_list || e.items[1].head() == "and" || e.items[1].head() == "not") {
            report(Category::PredicateFormat, "malformed-negation", e,
                   "A delete effect is written (not (predicate ...)) with exactly one predicate.");
            return false;
        }
        Atom a;
        if (!atom(e.items[1], Category::PredicateFormat, a)) return false;
        out = Effect::del(std::move(a));
        out.loc = e.loc;
        return true;
    }
    if (is_numeric_effect_head(h)) {
        if (h == "scale-up" || h == "scale-down") {
            report(Category::NumericUsage, "unsupported-numeric-effect", e,
                   "`" + std::string(h) + "` is not supported; use increase, decrease or assign.");
            return false;
        }
        if (e.items.size() != 3) {
            report(Category::NumericUsage, "operator-arity", e,
                   "`" + std::string(h) + "` takes a function and a numeric expression.");
            return false;
        }
        if (!e.items[1].is_list) {
            report(Category::NumericUsage, "non-fluent-target", e,
                   "The target of `" + std::string(h) + "` must be a function such as (name ?arg ...).");
            return false;
        }
        Atom target;
        if (!atom(e.items[1], Category::FunctionFormat, target)) return false;
        NumExpr value;
        if (!num_expr(e.items[2], value)) return false;
        const NumericOp op = h == "increase" ? NumericOp::Increase : h == "decrease" ? NumericOp::Decrease : NumericOp::Assign;
        out = Effect::numeric(op, std::move(target), std::move(value));
        out.loc = e.loc;
        return true;
    }
    if (is_compare_head(h) || is_arith_head(h)) {
        report(Category::NumericUsage, "comparison-in-effect", e,
               "`" + e.to_string() + "` is not an effect; change numeric values with increase, decrease or assign.");
        return false;
    }
    if (is_unsupported_head(h)) {
        report(Category::PredicateFormat, "unsupported-construct", e,
               "`" + std::string(h) + "` is not supported in effects.");
        return false;
    }
    Atom a;
    if (!atom(e, Category::PredicateFormat, a)) return false;
    out = Effect::add(std::move(a));
    return true;
}

bool AstBuilder::action(const SExpr& e, Action& out) {
    if (e.items.size() < 2 || e.items[1].is_list) {
        report(Category::Lexical, "malformed-action", e, "An action must start with (:action name ...).");
        return false;
    }
    out = Action{};
    out.name = e.items[1].atom;
    out.loc = e.loc;
    out.precondition = Condition::conjunction({});
    out.effect = Effect::conjunction({});
    bool ok = true;
    for (std::size_t i = 2; i < e.items.size(); i += 2) {
        const SExpr& key = e.items[i];
        if (!key.is_atom() || i + 1 >= e.items.size()) {
            report(Category::Lexical, "malformed-action", key, "Expected `:parameters`, `:precondition` or `:effect` followed by a value.");
            return false;
        }
        const SExpr& val = e.items[i + 1];
        if (key.atom == ":parameters") {
            if (!val.is_list) {
                report(Category::PredicateFormat, "malformed-typed-list", val, "`:parameters` must be a parenthesized list.");
                ok = false;
                continue;
            }
            const std::size_t before = diags_.size();
            out.params = typed_list(val.items, 0, true, Category::PredicateFormat);
            ok = ok && diags_.size() == before;
        } else if (key.atom == ":precondition") {
            ok = condition(val, out.precondition) && ok;
        } else if (key.atom == ":effect") {
            ok = effect(val, out.effect) && ok;
        } else {
            report(Category::Lexical, "unknown-action-key", key, "Unknown action field `" + key.atom + "`.");
            ok = false;
        }
    }
    return ok;
}

}  // namespace detail

namespace {

Diagnostic lexical(std::string code, const SExpr& at, std::string message) {
    Diagnostic d;
    d.category = Category::Lexical;
    d.code = std::move(code);
    d.location = {at.loc.line, at.loc.column, at.to_string().substr(0, 80)};
    d.message = std::move(message);
    d.suggestion = "Please revise the PDDL text so that it follows the expected structure.";
    return d;
}

bool header_is(const SExpr& e, std::string_view keyword, std::string& name) {
    if (!e.is_list || e.items.size() != 2 || !e.items[0].is_atom(keyword) || e.items[1].is_list) return false;
    name = e.items[1].atom;
    return true;
}

template <typename T>
bool has_name(const std::vector<T>& items, const std::string& n) {
    return std::any_of(items.begin(), items.end(), [&](const T& x) { return x.name == n; });
}

Diagnostic duplicate(Category c, const SExpr& at, const std::string& what, const std::string& name) {
    Diagnostic d;
    d.category = c;
    d.code = "duplicate-declaration";
    d.location = {at.loc.line, at.loc.column, at.to_string().substr(0, 80)};
    d.message = "The " + what + " `" + name + "` is declared more than once.";
    d.suggestion = "Declare each name exactly once.";
    return d;
}

}  // namespace

Parsed<Domain> read_domain(std::string_view text) {
    Parsed<Domain> out;
    auto read = read_sexprs(text);
    out.diagnostics = std::move(read.diagnostics);
    const auto& top = *read.value;
    if (top.size() != 1 || !top[0].is_list || top[0].head() != "define") {
        SExpr dummy;
        if (!top.empty()) dummy = top[0];
        out.diagnostics.push_back(lexical("not-a-domain", dummy, "Expected exactly one (define (domain name) ...) form."));
        return out;
    }
    const SExpr& def = top[0];
    Domain dom;
    if (def.items.size() < 2 || !header_is(def.items[1], "domain", dom.name)) {
        out.diagnostics.push_back(lexical("not-a-domain", def, "Expected (domain name) after define."));
        return out;
    }
    detail::AstBuilder b(out.diagnostics);
    std::set<std::string> seen_sections;
    for (std::size_t i = 2; i < def.items.size(); ++i) {
        const SExpr& sec = def.items[i];
        const std::string key(sec.head());
        if (!sec.is_list || key.empty() || key.front() != ':') {
            out.diagnostics.push_back(lexical("unknown-section", sec, "Expected a domain section such as (:predicates ...)."));
            continue;
        }
        if (key != ":action" && !seen_sections.insert(key).second) {
            out.diagnostics.push_back(lexical("duplicate-section", sec, "Section `" + key + "` appears more than once."));
            continue;
        }
        if (key == ":requirements") {
            for (std::size_t k = 1; k < sec.items.size(); ++k) {
                const SExpr& r = sec.items[k];
                const auto& ok = supported_requirements();
                if (r.is_list || std::find(ok.begin(), ok.end(), r.atom) == ok.end()) {
                    out.diagnostics.push_back(lexical("unknown-requirement", r, "Unknown or unsupported requirement `" + r.to_string() + "`."));
                } else if (std::find(dom.requirements.begin(), dom.requirements.end(), r.atom) == dom.requirements.end()) {
                    dom.requirements.push_back(r.atom);
                }
            }
        } else if (key == ":types") {
            for (auto& tn : b.typed_list(sec.items, 1, false, Category::ObjectType)) {
                if (has_name(dom.types, tn.name)) {
                    out.diagnostics.push_back(duplicate(Category::ObjectType, sec, "type", tn.name));
                    continue;
                }
                dom.types.push_back(TypeDecl{tn.name, tn.type, sec.loc});
            }
        } else if (key == ":constants") {
            for (auto& tn : b.typed_list(sec.items, 1, false, Category::ObjectType)) {
                if (has_name(dom.constants, tn.name)) {
                    out.diagnostics.push_back(duplicate(Category::ObjectType, sec, "constant", tn.name));
                    continue;
                }
                dom.constants.push_back(std::move(tn));
            }
        } else if (key == ":predicates" || key == ":functions") {
            const bool fn = key == ":functions";
            for (auto& d : b.fluent_decls(sec, fn ? Category::FunctionFormat : Category::PredicateFormat)) {
                auto& list = fn ? dom.functions : dom.predicates;
                if (has_name(list, d.name)) {
                    SExpr at;
                    at.loc = d.loc;
                    at.atom = d.name;
                    out.diagnostics.push_back(duplicate(fn ? Category::FunctionName : Category::PredicateName, at,
                                                        fn ? "function" : "predicate", d.name));
                    continue;
                }
                list.push_back(std::move(d));
            }
        } else if (key == ":action") {
            Action a;
            if (b.action(sec, a)) {
                if (has_name(dom.actions, a.name)) {
                    out.diagnostics.push_back(lexical("duplicate-declaration", sec, "The action `" + a.name + "` is declared more than once."));
                    continue;
                }
                dom.actions.push_back(std::move(a));
            }
        } else {
            out.diagnostics.push_back(lexical("unknown-section", sec, "Unknown or unsupported domain section `" + key + "`."));
        }
    }
    out.value = std::move(dom);
    return out;
}

Parsed<Domain> parse_domain(std::string_view text) {
    auto out = read_domain(text);
    if (!out.value) return out;
    auto more = check_domain(*out.value, Extern::from_domain(*out.value));
    out.diagnostics.insert(out.diagnostics.end(), more.begin(), more.end());
    if (!out.diagnostics.empty()) out.value.reset();
    return out;
}

Parsed<Problem> parse_problem(std::string_view text, const Domain& dom) {
    Parsed<Problem> out;
    auto read = read_sexprs(text);
    out.diagnostics = std::move(read.diagnostics);
    const auto& top = *read.value;
    if (top.size() != 1 || !top[0].is_list || top[0].head() != "define") {
        SExpr dummy;
        if (!top.empty()) dummy = top[0];
        out.diagnostics.push_back(lexical("not-a-problem", dummy, "Expected exactly one (define (problem name) ...) form."));
        return out;
    }
    const SExpr& def = top[0];
    Problem prob;
    prob.goal = Condition::conjunction({});
    if (def.items.size() < 2 || !header_is(def.items[1], "problem", prob.name)) {
        out.diagnostics.push_back(lexical("not-a-problem", def, "Expected (problem name) after define."));
        return out;
    }
    detail::AstBuilder b(out.diagnostics);
    std::set<std::string> seen;
    for (std::size_t i = 2; i < def.items.size(); ++i) {
        const SExpr& sec = def.items[i];
        const std::string key(sec.head());
        if (!sec.is_list || key.empty() || key.front() != ':' || !seen.insert(key).second) {
            out.diagnostics.push_back(lexical("unknown-section", sec, "Expected one each of (:domain) (:objects) (:init) (:goal)."));
            continue;
        }
        if (key == ":domain") {
            if (sec.items.size() != 2 || sec.items[1].is_list) {
                out.diagnostics.push_back(lexical("malformed-section", sec, "Expected (:domain name)."));
            } else {
                prob.domain_name = sec.items[1].atom;
            }
        } else if (key == ":objects") {
            for (auto& tn : b.typed_list(sec.items, 1, false, Category::ObjectType)) {
                if (has_name(prob.objects, tn.name)) {
                    out.diagnostics.push_back(duplicate(Category::ObjectType, sec, "object", tn.name));
                    continue;
                }
                prob.objects.push_back(std::move(tn));
            }
        } else if (key == ":init") {
            for (std::size_t k = 1; k < sec.items.size(); ++k) {
                const SExpr& it = sec.items[k];
                if (it.is_list && it.head() == "=" && it.items.size() == 3 && it.items[1].is_list) {
                    Atom f;
                    NumExpr v;
                    if (!b.atom(it.items[1], Category::FunctionFormat, f)) continue;
                    if (!b.num_expr(it.items[2], v)) continue;
                    if (v.kind != NumExpr::Kind::Constant) {
                        b.report(Category::NumericUsage, "non-constant-init", it, "Initial fluent values must be numbers.");
                        continue;
                    }
                    auto [pos, inserted] = prob.init_fluents.emplace(f, v.value);
                    if (!inserted && pos->second != v.value) {
                        b.report(Category::FunctionUsage, "duplicate-init", it,
                                 "The fluent " + f.to_string() + " is assigned more than once in the initial state (" +
                                     pos->second.to_string() + " and " + v.value.to_string() + ").",
                                 "Assign each ground function exactly once.");
                    }
                    continue;
                }
                Atom a;
                if (b.atom(it, Category::PredicateFormat, a)) prob.init_atoms.insert(std::move(a));
            }
        } else if (key == ":goal") {
            if (sec.items.size() != 2) {
                out.diagnostics.push_back(lexical("malformed-section", sec, "Expected (:goal condition)."));
            } else {
                b.condition(sec.items[1], prob.goal);
            }
        } else {
            out.diagnostics.push_back(lexical("unknown-section", sec, "Unknown or unsupported problem section `" + key + "`."));
        }
    }
    if (out.diagnostics.empty()) {
        auto more = check_problem(prob, dom);
        out.diagnostics.insert(out.diagnostics.end(), more.begin(), more.end());
    }
    if (out.diagnostics.empty()) out.value = std::move(prob);
    return out;
}

Parsed<Plan> parse_plan(std::string_view text) {
    Parsed<Plan> out;
    Plan plan;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        ++line_no;
        start = end + 1;
        if (auto semi = line.find(';'); semi != std::string_view::npos) line = line.substr(0, semi);
        const auto open = line.find('(');
        const auto close = line.rfind(')');
        if (open == std::string_view::npos) {
            if (std::any_of(line.begin(), line.end(), [](char c) { return !std::isspace(static_cast<unsigned char>(c)); })) {
                Diagnostic d;
                d.category = Category::Lexical;
                d.code = "malformed-plan-line";
                d.location = {line_no, 1, std::string(line)};
                d.message = "Plan line is not of the form (action arg ...).";
                out.diagnostics.push_back(std::move(d));
            }
            continue;
        }
        if (close == std::string_view::npos || close < open) {
            Diagnostic d;
            d.category = Category::Lexical;
            d.code = "unbalanced-parens";
            d.location = {line_no, static_cast<int>(open) + 1, std::string(line)};
            d.message = "Plan step is missing its closing `)`.";
            out.diagnostics.push_back(std::move(d));
            continue;
        }
        auto read = read_sexprs(line.substr(open, close - open + 1));
        const auto& items = *read.value;
        if (!read.diagnostics.empty() || items.size() != 1 || items[0].head().empty() ||
            std::any_of(items[0].items.begin(), items[0].items.end(), [](const SExpr& x) { return x.is_list; })) {
            Diagnostic d;
            d.category = Category::Lexical;
            d.code = "malformed-plan-line";
            d.location = {line_no, static_cast<int>(open) + 1, std::string(line)};
            d.message = "Plan line is not of the form (action arg ...).";
            out.diagnostics.push_back(std::move(d));
            continue;
        }
        PlanStep step;
        step.action = items[0].items[0].atom;
        for (std::size_t k = 1; k < items[0].items.size(); ++k) step.args.push_back(items[0].items[k].atom);
        plan.steps.push_back(std::move(step));
    }
    if (out.diagnostics.empty()) out.value = std::move(plan);
    return out;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string typed_names(const std::vector<TypedName>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ' ';
        out += names[i].name;
        const bool last_of_group = i + 1 == names.size() || names[i + 1].type != names[i].type;
        if (last_of_group) out += " - " + names[i].type;
    }
    return out;
}

std::string render_number(const Rational& r) {
    if (r.has_finite_decimal()) return r.to_string();
    return "(/ " + std::to_string(r.num()) + " " + std::to_string(r.den()) + ")";
}

void indent(std::string& out, int n) { out.append(static_cast<std::size_t>(n), ' '); }

}  // namespace

std::string render_num_expr(const NumExpr& e) {
    switch (e.kind) {
        case NumExpr::Kind::Constant: return render_number(e.value);
        case NumExpr::Kind::Fluent: return e.fluent.to_string();
        case NumExpr::Kind::Binary:
            return std::string("(") + e.op + " " + render_num_expr(e.operands[0]) + " " + render_num_expr(e.operands[1]) + ")";
    }
    return {};
}

std::string render_condition(const Condition& c) {
    switch (c.kind) {
        case Condition::Kind::Atom: return c.atom.to_string();
        case Condition::Kind::Not: return "(not " + render_condition(c.children[0]) + ")";
        case Condition::Kind::Compare:
            return "(" + std::string(to_string(c.cmp)) + " " + render_num_expr(c.sides[0]) + " " +
                   render_num_expr(c.sides[1]) + ")";
        case Condition::Kind::And: {
            std::string out = "(and";
            for (const auto& ch : c.children) out += " " + render_condition(ch);
            return out + ")";
        }
    }
    return {};
}

std::string render_effect(const Effect& e) {
    switch (e.kind) {
        case Effect::Kind::Add: return e.atom.to_string();
        case Effect::Kind::Delete: return "(not " + e.atom.to_string() + ")";
        case Effect::Kind::Numeric:
            return "(" + std::string(to_string(e.op)) + " " + e.atom.to_string() + " " + render_num_expr(e.value) + ")";
        case Effect::Kind::And: {
            std::string out = "(and";
            for (const auto& ch : e.children) out += " " + render_effect(ch);
            return out + ")";
        }
    }
    return {};
}

std::string render_fluent_decl(const FluentDecl& d) {
    std::string out = "(" + d.name;
    if (!d.params.empty()) out += " " + typed_names(d.params);
    return out + ")";
}

std::string render_action(const Action& a) {
    std::string out = "(:action " + a.name + "\n";
    out += "    :parameters (" + typed_names(a.params) + ")\n";
    out += "    :precondition " + render_condition(a.precondition) + "\n";
    out += "    :effect " + render_effect(a.effect) + ")";
    return out;
}

std::string render_domain(const Domain& dom) {
    std::string out = "(define (domain " + dom.name + ")";
    if (!dom.requirements.empty()) {
        out += "\n  (:requirements";
        for (const auto& r : dom.requirements) out += " " + r;
        out += ")";
    }
    if (!dom.types.empty()) {
        std::vector<TypedName> as_names;
        for (const auto& t : dom.types) as_names.push_back({t.name, t.parent});
        out += "\n  (:types " + typed_names(as_names) + ")";
    }
    if (!dom.constants.empty()) out += "\n  (:constants " + typed_names(dom.constants) + ")";
    auto decls = [&](const char* key, const std::vector<FluentDecl>& ds) {
        if (ds.empty()) return;
        out += "\n  (";
        out += key;
        for (const auto& d : ds) {
            out += "\n";
            indent(out, 4);
            out += render_fluent_decl(d);
        }
        out += ")";
    };
    decls(":predicates", dom.predicates);
    decls(":functions", dom.functions);
    for (const auto& a : dom.actions) {
        out += "\n  ";
        std::string body = render_action(a);
        // indent continuation lines by the section indent
        std::string shifted;
        for (char c : body) {
            shifted += c;
            if (c == '\n') shifted += "  ";
        }
        out += shifted;
    }
    out += dom.types.empty() && dom.predicates.empty() && dom.actions.empty() && dom.requirements.empty() &&
                   dom.functions.empty() && dom.constants.empty()
               ? ")\n"
               : "\n)\n";
    return out;
}

std::string render_problem(const Problem& prob) {
    std::string out = "(define (problem " + prob.name + ")\n";
    out += "  (:domain " + prob.domain_name + ")\n";
    if (!prob.objects.empty()) out += "  (:objects " + typed_names(prob.objects) + ")\n";
    out += "  (:init";
    for (const auto& a : prob.init_atoms) out += "\n    " + a.to_string();
    for (const auto& [f, v] : prob.init_fluents) out += "\n    (= " + f.to_string() + " " + render_number(v) + ")";
    out += ")\n";
    out += "  (:goal " + render_condition(prob.goal) + ")\n)\n";
    return out;
}

std::string render_plan(const Plan& plan) {
    std::string out;
    for (const auto& s : plan.steps) out += s.to_string() + "\n";
    return out;
}

}  // namespace pddlkit
