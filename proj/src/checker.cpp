#include "pddlkit/checker.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "pddlkit/parser.hpp"
#include "pddlkit/sexpr.hpp"

namespace pddlkit {

const std::vector<std::string>& pddl_keywords() {
    static const std::vector<std::string> words = [] {
        std::vector<std::string> w = {"and",    "or",     "not",     "exists", "forall", "when",
                                      "increase", "decrease", "assign", "define", "domain", "problem",
                                      "object", "number", "<",       "<=",     "=",      ">=",
                                      ">",      "+",      "-",       "*",      "/"};
        for (const auto& r : supported_requirements()) w.push_back(r);
        return w;
    }();
    return words;
}

namespace {

bool is_keyword(std::string_view name) {
    const auto& k = pddl_keywords();
    return std::find(k.begin(), k.end(), name) != k.end();
}

std::string join(const std::vector<std::string>& xs, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += sep;
        out += xs[i];
    }
    return out;
}

constexpr std::string_view kRevise = " Please revise to fix this error.";

std::string reuse_hint(bool function) {
    return function ? "Note that you can always create new functions, but you should also reuse existing functions "
                      "whenever possible."
                    : "Note that you can always create new predicates, but you should also reuse existing predicates "
                      "whenever possible.";
}

/// Shared rule engine behind check_domain, check_problem and
/// check_action_fragment.
class Checker {
public:
    Checker(const Extern& ext, std::vector<Diagnostic>& sink) : hierarchy_(ext.types), diags_(sink) {
        for (const auto& t : ext.types) type_names_.insert(t.name);
        type_names_.insert(std::string(kRootType));
        for (const auto& c : ext.constants) objects_[c.name] = c.type;
    }

    void add_predicate(const FluentDecl& d) { predicates_[d.name] = &d; }
    void add_function(const FluentDecl& d) { functions_[d.name] = &d; }
    void add_object(const TypedName& o) { objects_[o.name] = o.type; }
    void set_action_names(std::set<std::string> names) { action_names_ = std::move(names); }

    std::string type_listing() const {
        return join(std::vector<std::string>(type_names_.begin(), type_names_.end()), ", ");
    }

    // --- declarations ----------------------------------------------------

    bool check_type_known(const std::string& type, SourceLoc loc, const std::string& context) {
        if (type_names_.count(type)) return true;
        report(Category::ObjectType, "unknown-type", loc, context,
               "The type `" + type + "` in " + context + " does not match any type in the Extern input." +
                   std::string(kRevise),
               "Note that you can only use the declared object types: " + type_listing() + ".");
        return false;
    }

    /// Name and parameter checks for a fluent declaration.
    bool check_decl(const FluentDecl& d, bool function) {
        const Category name_cat = function ? Category::FunctionName : Category::PredicateName;
        const Category fmt_cat = function ? Category::FunctionFormat : Category::PredicateFormat;
        const std::string kind = function ? "function" : "predicate";
        const std::string snippet = render_fluent_decl(d);
        const std::string hint = "Note that you can always create new " + kind +
                                 "s, but their names must not clash with object types, existing predicates or "
                                 "functions, or PDDL keywords.";
        if (is_keyword(d.name)) {
            report(name_cat, "keyword-conflict", d.loc, snippet,
                   "The " + kind + " name `" + d.name + "` conflicts with a PDDL keyword." + std::string(kRevise), hint);
            return false;
        }
        if (type_names_.count(d.name)) {
            report(name_cat, "type-conflict", d.loc, snippet,
                   "The " + kind + " name `" + d.name + "` conflicts with an object type." + std::string(kRevise), hint);
            return false;
        }
        const auto& others = function ? predicates_ : functions_;
        if (others.count(d.name)) {
            report(name_cat, "fluent-conflict", d.loc, snippet,
                   "The " + kind + " name `" + d.name + "` conflicts with an existing " +
                       (function ? "predicate" : "function") + " name." + std::string(kRevise),
                   hint);
            return false;
        }
        if (action_names_.count(d.name)) {
            report(name_cat, "action-conflict", d.loc, snippet,
                   "The " + kind + " name `" + d.name + "` conflicts with an action name." + std::string(kRevise), hint);
            return false;
        }
        std::set<std::string> vars;
        for (const auto& p : d.params) {
            if (!vars.insert(p.name).second) {
                report(fmt_cat, "duplicate-parameter", d.loc, snippet,
                       "The " + kind + " `" + d.name + "` declares the parameter `" + p.name + "` twice." +
                           std::string(kRevise));
                return false;
            }
        }
        for (const auto& p : d.params) {
            if (!check_type_known(p.type, d.loc, "the declaration of `" + d.name + "`")) return false;
        }
        return true;
    }

    // --- actions ---------------------------------------------------------

    void check_action(const Action& a) {
        const std::string snippet = "(:action " + a.name + " ...)";
        if (predicates_.count(a.name) || functions_.count(a.name) || type_names_.count(a.name)) {
            report(predicates_.count(a.name) ? Category::PredicateName
                   : functions_.count(a.name) ? Category::FunctionName
                                              : Category::ObjectType,
                   "action-conflict", a.loc, snippet,
                   "The action name `" + a.name + "` conflicts with a type, predicate or function name." +
                       std::string(kRevise),
                   "Note that action names must differ from every type, predicate and function name.");
            return;
        }
        scope_.clear();
        for (const auto& p : a.params) {
            if (scope_.count(p.name)) {
                report(Category::PredicateFormat, "duplicate-parameter", a.loc, snippet,
                       "The action `" + a.name + "` declares the parameter `" + p.name + "` twice." +
                           std::string(kRevise));
                return;
            }
            if (!type_names_.count(p.type)) {
                report(Category::ObjectType, "unknown-type", a.loc, snippet,
                       "The type `" + p.type + "` in the action parameter does not match any type in the Extern input." +
                           std::string(kRevise),
                       "Note that you can only use the declared object types: " + type_listing() + ".");
                return;
            }
            scope_[p.name] = p.type;
        }
        check_condition(a.precondition, "Preconditions");
        check_effect(a.effect);
        scope_.clear();
    }

    void check_condition(const Condition& c, const std::string& section) {
        switch (c.kind) {
            case Condition::Kind::And:
                for (const auto& ch : c.children) check_condition(ch, section);
                return;
            case Condition::Kind::Not:
                check_condition(c.children[0], section);
                return;
            case Condition::Kind::Compare:
                if (check_num(c.sides[0], section)) check_num(c.sides[1], section);
                return;
            case Condition::Kind::Atom:
                check_boolean_atom(c.atom, section);
                return;
        }
    }

    void check_effect(const Effect& e) {
        const std::string section = "Effects";
        switch (e.kind) {
            case Effect::Kind::And:
                for (const auto& ch : e.children) check_effect(ch);
                return;
            case Effect::Kind::Add:
            case Effect::Kind::Delete:
                if (e.atom.name == "=") {
                    report(Category::PredicateUsage, "equality-effect", e.atom.loc, e.atom.to_string(),
                           "Equality `=` cannot be used as an effect." + std::string(kRevise), reuse_hint(false));
                    return;
                }
                check_boolean_atom(e.atom, section);
                return;
            case Effect::Kind::Numeric:
                if (check_fluent_ref(e.atom, section)) check_num(e.value, section);
                return;
        }
    }

    /// Reference to a numeric fluent. Returns false when it reported.
    bool check_fluent_ref(const Atom& f, const std::string& section) {
        if (predicates_.count(f.name)) {
            report(Category::NumericUsage, "predicate-in-numeric", f.loc, f.to_string(),
                   "Head `" + f.name + "` in `" + section + "` is a predicate but should be a function." +
                       std::string(kRevise),
                   reuse_hint(true));
            return false;
        }
        auto it = functions_.find(f.name);
        if (it == functions_.end()) {
            report(Category::FunctionUsage, "undeclared-function", f.loc, f.to_string(),
                   "Head `" + f.name + "` in `" + section + "` is not a declared function." + std::string(kRevise),
                   reuse_hint(true));
            return false;
        }
        return check_args(f, *it->second, section, Category::FunctionUsage, true);
    }

    bool check_num(const NumExpr& e, const std::string& section) {
        switch (e.kind) {
            case NumExpr::Kind::Constant: return true;
            case NumExpr::Kind::Fluent: return check_fluent_ref(e.fluent, section);
            case NumExpr::Kind::Binary:
                return check_num(e.operands[0], section) && check_num(e.operands[1], section);
        }
        return true;
    }

    bool check_boolean_atom(const Atom& a, const std::string& section) {
        if (a.name == "=") {
            for (const auto& t : a.args) {
                if (!check_term(t, a, section, Category::PredicateUsage)) return false;
            }
            return true;
        }
        if (functions_.count(a.name)) {
            report(Category::FunctionUsage, "function-as-predicate", a.loc, a.to_string(),
                   "Head `" + a.name + "` in `" + section + "` is a function but should be a predicate." +
                       std::string(kRevise),
                   "Note that functions hold numbers and may only appear inside numeric comparisons or numeric "
                   "effects; you can always create new predicates, but you should also reuse existing predicates "
                   "whenever possible.");
            return false;
        }
        auto it = predicates_.find(a.name);
        if (it == predicates_.end()) {
            report(Category::PredicateUsage, "undeclared-predicate", a.loc, a.to_string(),
                   "Head `" + a.name + "` in `" + section + "` is not a declared predicate." + std::string(kRevise),
                   reuse_hint(false));
            return false;
        }
        return check_args(a, *it->second, section, Category::PredicateUsage, false);
    }

    bool check_args(const Atom& a, const FluentDecl& decl, const std::string& section, Category usage, bool function) {
        if (a.args.size() != decl.params.size()) {
            report(usage, "arity-mismatch", a.loc, a.to_string(),
                   "Head `" + a.name + "` in `" + section + "` expects " + std::to_string(decl.params.size()) +
                       " argument(s) but was given " + std::to_string(a.args.size()) + "." + std::string(kRevise),
                   reuse_hint(function));
            return false;
        }
        for (std::size_t i = 0; i < a.args.size(); ++i) {
            std::string type;
            if (!term_type(a.args[i], a, section, usage, type)) return false;
            if (!hierarchy_.is_subtype(type, decl.params[i].type)) {
                report(usage, "type-mismatch", a.loc, a.to_string(),
                       "Argument `" + a.args[i] + "` of `" + a.name + "` in `" + section + "` has type `" + type +
                           "` but `" + a.name + "` expects `" + decl.params[i].type + "`." + std::string(kRevise),
                       reuse_hint(function));
                return false;
            }
        }
        return true;
    }

    bool check_term(const std::string& term, const Atom& at, const std::string& section, Category usage) {
        std::string ignored;
        return term_type(term, at, section, usage, ignored);
    }

    bool term_type(const std::string& term, const Atom& at, const std::string& section, Category usage,
                   std::string& type) {
        if (is_variable(term)) {
            auto it = scope_.find(term);
            if (it == scope_.end()) {
                report(usage, "unbound-variable", at.loc, at.to_string(),
                       "Variable `" + term + "` in `" + section + "` is not a parameter of the action." +
                           std::string(kRevise),
                       "Note that every variable must be declared in :parameters.");
                return false;
            }
            type = it->second;
            return true;
        }
        auto it = objects_.find(term);
        if (it == objects_.end()) {
            report(usage, "unknown-object", at.loc, at.to_string(),
                   "`" + term + "` in `" + section + "` is neither a parameter nor a declared object." +
                       std::string(kRevise),
                   "Note that arguments must be action parameters or declared constants.");
            return false;
        }
        type = it->second;
        return true;
    }

    void report(Category c, std::string code, SourceLoc loc, std::string snippet, std::string message,
                std::string suggestion = {}) {
        Diagnostic d;
        d.category = c;
        d.code = std::move(code);
        d.location = {loc.line, loc.column, std::move(snippet)};
        d.message = std::move(message);
        d.suggestion = std::move(suggestion);
        if (d.suggestion.empty()) d.suggestion = "Please revise the PDDL accordingly.";
        diags_.push_back(std::move(d));
    }

    bool has_predicate(const std::string& n) const { return predicates_.count(n) > 0; }
    bool has_function(const std::string& n) const { return functions_.count(n) > 0; }
    const TypeHierarchy& hierarchy() const { return hierarchy_; }
    const std::map<std::string, std::string>& objects() const { return objects_; }

private:
    TypeHierarchy hierarchy_;
    std::set<std::string> type_names_;
    std::map<std::string, const FluentDecl*> predicates_;
    std::map<std::string, const FluentDecl*> functions_;
    std::map<std::string, std::string> objects_;
    std::map<std::string, std::string> scope_;
    std::set<std::string> action_names_;
    std::vector<Diagnostic>& diags_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Extern

Extern Extern::from_domain(const Domain& dom) {
    Extern e;
    e.types = dom.types;
    e.requirements = dom.requirements;
    e.constants = dom.constants;
    return e;
}

bool Extern::has_type(std::string_view name) const {
    return name == kRootType ||
           std::any_of(types.begin(), types.end(), [&](const TypeDecl& t) { return t.name == name; });
}

std::vector<std::string> Extern::type_names() const {
    std::vector<std::string> out{std::string(kRootType)};
    for (const auto& t : types) out.push_back(t.name);
    return out;
}

Parsed<Extern> Extern::parse(std::string_view text) {
    Parsed<Extern> out;
    auto read = read_sexprs(text);
    out.diagnostics = std::move(read.diagnostics);
    Extern ext;
    detail::AstBuilder b(out.diagnostics);
    for (const auto& form : *read.value) {
        const std::string_view h = form.head();
        if (h == ":requirements") {
            for (std::size_t i = 1; i < form.items.size(); ++i) {
                const auto& ok = supported_requirements();
                const SExpr& r = form.items[i];
                if (r.is_list || std::find(ok.begin(), ok.end(), r.atom) == ok.end()) {
                    b.report(Category::Lexical, "unknown-requirement", r, "Unknown or unsupported requirement `" + r.to_string() + "`.");
                } else {
                    ext.requirements.push_back(r.atom);
                }
            }
        } else if (h == ":types") {
            for (auto& tn : b.typed_list(form.items, 1, false, Category::ObjectType)) ext.types.push_back({tn.name, tn.type, form.loc});
        } else if (h == ":constants") {
            for (auto& tn : b.typed_list(form.items, 1, false, Category::ObjectType)) ext.constants.push_back(std::move(tn));
        } else {
            b.report(Category::Lexical, "unknown-section", form, "Extern files contain only :requirements, :types and :constants forms.");
        }
    }
    if (out.diagnostics.empty()) out.value = std::move(ext);
    return out;
}

std::string Extern::render() const {
    std::string out;
    out += "(:requirements";
    for (const auto& r : requirements) out += " " + r;
    out += ")\n(:types";
    for (const auto& t : types) out += " " + t.name + " - " + t.parent;
    out += ")\n";
    if (!constants.empty()) {
        out += "(:constants";
        for (const auto& c : constants) out += " " + c.name + " - " + c.type;
        out += ")\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// FluentRegistry

namespace {

template <typename T>
const T* find_decl(const std::vector<T>& xs, std::string_view name) {
    auto it = std::find_if(xs.begin(), xs.end(), [&](const T& d) { return d.name == name; });
    return it == xs.end() ? nullptr : &*it;
}

}  // namespace

std::string FluentRegistry::provenance(std::string_view name) const {
    auto it = provenance_.find(name);
    return it == provenance_.end() ? std::string{} : it->second;
}

const PredicateDecl* FluentRegistry::find_predicate(std::string_view name) const { return find_decl(predicates_, name); }
const FunctionDecl* FluentRegistry::find_function(std::string_view name) const { return find_decl(functions_, name); }

void FluentRegistry::add_predicate(PredicateDecl d, std::string origin) {
    if (const auto* existing = find_predicate(d.name)) {
        if (existing->same_signature(d)) return;
        throw std::invalid_argument("conflicting re-declaration of predicate " + d.name);
    }
    if (find_function(d.name)) throw std::invalid_argument("predicate name clashes with function " + d.name);
    provenance_[d.name] = std::move(origin);
    predicates_.push_back(std::move(d));
}

void FluentRegistry::add_function(FunctionDecl d, std::string origin) {
    if (const auto* existing = find_function(d.name)) {
        if (existing->same_signature(d)) return;
        throw std::invalid_argument("conflicting re-declaration of function " + d.name);
    }
    if (find_predicate(d.name)) throw std::invalid_argument("function name clashes with predicate " + d.name);
    provenance_[d.name] = std::move(origin);
    functions_.push_back(std::move(d));
}

std::string FluentRegistry::listing() const {
    std::string out;
    for (const auto& p : predicates_) out += "predicate " + render_fluent_decl(p) + "\n";
    for (const auto& f : functions_) out += "function " + render_fluent_decl(f) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// check_domain / check_problem

std::vector<Diagnostic> check_domain(const Domain& dom, const Extern& ext) {
    std::vector<Diagnostic> diags;
    Checker ck(ext, diags);

    for (const auto& t : dom.types) {
        if (!ext.has_type(t.name)) {
            ck.report(Category::ObjectType, "unknown-type", t.loc, t.name + " - " + t.parent,
                      "The type `" + t.name + "` declared by the domain does not match any type in the Extern input." +
                          std::string(kRevise),
                      "Note that you can only use the declared object types: " + ck.type_listing() + ".");
        } else if (!ext.has_type(t.parent)) {
            ck.report(Category::ObjectType, "unknown-type", t.loc, t.name + " - " + t.parent,
                      "The parent type `" + t.parent + "` of `" + t.name + "` is not declared." + std::string(kRevise),
                      "Note that you can only use the declared object types: " + ck.type_listing() + ".");
        }
    }
    for (const auto& c : dom.constants) {
        ck.check_type_known(c.type, {}, "the constant `" + c.name + "`");
        ck.add_object(c);
    }

    std::set<std::string> actions;
    for (const auto& a : dom.actions) actions.insert(a.name);
    ck.set_action_names(actions);

    // Declarations are admitted one at a time so that a clash is reported on
    // the later declaration only.
    std::set<std::string> seen_pred, seen_func;
    for (const auto& p : dom.predicates) {
        if (!seen_pred.insert(p.name).second) {
            ck.report(Category::PredicateName, "duplicate-declaration", p.loc, render_fluent_decl(p),
                      "The predicate `" + p.name + "` is declared more than once." + std::string(kRevise));
            continue;
        }
        if (ck.check_decl(p, false)) ck.add_predicate(p);
    }
    for (const auto& f : dom.functions) {
        if (!seen_func.insert(f.name).second) {
            ck.report(Category::FunctionName, "duplicate-declaration", f.loc, render_fluent_decl(f),
                      "The function `" + f.name + "` is declared more than once." + std::string(kRevise));
            continue;
        }
        if (ck.check_decl(f, true)) ck.add_function(f);
    }
    for (const auto& a : dom.actions) ck.check_action(a);
    return diags;
}

std::vector<Diagnostic> check_problem(const Problem& prob, const Domain& dom) {
    std::vector<Diagnostic> diags;
    const Extern ext = Extern::from_domain(dom);
    Checker ck(ext, diags);
    for (const auto& p : dom.predicates) ck.add_predicate(p);
    for (const auto& f : dom.functions) ck.add_function(f);

    if (!prob.domain_name.empty() && prob.domain_name != dom.name) {
        ck.report(Category::Lexical, "domain-mismatch", {}, "(:domain " + prob.domain_name + ")",
                  "The problem refers to domain `" + prob.domain_name + "` but was checked against `" + dom.name + "`.");
    }
    for (const auto& o : prob.objects) {
        if (ck.check_type_known(o.type, {}, "the object `" + o.name + "`")) ck.add_object(o);
    }
    for (const auto& a : prob.init_atoms) ck.check_boolean_atom(a, "Init");
    for (const auto& [f, v] : prob.init_fluents) ck.check_fluent_ref(f, "Init");
    ck.check_condition(prob.goal, "Goal");
    return diags;
}

// ---------------------------------------------------------------------------
// Fragments

FragmentResult check_action_fragment(std::string_view fragment, const FluentRegistry& registry, const Extern& ext) {
    FragmentResult out;
    auto read = read_sexprs(fragment);
    out.diagnostics = std::move(read.diagnostics);
    if (!out.diagnostics.empty()) return out;

    detail::AstBuilder b(out.diagnostics);
    std::vector<FluentDecl> declared_preds, declared_funcs;
    std::vector<Action> actions;
    for (const auto& form : *read.value) {
        const std::string_view h = form.head();
        if (h == ":predicates") {
            auto ds = b.fluent_decls(form, Category::PredicateFormat);
            declared_preds.insert(declared_preds.end(), ds.begin(), ds.end());
        } else if (h == ":functions") {
            auto ds = b.fluent_decls(form, Category::FunctionFormat);
            declared_funcs.insert(declared_funcs.end(), ds.begin(), ds.end());
        } else if (h == ":action") {
            Action a;
            if (b.action(form, a)) actions.push_back(std::move(a));
        } else {
            b.report(Category::Lexical, "fragment-shape", form,
                     "Unexpected form `" + form.to_string().substr(0, 60) +
                         "`; expected optional (:predicates ...) and (:functions ...) followed by one (:action ...).");
        }
    }
    if (!out.diagnostics.empty()) return out;
    if (actions.size() != 1) {
        Diagnostic d;
        d.category = Category::Lexical;
        d.code = "fragment-shape";
        d.message = "Expected exactly one (:action ...) but found " + std::to_string(actions.size()) + ".";
        d.suggestion = "Write the action in the requested format.";
        out.diagnostics.push_back(std::move(d));
        return out;
    }

    Checker ck(ext, out.diagnostics);
    for (const auto& p : registry.predicates()) ck.add_predicate(p);
    for (const auto& f : registry.functions()) ck.add_function(f);
    ck.set_action_names({actions.front().name});

    auto admit = [&](const FluentDecl& d, bool function) {
        const auto* same_kind = function ? registry.find_function(d.name) : registry.find_predicate(d.name);
        const Category usage = function ? Category::FunctionUsage : Category::PredicateUsage;
        const std::string kind = function ? "function" : "predicate";
        if (same_kind) {
            if (same_kind->same_signature(d)) return;  // identical re-declaration is accepted silently
            ck.report(usage, "redeclaration", d.loc, render_fluent_decl(d),
                      "The " + kind + " `" + d.name + "` is already declared as " + render_fluent_decl(*same_kind) +
                          " with a different signature." + std::string(kRevise),
                      reuse_hint(function));
            return;
        }
        auto& fresh = function ? out.new_functions : out.new_predicates;
        if (std::any_of(fresh.begin(), fresh.end(), [&](const FluentDecl& x) { return x.name == d.name; })) {
            ck.report(function ? Category::FunctionName : Category::PredicateName, "duplicate-declaration", d.loc,
                      render_fluent_decl(d), "The " + kind + " `" + d.name + "` is declared more than once." + std::string(kRevise));
            return;
        }
        if (!ck.check_decl(d, function)) return;
        fresh.push_back(d);
        if (function) {
            ck.add_function(fresh.back());
        } else {
            ck.add_predicate(fresh.back());
        }
    };
    // The checker keeps pointers into these vectors, so they must not reallocate.
    out.new_predicates.reserve(declared_preds.size());
    out.new_functions.reserve(declared_funcs.size());
    for (const auto& d : declared_preds) admit(d, false);
    for (const auto& d : declared_funcs) admit(d, true);

    ck.check_action(actions.front());
    if (out.diagnostics.empty()) {
        out.action = std::move(actions.front());
    } else {
        out.new_predicates.clear();
        out.new_functions.clear();
    }
    return out;
}

std::string render_feedback(std::span<const Diagnostic> diags) {
    std::string out;
    for (std::size_t i = 0; i < diags.size(); ++i) {
        if (i) out += "\n\n";
        out += diags[i].feedback();
    }
    return out;
}

}  // namespace pddlkit
