#include "pddlkit/ast.hpp"

#include <algorithm>

namespace pddlkit {

bool FluentDecl::same_signature(const FluentDecl& other) const {
    if (name != other.name || params.size() != other.params.size()) return false;
    return std::equal(params.begin(), params.end(), other.params.begin(),
                      [](const TypedName& a, const TypedName& b) { return a.type == b.type; });
}

std::string Atom::to_string() const {
    std::string out = "(" + name;
    for (const auto& a : args) out += " " + a;
    return out + ")";
}

std::string PlanStep::to_string() const {
    std::string out = "(" + action;
    for (const auto& a : args) out += " " + a;
    return out + ")";
}

NumExpr NumExpr::constant(Rational v) {
    NumExpr e;
    e.kind = Kind::Constant;
    e.value = v;
    return e;
}

NumExpr NumExpr::ref(Atom f) {
    NumExpr e;
    e.kind = Kind::Fluent;
    e.fluent = std::move(f);
    return e;
}

NumExpr NumExpr::binary(char op, NumExpr lhs, NumExpr rhs) {
    NumExpr e;
    e.kind = Kind::Binary;
    e.op = op;
    e.operands.push_back(std::move(lhs));
    e.operands.push_back(std::move(rhs));
    return e;
}

std::string_view to_string(CompareOp op) {
    switch (op) {
        case CompareOp::Less: return "<";
        case CompareOp::LessEq: return "<=";
        case CompareOp::Equal: return "=";
        case CompareOp::GreaterEq: return ">=";
        case CompareOp::Greater: return ">";
    }
    return "=";
}

std::string_view to_string(NumericOp op) {
    switch (op) {
        case NumericOp::Increase: return "increase";
        case NumericOp::Decrease: return "decrease";
        case NumericOp::Assign: return "assign";
    }
    return "assign";
}

Condition Condition::make_atom(Atom a) {
    Condition c;
    c.kind = Kind::Atom;
    c.loc = a.loc;
    c.atom = std::move(a);
    return c;
}

Condition Condition::negate(Condition inner) {
    Condition c;
    c.kind = Kind::Not;
    c.children.push_back(std::move(inner));
    return c;
}

Condition Condition::conjunction(std::vector<Condition> cs) {
    Condition c;
    c.kind = Kind::And;
    c.children = std::move(cs);
    return c;
}

Condition Condition::compare(CompareOp op, NumExpr lhs, NumExpr rhs) {
    Condition c;
    c.kind = Kind::Compare;
    c.cmp = op;
    c.sides.push_back(std::move(lhs));
    c.sides.push_back(std::move(rhs));
    return c;
}

Effect Effect::add(Atom a) {
    Effect e;
    e.kind = Kind::Add;
    e.loc = a.loc;
    e.atom = std::move(a);
    return e;
}

Effect Effect::del(Atom a) {
    Effect e;
    e.kind = Kind::Delete;
    e.loc = a.loc;
    e.atom = std::move(a);
    return e;
}

Effect Effect::numeric(NumericOp op, Atom target, NumExpr value) {
    Effect e;
    e.kind = Kind::Numeric;
    e.op = op;
    e.atom = std::move(target);
    e.value = std::move(value);
    return e;
}

Effect Effect::conjunction(std::vector<Effect> es) {
    Effect e;
    e.kind = Kind::And;
    e.children = std::move(es);
    return e;
}

namespace {

template <typename T>
const T* find_named(const std::vector<T>& items, std::string_view name) {
    auto it = std::find_if(items.begin(), items.end(), [&](const T& x) { return x.name == name; });
    return it == items.end() ? nullptr : &*it;
}

void flatten(const Condition& c, std::vector<const Condition*>& out) {
    if (c.kind == Condition::Kind::And) {
        for (const auto& ch : c.children) flatten(ch, out);
    } else {
        out.push_back(&c);
    }
}

void flatten(const Effect& e, std::vector<const Effect*>& out) {
    if (e.kind == Effect::Kind::And) {
        for (const auto& ch : e.children) flatten(ch, out);
    } else {
        out.push_back(&e);
    }
}

}  // namespace

const Action* Domain::find_action(std::string_view n) const { return find_named(actions, n); }
const PredicateDecl* Domain::find_predicate(std::string_view n) const { return find_named(predicates, n); }
const FunctionDecl* Domain::find_function(std::string_view n) const { return find_named(functions, n); }

std::vector<const Condition*> conjuncts(const Condition& c) {
    std::vector<const Condition*> out;
    flatten(c, out);
    return out;
}

std::vector<const Effect*> conjuncts(const Effect& e) {
    std::vector<const Effect*> out;
    flatten(e, out);
    return out;
}

TypeHierarchy::TypeHierarchy(const std::vector<TypeDecl>& types) {
    for (const auto& t : types) parent_[t.name] = t.parent;
}

bool TypeHierarchy::is_declared(std::string_view type) const {
    return type == kRootType || parent_.find(type) != parent_.end();
}

bool TypeHierarchy::is_subtype(std::string_view sub, std::string_view super) const {
    if (super == kRootType) return true;
    std::string current(sub);
    // Bounded walk; a malformed cyclic hierarchy must not hang.
    for (std::size_t hops = 0; hops <= parent_.size() + 1; ++hops) {
        if (current == super) return true;
        auto it = parent_.find(current);
        if (it == parent_.end()) return false;
        current = it->second;
    }
    return false;
}

}  // namespace pddlkit
