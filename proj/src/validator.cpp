#include "pddlkit/validator.hpp"

#include <functional>

namespace pddlkit {

std::optional<Rational> State::value(const Atom& f) const {
    auto it = fluents.find(f);
    if (it == fluents.end()) return std::nullopt;
    return it->second;
}

std::string State::summary() const {
    return std::to_string(atoms.size()) + " atoms, " + std::to_string(fluents.size()) + " fluents";
}

std::string State::to_string() const {
    std::string out;
    for (const auto& a : atoms) out += a.to_string() + "\n";
    for (const auto& [f, v] : fluents) out += "(= " + f.to_string() + " " + v.to_string() + ")\n";
    return out;
}

std::size_t StateHash::operator()(const State& s) const {
    std::size_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    std::hash<std::string> hs;
    for (const auto& a : s.atoms) {
        mix(hs(a.name));
        for (const auto& x : a.args) mix(hs(x));
    }
    for (const auto& [f, v] : s.fluents) {
        mix(hs(f.name));
        for (const auto& x : f.args) mix(hs(x));
        mix(static_cast<std::size_t>(v.num()));
        mix(static_cast<std::size_t>(v.den()));
    }
    return h;
}

Atom ground(const Atom& a, const Binding& b) {
    Atom out;
    out.name = a.name;
    out.args.reserve(a.args.size());
    for (const auto& t : a.args) {
        auto it = b.find(t);
        out.args.push_back(it == b.end() ? t : it->second);
    }
    return out;
}

State initial_state(const Problem& prob) {
    State s;
    s.atoms = prob.init_atoms;
    s.fluents = prob.init_fluents;
    return s;
}

Rational evaluate_numeric(const NumExpr& e, const State& s, const Binding& binding) {
    switch (e.kind) {
        case NumExpr::Kind::Constant: return e.value;
        case NumExpr::Kind::Fluent: {
            const Atom g = ground(e.fluent, binding);
            auto v = s.value(g);
            if (!v) throw EvalError("read of unassigned fluent " + g.to_string());
            return *v;
        }
        case NumExpr::Kind::Binary: {
            const Rational l = evaluate_numeric(e.operands[0], s, binding);
            const Rational r = evaluate_numeric(e.operands[1], s, binding);
            try {
                switch (e.op) {
                    case '+': return l + r;
                    case '-': return l - r;
                    case '*': return l * r;
                    case '/': return l / r;
                    default: break;
                }
            } catch (const ArithmeticError& err) {
                throw EvalError(err.what());
            }
            throw EvalError(std::string("unknown operator ") + e.op);
        }
    }
    return {};
}

bool holds(const Condition& c, const State& s, const Binding& binding) {
    switch (c.kind) {
        case Condition::Kind::And:
            for (const auto& ch : c.children) {
                if (!holds(ch, s, binding)) return false;
            }
            return true;
        case Condition::Kind::Not: return !holds(c.children[0], s, binding);
        case Condition::Kind::Atom: {
            const Atom g = ground(c.atom, binding);
            if (g.name == "=") return g.args.size() == 2 && g.args[0] == g.args[1];
            return s.holds(g);
        }
        case Condition::Kind::Compare: {
            const Rational l = evaluate_numeric(c.sides[0], s, binding);
            const Rational r = evaluate_numeric(c.sides[1], s, binding);
            switch (c.cmp) {
                case CompareOp::Less: return l < r;
                case CompareOp::LessEq: return l <= r;
                case CompareOp::Equal: return l == r;
                case CompareOp::GreaterEq: return l >= r;
                case CompareOp::Greater: return l > r;
            }
        }
    }
    return false;
}

Binding bind(const Action& act, const std::vector<std::string>& args) {
    if (args.size() != act.params.size()) {
        throw std::invalid_argument("action " + act.name + " expects " + std::to_string(act.params.size()) +
                                    " arguments, got " + std::to_string(args.size()));
    }
    Binding b;
    for (std::size_t i = 0; i < args.size(); ++i) b[act.params[i].name] = args[i];
    return b;
}

bool applicable(const State& s, const Action& act, const std::vector<std::string>& args) {
    return holds(act.precondition, s, bind(act, args));
}

State apply(const State& s, const Action& act, const std::vector<std::string>& args) {
    const Binding b = bind(act, args);
    State next = s;
    std::vector<Atom> adds;
    std::vector<Atom> dels;
    struct Update {
        bool assigned = false;
        Rational value;
        Rational delta;
        bool touched_relative = false;
    };
    std::map<Atom, Update> updates;

    for (const Effect* e : conjuncts(act.effect)) {
        switch (e->kind) {
            case Effect::Kind::Add: adds.push_back(ground(e->atom, b)); break;
            case Effect::Kind::Delete: dels.push_back(ground(e->atom, b)); break;
            case Effect::Kind::Numeric: {
                const Atom target = ground(e->atom, b);
                const Rational v = evaluate_numeric(e->value, s, b);  // pre-state read
                Update& u = updates[target];
                if (e->op == NumericOp::Assign) {
                    if (u.assigned || u.touched_relative) throw EvalError("conflicting numeric effects on " + target.to_string());
                    u.assigned = true;
                    u.value = v;
                } else {
                    if (u.assigned) throw EvalError("conflicting numeric effects on " + target.to_string());
                    if (!s.value(target)) throw EvalError("numeric effect on unassigned fluent " + target.to_string());
                    u.touched_relative = true;
                    try {
                        u.delta += e->op == NumericOp::Increase ? v : -v;
                    } catch (const ArithmeticError& err) {
                        throw EvalError(err.what());
                    }
                }
                break;
            }
            case Effect::Kind::And: break;
        }
    }
    for (const auto& d : dels) next.atoms.erase(d);
    for (auto& a : adds) next.atoms.insert(std::move(a));
    for (auto& [f, u] : updates) {
        try {
            next.fluents[f] = u.assigned ? u.value : *s.value(f) + u.delta;
        } catch (const ArithmeticError& err) {
            throw EvalError(err.what());
        }
    }
    return next;
}

ValidationReport validate_plan(const Domain& dom, const Problem& prob, const Plan& plan, const ValidateOptions& opts) {
    ValidationReport rep;
    const TypeHierarchy types(dom.types);
    std::map<std::string, std::string> object_type;
    for (const auto& c : dom.constants) object_type[c.name] = c.type;
    for (const auto& o : prob.objects) object_type[o.name] = o.type;

    auto fail = [&](std::size_t step, std::string reason) {
        rep.outcome = ValidationReport::Outcome::Failed;
        rep.failed_step = step;
        rep.reason = std::move(reason);
        return rep;
    };

    State s = initial_state(prob);
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        const PlanStep& step = plan.steps[i];
        const Action* act = dom.find_action(step.action);
        if (!act) {
            rep.trace.push_back({i, false, s.summary()});
            return fail(i, "unknown-action: " + step.action);
        }
        if (act->params.size() != step.args.size()) {
            rep.trace.push_back({i, false, s.summary()});
            return fail(i, "arity-mismatch: " + step.to_string());
        }
        for (std::size_t k = 0; k < step.args.size(); ++k) {
            auto it = object_type.find(step.args[k]);
            if (it == object_type.end()) {
                rep.trace.push_back({i, false, s.summary()});
                return fail(i, "unknown-object: " + step.args[k]);
            }
            if (!types.is_subtype(it->second, act->params[k].type)) {
                rep.trace.push_back({i, false, s.summary()});
                return fail(i, "type-mismatch: " + step.args[k] + " is not a " + act->params[k].type);
            }
        }
        try {
            if (!applicable(s, *act, step.args)) {
                rep.trace.push_back({i, false, s.summary()});
                return fail(i, "precondition-unsatisfied: " + step.to_string());
            }
            s = apply(s, *act, step.args);
        } catch (const EvalError& err) {
            rep.trace.push_back({i, false, s.summary()});
            return fail(i, std::string("evaluation-error: ") + err.what());
        }
        rep.trace.push_back({i, true, s.summary()});
    }
    try {
        rep.goal_satisfied = holds(prob.goal, s, {});
    } catch (const EvalError& err) {
        rep.goal_satisfied = false;
        if (!opts.steps_only) return fail(plan.steps.size(), std::string("evaluation-error in goal: ") + err.what());
    }
    if (!rep.goal_satisfied && !opts.steps_only) return fail(plan.steps.size(), "goal-not-satisfied");
    rep.outcome = ValidationReport::Outcome::Valid;
    return rep;
}

}  // namespace pddlkit
