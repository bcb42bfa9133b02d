#include "pddlkit/complexity.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace pddlkit {

std::array<Rational, ComponentVector::kSize> ComponentVector::as_array() const {
    return {n_actions,         n_types,     n_predicates,        n_functions,        avg_preconditions,
            avg_effects,       interdependency_pred, interdependency_func, action_coupling};
}

const std::array<std::string_view, ComponentVector::kSize>& component_names() {
    static const std::array<std::string_view, ComponentVector::kSize> names = {
        "n_actions",   "n_types",           "n_predicates",        "n_functions",    "avg_preconditions",
        "avg_effects", "interdependency_pred", "interdependency_func", "action_coupling",
    };
    return names;
}

Weights Weights::unit() {
    Weights w;
    w.values.fill(Rational(1));
    return w;
}

Parsed<Weights> Weights::parse(std::string_view text) {
    Parsed<Weights> out;
    Weights w = unit();
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    auto trim = [](std::string s) {
        auto not_space = [](unsigned char c) { return !std::isspace(c); };
        s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
        s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
        return s;
    };
    auto fail = [&](std::string msg) {
        Diagnostic d;
        d.category = Category::Lexical;
        d.code = "bad-weights";
        d.location = {line_no, 1, line};
        d.message = std::move(msg);
        out.diagnostics.push_back(std::move(d));
    };
    while (std::getline(in, line)) {
        ++line_no;
        std::string body = trim(line.substr(0, line.find('#')));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            fail("Expected `component = value`.");
            continue;
        }
        const std::string key = trim(body.substr(0, eq));
        const std::string val = trim(body.substr(eq + 1));
        const auto& names = component_names();
        auto it = std::find(names.begin(), names.end(), key);
        if (it == names.end()) {
            fail("Unknown complexity component `" + key + "`.");
            continue;
        }
        auto r = Rational::parse(val);
        if (!r || *r < Rational(0)) {
            fail("Weight for `" + key + "` must be a nonnegative decimal number.");
            continue;
        }
        w.values[static_cast<std::size_t>(it - names.begin())] = *r;
    }
    if (std::all_of(w.values.begin(), w.values.end(), [](const Rational& r) { return r.is_zero(); })) {
        fail("At least one weight must be positive.");
    }
    if (out.diagnostics.empty()) out.value = w;
    return out;
}

std::string_view to_string(ComplexityClass c) { return c == ComplexityClass::Simple ? "simple" : "complex"; }

namespace {

void collect_names(const NumExpr& e, std::set<std::string>& out) {
    if (e.kind == NumExpr::Kind::Fluent) out.insert(e.fluent.name);
    for (const auto& o : e.operands) collect_names(o, out);
}

/// Fluent names referenced by one precondition conjunct (polarity ignored).
std::set<std::string> names_in(const Condition& c) {
    std::set<std::string> out;
    switch (c.kind) {
        case Condition::Kind::Atom:
            if (c.atom.name != "=") out.insert(c.atom.name);
            break;
        case Condition::Kind::Not:
        case Condition::Kind::And:
            for (const auto& ch : c.children) {
                auto sub = names_in(ch);
                out.insert(sub.begin(), sub.end());
            }
            break;
        case Condition::Kind::Compare:
            for (const auto& s : c.sides) collect_names(s, out);
            break;
    }
    return out;
}

std::set<std::string> names_in(const Effect& e) {
    std::set<std::string> out;
    if (e.kind == Effect::Kind::And) {
        for (const auto& ch : e.children) {
            auto sub = names_in(ch);
            out.insert(sub.begin(), sub.end());
        }
        return out;
    }
    out.insert(e.atom.name);
    if (e.kind == Effect::Kind::Numeric) collect_names(e.value, out);
    return out;
}

Rational mean(std::int64_t total, std::size_t n) {
    return n == 0 ? Rational(0) : Rational(total, static_cast<std::int64_t>(n));
}

}  // namespace

ComponentVector complexity_components(const Domain& dom) {
    ComponentVector cv;
    const std::size_t n = dom.actions.size();
    cv.n_actions = Rational(static_cast<std::int64_t>(n));
    cv.n_types = Rational(static_cast<std::int64_t>(dom.types.size()));
    cv.n_predicates = Rational(static_cast<std::int64_t>(dom.predicates.size()));
    cv.n_functions = Rational(static_cast<std::int64_t>(dom.functions.size()));

    std::int64_t pre_total = 0;
    std::int64_t eff_total = 0;
    std::vector<std::set<std::string>> referenced(n);
    std::vector<std::set<std::string>> pre_names(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Action& a = dom.actions[i];
        pre_total += static_cast<std::int64_t>(conjuncts(a.precondition).size());
        eff_total += static_cast<std::int64_t>(conjuncts(a.effect).size());
        pre_names[i] = names_in(a.precondition);
        referenced[i] = pre_names[i];
        auto eff = names_in(a.effect);
        referenced[i].insert(eff.begin(), eff.end());
    }
    cv.avg_preconditions = mean(pre_total, n);
    cv.avg_effects = mean(eff_total, n);

    auto interdependency = [&](const std::vector<FluentDecl>& decls) {
        std::int64_t total = 0;
        for (const auto& d : decls) {
            for (const auto& r : referenced) total += r.count(d.name);
        }
        return mean(total, decls.size());
    };
    cv.interdependency_pred = interdependency(dom.predicates);
    cv.interdependency_func = interdependency(dom.functions);

    std::int64_t coupling = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (const Effect* e : conjuncts(dom.actions[i].effect)) {
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i && pre_names[j].count(e->atom.name)) {
                    ++coupling;
                    break;
                }
            }
        }
    }
    cv.action_coupling_total = Rational(coupling);
    cv.action_coupling = mean(coupling, n);
    return cv;
}

Rational complexity_score(const ComponentVector& cv, const Weights& w) {
    const auto c = cv.as_array();
    Rational sum;
    for (std::size_t i = 0; i < c.size(); ++i) sum += w.values[i] * c[i];
    return sum;
}

ComplexityClass classify(const Rational& score, const Rational& threshold) {
    return score <= threshold ? ComplexityClass::Simple : ComplexityClass::Complex;
}

ComplexityReport complexity_report(const Domain& dom, const Weights& w, const Rational& threshold) {
    ComplexityReport r;
    r.components = complexity_components(dom);
    r.score = complexity_score(r.components, w);
    r.cls = classify(r.score, threshold);
    return r;
}

}  // namespace pddlkit
