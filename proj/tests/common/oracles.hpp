#pragma once

// Reference implementations used to check the library from the outside.
// They are written against the documented semantics only and share no code
// with the components they check beyond the AST and state types.

#include <algorithm>
#include <cmath>
#include <deque>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "pddlkit/parser.hpp"
#include "pddlkit/retrieval.hpp"
#include "pddlkit/sexpr.hpp"
#include "pddlkit/validator.hpp"
#include "support.hpp"

namespace oracles {

struct DomainDir {
    std::filesystem::path domain;
    std::vector<std::filesystem::path> problems;
};

/// Every domain.pddl under the fixtures with its problem files.
inline std::vector<DomainDir> fixture_domains() {
    namespace fs = std::filesystem;
    std::vector<DomainDir> out;
    for (const auto& entry : fs::recursive_directory_iterator(testing_support::fixtures())) {
        if (entry.path().filename() != "domain.pddl") continue;
        DomainDir d{entry.path(), {}};
        const auto dir = entry.path().parent_path();
        if (fs::exists(dir / "problem.pddl")) d.problems.push_back(dir / "problem.pddl");
        if (fs::exists(dir / "problems")) {
            for (const auto& p : fs::directory_iterator(dir / "problems")) d.problems.push_back(p.path());
        }
        std::sort(d.problems.begin(), d.problems.end());
        out.push_back(std::move(d));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.domain < b.domain; });
    return out;
}

/// Hand-written simulator for the surveillance problem: every pair of the
/// three locations is connected, so fly only needs the UAV at its origin.
/// Returns the index of the first failing step, plan size when only the
/// goal fails, or nullopt for a valid plan.
inline std::optional<std::size_t> surveillance_oracle(const pddlkit::Plan& plan) {
    std::string pos = "base";
    std::set<std::string> photos;
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        const auto& s = plan.steps[i];
        if (s.action == "fly") {
            if (pos != s.args[0] || s.args[0] == s.args[1]) return i;
            pos = s.args[1];
        } else if (s.action == "take-photo") {
            if (pos != s.args[0]) return i;
            photos.insert(s.args[0]);
        }
    }
    if (photos.count("waypoint1") && photos.count("waypoint2") && pos == "base") return std::nullopt;
    return plan.steps.size();
}

/// Plain breadth-first search built only on the validator's step
/// semantics: every type-correct argument tuple of every action, with a
/// visited set. Returns the optimal plan length.
inline std::optional<std::size_t> bfs_length(const pddlkit::Domain& dom, const pddlkit::Problem& prob) {
    using namespace pddlkit;
    const TypeHierarchy types(dom.types);
    std::vector<TypedName> objects = dom.constants;
    objects.insert(objects.end(), prob.objects.begin(), prob.objects.end());
    std::vector<std::pair<const Action*, std::vector<std::string>>> ground;
    for (const auto& a : dom.actions) {
        std::vector<std::vector<std::string>> tuples = {{}};
        for (const auto& param : a.params) {
            std::vector<std::vector<std::string>> next;
            for (const auto& t : tuples) {
                for (const auto& o : objects) {
                    if (!types.is_subtype(o.type, param.type)) continue;
                    auto u = t;
                    u.push_back(o.name);
                    next.push_back(std::move(u));
                }
            }
            tuples = std::move(next);
        }
        for (auto& t : tuples) ground.emplace_back(&a, std::move(t));
    }
    struct Node {
        State s;
        std::size_t depth;
    };
    std::set<std::pair<std::set<Atom>, std::map<Atom, Rational>>> seen;
    std::deque<Node> open;
    open.push_back({initial_state(prob), 0});
    seen.insert({open.front().s.atoms, open.front().s.fluents});
    while (!open.empty()) {
        Node n = std::move(open.front());
        open.pop_front();
        if (holds(prob.goal, n.s, {})) return n.depth;
        for (const auto& [act, args] : ground) {
            try {
                if (!applicable(n.s, *act, args)) continue;
                State next = apply(n.s, *act, args);
                if (seen.insert({next.atoms, next.fluents}).second) open.push_back({std::move(next), n.depth + 1});
            } catch (const EvalError&) {
            }
        }
    }
    return std::nullopt;
}

/// Whole-symbol substitution over PDDL text.
inline std::string rename_symbols(const std::string& text, const std::map<std::string, std::string>& names) {
    std::string out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!pddlkit::is_symbol_char(text[i])) {
            out += text[i++];
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && pddlkit::is_symbol_char(text[j])) ++j;
        const std::string tok = text.substr(i, j - i);
        auto it = names.find(tok);
        out += it == names.end() ? tok : it->second;
        i = j;
    }
    return out;
}

/// Renames every predicate, function, action and variable of a domain.
inline pddlkit::Domain alpha_rename(const pddlkit::Domain& dom) {
    std::map<std::string, std::string> names;
    for (std::size_t i = 0; i < dom.predicates.size(); ++i) names[dom.predicates[i].name] = "zp" + std::to_string(i);
    for (std::size_t i = 0; i < dom.functions.size(); ++i) names[dom.functions[i].name] = "zf" + std::to_string(i);
    for (std::size_t i = 0; i < dom.actions.size(); ++i) names[dom.actions[i].name] = "za" + std::to_string(i);
    const std::string text = pddlkit::render_domain(dom);
    int v = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '?') continue;
        std::size_t j = i + 1;
        while (j < text.size() && pddlkit::is_symbol_char(text[j])) ++j;
        const std::string var = text.substr(i, j - i);
        if (!names.count(var)) names[var] = "?zv" + std::to_string(v++);
    }
    return testing_support::domain_from(rename_symbols(text, names));
}

/// Random cards over a few domains; about one in ten repeats an earlier
/// embedding exactly so ties are exercised.
inline pddlkit::Index random_index(std::mt19937& rng, std::size_t n, std::size_t dim, std::size_t domains) {
    std::normal_distribution<float> g;
    pddlkit::Index idx;
    idx.dimension = dim;
    idx.embedder = "random";
    for (std::size_t i = 0; i < n; ++i) {
        pddlkit::ActionCard c;
        c.domain_id = "d" + std::to_string(rng() % domains);
        c.action_name = "a" + std::to_string(i);
        if (i > 0 && rng() % 10 == 0) {
            c.embedding = idx.cards[rng() % i].embedding;
        } else {
            c.embedding.resize(dim);
            for (auto& x : c.embedding) x = g(rng);
        }
        idx.cards.push_back(std::move(c));
    }
    return idx;
}

/// Full scan: cosine in double, ordered by similarity, then domain id, then
/// action name, then card position.
inline std::vector<const pddlkit::ActionCard*> brute_force_top_k(const pddlkit::Index& idx, const pddlkit::Vector& q,
                                                                 std::size_t k,
                                                                 const std::set<std::string>& exclude) {
    struct Row {
        double sim;
        std::size_t i;
    };
    std::vector<Row> rows;
    for (std::size_t i = 0; i < idx.cards.size(); ++i) {
        const auto& c = idx.cards[i];
        if (exclude.count(c.domain_id) || idx.exclusion.count(c.domain_id)) continue;
        double dot = 0, na = 0, nb = 0;
        for (std::size_t j = 0; j < q.size(); ++j) {
            dot += static_cast<double>(c.embedding[j]) * q[j];
            na += static_cast<double>(c.embedding[j]) * c.embedding[j];
            nb += static_cast<double>(q[j]) * q[j];
        }
        const double den = std::sqrt(na) * std::sqrt(nb);
        rows.push_back({den == 0 ? 0.0 : dot / den, i});
    }
    std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
        if (a.sim != b.sim) return a.sim > b.sim;
        const auto& ca = idx.cards[a.i];
        const auto& cb = idx.cards[b.i];
        if (ca.domain_id != cb.domain_id) return ca.domain_id < cb.domain_id;
        return ca.action_name < cb.action_name;
    });
    std::vector<const pddlkit::ActionCard*> out;
    for (std::size_t i = 0; i < std::min(k, rows.size()); ++i) out.push_back(&idx.cards[rows[i].i]);
    return out;
}

/// Distinct placeholders grouped by kind: "[position1] ... [position2]"
/// gives {"position": 2}.
inline std::map<std::string, int> placeholder_kinds(const std::string& text) {
    std::set<std::string> distinct;
    for (std::size_t i = text.find('['); i != std::string::npos; i = text.find('[', i + 1)) {
        const auto close = text.find(']', i);
        if (close == std::string::npos) break;
        distinct.insert(text.substr(i + 1, close - i - 1));
    }
    std::map<std::string, int> out;
    for (const auto& p : distinct) {
        std::size_t cut = p.size();
        while (cut > 0 && std::isdigit(static_cast<unsigned char>(p[cut - 1]))) --cut;
        if (cut == 0 || cut == p.size()) continue;
        out[p.substr(0, cut)]++;
    }
    return out;
}

}  // namespace oracles
