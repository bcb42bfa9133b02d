#include "pddlkit/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "pddlkit/io.hpp"
#include "pddlkit/parser.hpp"
#include "pddlkit/validator.hpp"

namespace pddlkit {

using json = nlohmann::json;

namespace {

struct SolveOutcome {
    std::optional<SolveResult> result;
    std::string error;
};

/// Solves every present problem, in parallel when the engine allows it.
std::vector<SolveOutcome> solve_all(const Domain& dom, const std::vector<const Problem*>& problems,
                                    const PlanningEngine& engine, int jobs) {
    std::vector<SolveOutcome> out(problems.size());
    const int threads = engine.thread_safe() ? std::max(1, jobs) : 1;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(problems.size()); ++i) {
        if (!problems[i]) continue;
        try {
            out[i].result = engine.solve(dom, *problems[i]);
        } catch (const std::exception& e) {
            out[i].error = e.what();
        }
    }
    return out;
}

std::vector<const Problem*> pointers(const std::vector<Problem>& v) {
    std::vector<const Problem*> out;
    for (const auto& p : v) out.push_back(&p);
    return out;
}

std::size_t tier_slot(Tier t) { return static_cast<std::size_t>(t); }
std::size_t class_slot(ComplexityClass c) { return c == ComplexityClass::Simple ? 0 : 1; }

json rate_json(const Rate& r) { return {{"num", r.num}, {"den", r.den}, {"rate", r.value()}}; }

json metrics_json(const Metrics& m) {
    return {{"executability", rate_json(m.executability)},
            {"feasibility", rate_json(m.feasibility)},
            {"feasibility_among_solved", rate_json(m.feasibility_among_solved)},
            {"interpretability", rate_json(m.interpretability)},
            {"generation_failures", m.generation_failures}};
}

std::string fmt_rate(const Rate& r) {
    char buf[48];
    if (r.den == 0) {
        std::snprintf(buf, sizeof buf, "%zu/%zu    -", r.num, r.den);
    } else {
        std::snprintf(buf, sizeof buf, "%zu/%zu %5.1f%%", r.num, r.den, 100.0 * r.value());
    }
    return buf;
}

std::string pad(std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
}

}  // namespace

Rate executability(const Domain& gen_dom, const std::vector<Problem>& gen_problems, const PlanningEngine& engine,
                   int jobs) {
    if (gen_problems.empty()) throw EvaluationError("executability of an empty problem list");
    Rate r{0, gen_problems.size()};
    for (const auto& s : solve_all(gen_dom, pointers(gen_problems), engine, jobs)) {
        if (s.result && s.result->solved()) ++r.num;
    }
    return r;
}

Rate feasibility(const Domain& gen_dom, const std::vector<Problem>& gen_problems, const Domain& gt_dom,
                 const std::vector<Problem>& gt_problems, const PlanningEngine& engine, int jobs) {
    if (gen_problems.size() != gt_problems.size()) {
        throw EvaluationError("generated and ground-truth problem lists differ in length");
    }
    if (gen_problems.empty()) throw EvaluationError("feasibility of an empty problem list");
    Rate r{0, gen_problems.size()};
    const auto solved = solve_all(gen_dom, pointers(gen_problems), engine, jobs);
    for (std::size_t i = 0; i < solved.size(); ++i) {
        if (!solved[i].result || !solved[i].result->solved()) continue;
        if (validate_plan(gt_dom, gt_problems[i], solved[i].result->plan).valid()) ++r.num;
    }
    return r;
}

Rate interpretability(const Domain& gt_dom, const std::vector<Problem>& gt_problems, const std::vector<Plan>& gt_plans,
                      const Domain& gen_dom, const std::vector<Problem>& gen_problems,
                      std::vector<std::string>* warnings) {
    if (gt_plans.size() != gt_problems.size() || gen_problems.size() != gt_problems.size()) {
        throw EvaluationError("plan and problem lists differ in length");
    }
    Rate r;
    for (std::size_t i = 0; i < gt_plans.size(); ++i) {
        const auto check = validate_plan(gt_dom, gt_problems[i], gt_plans[i]);
        if (!check.valid()) {
            if (warnings) {
                warnings->push_back("ground-truth plan " + std::to_string(i + 1) + " excluded: " + check.reason);
            }
            continue;
        }
        ++r.den;
        if (validate_plan(gen_dom, gen_problems[i], gt_plans[i]).valid()) ++r.num;
    }
    if (r.den == 0) throw EvaluationError("no verified ground-truth plans");
    return r;
}

Metrics& Metrics::operator+=(const Metrics& o) {
    executability += o.executability;
    feasibility += o.feasibility;
    feasibility_among_solved += o.feasibility_among_solved;
    interpretability += o.interpretability;
    generation_failures += o.generation_failures;
    return *this;
}

Metrics DomainEvaluation::total() const {
    Metrics m;
    for (const auto& t : tiers) m += t;
    return m;
}

ErrorTable::Row ErrorTable::total_errors() const {
    Row r;
    for (const auto& [cat, row] : counts) {
        r.simple += row.simple;
        r.complex += row.complex;
    }
    return r;
}

ErrorTable tally_errors(const std::vector<ClassifiedTrace>& traces) {
    ErrorTable t;
    for (Category c : kAllCategories) t.counts[c];
    for (const auto& ct : traces) {
        const bool simple = ct.cls == ComplexityClass::Simple;
        auto bump = [simple](ErrorTable::Row& r, std::size_t n) { (simple ? r.simple : r.complex) += n; };
        for (const auto& a : ct.trace->actions) {
            bump(t.iterations, a.iterations.size());
            if (!a.iterations.empty()) bump(t.corrections, a.iterations.size() - 1);
            if (a.status == ActionTrace::Status::NeedsHuman) bump(t.needs_human, 1);
            for (const auto& it : a.iterations) {
                for (const auto& d : it.diagnostics) bump(t.counts[d.category], 1);
            }
        }
    }
    return t;
}

DomainEvaluation evaluate_domain(const ManifestEntry& gt, const GeneratedDomain& gen, const PlanningEngine& engine,
                                 const EvalOptions& opts) {
    if (gen.problems.size() != gt.problems.size()) {
        throw EvaluationError(gt.domain_id + ": " + std::to_string(gen.problems.size()) +
                              " generated problems for " + std::to_string(gt.problems.size()) + " manifest problems");
    }
    DomainEvaluation ev;
    ev.domain_id = gt.domain_id;
    ev.category = gt.category;
    const auto rep = complexity_report(gt.domain, opts.weights, opts.threshold);
    ev.score = rep.score;
    ev.cls = rep.cls;
    ev.domain_complete = gen.complete;

    std::vector<const Problem*> present;
    for (const auto& p : gen.problems) present.push_back(p ? &*p : nullptr);
    const auto solved = solve_all(gen.domain, present, engine, opts.jobs);

    for (std::size_t i = 0; i < gt.problems.size(); ++i) {
        const auto& cp = gt.problems[i];
        ProblemOutcome po;
        po.tier = cp.tier;
        po.index = cp.index;
        po.generated = gen.problems[i].has_value();
        Metrics& m = ev.tiers[tier_slot(cp.tier)];
        ++m.executability.den;
        ++m.feasibility.den;
        if (!po.generated) {
            po.solve_outcome = "not-generated";
            ++m.generation_failures;
        } else if (!solved[i].result) {
            po.solve_outcome = "error";
            po.note = solved[i].error;
            ev.warnings.push_back(cp.label() + ": engine error: " + solved[i].error);
        } else {
            const SolveResult& sr = *solved[i].result;
            po.solve_outcome = std::string(to_string(sr.outcome));
            if (sr.solved()) {
                po.solved = true;
                po.plan_length = sr.plan.size();
                ++m.executability.num;
                ++m.feasibility_among_solved.den;
                const auto v = validate_plan(gt.domain, cp.problem, sr.plan);
                po.feasible = v.valid();
                if (po.feasible) {
                    ++m.feasibility.num;
                    ++m.feasibility_among_solved.num;
                } else {
                    po.note = "plan fails on ground truth at step " + std::to_string(v.failed_step + 1) + ": " + v.reason;
                }
            } else if (!sr.stats.message.empty()) {
                po.note = sr.stats.message;
            }
        }
        if (cp.gt_plan) {
            const auto check = validate_plan(gt.domain, cp.problem, *cp.gt_plan);
            if (!check.valid()) {
                ev.warnings.push_back(cp.label() + ": ground-truth plan excluded: " + check.reason);
            } else {
                ++m.interpretability.den;
                bool ok = false;
                if (gen.problems[i]) {
                    const auto v = validate_plan(gen.domain, *gen.problems[i], *cp.gt_plan);
                    ok = v.valid();
                    if (!ok && po.note.empty()) {
                        po.note = "ground-truth plan fails in generated domain at step " +
                                  std::to_string(v.failed_step + 1) + ": " + v.reason;
                    }
                }
                po.interpretable = ok;
                if (ok) ++m.interpretability.num;
            }
        }
        ev.problems.push_back(std::move(po));
    }
    return ev;
}

Metrics EvaluationReport::class_total(ComplexityClass c) const {
    Metrics m;
    for (const auto& t : by_class[class_slot(c)]) m += t;
    return m;
}

Metrics EvaluationReport::overall() const {
    Metrics m = class_total(ComplexityClass::Simple);
    m += class_total(ComplexityClass::Complex);
    return m;
}

EvaluationReport evaluate_corpus(const std::vector<ManifestEntry>& entries,
                                 const std::map<std::string, GeneratedDomain>& generated, const PlanningEngine& engine,
                                 const EvalOptions& opts) {
    EvaluationReport rep;
    rep.engine = engine.name();
    std::vector<ClassifiedTrace> traces;
    for (const auto& e : entries) {
        auto it = generated.find(e.domain_id);
        if (it == generated.end()) throw EvaluationError("no generated domain for " + e.domain_id);
        auto ev = evaluate_domain(e, it->second, engine, opts);
        for (Tier t : kAllTiers) rep.by_class[class_slot(ev.cls)][tier_slot(t)] += ev.tiers[tier_slot(t)];
        if (it->second.trace) traces.push_back({&*it->second.trace, ev.cls});
        rep.domains.push_back(std::move(ev));
    }
    if (!traces.empty()) rep.errors = tally_errors(traces);
    return rep;
}

std::string EvaluationReport::to_json() const {
    json doc = {{"format", "pddlkit-evaluation"}, {"version", 1}, {"engine", engine}};
    doc["domains"] = json::array();
    for (const auto& d : domains) {
        json jd = {{"domain_id", d.domain_id},
                   {"category", d.category},
                   {"class", to_string(d.cls)},
                   {"score", d.score.to_string()},
                   {"domain_complete", d.domain_complete},
                   {"total", metrics_json(d.total())},
                   {"warnings", d.warnings}};
        for (Tier t : kAllTiers) jd["tiers"][std::string(to_string(t))] = metrics_json(d.tiers[tier_slot(t)]);
        jd["problems"] = json::array();
        for (const auto& p : d.problems) {
            json jp = {{"tier", to_string(p.tier)},
                       {"index", p.index + 1},
                       {"generated", p.generated},
                       {"solve", p.solve_outcome},
                       {"solved", p.solved},
                       {"plan_length", p.plan_length},
                       {"feasible", p.feasible},
                       {"note", p.note}};
            jp["interpretable"] = p.interpretable ? json(*p.interpretable) : json(nullptr);
            jd["problems"].push_back(std::move(jp));
        }
        doc["domains"].push_back(std::move(jd));
    }
    for (ComplexityClass c : {ComplexityClass::Simple, ComplexityClass::Complex}) {
        json jc;
        for (Tier t : kAllTiers) jc[std::string(to_string(t))] = metrics_json(by_class[class_slot(c)][tier_slot(t)]);
        jc["total"] = metrics_json(class_total(c));
        doc["aggregate"][std::string(to_string(c))] = jc;
    }
    doc["aggregate"]["total"] = metrics_json(overall());
    if (errors) {
        json je;
        auto row = [](const ErrorTable::Row& r) {
            return json{{"simple", r.simple}, {"complex", r.complex}, {"total", r.total()}};
        };
        for (const auto& [cat, r] : errors->counts) je["by_category"][std::string(to_string(cat))] = row(r);
        je["total_errors"] = row(errors->total_errors());
        je["iterations"] = row(errors->iterations);
        je["corrections"] = row(errors->corrections);
        je["needs_human"] = row(errors->needs_human);
        doc["errors"] = je;
    }
    return doc.dump(2) + "\n";
}

std::string EvaluationReport::to_table() const {
    std::ostringstream out;
    out << pad("domain", 22) << pad("class", 9) << pad("score", 9) << pad("tier", 8) << pad("executability", 17)
        << pad("feasibility", 17) << "interpretability\n";
    for (const auto& d : domains) {
        char score[32];
        std::snprintf(score, sizeof score, "%.2f", d.score.to_double());
        for (Tier t : kAllTiers) {
            const Metrics& m = d.tiers[tier_slot(t)];
            out << pad(d.domain_id, 22) << pad(std::string(to_string(d.cls)), 9) << pad(score, 9)
                << pad(std::string(to_string(t)), 8) << pad(fmt_rate(m.executability), 17)
                << pad(fmt_rate(m.feasibility), 17) << fmt_rate(m.interpretability) << "\n";
        }
    }
    out << "\n" << pad("aggregate", 40) << pad("executability", 17) << pad("feasibility", 17) << "interpretability\n";
    for (ComplexityClass c : {ComplexityClass::Simple, ComplexityClass::Complex}) {
        for (Tier t : kAllTiers) {
            const Metrics& m = by_class[class_slot(c)][tier_slot(t)];
            out << pad(std::string(to_string(c)) + " / " + std::string(to_string(t)), 40)
                << pad(fmt_rate(m.executability), 17) << pad(fmt_rate(m.feasibility), 17)
                << fmt_rate(m.interpretability) << "\n";
        }
    }
    const Metrics all = overall();
    out << pad("total", 40) << pad(fmt_rate(all.executability), 17) << pad(fmt_rate(all.feasibility), 17)
        << fmt_rate(all.interpretability) << "\n";
    if (all.generation_failures) out << "problems that failed to generate: " << all.generation_failures << "\n";

    if (errors) {
        out << "\n" << pad("error type", 20) << "S./C./T.\n";
        auto line = [&](const std::string& name, const ErrorTable::Row& r) {
            out << pad(name, 20) << r.simple << "/" << r.complex << "/" << r.total() << "\n";
        };
        for (const auto& [cat, r] : errors->counts) {
            std::string name(to_string(cat));
            std::replace(name.begin(), name.end(), '-', ' ');
            line(name, r);
        }
        line("total error count", errors->total_errors());
        line("iterations", errors->iterations);
        line("corrections", errors->corrections);
        line("needs human", errors->needs_human);
    }
    return out.str();
}

namespace {

const ManifestEntry& entry_for(const std::vector<ManifestEntry>& entries, const std::string& id) {
    for (const auto& e : entries) {
        if (e.domain_id == id) return e;
    }
    throw EvaluationError("unknown domain id " + id);
}

std::filesystem::path problem_path(const std::filesystem::path& dir, const CorpusProblem& cp) {
    return dir / "problems" / (cp.label() + ".pddl");
}

}  // namespace

void save_generated(const std::filesystem::path& dir, const std::string& domain_id, const GeneratedDomain& gen,
                    const std::vector<ManifestEntry>& entries) {
    const ManifestEntry& e = entry_for(entries, domain_id);
    const auto root = dir / domain_id;
    write_text_file(root / "domain.pddl", render_domain(gen.domain));
    for (std::size_t i = 0; i < e.problems.size(); ++i) {
        const auto path = problem_path(root, e.problems[i]);
        std::error_code ec;
        std::filesystem::remove(path, ec);
        if (i < gen.problems.size() && gen.problems[i]) write_text_file(path, render_problem(*gen.problems[i]));
    }
    if (gen.trace) write_text_file(root / "trace.json", gen.trace->to_json());
}

std::map<std::string, GeneratedDomain> load_generated(const std::filesystem::path& dir,
                                                      const std::vector<ManifestEntry>& entries,
                                                      std::vector<std::string>* warnings) {
    auto warn = [&](std::string w) {
        if (warnings) warnings->push_back(std::move(w));
    };
    std::map<std::string, GeneratedDomain> out;
    for (const auto& e : entries) {
        const auto root = dir / e.domain_id;
        GeneratedDomain g;
        g.domain.name = e.domain.name;
        bool have_domain = false;
        if (!std::filesystem::exists(root / "domain.pddl")) {
            warn(e.domain_id + ": no generated domain.pddl");
        } else {
            auto parsed = parse_domain(read_text_file(root / "domain.pddl"));
            if (parsed) {
                g.domain = std::move(*parsed.value);
                have_domain = true;
            } else {
                warn(e.domain_id + ": generated domain does not parse: " + parsed.diagnostics.front().message);
            }
        }
        if (std::filesystem::exists(root / "trace.json")) {
            try {
                g.trace = GenerationTrace::from_json(read_text_file(root / "trace.json"));
                g.complete = g.trace->complete();
            } catch (const std::exception& ex) {
                warn(e.domain_id + ": unreadable trace.json: " + ex.what());
            }
        }
        if (!have_domain) g.complete = false;
        for (const auto& cp : e.problems) {
            const auto path = problem_path(root, cp);
            if (!std::filesystem::exists(path)) {
                g.problems.push_back(std::nullopt);
                continue;
            }
            auto parsed = parse_problem(read_text_file(path), g.domain);
            if (parsed) {
                g.problems.push_back(std::move(*parsed.value));
            } else {
                warn(e.domain_id + "/" + cp.label() + ": generated problem does not parse");
                g.problems.push_back(std::nullopt);
            }
        }
        out.emplace(e.domain_id, std::move(g));
    }
    return out;
}

}  // namespace pddlkit
