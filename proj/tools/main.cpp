// pddlkit command-line front end.
//
// Exit codes: 0 success, 1 negative result (diagnostics, invalid plan, no
// plan, corpus integrity failure), 2 usage or configuration error, 3 input
// or runtime error, 4 generation or pipeline finished only partially.

#include <omp.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pddlkit/checker.hpp"
#include "pddlkit/complexity.hpp"
#include "pddlkit/config.hpp"
#include "pddlkit/corpus.hpp"
#include "pddlkit/eval.hpp"
#include "pddlkit/generation.hpp"
#include "pddlkit/io.hpp"
#include "pddlkit/parser.hpp"
#include "pddlkit/planner.hpp"
#include "pddlkit/retrieval.hpp"
#include "pddlkit/validator.hpp"

using namespace pddlkit;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kNegative = 1, kUsage = 2, kRuntime = 3, kPartial = 4 };

struct Globals {
    std::string config_path;
    bool json = false;
    std::optional<int> jobs;
    std::string call_log;
    std::string backend;
    std::string mock_script;
    std::string embedder;
    std::vector<std::string> overrides;  // key=value
};

struct Context {
    ToolkitConfig cfg;
    bool json = false;
    std::unique_ptr<std::ofstream> log_stream;
    std::shared_ptr<CallLog> log;
};

/// Reported as exit code 3 with the message on stderr.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Context make_context(const Globals& g, bool needs_credentials) {
    Context ctx;
    if (!g.config_path.empty()) ctx.cfg.apply_file(g.config_path);
    if (!g.backend.empty()) ctx.cfg.set("backend", g.backend);
    if (!g.mock_script.empty()) ctx.cfg.set("mock.script", g.mock_script);
    if (!g.embedder.empty()) ctx.cfg.set("embedding.provider", g.embedder);
    if (g.jobs) ctx.cfg.set("jobs", std::to_string(*g.jobs));
    if (!g.call_log.empty()) ctx.cfg.set("call_log", g.call_log);
    for (const auto& kv : g.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got " + kv);
        ctx.cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (needs_credentials) ctx.cfg.resolve_credentials();
    ctx.json = g.json;
    omp_set_num_threads(ctx.cfg.jobs);
    if (!ctx.cfg.call_log.empty()) {
        fs::path p(ctx.cfg.call_log);
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        ctx.log_stream = std::make_unique<std::ofstream>(p, std::ios::app);
        if (!*ctx.log_stream) throw ConfigError("cannot open call log " + ctx.cfg.call_log);
        ctx.log = std::make_shared<CallLog>(*ctx.log_stream);
    }
    return ctx;
}

fs::path resolve_manifest(const fs::path& p) {
    if (fs::is_directory(p)) {
        if (fs::exists(p / "manifest.json")) return p / "manifest.json";
        if (fs::exists(p / "corpus" / "manifest.json")) return p / "corpus" / "manifest.json";
        throw InputError("no manifest.json in " + p.string());
    }
    return p;
}

Domain load_domain(const fs::path& path) {
    auto parsed = parse_domain(read_text_file(path));
    if (!parsed) {
        const auto& d = parsed.diagnostics.front();
        throw InputError(path.string() + ":" + std::to_string(d.location.line) + ":" +
                         std::to_string(d.location.column) + ": " + d.message);
    }
    return std::move(*parsed.value);
}

Problem load_problem(const fs::path& path, const Domain& dom) {
    auto parsed = parse_problem(read_text_file(path), dom);
    if (!parsed) {
        const auto& d = parsed.diagnostics.front();
        throw InputError(path.string() + ":" + std::to_string(d.location.line) + ":" +
                         std::to_string(d.location.column) + ": " + d.message);
    }
    return std::move(*parsed.value);
}

/// Records each call of an external solver in the call log.
class LoggedEngine : public PlanningEngine {
public:
    LoggedEngine(std::unique_ptr<PlanningEngine> inner, std::shared_ptr<CallLog> log)
        : inner_(std::move(inner)), log_(std::move(log)) {}

    SolveResult solve(const Domain& dom, const Problem& prob) const override {
        const auto t0 = std::chrono::steady_clock::now();
        json rec = {{"kind", "solver"}, {"engine", inner_->name()}, {"domain", dom.name}, {"problem", prob.name}};
        try {
            auto r = inner_->solve(dom, prob);
            rec["outcome"] = std::string(to_string(r.outcome));
            rec["plan_length"] = r.plan.size();
            rec["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            log_->record(rec.dump());
            return r;
        } catch (const std::exception& e) {
            rec["error"] = e.what();
            log_->record(rec.dump());
            throw;
        }
    }
    std::string name() const override { return inner_->name(); }
    bool thread_safe() const override { return inner_->thread_safe(); }

private:
    std::unique_ptr<PlanningEngine> inner_;
    std::shared_ptr<CallLog> log_;
};

std::unique_ptr<PlanningEngine> make_engine(const Context& ctx) {
    if (ctx.cfg.solver_engine == "external") {
        std::unique_ptr<PlanningEngine> e = std::make_unique<ExternalEngine>(ctx.cfg.solver);
        if (ctx.log) return std::make_unique<LoggedEngine>(std::move(e), ctx.log);
        return e;
    }
    return std::make_unique<BuiltinEngine>(ctx.cfg.limits);
}

std::unique_ptr<Embedder> make_embedder(const Context& ctx) {
    if (ctx.cfg.embedding_provider == "http") return std::make_unique<HttpEmbedder>(ctx.cfg.embedding, ctx.log);
    return std::make_unique<HashingEmbedder>(ctx.cfg.embedding.dimension);
}

std::unique_ptr<LLMBackend> make_backend(const Context& ctx, const std::vector<ManifestEntry>& entries) {
    if (ctx.cfg.backend == "http") return std::make_unique<HttpBackend>(ctx.cfg.llm, ctx.log);
    if (!ctx.cfg.mock_script.empty()) {
        return std::unique_ptr<LLMBackend>(new ScriptedBackend(ScriptedBackend::from_file(ctx.cfg.mock_script, ctx.log)));
    }
    return std::unique_ptr<LLMBackend>(new ScriptedBackend(reference_backend(entries, ctx.log)));
}

json diagnostic_json(const Diagnostic& d, const std::string& file) {
    return {{"file", file},
            {"category", to_string(d.category)},
            {"code", d.code},
            {"line", d.location.line},
            {"column", d.location.column},
            {"message", d.message},
            {"suggestion", d.suggestion}};
}

void print_diagnostics(const Context& ctx, const std::vector<Diagnostic>& diags, const std::string& file) {
    for (const auto& d : diags) {
        if (ctx.json) {
            std::cout << diagnostic_json(d, file).dump() << "\n";
        } else {
            std::cout << file << ":" << d.location.line << ":" << d.location.column << ": " << to_string(d.category)
                      << ": " << d.message;
            if (!d.suggestion.empty()) std::cout << " " << d.suggestion;
            std::cout << "\n";
        }
    }
}

// ---- check --------------------------------------------------------------

struct CheckArgs {
    std::string domain;
    std::string ext;
    std::string problem;
};

int run_check(const Context& ctx, const CheckArgs& a) {
    const std::string text = read_text_file(a.domain);
    auto r = read_domain(text);
    std::vector<Diagnostic> diags = r.diagnostics;
    if (r.value && diags.empty()) {
        Extern ext = Extern::from_domain(*r.value);
        if (!a.ext.empty()) {
            auto pe = Extern::parse(read_text_file(a.ext));
            if (!pe) {
                print_diagnostics(ctx, pe.diagnostics, a.ext);
                return kNegative;
            }
            ext = *pe.value;
        }
        diags = check_domain(*r.value, ext);
    }
    print_diagnostics(ctx, diags, a.domain);
    bool bad = !diags.empty();
    if (!bad && !a.problem.empty()) {
        auto p = parse_problem(read_text_file(a.problem), *r.value);
        print_diagnostics(ctx, p.diagnostics, a.problem);
        bad = !p.ok();
    }
    if (!ctx.json && !bad) std::cout << "ok\n";
    return bad ? kNegative : kOk;
}

// ---- complexity ---------------------------------------------------------

struct ComplexityArgs {
    std::string domain;
    std::string weights;
    std::string threshold;
};

int run_complexity(Context& ctx, const ComplexityArgs& a) {
    if (!a.weights.empty() && a.weights != "unit") {
        auto w = Weights::parse(read_text_file(a.weights));
        if (!w) {
            for (const auto& d : w.diagnostics) {
                std::cerr << a.weights << ":" << d.location.line << ": " << d.message << "\n";
            }
            return kUsage;
        }
        ctx.cfg.weights = *w.value;
    } else if (a.weights == "unit") {
        ctx.cfg.weights = Weights::unit();
    }
    if (!a.threshold.empty()) ctx.cfg.set("complexity.threshold", a.threshold);
    const Domain dom = load_domain(a.domain);
    const auto rep = complexity_report(dom, ctx.cfg.weights, ctx.cfg.threshold);
    const auto values = rep.components.as_array();
    const auto& names = component_names();
    if (ctx.json) {
        json j = {{"domain", dom.name},
                  {"score", rep.score.to_string()},
                  {"score_value", rep.score.to_double()},
                  {"threshold", ctx.cfg.threshold.to_string()},
                  {"class", to_string(rep.cls)},
                  {"action_coupling_total", rep.components.action_coupling_total.to_string()}};
        for (std::size_t i = 0; i < values.size(); ++i) {
            j["components"][std::string(names[i])] = {{"value", values[i].to_string()},
                                                     {"weight", ctx.cfg.weights.values[i].to_string()}};
        }
        std::cout << j.dump(2) << "\n";
        return kOk;
    }
    std::printf("%-22s %12s %8s\n", "component", "value", "weight");
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::printf("%-22s %12.4f %8s\n", std::string(names[i]).c_str(), values[i].to_double(),
                    ctx.cfg.weights.values[i].to_string().c_str());
    }
    std::printf("%-22s %12s\n", "(coupling total)", rep.components.action_coupling_total.to_string().c_str());
    std::printf("score %s (%.4f), threshold %s: %s\n", rep.score.to_string().c_str(), rep.score.to_double(),
                ctx.cfg.threshold.to_string().c_str(), std::string(to_string(rep.cls)).c_str());
    return kOk;
}

// ---- validate / solve ---------------------------------------------------

struct ValidateArgs {
    std::string domain, problem, plan;
    bool steps_only = false;
};

int run_validate(const Context& ctx, const ValidateArgs& a) {
    const Domain dom = load_domain(a.domain);
    const Problem prob = load_problem(a.problem, dom);
    auto plan = parse_plan(read_text_file(a.plan));
    if (!plan) {
        const auto& d = plan.diagnostics.front();
        throw InputError(a.plan + ":" + std::to_string(d.location.line) + ": " + d.message);
    }
    const auto rep = validate_plan(dom, prob, *plan.value, {a.steps_only});
    if (ctx.json) {
        json j = {{"valid", rep.valid()}, {"goal_satisfied", rep.goal_satisfied}, {"steps", plan.value->size()}};
        if (!rep.valid()) {
            j["failed_step"] = rep.failed_step + 1;
            j["reason"] = rep.reason;
        }
        j["trace"] = json::array();
        for (const auto& t : rep.trace) {
            j["trace"].push_back({{"step", t.step + 1}, {"applicable", t.applicable}, {"state", t.state_summary}});
        }
        std::cout << j.dump(2) << "\n";
    } else {
        for (const auto& t : rep.trace) {
            std::cout << "step " << t.step + 1 << ": " << plan.value->steps[t.step].to_string() << " "
                      << (t.applicable ? "applied" : "not applicable") << " [" << t.state_summary << "]\n";
        }
        if (rep.valid()) {
            std::cout << "Valid" << (a.steps_only ? " (steps only)" : "") << "\n";
        } else {
            std::cout << "Failed at step " << rep.failed_step + 1 << ": " << rep.reason << "\n";
        }
    }
    return rep.valid() ? kOk : kNegative;
}

struct SolveArgs {
    std::string domain, problem, out, engine;
    std::optional<std::size_t> max_expanded, max_length;
    std::optional<double> time_limit;
};

int run_solve(Context& ctx, const SolveArgs& a) {
    if (!a.engine.empty()) ctx.cfg.set("solver.engine", a.engine);
    if (a.max_expanded) ctx.cfg.set("search.max_expanded", std::to_string(*a.max_expanded));
    if (a.max_length) ctx.cfg.set("search.max_plan_length", std::to_string(*a.max_length));
    if (a.time_limit) ctx.cfg.set("search.wall_clock", std::to_string(*a.time_limit));
    if (ctx.cfg.solver_engine == "external" && ctx.cfg.solver.command_template.empty()) {
        throw ConfigError("solver.engine is external but solver.command is empty");
    }
    const Domain dom = load_domain(a.domain);
    const Problem prob = load_problem(a.problem, dom);
    const auto engine = make_engine(ctx);
    const auto r = engine->solve(dom, prob);
    if (r.solved() && !a.out.empty()) write_text_file(a.out, render_plan(r.plan));
    if (ctx.json) {
        json j = {{"outcome", to_string(r.outcome)},
                  {"engine", engine->name()},
                  {"expanded", r.stats.expanded},
                  {"generated", r.stats.generated},
                  {"seconds", r.stats.duration.count()},
                  {"message", r.stats.message}};
        j["plan"] = json::array();
        for (const auto& s : r.plan.steps) j["plan"].push_back(s.to_string());
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "; " << to_string(r.outcome) << ", " << r.stats.expanded << " expanded, "
                  << r.stats.duration.count() << " s\n";
        if (!r.stats.message.empty()) std::cout << "; " << r.stats.message << "\n";
        if (r.solved()) std::cout << render_plan(r.plan);
    }
    return r.solved() ? kOk : kNegative;
}

// ---- index / retrieve ---------------------------------------------------

struct IndexArgs {
    std::string manifest, out;
};

int run_index(const Context& ctx, const IndexArgs& a) {
    const auto entries = load_manifest(resolve_manifest(a.manifest));
    const auto embedder = make_embedder(ctx);
    std::unique_ptr<LLMBackend> abs_backend;
    if (ctx.cfg.abstraction == "llm") abs_backend = make_backend(ctx, entries);
    VerbLexicon lex;
    std::vector<std::string> warnings;
    const Index idx = build_index(corpus_card_sources(entries), *embedder, lex, abs_backend.get(), &warnings,
                                  ctx.cfg.jobs);
    idx.save(a.out);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    if (ctx.json) {
        std::cout << json{{"index", a.out},
                          {"cards", idx.cards.size()},
                          {"dimension", idx.dimension},
                          {"embedder", idx.embedder},
                          {"verbs", lex.verbs},
                          {"warnings", warnings}}
                         .dump(2)
                  << "\n";
    } else {
        std::cout << "wrote " << idx.cards.size() << " cards (" << idx.embedder << ", dim " << idx.dimension
                  << ") to " << a.out << "\n";
    }
    return kOk;
}

struct RetrieveArgs {
    std::string index, description, description_file;
    std::vector<std::string> exclude;
    std::vector<std::string> vocabulary;
    std::optional<std::size_t> k;
    bool rerank = false;
};

int run_retrieve(const Context& ctx, const RetrieveArgs& a) {
    const Index idx = Index::load(a.index);
    std::string desc = a.description;
    if (!a.description_file.empty()) desc = read_text_file(a.description_file);
    if (desc.empty()) throw ConfigError("retrieve needs --description or --description-file");
    const auto embedder = make_embedder(ctx);
    if (embedder->name() != idx.embedder) {
        std::cerr << "warning: index was built with " << idx.embedder << ", querying with " << embedder->name() << "\n";
    }
    std::unique_ptr<LLMBackend> backend;
    if (a.rerank || ctx.cfg.abstraction == "llm") backend = make_backend(ctx, {});
    const auto abs = abstract_description(desc, VerbLexicon{}, a.vocabulary,
                                          ctx.cfg.abstraction == "llm" ? backend.get() : nullptr);
    const std::size_t k = a.k.value_or(ctx.cfg.retrieval_k);
    const std::set<std::string> exclude(a.exclude.begin(), a.exclude.end());
    const auto hits = query_coarse(idx, *embedder, abs.text, k, exclude);
    std::optional<RerankResult> rr;
    if (a.rerank && !hits.empty()) rr = rerank_fine(hits, desc, *backend);
    for (const auto& w : abs.warnings) std::cerr << "warning: " << w << "\n";
    if (rr && !rr->warning.empty()) std::cerr << "warning: " << rr->warning << "\n";
    if (ctx.json) {
        json j = {{"abstracted", abs.text}, {"candidates", json::array()}};
        for (const auto& h : hits) {
            j["candidates"].push_back({{"domain_id", h.card->domain_id},
                                       {"action", h.card->action_name},
                                       {"similarity", h.similarity},
                                       {"description", h.card->description}});
        }
        if (rr) j["chosen"] = rr->chosen;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "abstracted: " << abs.text << "\n";
        for (std::size_t i = 0; i < hits.size(); ++i) {
            std::printf("%s%2zu. %.4f %s/%s\n", rr && rr->chosen == i ? "*" : " ", i + 1, hits[i].similarity,
                        hits[i].card->domain_id.c_str(), hits[i].card->action_name.c_str());
        }
    }
    return kOk;
}

// ---- generate / evaluate / pipeline ------------------------------------

const ManifestEntry& find_entry(const std::vector<ManifestEntry>& entries, const std::string& id) {
    for (const auto& e : entries) {
        if (e.domain_id == id) return e;
    }
    throw InputError("no domain `" + id + "` in the manifest");
}

struct DomainRun {
    std::string domain_id;
    std::string generation = "ok";  // ok | partial | failed
    std::string problems = "skipped";  // ok | partial | failed | skipped
    std::size_t problems_generated = 0;
    std::vector<std::string> errors;
    GeneratedDomain result;
};

/// Generates one domain and, when asked, its problems. Never throws for
/// model-side failures; they are recorded in the returned status.
DomainRun generate_one(const ManifestEntry& e, const std::vector<ManifestEntry>&, LLMBackend& backend,
                       const GenerationOptions& opts, Preset preset, bool with_problems) {
    DomainRun run;
    run.domain_id = e.domain_id;
    run.result.domain.name = e.domain.name;
    try {
        auto dg = generate_domain(generation_input(e), preset, backend, opts);
        run.result.domain = std::move(dg.domain);
        run.result.complete = dg.complete();
        run.result.trace = std::move(dg.trace);
        if (!run.result.complete) run.generation = "partial";
    } catch (const std::exception& ex) {
        run.generation = "failed";
        run.result.complete = false;
        run.errors.push_back(std::string("generation: ") + ex.what());
    }
    run.result.problems.assign(e.problems.size(), std::nullopt);
    if (!with_problems) return run;
    for (std::size_t i = 0; i < e.problems.size(); ++i) {
        try {
            run.result.problems[i] = generate_problem(run.result.domain, e.problems[i].text, backend, opts.params);
            ++run.problems_generated;
        } catch (const std::exception& ex) {
            run.errors.push_back(e.problems[i].label() + ": " + ex.what());
        }
    }
    run.problems = run.problems_generated == e.problems.size() ? "ok"
                   : run.problems_generated == 0              ? "failed"
                                                              : "partial";
    return run;
}

struct GenerationSetup {
    std::unique_ptr<LLMBackend> backend;
    std::unique_ptr<Embedder> embedder;
    std::optional<Index> index;
    GenerationOptions opts;
};

void prepare_generation(const Context& ctx, const std::vector<ManifestEntry>& entries, const std::string& index_file,
                        GenerationSetup& s, const fs::path& save_index_to) {
    s.backend = make_backend(ctx, entries);
    s.opts.max_iter = ctx.cfg.max_iter;
    s.opts.params = ctx.cfg.params;
    s.opts.coarse_k = ctx.cfg.retrieval_k;
    if (!uses_retrieval(ctx.cfg.preset)) return;
    s.embedder = make_embedder(ctx);
    if (!index_file.empty()) {
        s.index = Index::load(index_file);
    } else {
        VerbLexicon lex;
        std::vector<std::string> warnings;
        s.index = build_index(corpus_card_sources(entries), *s.embedder, lex,
                              ctx.cfg.abstraction == "llm" ? s.backend.get() : nullptr, &warnings, ctx.cfg.jobs);
        for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
        if (!save_index_to.empty()) s.index->save(save_index_to);
    }
    s.opts.index = &*s.index;
    s.opts.embedder = s.embedder.get();
    if (ctx.cfg.abstraction == "llm") s.opts.abstraction_backend = s.backend.get();
}

json run_json(const DomainRun& r) {
    json j = {{"domain_id", r.domain_id},
              {"generation", r.generation},
              {"problems", r.problems},
              {"problems_generated", r.problems_generated},
              {"errors", r.errors}};
    if (r.result.trace) {
        j["iterations"] = r.result.trace->total_iterations();
        std::vector<std::string> needs_human;
        for (const auto& a : r.result.trace->actions) {
            if (a.status == ActionTrace::Status::NeedsHuman) needs_human.push_back(a.action_name);
        }
        j["needs_human"] = needs_human;
    }
    return j;
}

struct GenerateArgs {
    std::string manifest, domain, preset, out = "generated", trace, index;
    bool with_problems = false;
    std::optional<std::size_t> max_iter;
};

int run_generate(Context& ctx, const GenerateArgs& a) {
    const auto entries = load_manifest(resolve_manifest(a.manifest));
    const ManifestEntry& e = find_entry(entries, a.domain);
    GenerationSetup s;
    prepare_generation(ctx, entries, a.index, s, {});
    DomainRun run = generate_one(e, entries, *s.backend, s.opts, ctx.cfg.preset, a.with_problems);
    save_generated(a.out, e.domain_id, run.result, entries);
    if (!a.trace.empty() && run.result.trace) write_text_file(a.trace, run.result.trace->to_json());
    if (ctx.json) {
        std::cout << run_json(run).dump(2) << "\n";
    } else {
        if (run.result.trace) {
            for (const auto& act : run.result.trace->actions) {
                std::cout << act.action_name << ": " << to_string(act.status) << " after " << act.iterations.size()
                          << " attempt(s)\n";
            }
        }
        for (const auto& err : run.errors) std::cout << "error: " << err << "\n";
        std::cout << "wrote " << (fs::path(a.out) / e.domain_id).string() << "\n";
    }
    if (run.generation == "failed") return kRuntime;
    const bool partial = run.generation != "ok" || (a.with_problems && run.problems != "ok");
    return partial ? kPartial : kOk;
}

struct EvaluateArgs {
    std::string manifest, generated, report, table;
};

int run_evaluate(const Context& ctx, const EvaluateArgs& a) {
    const auto entries = load_manifest(resolve_manifest(a.manifest));
    std::vector<std::string> warnings;
    const auto gen = load_generated(a.generated, entries, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    const auto engine = make_engine(ctx);
    EvalOptions opts{ctx.cfg.weights, ctx.cfg.threshold, ctx.cfg.jobs};
    const auto rep = evaluate_corpus(entries, gen, *engine, opts);
    if (!a.report.empty()) write_text_file(a.report, rep.to_json());
    if (!a.table.empty()) write_text_file(a.table, rep.to_table());
    std::cout << (ctx.json ? rep.to_json() : rep.to_table());
    return kOk;
}

struct PipelineArgs {
    std::string manifest, out = "pipeline-out", index;
    bool keep_going = true;
};

int run_pipeline(Context& ctx, const PipelineArgs& a) {
    json summary = {{"preset", to_string(ctx.cfg.preset)}, {"backend", ctx.cfg.backend}, {"stages", json::object()}};
    const fs::path out(a.out);
    std::vector<ManifestEntry> entries;
    try {
        entries = load_manifest(resolve_manifest(a.manifest));
        summary["stages"]["manifest"] = {{"status", "ok"}, {"domains", entries.size()}};
    } catch (const std::exception& ex) {
        summary["stages"]["manifest"] = {{"status", "failed"}, {"error", ex.what()}};
        std::cout << summary.dump(2) << "\n";
        return kRuntime;
    }

    GenerationSetup s;
    try {
        prepare_generation(ctx, entries, a.index, s, uses_retrieval(ctx.cfg.preset) ? out / "index.json" : fs::path{});
        summary["stages"]["index"] = {{"status", s.index ? "ok" : "skipped"},
                                      {"cards", s.index ? s.index->cards.size() : 0}};
    } catch (const std::exception& ex) {
        summary["stages"]["index"] = {{"status", "failed"}, {"error", ex.what()}};
        write_text_file(out / "summary.json", summary.dump(2) + "\n");
        std::cout << summary.dump(2) << "\n";
        return kRuntime;
    }

    std::vector<DomainRun> runs(entries.size());
    const int n = static_cast<int>(entries.size());
#pragma omp parallel for schedule(dynamic) num_threads(ctx.cfg.jobs)
    for (int i = 0; i < n; ++i) {
        runs[i] = generate_one(entries[i], entries, *s.backend, s.opts, ctx.cfg.preset, true);
    }

    bool partial = false;
    std::map<std::string, GeneratedDomain> generated;
    json gen_stage = {{"status", "ok"}, {"domains", json::array()}};
    json prob_stage = {{"status", "ok"}};
    std::size_t problems_ok = 0, problems_total = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        auto& r = runs[i];
        save_generated(out / "generated", r.domain_id, r.result, entries);
        gen_stage["domains"].push_back(run_json(r));
        if (r.generation != "ok") {
            gen_stage["status"] = "partial";
            partial = true;
        }
        problems_ok += r.problems_generated;
        problems_total += entries[i].problems.size();
        generated.emplace(r.domain_id, std::move(r.result));
    }
    prob_stage["generated"] = problems_ok;
    prob_stage["total"] = problems_total;
    if (problems_ok != problems_total) {
        prob_stage["status"] = problems_ok == 0 ? "failed" : "partial";
        partial = true;
    }
    summary["stages"]["generate"] = gen_stage;
    summary["stages"]["problems"] = prob_stage;

    int code = partial ? kPartial : kOk;
    try {
        const auto engine = make_engine(ctx);
        EvalOptions opts{ctx.cfg.weights, ctx.cfg.threshold, ctx.cfg.jobs};
        const auto rep = evaluate_corpus(entries, generated, *engine, opts);
        write_text_file(out / "report.json", rep.to_json());
        write_text_file(out / "report.txt", rep.to_table());
        const Metrics m = rep.overall();
        summary["stages"]["evaluate"] = {{"status", "ok"},
                                         {"report", (out / "report.json").string()},
                                         {"executability", {m.executability.num, m.executability.den}},
                                         {"feasibility", {m.feasibility.num, m.feasibility.den}},
                                         {"interpretability", {m.interpretability.num, m.interpretability.den}}};
        if (!ctx.json) std::cout << rep.to_table() << "\n";
    } catch (const std::exception& ex) {
        summary["stages"]["evaluate"] = {{"status", "failed"}, {"error", ex.what()}};
        code = kRuntime;
    }
    summary["exit_code"] = code;
    write_text_file(out / "summary.json", summary.dump(2) + "\n");
    if (ctx.json) {
        std::cout << summary.dump(2) << "\n";
    } else {
        for (const auto& [stage, st] : summary["stages"].items()) {
            std::cout << stage << ": " << st["status"].get<std::string>() << "\n";
        }
    }
    return code;
}

// ---- corpus validate ----------------------------------------------------

int run_corpus_validate(const Context& ctx, const std::string& manifest) {
    std::vector<ManifestEntry> entries;
    try {
        entries = load_manifest(resolve_manifest(manifest));
    } catch (const CorpusError& ex) {
        if (ctx.json) {
            std::cout << json{{"valid", false}, {"error", ex.what()}}.dump(2) << "\n";
        } else {
            std::cout << "invalid: " << ex.what() << "\n";
        }
        return kNegative;
    }
    json j = {{"valid", true}, {"domains", json::array()}};
    for (const auto& e : entries) {
        const auto rep = complexity_report(e.domain, ctx.cfg.weights, ctx.cfg.threshold);
        std::size_t plans = 0;
        for (const auto& p : e.problems) plans += p.gt_plan.has_value();
        j["domains"].push_back({{"id", e.domain_id},
                                {"category", e.category},
                                {"actions", e.domain.actions.size()},
                                {"problems", e.problems.size()},
                                {"plans", plans},
                                {"score", rep.score.to_string()},
                                {"class", to_string(rep.cls)}});
        if (!ctx.json) {
            std::printf("%-22s %-20s %zu actions, %zu problems, %zu verified plans, score %.2f (%s)\n",
                        e.domain_id.c_str(), e.category.c_str(), e.domain.actions.size(), e.problems.size(), plans,
                        rep.score.to_double(), std::string(to_string(rep.cls)).c_str());
        }
    }
    if (ctx.json) std::cout << j.dump(2) << "\n";
    else std::cout << "ok: " << entries.size() << " domains\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pddlkit: numeric PDDL checking, planning, retrieval-assisted generation and evaluation"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config_path, "Configuration file (key = value)")->check(CLI::ExistingFile);
    app.add_flag("--json", g.json, "Machine-readable output");
    app.add_option("--jobs,-j", g.jobs, "Upper bound on worker threads")->check(CLI::PositiveNumber);
    app.add_option("--call-log", g.call_log, "Append a JSON line per model, embedding or solver call");
    app.add_option("--backend", g.backend, "Model backend")->check(CLI::IsMember({"mock", "http"}));
    app.add_option("--mock-script", g.mock_script, "Scripted responses for the mock backend")
        ->check(CLI::ExistingFile);
    app.add_option("--embedder", g.embedder, "Embedding provider")->check(CLI::IsMember({"hash", "http"}));
    app.add_option("--set", g.overrides, "Override one configuration key (key=value)");
    bool print_template = false;
    app.add_flag("--print-config-template", print_template, "Print a commented configuration file and exit");

    CheckArgs check;
    auto* c_check = app.add_subcommand("check", "Lint a domain (and optionally a problem)");
    c_check->add_option("domain", check.domain, "Domain file")->required()->check(CLI::ExistingFile);
    c_check->add_option("--extern", check.ext, "Extern file with types, requirements and constants")
        ->check(CLI::ExistingFile);
    c_check->add_option("--problem", check.problem, "Problem file to check against the domain")
        ->check(CLI::ExistingFile);

    ComplexityArgs cx;
    auto* c_cx = app.add_subcommand("complexity", "Complexity components, score and class of a domain");
    c_cx->add_option("domain", cx.domain, "Domain file")->required()->check(CLI::ExistingFile);
    c_cx->add_option("--weights", cx.weights, "Weights file (component = value) or `unit`");
    c_cx->add_option("--threshold", cx.threshold, "Simple/complex threshold");

    ValidateArgs va;
    auto* c_va = app.add_subcommand("validate", "Replay a plan and report the first failing step");
    c_va->add_option("domain", va.domain)->required()->check(CLI::ExistingFile);
    c_va->add_option("problem", va.problem)->required()->check(CLI::ExistingFile);
    c_va->add_option("plan", va.plan)->required()->check(CLI::ExistingFile);
    c_va->add_flag("--steps-only", va.steps_only, "Only check that every step applies");

    SolveArgs so;
    auto* c_so = app.add_subcommand("solve", "Find a plan");
    c_so->add_option("domain", so.domain)->required()->check(CLI::ExistingFile);
    c_so->add_option("problem", so.problem)->required()->check(CLI::ExistingFile);
    c_so->add_option("--engine", so.engine)->check(CLI::IsMember({"builtin", "external"}));
    c_so->add_option("--out,-o", so.out, "Write the plan to this file");
    c_so->add_option("--max-expanded", so.max_expanded)->check(CLI::PositiveNumber);
    c_so->add_option("--max-length", so.max_length)->check(CLI::PositiveNumber);
    c_so->add_option("--time-limit", so.time_limit, "Seconds")->check(CLI::PositiveNumber);

    IndexArgs ix;
    auto* c_ix = app.add_subcommand("index", "Build an action-card index from a corpus");
    c_ix->add_option("--manifest", ix.manifest, "Manifest file or corpus directory")->required();
    c_ix->add_option("--out,-o", ix.out, "Index file")->required();

    RetrieveArgs rt;
    auto* c_rt = app.add_subcommand("retrieve", "Query an index with an action description");
    c_rt->add_option("--index", rt.index)->required()->check(CLI::ExistingFile);
    c_rt->add_option("--description,-d", rt.description);
    c_rt->add_option("--description-file", rt.description_file)->check(CLI::ExistingFile);
    c_rt->add_option("--exclude", rt.exclude, "Domain id to leave out (repeatable)");
    c_rt->add_option("--vocabulary", rt.vocabulary, "Domain nouns to abstract (repeatable)");
    c_rt->add_option("-k", rt.k, "Number of coarse candidates")->check(CLI::PositiveNumber);
    c_rt->add_flag("--rerank", rt.rerank, "Let the model choose among the candidates");

    GenerateArgs ge;
    std::string ge_preset;
    auto* c_ge = app.add_subcommand("generate", "Generate one corpus domain action by action");
    c_ge->add_option("--manifest", ge.manifest)->required();
    c_ge->add_option("--domain", ge.domain, "Manifest domain id")->required();
    c_ge->add_option("--preset", ge_preset)->check(CLI::IsMember({"format", "fcot", "fs", "ours"}));
    c_ge->add_option("--out,-o", ge.out, "Generated-domain directory")->capture_default_str();
    c_ge->add_option("--trace", ge.trace, "Also write the session trace here");
    c_ge->add_option("--index", ge.index, "Prebuilt index (built from the manifest otherwise)")
        ->check(CLI::ExistingFile);
    c_ge->add_option("--max-iter", ge.max_iter)->check(CLI::PositiveNumber);
    c_ge->add_flag("--with-problems", ge.with_problems, "Also generate the domain's problems");

    EvaluateArgs ev;
    auto* c_ev = app.add_subcommand("evaluate", "Score generated domains against the corpus");
    c_ev->add_option("--manifest", ev.manifest)->required();
    c_ev->add_option("--generated", ev.generated, "Generated-domain directory")->required()->check(CLI::ExistingDirectory);
    c_ev->add_option("--report", ev.report, "Write the JSON report here");
    c_ev->add_option("--table", ev.table, "Write the text table here");

    PipelineArgs pl;
    std::string pl_preset;
    auto* c_pl = app.add_subcommand("pipeline", "Generate every corpus domain and its problems, then evaluate");
    c_pl->add_option("--manifest", pl.manifest)->required();
    c_pl->add_option("--preset", pl_preset)->check(CLI::IsMember({"format", "fcot", "fs", "ours"}));
    c_pl->add_option("--out,-o", pl.out, "Output directory")->capture_default_str();
    c_pl->add_option("--index", pl.index)->check(CLI::ExistingFile);

    std::string corpus_manifest;
    auto* c_corpus = app.add_subcommand("corpus", "Corpus maintenance");
    c_corpus->require_subcommand(1);
    auto* c_cv = c_corpus->add_subcommand("validate", "Load a manifest and check its integrity");
    c_cv->add_option("--manifest", corpus_manifest)->required();

    // --print-config-template works without a subcommand.
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--print-config-template") {
            std::cout << config_template();
            return kOk;
        }
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    const bool remote = c_ge->parsed() || c_pl->parsed() || (c_rt->parsed() && rt.rerank);
    Context ctx;
    try {
        ctx = make_context(g, remote);
        if (!ge_preset.empty()) ctx.cfg.set("generation.preset", ge_preset);
        if (!pl_preset.empty()) ctx.cfg.set("generation.preset", pl_preset);
        if (ge.max_iter) ctx.cfg.set("generation.max_iter", std::to_string(*ge.max_iter));
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kUsage;
    }

    try {
        if (c_check->parsed()) return run_check(ctx, check);
        if (c_cx->parsed()) return run_complexity(ctx, cx);
        if (c_va->parsed()) return run_validate(ctx, va);
        if (c_so->parsed()) return run_solve(ctx, so);
        if (c_ix->parsed()) return run_index(ctx, ix);
        if (c_rt->parsed()) return run_retrieve(ctx, rt);
        if (c_ge->parsed()) return run_generate(ctx, ge);
        if (c_ev->parsed()) return run_evaluate(ctx, ev);
        if (c_pl->parsed()) return run_pipeline(ctx, pl);
        if (c_cv->parsed()) return run_corpus_validate(ctx, corpus_manifest);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return kUsage;
}
