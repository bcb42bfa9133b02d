#include "pddlkit/generation.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

#include "pddlkit/parser.hpp"

namespace pddlkit {

using json = nlohmann::json;

std::string_view to_string(Preset p) {
    switch (p) {
        case Preset::Format: return "format";
        case Preset::FCoT: return "fcot";
        case Preset::FS: return "fs";
        case Preset::Ours: return "ours";
    }
    return "format";
}

std::optional<Preset> preset_from_string(std::string_view s) {
    for (Preset p : {Preset::Format, Preset::FCoT, Preset::FS, Preset::Ours}) {
        if (to_string(p) == s) return p;
    }
    return std::nullopt;
}

bool uses_cot(Preset p) { return p == Preset::FCoT || p == Preset::Ours; }
bool uses_retrieval(Preset p) { return p == Preset::FS || p == Preset::Ours; }

std::string_view to_string(ActionTrace::Status s) {
    return s == ActionTrace::Status::Accepted ? "accepted" : "needs-human";
}

const std::vector<PromptExample>& builtin_format_examples() {
    // Written for this toolkit after the classic blocks-world and truck
    // logistics benchmarks; deliberately unrelated to aerial robotics.
    static const std::vector<PromptExample> examples = {
        {"format", "stack",
         "This action enables the robot arm to stack a block it is holding on top of another block if the other "
         "block is clear. Afterwards the arm is empty and the lower block is no longer clear.",
         "(:predicates\n"
         "  (holding ?b - block)\n"
         "  (clear ?b - block)\n"
         "  (on ?top - block ?below - block)\n"
         "  (hand-empty))\n"
         "(:action stack\n"
         "  :parameters (?b - block ?target - block)\n"
         "  :precondition (and (holding ?b) (clear ?target))\n"
         "  :effect (and (on ?b ?target) (clear ?b) (hand-empty) (not (holding ?b)) (not (clear ?target))))",
         "builtin"},
        {"format", "drive",
         "This action enables a truck to drive from one city to another city along a road. The truck needs "
         "enough fuel for the road, and driving decreases its fuel by the cost of the road.",
         "(:predicates\n"
         "  (truck-at ?t - truck ?c - city)\n"
         "  (road ?from - city ?to - city))\n"
         "(:functions\n"
         "  (fuel ?t - truck)\n"
         "  (fuel-cost ?from - city ?to - city))\n"
         "(:action drive\n"
         "  :parameters (?t - truck ?from - city ?to - city)\n"
         "  :precondition (and (truck-at ?t ?from) (road ?from ?to) (>= (fuel ?t) (fuel-cost ?from ?to)))\n"
         "  :effect (and (not (truck-at ?t ?from)) (truck-at ?t ?to) (decrease (fuel ?t) (fuel-cost ?from ?to))))",
         "builtin"},
    };
    return examples;
}

namespace {

std::optional<Action> read_fragment_action(std::string_view fragment) {
    auto read = read_sexprs(fragment);
    if (!read.value) return std::nullopt;
    std::vector<Diagnostic> sink;
    detail::AstBuilder b(sink);
    for (const auto& form : *read.value) {
        if (form.head() != ":action") continue;
        Action a;
        if (b.action(form, a)) return a;
    }
    return std::nullopt;
}

bool mentions(const std::vector<std::string>& args, const std::string& v) {
    return std::find(args.begin(), args.end(), v) != args.end();
}

void collect_args(const NumExpr& e, std::vector<std::string>& out) {
    if (e.kind == NumExpr::Kind::Fluent) out.insert(out.end(), e.fluent.args.begin(), e.fluent.args.end());
    for (const auto& o : e.operands) collect_args(o, out);
}

std::vector<std::string> args_of(const Condition& c) {
    std::vector<std::string> out;
    switch (c.kind) {
        case Condition::Kind::Atom: out = c.atom.args; break;
        case Condition::Kind::Compare:
            for (const auto& s : c.sides) collect_args(s, out);
            break;
        default:
            for (const auto& ch : c.children) {
                auto sub = args_of(ch);
                out.insert(out.end(), sub.begin(), sub.end());
            }
    }
    return out;
}

std::vector<std::string> args_of(const Effect& e) {
    std::vector<std::string> out = e.atom.args;
    if (e.kind == Effect::Kind::Numeric) collect_args(e.value, out);
    return out;
}

/// Per-parameter grouping used by the precondition and effect answers.
template <class Node>
std::string grouped(const Action& act, const std::vector<const Node*>& items, std::string (*render)(const Node&)) {
    std::string out;
    std::set<const Node*> used;
    for (const auto& p : act.params) {
        std::string line;
        for (const Node* n : items) {
            if (!mentions(args_of(*n), p.name)) continue;
            used.insert(n);
            line += (line.empty() ? "" : ", ") + render(*n);
        }
        out += p.name + ": " + (line.empty() ? "none" : line) + "\n";
    }
    std::string rest;
    for (const Node* n : items) {
        if (!used.count(n)) rest += (rest.empty() ? "" : ", ") + render(*n);
    }
    if (!rest.empty()) out += "other: " + rest + "\n";
    return out;
}

std::string render_extern_section(const Extern& ext) {
    std::string r = ext.render();
    return r.empty() ? "(none)\n" : r;
}

std::string fenced(const std::string& body) { return "```pddl\n" + body + "\n```\n"; }

/// Balanced parenthesized form starting at `open`; npos when unbalanced.
std::size_t form_end(std::string_view s, std::size_t open) {
    int depth = 0;
    for (std::size_t i = open; i < s.size(); ++i) {
        if (s[i] == ';') {
            i = s.find('\n', i);
            if (i == std::string_view::npos) return i;
            continue;
        }
        if (s[i] == '(') ++depth;
        if (s[i] == ')' && --depth == 0) return i + 1;
    }
    return std::string_view::npos;
}

std::vector<std::string> fenced_blocks(std::string_view text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto open = text.find("```", pos);
        if (open == std::string_view::npos) break;
        const auto body = text.find('\n', open);
        if (body == std::string_view::npos) break;
        const auto close = text.find("```", body);
        if (close == std::string_view::npos) break;
        out.emplace_back(text.substr(body + 1, close - body - 1));
        pos = close + 3;
    }
    return out;
}

json diagnostics_json(const std::vector<Diagnostic>& diags) {
    json arr = json::array();
    for (const auto& d : diags) {
        arr.push_back({{"category", to_string(d.category)},
                       {"code", d.code},
                       {"line", d.location.line},
                       {"column", d.location.column},
                       {"message", d.message},
                       {"suggestion", d.suggestion}});
    }
    return arr;
}

std::vector<Diagnostic> diagnostics_from_json(const json& arr) {
    std::vector<Diagnostic> out;
    for (const auto& j : arr) {
        Diagnostic d;
        auto cat = category_from_string(j.at("category").get<std::string>());
        if (!cat) throw GenerationError("trace has unknown diagnostic category " + j.at("category").get<std::string>());
        d.category = *cat;
        d.code = j.value("code", "");
        d.location.line = j.value("line", 0);
        d.location.column = j.value("column", 0);
        d.message = j.value("message", "");
        d.suggestion = j.value("suggestion", "");
        out.push_back(std::move(d));
    }
    return out;
}

json messages_json(const std::vector<Message>& msgs) {
    json arr = json::array();
    for (const auto& m : msgs) arr.push_back({{"role", m.role}, {"content", m.content}});
    return arr;
}

std::vector<std::string> extern_vocabulary(const Extern& ext) {
    std::vector<std::string> out;
    for (const auto& t : ext.types) out.push_back(t.name);
    for (const auto& c : ext.constants) out.push_back(c.name);
    return out;
}

PromptExample card_example(const ActionCard& c, std::string label) {
    return {std::move(label), c.action_name, c.description, c.pddl_body, c.domain_id + "/" + c.action_name};
}

}  // namespace

std::string cot_answers(const PromptExample& ex) {
    auto act = read_fragment_action(ex.fragment);
    if (!act) return {};
    std::string objects;
    for (const auto& p : act->params) objects += (objects.empty() ? "" : ", ") + p.name + " - " + p.type;
    std::string out = std::string(kCotObjectsQuestion) + "\n" + (objects.empty() ? "none" : objects) + "\n";
    out += std::string(kCotPreconditionsQuestion) + "\n" +
           grouped<Condition>(*act, conjuncts(act->precondition), &render_condition);
    std::vector<const Effect*> effs = conjuncts(act->effect);
    out += std::string(kCotEffectsQuestion) + "\n" + grouped<Effect>(*act, effs, &render_effect);
    return out;
}

std::string action_fragment(const Domain& dom, const Action& act) {
    std::set<std::string> names;
    for (const Condition* c : conjuncts(act.precondition)) {
        std::vector<const Condition*> stack{c};
        while (!stack.empty()) {
            const Condition* n = stack.back();
            stack.pop_back();
            if (n->kind == Condition::Kind::Atom) names.insert(n->atom.name);
            for (const auto& ch : n->children) stack.push_back(&ch);
            if (n->kind == Condition::Kind::Compare) {
                std::vector<const NumExpr*> es{&n->sides[0], &n->sides[1]};
                while (!es.empty()) {
                    const NumExpr* e = es.back();
                    es.pop_back();
                    if (e->kind == NumExpr::Kind::Fluent) names.insert(e->fluent.name);
                    for (const auto& o : e->operands) es.push_back(&o);
                }
            }
        }
    }
    for (const Effect* e : conjuncts(act.effect)) {
        names.insert(e->atom.name);
        std::vector<const NumExpr*> es{&e->value};
        while (!es.empty()) {
            const NumExpr* x = es.back();
            es.pop_back();
            if (x->kind == NumExpr::Kind::Fluent) names.insert(x->fluent.name);
            for (const auto& o : x->operands) es.push_back(&o);
        }
    }
    std::string preds;
    for (const auto& p : dom.predicates) {
        if (names.count(p.name)) preds += "\n  " + render_fluent_decl(p);
    }
    std::string funcs;
    for (const auto& f : dom.functions) {
        if (names.count(f.name)) funcs += "\n  " + render_fluent_decl(f);
    }
    std::string out;
    if (!preds.empty()) out += "(:predicates" + preds + ")\n";
    if (!funcs.empty()) out += "(:functions" + funcs + ")\n";
    return out + render_action(act);
}

std::vector<Message> build_prompt(const GenerationInput& inp, std::size_t action_index, const FluentRegistry& registry,
                                  const std::vector<PromptExample>& examples, Preset preset) {
    const bool cot = uses_cot(preset);
    const auto& target = inp.actions.at(action_index);
    std::string u;
    u += "## Domain description\n" + inp.domain_description + "\n\n";
    u += "## Extern\n" + render_extern_section(inp.ext) + "\n";
    u += "## Fluents defined so far\n" + (registry.empty() ? std::string(kNoFluentsYet) + "\n" : registry.listing()) + "\n";
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const auto& ex = examples[i];
        u += "## Example " + std::to_string(i + 1) + " (" + ex.label + ")\n";
        u += "Action name: " + ex.action_name + "\nDescription: " + ex.description + "\n";
        if (cot) {
            u += cot_answers(ex);
            u += std::string(kCotFormatInstruction) + ":\n";
        } else {
            u += "PDDL:\n";
        }
        u += fenced(ex.fragment) + "\n";
    }
    u += "## Task\nTarget action: " + target.action + "\nDescription: " + target.text + "\n\n";
    u += "Declare every new predicate in a (:predicates ...) block and every new function in a (:functions ...) "
         "block before the action. Reuse the fluents listed above whenever possible and use only the types of "
         "the extern. ";
    if (cot) u += "Answer the questions from the examples for the target action first. ";
    u += "Finish with the fluent declarations and the action in one ```pddl code block.";
    return {{"system", "You are an expert in PDDL. You write planning domains one action at a time."},
            {"user", std::move(u)}};
}

std::string extract_fragment(std::string_view completion) {
    const auto blocks = fenced_blocks(completion);
    for (const auto& b : blocks) {
        if (b.find("(:action") != std::string::npos) return b;
    }
    std::string out;
    std::size_t pos = 0;
    while (pos < completion.size()) {
        const auto open = completion.find('(', pos);
        if (open == std::string_view::npos) break;
        const auto rest = completion.substr(open);
        const bool wanted = rest.rfind("(:predicates", 0) == 0 || rest.rfind("(:functions", 0) == 0 ||
                            rest.rfind("(:action", 0) == 0;
        if (!wanted) {
            pos = open + 1;
            continue;
        }
        const auto end = form_end(completion, open);
        if (end == std::string_view::npos) {
            out += std::string(completion.substr(open));  // let the checker report the imbalance
            break;
        }
        out += std::string(completion.substr(open, end - open)) + "\n";
        if (rest.rfind("(:action", 0) == 0) break;
        pos = end;
    }
    if (!out.empty()) return out;
    if (!blocks.empty()) return blocks.front();
    return std::string(completion);
}

bool GenerationTrace::complete() const {
    return std::all_of(actions.begin(), actions.end(),
                       [](const ActionTrace& a) { return a.status == ActionTrace::Status::Accepted; });
}

std::size_t GenerationTrace::total_iterations() const {
    std::size_t n = 0;
    for (const auto& a : actions) n += a.iterations.size();
    return n;
}

std::string GenerationTrace::to_json() const {
    json doc = {{"format", "pddlkit-trace"}, {"version", 1},         {"domain_id", domain_id},
                {"preset", preset},          {"backend", backend}, {"max_iter", max_iter}};
    doc["actions"] = json::array();
    for (const auto& a : actions) {
        json ja = {{"action", a.action_name},
                   {"status", to_string(a.status)},
                   {"examples", a.examples},
                   {"new_fluents", a.new_fluents},
                   {"registry_after", a.registry_after},
                   {"warnings", a.warnings}};
        if (a.retrieval) {
            json cands = json::array();
            for (const auto& [id, sim] : a.retrieval->candidates) cands.push_back({{"card", id}, {"similarity", sim}});
            ja["retrieval"] = {{"query", a.retrieval->query_abstracted},
                               {"candidates", cands},
                               {"chosen", a.retrieval->chosen},
                               {"warnings", a.retrieval->warnings}};
        }
        ja["iterations"] = json::array();
        for (const auto& it : a.iterations) {
            ja["iterations"].push_back({{"prompt", messages_json(it.prompt)},
                                        {"completion", it.completion},
                                        {"fragment", it.fragment},
                                        {"diagnostics", diagnostics_json(it.diagnostics)}});
        }
        doc["actions"].push_back(std::move(ja));
    }
    return doc.dump(2) + "\n";
}

GenerationTrace GenerationTrace::from_json(std::string_view text) {
    auto doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || doc.value("format", "") != "pddlkit-trace") throw GenerationError("not a pddlkit trace");
    try {
        GenerationTrace t;
        t.domain_id = doc.at("domain_id").get<std::string>();
        t.preset = doc.value("preset", "");
        t.backend = doc.value("backend", "");
        t.max_iter = doc.value("max_iter", std::size_t{0});
        for (const auto& ja : doc.at("actions")) {
            ActionTrace a;
            a.action_name = ja.at("action").get<std::string>();
            a.status = ja.at("status").get<std::string>() == "accepted" ? ActionTrace::Status::Accepted
                                                                         : ActionTrace::Status::NeedsHuman;
            a.examples = ja.value("examples", std::vector<std::string>{});
            a.new_fluents = ja.value("new_fluents", std::vector<std::string>{});
            a.registry_after = ja.value("registry_after", "");
            a.warnings = ja.value("warnings", std::vector<std::string>{});
            if (ja.contains("retrieval")) {
                RetrievalRecord r;
                const auto& jr = ja["retrieval"];
                r.query_abstracted = jr.value("query", "");
                r.chosen = jr.value("chosen", "");
                r.warnings = jr.value("warnings", std::vector<std::string>{});
                for (const auto& c : jr.value("candidates", json::array())) {
                    r.candidates.emplace_back(c.at("card").get<std::string>(), c.at("similarity").get<double>());
                }
                a.retrieval = std::move(r);
            }
            for (const auto& ji : ja.at("iterations")) {
                IterationRecord it;
                for (const auto& m : ji.value("prompt", json::array())) {
                    it.prompt.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
                }
                it.completion = ji.value("completion", "");
                it.fragment = ji.value("fragment", "");
                it.diagnostics = diagnostics_from_json(ji.value("diagnostics", json::array()));
                a.iterations.push_back(std::move(it));
            }
            t.actions.push_back(std::move(a));
        }
        return t;
    } catch (const json::exception& e) {
        throw GenerationError(std::string("malformed trace: ") + e.what());
    }
}

ActionOutcome generate_action(const GenerationInput& inp, std::size_t action_index, FluentRegistry& registry,
                              Preset preset, const std::vector<PromptExample>& examples, LLMBackend& backend,
                              const GenerationOptions& opts) {
    if (opts.max_iter < 1) throw GenerationError("max_iter must be at least 1");
    const auto& target = inp.actions.at(action_index);
    ActionOutcome out;
    out.trace.action_name = target.action;
    for (const auto& ex : examples) out.trace.examples.push_back(ex.source);

    std::vector<Message> convo = build_prompt(inp, action_index, registry, examples, preset);
    std::size_t sent = 0;  // messages already recorded in earlier iterations
    for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
        IterationRecord rec;
        rec.prompt.assign(convo.begin() + static_cast<std::ptrdiff_t>(sent), convo.end());
        sent = convo.size();
        rec.completion = backend.complete(convo, opts.params);
        rec.fragment = extract_fragment(rec.completion);
        FragmentResult res = check_action_fragment(rec.fragment, registry, inp.ext);
        rec.diagnostics = res.diagnostics;
        out.trace.iterations.push_back(rec);
        if (res.accepted()) {
            for (auto& p : res.new_predicates) {
                out.trace.new_fluents.push_back(p.name);
                registry.add_predicate(p, target.action);
            }
            for (auto& f : res.new_functions) {
                out.trace.new_fluents.push_back(f.name);
                registry.add_function(f, target.action);
            }
            if (res.action->name != target.action) {
                out.trace.warnings.push_back("generated action is named `" + res.action->name + "`, expected `" +
                                             target.action + "`");
            }
            out.action = std::move(res.action);
            out.trace.status = ActionTrace::Status::Accepted;
            break;
        }
        convo.push_back({"assistant", rec.completion});
        convo.push_back({"user", render_feedback(res.diagnostics)});
    }
    out.trace.registry_after = registry.listing();
    return out;
}

std::vector<PromptExample> select_examples(const GenerationInput& inp, std::size_t action_index, Preset preset,
                                           LLMBackend& backend, const GenerationOptions& opts,
                                           std::optional<RetrievalRecord>& record) {
    const auto& builtin = builtin_format_examples();
    record.reset();
    if (!uses_retrieval(preset)) return builtin;
    if (!opts.index || !opts.embedder) throw GenerationError(std::string(to_string(preset)) + " needs a retrieval index");

    const auto& target = inp.actions.at(action_index);
    RetrievalRecord rec;
    auto abs = abstract_description(target.text, VerbLexicon{}, extern_vocabulary(inp.ext),
                                    opts.abstraction_backend);
    rec.query_abstracted = abs.text;
    rec.warnings = abs.warnings;
    const std::size_t k = preset == Preset::FS ? 1 : opts.coarse_k;
    auto cands = query_coarse(*opts.index, *opts.embedder, abs.text, k, {inp.domain_id});
    for (const auto& c : cands) rec.candidates.emplace_back(c.card->domain_id + "/" + c.card->action_name, c.similarity);

    std::vector<PromptExample> out;
    if (preset == Preset::FS) {
        out = {builtin.front(), card_example(*cands.front().card, "semantic")};
        rec.chosen = rec.candidates.front().first;
    } else {
        auto rr = rerank_fine(cands, target.text, backend);
        if (!rr.warning.empty()) rec.warnings.push_back(rr.warning);
        rec.chosen = rec.candidates[rr.chosen].first;
        // The best-ranked other candidate serves as the format example.
        std::optional<PromptExample> format;
        for (std::size_t i = 0; i < cands.size(); ++i) {
            if (i != rr.chosen) {
                format = card_example(*cands[i].card, "format");
                break;
            }
        }
        out = {format ? *format : builtin.front(), card_example(*cands[rr.chosen].card, "semantic")};
    }
    record = std::move(rec);
    return out;
}

DomainGeneration generate_domain(const GenerationInput& inp, Preset preset, LLMBackend& backend,
                                 const GenerationOptions& opts) {
    if (inp.actions.empty()) throw GenerationError("generation input has no action descriptions");
    DomainGeneration out;
    out.trace.domain_id = inp.domain_id;
    out.trace.preset = std::string(to_string(preset));
    out.trace.backend = backend.name();
    out.trace.max_iter = opts.max_iter;

    std::vector<Action> accepted;
    for (std::size_t i = 0; i < inp.actions.size(); ++i) {
        std::optional<RetrievalRecord> rec;
        auto examples = select_examples(inp, i, preset, backend, opts, rec);
        auto res = generate_action(inp, i, out.registry, preset, examples, backend, opts);
        res.trace.retrieval = std::move(rec);
        if (res.action) accepted.push_back(std::move(*res.action));
        out.trace.actions.push_back(std::move(res.trace));
    }

    Domain& d = out.domain;
    d.name = inp.domain_name.empty() ? inp.domain_id : inp.domain_name;
    d.requirements = inp.ext.requirements;
    d.types = inp.ext.types;
    d.constants = inp.ext.constants;
    d.predicates = out.registry.predicates();
    d.functions = out.registry.functions();
    d.actions = std::move(accepted);
    return out;
}

std::vector<Message> problem_prompt(const Domain& dom, std::string_view problem_description) {
    std::string u = "## Domain\n" + fenced(render_domain(dom)) + "\n## Problem description\n" +
                    std::string(problem_description) +
                    "\n\nWrite the PDDL problem for this description. Use only the types, predicates and functions "
                    "of the domain above. Answer with one ```pddl code block.";
    return {{"system", "You are an expert in PDDL. You write planning problem files."}, {"user", std::move(u)}};
}

namespace {

std::string extract_problem(std::string_view completion) {
    for (const auto& b : fenced_blocks(completion)) {
        if (b.find("(define") != std::string::npos) return b;
    }
    const auto open = completion.find("(define");
    if (open == std::string_view::npos) return std::string(completion);
    const auto end = form_end(completion, open);
    return std::string(completion.substr(open, end == std::string_view::npos ? std::string_view::npos : end - open));
}

}  // namespace

Problem generate_problem(const Domain& dom, std::string_view problem_description, LLMBackend& backend,
                         const CompletionParams& params) {
    auto convo = problem_prompt(dom, problem_description);
    std::vector<Diagnostic> last;
    for (int attempt = 0; attempt < 2; ++attempt) {
        const std::string reply = backend.complete(convo, params);
        auto parsed = parse_problem(extract_problem(reply), dom);
        if (parsed) return std::move(*parsed.value);
        last = parsed.diagnostics;
        convo.push_back({"assistant", reply});
        convo.push_back({"user", render_feedback(last)});
    }
    throw GenerationError("generated problem does not parse against the domain", std::move(last));
}

ScriptedBackend reference_backend(const std::vector<ManifestEntry>& entries, std::shared_ptr<CallLog> log) {
    std::vector<ScriptedBackend::Rule> rules;
    // Rerank prompts are answered first so candidate descriptions cannot
    // trigger generation rules.
    rules.push_back({{"Answer with the number of the most relevant candidate"}, {"1"}});
    for (const auto& e : entries) {
        for (const auto& a : e.domain.actions) {
            rules.push_back({{"Target action: " + a.name + "\n", "## Domain description\n" + e.domain_description},
                             {fenced(action_fragment(e.domain, a))}});
        }
        for (const auto& p : e.problems) {
            rules.push_back({{"(problem " + p.problem.name + ")", "(domain " + e.domain.name + ")"}, {fenced(p.text)}});
        }
    }
    return ScriptedBackend(std::move(rules), std::nullopt, std::move(log));
}

GenerationInput generation_input(const ManifestEntry& e) {
    GenerationInput inp;
    inp.domain_id = e.domain_id;
    inp.domain_name = e.domain.name;
    inp.domain_description = e.domain_description;
    inp.actions = e.action_descriptions;
    inp.ext = e.ext;
    return inp;
}

std::vector<CardSource> corpus_card_sources(const std::vector<ManifestEntry>& entries) {
    std::vector<CardSource> out;
    for (const auto& e : entries) {
        const auto vocab = domain_vocabulary(e.domain);
        for (const auto& d : e.action_descriptions) {
            const Action* act = e.domain.find_action(d.action);
            if (!act) continue;
            out.push_back({e.domain_id, d.action, d.text, action_fragment(e.domain, *act), vocab});
        }
    }
    return out;
}

}  // namespace pddlkit
