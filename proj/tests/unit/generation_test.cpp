#include <gtest/gtest.h>

#include "pddlkit/generation.hpp"
#include "pddlkit/parser.hpp"
#include "support.hpp"

using namespace pddlkit;
using namespace testing_support;

namespace {

GenerationInput fly_input() {
    GenerationInput inp;
    inp.domain_id = "toy";
    inp.domain_name = "toy";
    inp.domain_description = "A uav flies between locations and uses battery.";
    inp.actions = {{"fly", "This action enables a uav to fly from one location to another if it has enough battery."}};
    auto ext = Extern::parse("(:requirements :strips :typing :numeric-fluents) (:types uav location)");
    inp.ext = *ext.value;
    return inp;
}

/// Invalid on the first attempt, valid on the second.
std::unique_ptr<ScriptedBackend> episode_backend() {
    return std::unique_ptr<ScriptedBackend>(
        new ScriptedBackend(ScriptedBackend::from_file(fixtures() / "generation" / "fly-script.json")));
}

std::string first_fly_attempt() {
    ScriptedBackend b = ScriptedBackend::from_file(fixtures() / "generation" / "fly-script.json");
    return b.complete({{"user", "Target action: fly\n"}}, {});
}

struct CorpusIndex {
    HashingEmbedder embedder;
    Index index;
};

const CorpusIndex& corpus_index() {
    static const CorpusIndex ci = [] {
        CorpusIndex out;
        VerbLexicon lex;
        out.index = build_index(corpus_card_sources(corpus()), out.embedder, lex);
        return out;
    }();
    return ci;
}

GenerationOptions retrieval_options() {
    GenerationOptions o;
    o.index = &corpus_index().index;
    o.embedder = &corpus_index().embedder;
    return o;
}

}  // namespace

TEST(Generation, FeedbackEpisodeConvergesOnSecondIteration) {
    auto backend = episode_backend();
    const auto g = generate_domain(fly_input(), Preset::Format, *backend);
    ASSERT_EQ(g.trace.actions.size(), 1u);
    const auto& a = g.trace.actions[0];
    EXPECT_EQ(a.status, ActionTrace::Status::Accepted);
    ASSERT_EQ(a.iterations.size(), 2u);
    ASSERT_EQ(a.iterations[0].diagnostics.size(), 1u);
    EXPECT_EQ(a.iterations[0].diagnostics[0].category, Category::NumericUsage);
    EXPECT_TRUE(a.iterations[1].diagnostics.empty());

    // The second attempt carries the model's answer and the checker feedback.
    const auto& p = a.iterations[1].prompt;
    ASSERT_EQ(p.size(), 2u);
    EXPECT_EQ(p[0].role, "assistant");
    EXPECT_EQ(p[1].role, "user");
    EXPECT_NE(p[1].content.find("Head `battery-level` in `Preconditions` is a predicate but should be a function"),
              std::string::npos)
        << p[1].content;

    EXPECT_TRUE(g.complete());
    ASSERT_EQ(g.domain.actions.size(), 1u);
    EXPECT_EQ(g.domain.actions[0].name, "fly");
    EXPECT_EQ(g.registry.functions().size(), 2u);
    EXPECT_EQ(a.new_fluents, (std::vector<std::string>{"at", "battery-level", "distance"}));
    // The produced domain is well formed.
    EXPECT_TRUE(parse_domain(render_domain(g.domain)).ok());
}

TEST(Generation, TracesAreByteIdenticalAcrossRuns) {
    std::vector<std::string> runs;
    for (int i = 0; i < 3; ++i) {
        auto backend = episode_backend();
        runs.push_back(generate_domain(fly_input(), Preset::FCoT,
                                       *backend)
                           .trace.to_json());
    }
    EXPECT_EQ(runs[0], runs[1]);
    EXPECT_EQ(runs[1], runs[2]);
}

TEST(Generation, RetrievalTracesAreByteIdenticalAcrossRuns) {
    const auto inp = generation_input(entry("uav-landing"));
    std::vector<std::string> runs;
    for (int i = 0; i < 3; ++i) {
        std::unique_ptr<ScriptedBackend> b(new ScriptedBackend(reference_backend(corpus())));
        runs.push_back(generate_domain(inp, Preset::Ours, *b, retrieval_options()).trace.to_json());
    }
    EXPECT_EQ(runs[0], runs[1]);
    EXPECT_EQ(runs[1], runs[2]);
}

TEST(Generation, GivesUpAfterMaxIter) {
    ScriptedBackend backend({{{"Target action: fly"}, {first_fly_attempt()}}});
    GenerationOptions opts;
    opts.max_iter = 4;
    const auto g = generate_domain(fly_input(), Preset::Format, backend, opts);
    EXPECT_FALSE(g.complete());
    EXPECT_EQ(g.trace.actions[0].status, ActionTrace::Status::NeedsHuman);
    EXPECT_EQ(g.trace.actions[0].iterations.size(), 4u);
    EXPECT_EQ(backend.calls(), 4u);
    EXPECT_TRUE(g.domain.actions.empty());
    EXPECT_TRUE(g.registry.empty());
    opts.max_iter = 0;
    EXPECT_THROW(generate_domain(fly_input(), Preset::Format, backend, opts), GenerationError);
}

TEST(Generation, BackendFailurePropagates) {
    ScriptedBackend empty;
    EXPECT_THROW(generate_domain(fly_input(), Preset::Format, empty), BackendError);
}

TEST(Generation, PromptSectionsFollowPreset) {
    const auto inp = fly_input();
    FluentRegistry reg;
    const auto fmt = build_prompt(inp, 0, reg, builtin_format_examples(), Preset::Format)[1].content;
    const auto cot = build_prompt(inp, 0, reg, builtin_format_examples(), Preset::FCoT)[1].content;
    EXPECT_EQ(fmt.find(kCotObjectsQuestion), std::string::npos);
    EXPECT_NE(cot.find(kCotObjectsQuestion), std::string::npos);
    EXPECT_NE(cot.find(kCotFormatInstruction), std::string::npos);
    EXPECT_NE(fmt.find(kNoFluentsYet), std::string::npos);
    // Section order.
    const std::vector<std::string> heads = {"## Domain description", "## Extern", "## Fluents defined so far",
                                            "## Example 1", "## Example 2", "## Task"};
    std::size_t pos = 0;
    for (const auto& h : heads) {
        const auto at = cot.find(h, pos);
        ASSERT_NE(at, std::string::npos) << h;
        pos = at;
    }
    EXPECT_NE(fmt.find("Target action: fly\n"), std::string::npos);
}

TEST(Generation, CotAnswersGroupByParameter) {
    const auto& drive = builtin_format_examples()[1];
    const auto ans = cot_answers(drive);
    EXPECT_NE(ans.find("?t - truck, ?from - city, ?to - city"), std::string::npos) << ans;
    EXPECT_NE(ans.find("?t: (truck-at ?t ?from), (>= (fuel ?t) (fuel-cost ?from ?to))"), std::string::npos) << ans;
}

TEST(Generation, ExampleSelectionPerPreset) {
    const auto inp = generation_input(entry("uav-surveillance"));
    ScriptedBackend rerank({{{"Answer with the number of the most relevant candidate"}, {"2"}}});
    std::optional<RetrievalRecord> rec;

    auto ex = select_examples(inp, 0, Preset::Format, rerank, {}, rec);
    EXPECT_EQ(ex.size(), 2u);
    EXPECT_FALSE(rec);
    EXPECT_THROW(select_examples(inp, 0, Preset::FS, rerank, {}, rec), GenerationError);

    ex = select_examples(inp, 0, Preset::FS, rerank, retrieval_options(), rec);
    ASSERT_TRUE(rec);
    EXPECT_EQ(rec->candidates.size(), 1u);
    EXPECT_EQ(ex[0].source, "builtin");
    EXPECT_EQ(ex[1].label, "semantic");
    EXPECT_EQ(ex[1].source, rec->chosen);
    EXPECT_EQ(rerank.calls(), 0u);

    ex = select_examples(inp, 0, Preset::Ours, rerank, retrieval_options(), rec);
    ASSERT_TRUE(rec);
    EXPECT_EQ(rec->candidates.size(), 5u);
    EXPECT_EQ(rec->chosen, rec->candidates[1].first);
    EXPECT_EQ(ex[1].source, rec->candidates[1].first);
    EXPECT_EQ(ex[0].source, rec->candidates[0].first);
    for (const auto& [card, sim] : rec->candidates) EXPECT_NE(card.rfind("uav-surveillance/", 0), 0u) << card;
    EXPECT_EQ(rerank.calls(), 1u);
}

TEST(Generation, ReferenceBackendReproducesEveryCorpusAction) {
    for (const auto& e : corpus()) {
        std::unique_ptr<ScriptedBackend> b(new ScriptedBackend(reference_backend(corpus())));
        const auto g = generate_domain(generation_input(e), Preset::Ours, *b, retrieval_options());
        ASSERT_TRUE(g.complete()) << e.domain_id;
        EXPECT_EQ(g.trace.total_iterations(), e.action_descriptions.size());
        for (const auto& a : g.domain.actions) {
            const Action* gt = e.domain.find_action(a.name);
            ASSERT_NE(gt, nullptr);
            EXPECT_EQ(render_action(a), render_action(*gt));
        }
    }
}

TEST(Generation, ExtractFragment) {
    EXPECT_EQ(extract_fragment("text\n```\n(:predicates (p))\n```\n```pddl\n(:action a)\n```"), "(:action a)\n");
    EXPECT_EQ(extract_fragment("Sure: (:predicates (p)) then (:action a :effect (p)) done (x)"),
              "(:predicates (p))\n(:action a :effect (p))\n");
    EXPECT_EQ(extract_fragment("(:action a ; comment )\n :effect (p)"), "(:action a ; comment )\n :effect (p)");
    EXPECT_EQ(extract_fragment("nothing here"), "nothing here");
}

TEST(Generation, TraceJsonRoundTrip) {
    auto backend = episode_backend();
    const auto t = generate_domain(fly_input(), Preset::FCoT, *backend).trace;
    const auto back = GenerationTrace::from_json(t.to_json());
    EXPECT_EQ(back.to_json(), t.to_json());
    EXPECT_EQ(back.total_iterations(), 2u);
    EXPECT_EQ(back.actions[0].iterations[0].diagnostics[0].category, Category::NumericUsage);
    EXPECT_THROW(GenerationTrace::from_json("{}"), GenerationError);
    EXPECT_THROW(GenerationTrace::from_json(R"({"format":"pddlkit-trace","actions":[{}]})"), GenerationError);
}

TEST(Generation, ProblemRetriesOnceWithFeedback) {
    const auto& e = entry("uav-landing");
    const std::string good = "```pddl\n" + e.problems.front().text + "\n```";
    ScriptedBackend once({{{"Problem description"}, {"(define (problem p) (:domain nope))", good}}});
    const Problem p = generate_problem(e.domain, "any", once);
    EXPECT_EQ(p.name, e.problems.front().problem.name);
    EXPECT_EQ(once.calls(), 2u);

    ScriptedBackend never({{{"Problem description"}, {"no problem here"}}});
    try {
        generate_problem(e.domain, "any", never);
        FAIL() << "expected GenerationError";
    } catch (const GenerationError& err) {
        EXPECT_FALSE(err.diagnostics.empty());
    }
    EXPECT_EQ(never.calls(), 2u);
}

TEST(Generation, PresetNames) {
    for (Preset p : {Preset::Format, Preset::FCoT, Preset::FS, Preset::Ours}) {
        EXPECT_EQ(preset_from_string(to_string(p)), p);
    }
    EXPECT_FALSE(preset_from_string("best"));
    EXPECT_TRUE(uses_cot(Preset::Ours) && uses_retrieval(Preset::Ours));
    EXPECT_FALSE(uses_cot(Preset::FS) || uses_retrieval(Preset::FCoT));
}
