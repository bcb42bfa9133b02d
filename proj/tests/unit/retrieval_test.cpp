#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "pddlkit/generation.hpp"
#include "pddlkit/retrieval.hpp"
#include "oracles.hpp"

using namespace pddlkit;
using namespace testing_support;

namespace {

const std::string kDeliveryFly =
    "This action enables a uav to move from its current position to a new position if two positions are "
    "connected. This costs one unit of energy. For example, the uav moves from position_1 to position_2 if there "
    "is a connection between them. This costs one unit of energy.";

std::vector<const ActionCard*> cards_of(const std::vector<ScoredCard>& hits) {
    std::vector<const ActionCard*> out;
    for (const auto& h : hits) out.push_back(h.card);
    return out;
}

}  // namespace

TEST(Abstraction, MatchesWorkedExample) {
    const auto r = abstract_rule_based(kDeliveryFly, VerbLexicon{});
    EXPECT_EQ(r.text,
              "This action enables a uav to move from [position1] to [position2] if [position1] and [position2] are "
              "[state1]. This action will increase [value1] by [value2].");
    EXPECT_TRUE(r.lexicon.contains("move"));
}

TEST(Abstraction, PlaceholderMultisetOfWorkedExample) {
    const auto r = abstract_rule_based(kDeliveryFly, VerbLexicon{}, domain_vocabulary(entry("uav-delivery-energy").domain));
    const std::map<std::string, int> expected = {{"position", 2}, {"state", 1}, {"value", 2}};
    EXPECT_EQ(oracles::placeholder_kinds(r.text), expected);
    // Each position placeholder is referenced twice.
    for (const char* p : {"[position1]", "[position2]"}) {
        std::size_t n = 0;
        for (auto pos = r.text.find(p); pos != std::string::npos; pos = r.text.find(p, pos + 1)) ++n;
        EXPECT_EQ(n, 2u) << p;
    }
}

TEST(Abstraction, IsIdempotentOnFixtureDescriptions) {
    for (const auto& e : corpus()) {
        const auto vocab = domain_vocabulary(e.domain);
        for (const auto& a : e.action_descriptions) {
            const auto once = abstract_rule_based(a.text, VerbLexicon{}, vocab);
            const auto twice = abstract_rule_based(once.text, once.lexicon, vocab);
            EXPECT_EQ(once.text, twice.text) << e.domain_id << "/" << a.action;
        }
    }
}

TEST(Abstraction, LexiconOnlyGrows) {
    VerbLexicon lex;
    for (const auto& e : corpus()) {
        for (const auto& a : e.action_descriptions) {
            const auto before = lex.verbs;
            lex = abstract_rule_based(a.text, lex).lexicon;
            ASSERT_GE(lex.verbs.size(), before.size());
            EXPECT_TRUE(std::equal(before.begin(), before.end(), lex.verbs.begin()));
        }
    }
}

TEST(Abstraction, EmptyDescriptionThrows) {
    EXPECT_THROW(abstract_rule_based("   ", VerbLexicon{}), RetrievalError);
}

TEST(Abstraction, ModelAnswerIsUsed) {
    ScriptedBackend b({{{"Description:"}, {"Abstraction: The [object1] will move to [position1].\nVerbs: move, fly"}}});
    const auto r = abstract_description("The drone flies to the tower.", VerbLexicon{}, {}, &b);
    EXPECT_EQ(r.text, "The [object1] will move to [position1].");
    EXPECT_TRUE(r.warnings.empty());
    EXPECT_EQ(r.lexicon.verbs, (std::vector<std::string>{"move", "fly"}));
}

TEST(Abstraction, UnusableModelAnswerFallsBackToRules) {
    ScriptedBackend b({{{"Description:"}, {"I cannot help with that."}}});
    const auto r = abstract_description(kDeliveryFly, VerbLexicon{}, {}, &b);
    EXPECT_EQ(r.text, abstract_rule_based(kDeliveryFly, VerbLexicon{}).text);
    ASSERT_EQ(r.warnings.size(), 1u);
    ScriptedBackend broken;
    const auto r2 = abstract_description(kDeliveryFly, VerbLexicon{}, {}, &broken);
    ASSERT_EQ(r2.warnings.size(), 1u);
    EXPECT_NE(r2.warnings[0].find("backend failed"), std::string::npos);
}

TEST(HashingEmbedder, DeterministicUnitVectors) {
    HashingEmbedder e;
    const auto a = e.embed("This action enables a [object1] to move");
    EXPECT_EQ(a.size(), 768u);
    EXPECT_EQ(a, e.embed("This action enables a [object1] to move"));
    double norm = 0;
    for (float x : a) norm += static_cast<double>(x) * x;
    EXPECT_NEAR(norm, 1.0, 1e-6);
    EXPECT_NEAR(cosine(a, e.embed("THIS action, enables a [object1] to move!")), 1.0, 1e-9);
    EXPECT_THROW(e.embed("  ...  "), RetrievalError);
}

TEST(HashingEmbedder, TokensKeepPlaceholders) {
    EXPECT_EQ(HashingEmbedder::tokens("Move [position1] to B-2"),
              (std::vector<std::string>{"move", "[position1]", "to", "b", "2"}));
    // 64-bit FNV-1a reference values.
    EXPECT_EQ(HashingEmbedder::fnv1a(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(HashingEmbedder::fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Cosine, BasicValues) {
    EXPECT_DOUBLE_EQ(cosine({1, 0}, {0, 1}), 0.0);
    EXPECT_DOUBLE_EQ(cosine({1, 1}, {2, 2}), 1.0);
    EXPECT_DOUBLE_EQ(cosine({0, 0}, {1, 0}), 0.0);
    EXPECT_THROW(cosine({1}, {1, 2}), RetrievalError);
}

TEST(CoarseQuery, MatchesBruteForce) {
    std::mt19937 rng(7);
    for (std::size_t n : {1u, 10u, 100u, 1000u}) {
        const Index idx = oracles::random_index(rng, n, 32, 6);
        std::normal_distribution<float> g;
        for (int q = 0; q < 20; ++q) {
            Vector v(32);
            for (auto& x : v) x = g(rng);
            for (std::size_t k : {1u, 5u, 10u}) {
                const auto expected = oracles::brute_force_top_k(idx, v, k, {});
                EXPECT_EQ(cards_of(query_coarse(idx, v, k)), expected);
                EXPECT_EQ(cards_of(query_coarse_serial(idx, v, k)), expected);
            }
        }
    }
}

TEST(CoarseQuery, ExclusionAlwaysHolds) {
    std::mt19937 rng(11);
    const Index idx = oracles::random_index(rng, 400, 16, 8);
    std::normal_distribution<float> g;
    for (int q = 0; q < 10000; ++q) {
        Vector v(16);
        for (auto& x : v) x = g(rng);
        const std::string target = "d" + std::to_string(rng() % 8);
        for (const auto& h : query_coarse(idx, v, 5, {target})) ASSERT_NE(h.card->domain_id, target);
    }
}

TEST(CoarseQuery, Errors) {
    std::mt19937 rng(3);
    Index idx = oracles::random_index(rng, 5, 4, 1);
    EXPECT_THROW(query_coarse(idx, Vector(3), 1), RetrievalError);
    EXPECT_THROW(query_coarse(idx, Vector(4, 1.f), 0), RetrievalError);
    EXPECT_THROW(query_coarse(idx, Vector(4, 1.f), 1, {"d0"}), RetrievalError);
    idx.exclusion.insert("d0");
    EXPECT_THROW(query_coarse_serial(idx, Vector(4, 1.f), 1), RetrievalError);
}

TEST(Index, JsonRoundTripAndFile) {
    HashingEmbedder e(64);
    VerbLexicon lex;
    Index idx = build_index(corpus_card_sources(corpus()), e, lex, nullptr, nullptr, 2);
    idx.exclusion.insert("uav-landing");
    EXPECT_EQ(idx.cards.size(), 18u);
    EXPECT_EQ(Index::from_json(idx.to_json()), idx);
    TempDir dir;
    idx.save(dir / "sub" / "index.json");
    EXPECT_EQ(Index::load(dir / "sub" / "index.json"), idx);
    EXPECT_THROW(Index::from_json("{\"format\":\"other\"}"), RetrievalError);
    EXPECT_THROW(Index::load(dir / "missing.json"), RetrievalError);
}

TEST(Index, BuildIsIndependentOfJobs) {
    HashingEmbedder e;
    VerbLexicon a, b;
    EXPECT_EQ(build_index(corpus_card_sources(corpus()), e, a, nullptr, nullptr, 1),
              build_index(corpus_card_sources(corpus()), e, b, nullptr, nullptr, 4));
    EXPECT_EQ(a, b);
}

TEST(Rerank, ParsesCandidateNumber) {
    std::mt19937 rng(5);
    const Index idx = oracles::random_index(rng, 5, 4, 2);
    const auto hits = query_coarse(idx, Vector(4, 1.f), 5);
    ScriptedBackend pick3({{{"most relevant candidate"}, {"Candidate 3 is the best match."}}});
    auto r = rerank_fine(hits, "query", pick3);
    EXPECT_TRUE(r.backend_called);
    EXPECT_EQ(r.chosen, 2u);
    EXPECT_TRUE(r.warning.empty());

    for (const char* reply : {"none of them", "7", "0", "99999999999999999999"}) {
        ScriptedBackend bad({{{"most relevant candidate"}, {reply}}});
        r = rerank_fine(hits, "query", bad);
        EXPECT_EQ(r.chosen, 0u) << reply;
        EXPECT_FALSE(r.warning.empty()) << reply;
    }
    ScriptedBackend broken;
    r = rerank_fine(hits, "query", broken);
    EXPECT_EQ(r.chosen, 0u);
    EXPECT_FALSE(r.warning.empty());
}

TEST(Rerank, SingleCandidateSkipsBackend) {
    std::mt19937 rng(5);
    const Index idx = oracles::random_index(rng, 5, 4, 2);
    ScriptedBackend b;
    const auto r = rerank_fine(query_coarse(idx, Vector(4, 1.f), 1), "query", b);
    EXPECT_FALSE(r.backend_called);
    EXPECT_EQ(b.calls(), 0u);
}
