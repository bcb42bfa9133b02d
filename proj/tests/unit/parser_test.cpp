#include <gtest/gtest.h>

#include "pddlkit/parser.hpp"
#include "pddlkit/sexpr.hpp"
#include "oracles.hpp"

using namespace pddlkit;
using namespace testing_support;
namespace fs = std::filesystem;

TEST(Parser, RoundTripIsIdempotentOnFixtures) {
    const auto dirs = oracles::fixture_domains();
    ASSERT_GE(dirs.size(), 6u);
    std::size_t problems = 0;
    for (const auto& d : dirs) {
        SCOPED_TRACE(d.domain.string());
        const Domain first = domain_from(read_text_file(d.domain));
        const std::string rendered = render_domain(first);
        const Domain second = domain_from(rendered);
        EXPECT_EQ(first, second);
        EXPECT_EQ(rendered, render_domain(second));
        for (const auto& p : d.problems) {
            SCOPED_TRACE(p.string());
            const Problem a = problem_from(read_text_file(p), first);
            const Problem b = problem_from(render_problem(a), second);
            EXPECT_EQ(a, b);
            ++problems;
        }
    }
    EXPECT_GE(problems, 45u);
}

TEST(Parser, IdentifiersAreCaseInsensitive) {
    const Domain a = domain_from(R"((define (domain D) (:requirements :strips)
        (:predicates (P ?x)) (:action Go :parameters (?x) :precondition (P ?x) :effect (not (P ?x)))))");
    const Domain b = domain_from(R"((define (domain d) (:requirements :strips)
        (:predicates (p ?x)) (:action go :parameters (?x) :precondition (p ?x) :effect (not (p ?x)))))");
    EXPECT_EQ(a, b);
}

TEST(Parser, NumericExpressionsParse) {
    const Domain d = domain_from(R"((define (domain n) (:requirements :typing :numeric-fluents)
        (:types t) (:functions (f ?x - t) (g))
        (:action a :parameters (?x - t)
          :precondition (and (>= (f ?x) (* 2 (g))) (< (g) 10.5))
          :effect (and (increase (f ?x) (/ (g) 4)) (assign (g) 0)))))");
    const Action& a = d.actions.at(0);
    const auto pre = conjuncts(a.precondition);
    ASSERT_EQ(pre.size(), 2u);
    EXPECT_EQ(pre[0]->kind, Condition::Kind::Compare);
    EXPECT_EQ(pre[0]->cmp, CompareOp::GreaterEq);
    EXPECT_EQ(pre[1]->sides[1].value, Rational(21, 2));
    const auto eff = conjuncts(a.effect);
    ASSERT_EQ(eff.size(), 2u);
    EXPECT_EQ(eff[0]->op, NumericOp::Increase);
    EXPECT_EQ(eff[1]->op, NumericOp::Assign);
}

TEST(Parser, UnbalancedParenthesesAreLexicalWithLocation) {
    auto r = parse_domain("(define (domain x)\n  (:predicates (p)\n");
    ASSERT_FALSE(r.ok());
    ASSERT_FALSE(r.diagnostics.empty());
    EXPECT_EQ(r.diagnostics[0].category, Category::Lexical);
    EXPECT_GE(r.diagnostics[0].location.line, 1);
}

TEST(Parser, StrayCharacterIsLexical) {
    auto r = read_sexprs("(a b) } (c)");
    ASSERT_FALSE(r.diagnostics.empty());
    EXPECT_EQ(r.diagnostics[0].category, Category::Lexical);
    EXPECT_EQ(r.diagnostics[0].location.column, 7);
}

TEST(Parser, CommentsAreIgnored) {
    auto r = read_sexprs("; header\n(a ; inline\n b)");
    ASSERT_TRUE(r.ok());
    ASSERT_EQ(r.value->size(), 1u);
    EXPECT_EQ((*r.value)[0].items.size(), 2u);
}

TEST(Parser, PlanToleratesSolverDecorations) {
    auto p = parse_plan("; cost 2\n0.0: (fly u1 a b)\n1: (LAND u1 b) [1]\n");
    ASSERT_TRUE(p.ok());
    ASSERT_EQ(p.value->size(), 2u);
    EXPECT_EQ(p.value->steps[1].action, "land");
    EXPECT_EQ(p.value->steps[0].args, (std::vector<std::string>{"u1", "a", "b"}));
}

TEST(Parser, ProblemRejectsUndeclaredObjectInInit) {
    const Domain d = domain_from(fixture_text("blocksworld/domain.pddl"));
    auto p = parse_problem(R"((define (problem p) (:domain blocksworld) (:objects a - block)
        (:init (clear z)) (:goal (clear a))))", d);
    EXPECT_FALSE(p.ok());
}

TEST(Parser, UnknownRequirementIsReported) {
    auto r = parse_domain("(define (domain x) (:requirements :quantum))");
    ASSERT_FALSE(r.ok());
}
