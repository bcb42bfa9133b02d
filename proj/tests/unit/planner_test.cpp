#include <gtest/gtest.h>

#include <chrono>
#include <deque>
#include <fstream>
#include <set>

#include "pddlkit/planner.hpp"
#include "pddlkit/validator.hpp"
#include "oracles.hpp"

using namespace pddlkit;
using namespace testing_support;

TEST(Planner, SimpleTierNeedsAtMostTwoSteps) {
    for (const auto& e : corpus()) {
        for (const auto* p : e.tier(Tier::Simple)) {
            const auto r = solve(e.domain, p->problem);
            ASSERT_TRUE(r.solved()) << e.domain_id << " " << p->label();
            EXPECT_LE(r.plan.size(), 2u) << e.domain_id << " " << p->label();
            EXPECT_GE(r.plan.size(), 1u);
        }
    }
}

TEST(Planner, PlansAreValidAndOptimal) {
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& e : corpus()) {
        for (const auto& p : e.problems) {
            SCOPED_TRACE(e.domain_id + " " + p.label());
            const auto r = solve(e.domain, p.problem);
            ASSERT_TRUE(r.solved()) << r.stats.message;
            EXPECT_TRUE(validate_plan(e.domain, p.problem, r.plan).valid());
            const auto oracle = oracles::bfs_length(e.domain, p.problem);
            ASSERT_TRUE(oracle);
            EXPECT_EQ(r.plan.size(), *oracle);
        }
    }
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 60.0);
}

TEST(Planner, SolvesBlocksworldSussman) {
    const Domain d = domain_from(fixture_text("blocksworld/domain.pddl"));
    const Problem p = problem_from(fixture_text("blocksworld/problem.pddl"), d);
    const auto r = solve(d, p);
    ASSERT_TRUE(r.solved());
    EXPECT_EQ(r.plan.size(), 6u);
    EXPECT_EQ(r.plan.size(), *oracles::bfs_length(d, p));
}

TEST(Planner, IsDeterministic) {
    const auto& e = entry("uav-delivery-energy");
    const auto& p = e.problems.back().problem;
    const auto a = solve(e.domain, p);
    const auto b = solve(e.domain, p);
    EXPECT_EQ(a.plan, b.plan);
}

TEST(Planner, ProvesUnsolvable) {
    const Domain d = domain_from(fixture_text("blocksworld/domain.pddl"));
    const Problem p = problem_from(R"((define (problem no) (:domain blocksworld) (:objects a - block)
        (:init (ontable a) (clear a) (handempty)) (:goal (on a a))))", d);
    EXPECT_EQ(solve(d, p).outcome, SolveResult::Outcome::ProvedUnsolvable);
}

TEST(Planner, StopsAtExpansionLimit) {
    const Domain d = domain_from(R"((define (domain count) (:requirements :numeric-fluents)
        (:functions (n))
        (:action inc :parameters () :precondition (and) :effect (increase (n) 1))))");
    const Problem p = problem_from("(define (problem c) (:domain count) (:init (= (n) 0)) (:goal (< (n) 0)))", d);
    SearchLimits lim;
    lim.max_expanded_states = 50;
    const auto r = solve(d, p, lim);
    EXPECT_EQ(r.outcome, SolveResult::Outcome::LimitExceeded);
    EXPECT_FALSE(r.stats.message.empty());
}

TEST(Planner, ExtractPlanFromSolverOutput) {
    auto p = extract_plan("Parsing...\n0.0: (fly u a b)\n1.0: (land u b)\n; plan cost 2\nFound Plan\n");
    ASSERT_TRUE(p);
    ASSERT_EQ(p->size(), 2u);
    EXPECT_EQ(p->steps[1].action, "land");
    EXPECT_FALSE(extract_plan("0: (fly u (a b)"));
}

TEST(ExternalEngine, RunsCommandAndParsesPlan) {
    TempDir dir;
    const auto script = dir / "solver.sh";
    std::ofstream(script) << "#!/bin/sh\ntest -f \"$1\" && test -f \"$2\" || exit 3\n"
                             "echo 'found plan:'\necho '0: (pick-up b)'\necho '1: (stack b a)'\n";
    ExternalSolverConfig cfg{"sh " + script.string() + " {domain} {problem}", std::chrono::seconds(10)};
    const Domain d = domain_from(fixture_text("blocksworld/domain.pddl"));
    const Problem p = problem_from(R"((define (problem two) (:domain blocksworld) (:objects a b - block)
        (:init (ontable a) (ontable b) (clear a) (clear b) (handempty)) (:goal (on b a))))", d);
    ExternalEngine engine(cfg);
    const auto r = engine.solve(d, p);
    ASSERT_TRUE(r.solved());
    EXPECT_TRUE(validate_plan(d, p, r.plan).valid());
}

TEST(ExternalEngine, MissingExecutableAndTimeout) {
    const Domain d = domain_from(fixture_text("blocksworld/domain.pddl"));
    const Problem p = problem_from(fixture_text("blocksworld/problem.pddl"), d);
    ExternalEngine missing({"/nonexistent/solver {domain} {problem}", std::chrono::seconds(5)});
    try {
        missing.solve(d, p);
        FAIL() << "expected SolverError";
    } catch (const SolverError& e) {
        EXPECT_EQ(e.kind(), SolverError::Kind::MissingExecutable);
    }
    ExternalEngine slow({"sleep 5", std::chrono::seconds(1)});
    try {
        slow.solve(d, p);
        FAIL() << "expected SolverError";
    } catch (const SolverError& e) {
        EXPECT_EQ(e.kind(), SolverError::Kind::Timeout);
    }
}

TEST(ExternalEngine, NonzeroExitIsNotSolved) {
    const Domain d = domain_from(fixture_text("blocksworld/domain.pddl"));
    const Problem p = problem_from(fixture_text("blocksworld/problem.pddl"), d);
    ExternalEngine failing({"sh -c 'exit 1'", std::chrono::seconds(5)});
    EXPECT_FALSE(failing.solve(d, p).solved());
}
