#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "pddlkit/validator.hpp"
#include "oracles.hpp"

using namespace pddlkit;
using namespace testing_support;

namespace {

const CorpusProblem& surveillance_problem() {
    for (const auto& p : entry("uav-surveillance").problems) {
        if (p.problem.name == "surveillance") return p;
    }
    throw std::runtime_error("missing surveillance problem");
}


}  // namespace

TEST(Validator, SurveillancePlanIsValid) {
    const auto& e = entry("uav-surveillance");
    const auto& p = surveillance_problem();
    ASSERT_TRUE(p.gt_plan);
    ASSERT_EQ(p.gt_plan->size(), 5u);
    const auto r = validate_plan(e.domain, p.problem, *p.gt_plan);
    EXPECT_TRUE(r.valid()) << r.reason;
    EXPECT_TRUE(r.goal_satisfied);
    EXPECT_EQ(r.trace.size(), 5u);
}

TEST(Validator, EveryOrderingAgreesWithOracle) {
    const auto& e = entry("uav-surveillance");
    const auto& p = surveillance_problem();
    std::vector<int> order = {0, 1, 2, 3, 4};
    std::size_t orderings = 0, failing = 0;
    do {
        Plan plan;
        for (int i : order) plan.steps.push_back(p.gt_plan->steps[i]);
        const auto expected = oracles::surveillance_oracle(plan);
        const auto r = validate_plan(e.domain, p.problem, plan);
        ++orderings;
        if (!expected) {
            EXPECT_TRUE(r.valid());
            continue;
        }
        ++failing;
        ASSERT_FALSE(r.valid());
        EXPECT_EQ(r.failed_step, *expected);
        if (*expected < plan.size()) {
            EXPECT_EQ(r.reason.rfind("precondition-unsatisfied", 0), 0u) << r.reason;
        } else {
            EXPECT_EQ(r.reason, "goal-not-satisfied");
        }
    } while (std::next_permutation(order.begin(), order.end()));
    EXPECT_EQ(orderings, 120u);
    EXPECT_EQ(failing, 119u);
}

TEST(Validator, StructuralFailures) {
    const auto& e = entry("uav-surveillance");
    const auto& prob = surveillance_problem().problem;
    auto first = [&](const std::string& text) { return validate_plan(e.domain, prob, plan_from(text)); };
    EXPECT_EQ(first("(teleport base)").reason.rfind("unknown-action", 0), 0u);
    EXPECT_EQ(first("(fly base)").reason.rfind("arity-mismatch", 0), 0u);
    EXPECT_EQ(first("(fly base mars)").reason.rfind("unknown-object", 0), 0u);
    EXPECT_EQ(first("(take-photo uav)").reason.rfind("type-mismatch", 0), 0u);
}

TEST(Validator, StepsOnlySkipsGoal) {
    const auto& e = entry("uav-surveillance");
    const auto& prob = surveillance_problem().problem;
    const Plan plan = plan_from("(fly base waypoint1)");
    EXPECT_FALSE(validate_plan(e.domain, prob, plan).valid());
    const auto r = validate_plan(e.domain, prob, plan, {true});
    EXPECT_TRUE(r.valid());
    EXPECT_FALSE(r.goal_satisfied);
}

TEST(Validator, NumericEffectsReadPreState) {
    const Domain d = domain_from(R"((define (domain swap) (:requirements :numeric-fluents)
        (:functions (x) (y))
        (:action swap :parameters () :precondition (and)
          :effect (and (assign (x) (y)) (assign (y) (x))))))");
    const Problem p = problem_from(R"((define (problem s) (:domain swap) (:init (= (x) 1) (= (y) 2))
        (:goal (and (= (x) 2) (= (y) 1)))))", d);
    EXPECT_TRUE(validate_plan(d, p, plan_from("(swap)")).valid());
}

TEST(Validator, DeletesApplyBeforeAdds) {
    const Domain d = domain_from(R"((define (domain t) (:requirements :strips)
        (:predicates (p))
        (:action toggle :parameters () :precondition (and) :effect (and (not (p)) (p)))))");
    const Problem p = problem_from("(define (problem t) (:domain t) (:init) (:goal (p)))", d);
    EXPECT_TRUE(validate_plan(d, p, plan_from("(toggle)")).valid());
}

TEST(Validator, ExactArithmeticAndEvaluationErrors) {
    const Domain d = domain_from(R"((define (domain fuel) (:requirements :numeric-fluents)
        (:functions (fuel) (rate))
        (:action burn :parameters () :precondition (>= (fuel) 0.1)
          :effect (decrease (fuel) 0.1))
        (:action split :parameters () :precondition (and) :effect (assign (fuel) (/ (fuel) (rate))))))");
    const Problem p = problem_from(R"((define (problem f) (:domain fuel) (:init (= (fuel) 0.3) (= (rate) 0))
        (:goal (= (fuel) 0))))", d);
    EXPECT_TRUE(validate_plan(d, p, plan_from("(burn)\n(burn)\n(burn)")).valid());
    const auto r = validate_plan(d, p, plan_from("(split)"));
    ASSERT_FALSE(r.valid());
    EXPECT_EQ(r.reason.rfind("evaluation-error", 0), 0u);
}

TEST(Validator, EveryBundledPlanIsValid) {
    for (const auto& e : corpus()) {
        for (const auto& p : e.problems) {
            ASSERT_TRUE(p.gt_plan) << e.domain_id << " " << p.label();
            EXPECT_TRUE(validate_plan(e.domain, p.problem, *p.gt_plan).valid()) << e.domain_id << " " << p.label();
        }
    }
}
