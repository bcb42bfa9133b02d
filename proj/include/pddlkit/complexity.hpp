#pragma once

#include <array>
#include <string>
#include <string_view>

#include "pddlkit/ast.hpp"
#include "pddlkit/diagnostic.hpp"
#include "pddlkit/rational.hpp"

namespace pddlkit {

/// The nine structural measurements a domain's complexity score is built from.
struct ComponentVector {
    Rational n_actions;
    Rational n_types;
    Rational n_predicates;
    Rational n_functions;
    Rational avg_preconditions;
    Rational avg_effects;
    Rational interdependency_pred;
    Rational interdependency_func;
    Rational action_coupling;

    /// Sum over actions before averaging; reported next to the mean.
    Rational action_coupling_total;

    static constexpr std::size_t kSize = 9;
    std::array<Rational, kSize> as_array() const;

    friend bool operator==(const ComponentVector&, const ComponentVector&) = default;
};

/// Component names in weight/report order.
const std::array<std::string_view, ComponentVector::kSize>& component_names();

struct Weights {
    std::array<Rational, ComponentVector::kSize> values;

    static Weights unit();

    /// `name = value` per line, `#` comments, unknown names rejected.
    /// Components left out keep weight 1.
    static Parsed<Weights> parse(std::string_view text);
};

enum class ComplexityClass { Simple, Complex };
std::string_view to_string(ComplexityClass c);

inline const Rational kDefaultThreshold{523, 100};

struct ComplexityReport {
    ComponentVector components;
    Rational score;
    ComplexityClass cls = ComplexityClass::Simple;
};

ComponentVector complexity_components(const Domain& dom);

/// Weighted sum of the components.
Rational complexity_score(const ComponentVector& cv, const Weights& w);

/// Simple iff score <= threshold.
ComplexityClass classify(const Rational& score, const Rational& threshold = kDefaultThreshold);

ComplexityReport complexity_report(const Domain& dom, const Weights& w = Weights::unit(),
                                   const Rational& threshold = kDefaultThreshold);

}  // namespace pddlkit
