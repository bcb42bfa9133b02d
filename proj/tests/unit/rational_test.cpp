#include <gtest/gtest.h>

#include <limits>

#include "pddlkit/rational.hpp"

using pddlkit::ArithmeticError;
using pddlkit::Rational;

TEST(Rational, NormalizesSignAndGcd) {
    Rational r(6, -4);
    EXPECT_EQ(r.num(), -3);
    EXPECT_EQ(r.den(), 2);
    EXPECT_EQ(Rational(0, -7), Rational(0));
}

TEST(Rational, ParsesDecimals) {
    EXPECT_EQ(*Rational::parse("5.23"), Rational(523, 100));
    EXPECT_EQ(*Rational::parse("-2"), Rational(-2));
    EXPECT_EQ(*Rational::parse("+0.5"), Rational(1, 2));
    EXPECT_FALSE(Rational::parse("1e3"));
    EXPECT_FALSE(Rational::parse(""));
    EXPECT_FALSE(Rational::parse("."));
    EXPECT_FALSE(Rational::parse("3x"));
}

TEST(Rational, PrintsShortestExactForm) {
    EXPECT_EQ(Rational(523, 100).to_string(), "5.23");
    EXPECT_EQ(Rational(-3).to_string(), "-3");
    EXPECT_EQ(Rational(1, 3).to_string(), "1/3");
    EXPECT_EQ(Rational(1, 8).to_string(), "0.125");
}

TEST(Rational, ArithmeticIsExact) {
    Rational a(1, 10);
    Rational sum;
    for (int i = 0; i < 10; ++i) sum += a;
    EXPECT_EQ(sum, Rational(1));
    EXPECT_EQ(Rational(2, 3) * Rational(3, 4), Rational(1, 2));
    EXPECT_EQ(Rational(1, 2) / Rational(1, 4), Rational(2));
    EXPECT_LT(Rational(523, 100), Rational(524, 100));
}

TEST(Rational, DivisionByZeroThrows) {
    EXPECT_THROW(Rational(1) / Rational(0), ArithmeticError);
    EXPECT_THROW(Rational(1, 0), ArithmeticError);
}

TEST(Rational, OverflowThrows) {
    const Rational big(std::numeric_limits<std::int64_t>::max());
    EXPECT_THROW(big + Rational(1), ArithmeticError);
    EXPECT_THROW(big * Rational(2), ArithmeticError);
}
