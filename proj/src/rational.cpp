#include "pddlkit/rational.hpp"

#include <cctype>
#include <numeric>

namespace pddlkit {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out)) throw ArithmeticError("rational overflow");
    return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t out = 0;
    if (__builtin_add_overflow(a, b, &out)) throw ArithmeticError("rational overflow");
    return out;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw ArithmeticError("division by zero");
    if (den < 0) {
        num = checked_mul(num, -1);
        den = checked_mul(den, -1);
    }
    const std::int64_t g = std::gcd(num, den);
    num_ = g > 1 ? num / g : num;
    den_ = g > 1 ? den / g : den;
}

std::optional<Rational> Rational::parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    bool negative = false;
    std::size_t i = 0;
    if (text[0] == '-' || text[0] == '+') {
        negative = text[0] == '-';
        i = 1;
    }
    std::int64_t num = 0;
    std::int64_t den = 1;
    bool any_digit = false;
    bool seen_dot = false;
    try {
        for (; i < text.size(); ++i) {
            const char c = text[i];
            if (c == '.') {
                if (seen_dot) return std::nullopt;
                seen_dot = true;
                continue;
            }
            if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
            any_digit = true;
            num = checked_add(checked_mul(num, 10), c - '0');
            if (seen_dot) den = checked_mul(den, 10);
        }
    } catch (const ArithmeticError&) {
        return std::nullopt;
    }
    if (!any_digit) return std::nullopt;
    return Rational(negative ? -num : num, den);
}

bool Rational::has_finite_decimal() const {
    std::int64_t d = den_;
    while (d % 2 == 0) d /= 2;
    while (d % 5 == 0) d /= 5;
    return d == 1;
}

std::string Rational::to_string() const {
    if (den_ == 1) return std::to_string(num_);
    if (!has_finite_decimal()) return std::to_string(num_) + "/" + std::to_string(den_);

    // Scale to a power-of-ten denominator, then place the decimal point.
    std::int64_t scaled = num_ < 0 ? -num_ : num_;
    std::int64_t d = den_;
    int digits = 0;
    while (d != 1) {
        if (d % 10 == 0) {
            d /= 10;
        } else if (d % 2 == 0) {
            d /= 2;
            scaled = checked_mul(scaled, 5);
        } else {
            d /= 5;
            scaled = checked_mul(scaled, 2);
        }
        ++digits;
    }
    std::string body = std::to_string(scaled);
    if (static_cast<int>(body.size()) <= digits) body.insert(0, digits - body.size() + 1, '0');
    body.insert(body.size() - digits, ".");
    while (body.back() == '0') body.pop_back();
    if (body.back() == '.') body.pop_back();
    return (num_ < 0 ? "-" : "") + body;
}

Rational Rational::operator-() const { return Rational(checked_mul(num_, -1), den_); }

Rational operator+(const Rational& a, const Rational& b) {
    const std::int64_t g = std::gcd(a.den_, b.den_);
    const std::int64_t lhs = checked_mul(a.num_, b.den_ / g);
    const std::int64_t rhs = checked_mul(b.num_, a.den_ / g);
    return Rational(checked_add(lhs, rhs), checked_mul(a.den_, b.den_ / g));
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
    const std::int64_t g1 = std::gcd(a.num_, b.den_);
    const std::int64_t g2 = std::gcd(b.num_, a.den_);
    const std::int64_t n1 = g1 ? a.num_ / g1 : a.num_;
    const std::int64_t d2 = g1 ? b.den_ / g1 : b.den_;
    const std::int64_t n2 = g2 ? b.num_ / g2 : b.num_;
    const std::int64_t d1 = g2 ? a.den_ / g2 : a.den_;
    return Rational(checked_mul(n1, n2), checked_mul(d1, d2));
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw ArithmeticError("division by zero");
    return a * Rational(b.den_, b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

}  // namespace pddlkit
