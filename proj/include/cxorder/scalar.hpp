#pragma once

#include <compare>
#include <concepts>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include <gmpxx.h>

namespace cxorder {

using Rational = mpq_class;

/// Numeric regime of a value or a measure. Mixed operations coerce exact to float.
enum class Regime { exact, floating };

std::string_view to_string(Regime regime);

/// Raised for malformed inputs and violated preconditions.
class InvalidArgument : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when the hypothesis of a statement under test does not hold
/// (as opposed to the statement itself failing).
class HypothesisViolation : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/**
 * A real number held either as an arbitrary-precision rational or as a
 * binary64 float.
 *
 * Exact-exact arithmetic stays exact. Any operation touching a float
 * operand produces a float. Comparisons between regimes are done in
 * double precision.
 */
class Scalar {
  public:
    Scalar() : value_(Rational(0)) {}
    Scalar(Rational q) : value_(std::move(q)) { std::get<Rational>(value_).canonicalize(); }
    template <std::integral I>
    Scalar(I n) : value_(Rational(static_cast<long>(n))) {}
    Scalar(double d) : value_(d) {}

    static Scalar fraction(long num, long den);

    /// Parses `p/q` or an integer as exact, anything else (e.g. `0.25`, `1e-3`) as float.
    static Scalar parse(std::string_view text);

    [[nodiscard]] bool is_exact() const noexcept { return std::holds_alternative<Rational>(value_); }
    [[nodiscard]] Regime regime() const noexcept { return is_exact() ? Regime::exact : Regime::floating; }

    /// Precondition: is_exact().
    [[nodiscard]] const Rational& exact() const;
    [[nodiscard]] double to_double() const;
    [[nodiscard]] Scalar to_float() const { return Scalar(to_double()); }
    [[nodiscard]] Scalar in_regime(Regime r) const { return r == Regime::exact ? *this : to_float(); }

    [[nodiscard]] bool is_zero() const;
    [[nodiscard]] bool is_integer() const;
    [[nodiscard]] int sign() const;

    /// Exact values print as `n` or `n/d`; floats print in shortest round-trip form.
    [[nodiscard]] std::string to_string() const;

    friend Scalar operator+(const Scalar& a, const Scalar& b);
    friend Scalar operator-(const Scalar& a, const Scalar& b);
    friend Scalar operator*(const Scalar& a, const Scalar& b);
    friend Scalar operator/(const Scalar& a, const Scalar& b);
    friend Scalar operator-(const Scalar& a);

    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
    Scalar& operator/=(const Scalar& o) { return *this = *this / o; }

    friend bool operator==(const Scalar& a, const Scalar& b);
    friend std::partial_ordering operator<=>(const Scalar& a, const Scalar& b);

  private:
    std::variant<Rational, double> value_;
};

Scalar abs(const Scalar& x);
Scalar min(const Scalar& a, const Scalar& b);
Scalar max(const Scalar& a, const Scalar& b);

/// Regime of a binary operation on values from regimes a and b.
inline Regime combine(Regime a, Regime b) {
    return (a == Regime::exact && b == Regime::exact) ? Regime::exact : Regime::floating;
}

}  // namespace cxorder
