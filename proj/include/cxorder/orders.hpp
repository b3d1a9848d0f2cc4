#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cxorder/measure.hpp"

namespace cxorder {

/// Default absolute tolerance on float-regime margins.
inline constexpr double kDefaultOrderTolerance = 1e-9;

/// Raised when truncated measures lose too much mass for a check to be meaningful.
class DefectBudgetExceeded : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

enum class ConstraintKind { cdf, stop_loss, mean };

std::string_view to_string(ConstraintKind kind);

/// Outcome of an order check. margin is the smallest slack over all checked
/// constraints and is negative iff a constraint is violated; witness is where
/// that smallest slack occurs.
struct OrderVerdict {
    bool holds = false;
    Scalar margin;
    std::optional<Scalar> witness;
    ConstraintKind constraint = ConstraintKind::cdf;
    Scalar tolerance;
};

nlohmann::json verdict_to_json(const OrderVerdict& v);

/// Usual stochastic order a <=st b, i.e. F_a >= F_b everywhere. Both CDFs are
/// step functions, so checking the union of the supports is complete. Two
/// exact measures are compared with zero tolerance.
OrderVerdict check_st(const FiniteMeasure& a, const FiniteMeasure& b,
                      const Scalar& tol = Scalar(kDefaultOrderTolerance));

/// E (X - t)_+ over the retained atoms.
Scalar stop_loss(const FiniteMeasure& a, const Scalar& t);

/**
 * Convex order a <=cx b.
 *
 * Decided by equal means plus stop-loss dominance at every point of the
 * union support. Between those points the stop-loss difference is linear,
 * and outside them it is constant (equal to the mean difference on the left,
 * zero on the right), so the finite check covers every convex test function.
 *
 * The mean constraint uses the relative slack |Ea - Eb| / (1 + |Eb|).
 * Truncated inputs are accepted only while (total defect) * (diameter) <= tol.
 */
OrderVerdict check_cx(const FiniteMeasure& a, const FiniteMeasure& b,
                      const Scalar& tol = Scalar(kDefaultOrderTolerance));

/// Convex probe function with a declared kind and parameter.
class ConvexTestFunction {
  public:
    enum class Kind { stop_loss, abs_dev, square, exp_scaled };

    static ConvexTestFunction stop_loss(Scalar t) { return {Kind::stop_loss, std::move(t)}; }
    static ConvexTestFunction abs_dev(Scalar c) { return {Kind::abs_dev, std::move(c)}; }
    static ConvexTestFunction square() { return {Kind::square, Scalar(0)}; }
    static ConvexTestFunction exp_scaled(Scalar s) { return {Kind::exp_scaled, std::move(s)}; }

    /// Accepts `stop_loss(t)`, `abs_dev(c)`, `square`, `exp_scaled(s)`.
    static ConvexTestFunction parse(std::string_view text);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] const Scalar& parameter() const noexcept { return param_; }
    /// Whether values stay exact on exact inputs (false only for exp_scaled).
    [[nodiscard]] bool preserves_exactness() const noexcept { return kind_ != Kind::exp_scaled; }
    [[nodiscard]] std::string_view kind_name() const;
    [[nodiscard]] std::string to_string() const;

    Scalar operator()(const Scalar& x) const;

  private:
    ConvexTestFunction(Kind kind, Scalar param) : kind_(kind), param_(std::move(param)) {}

    Kind kind_;
    Scalar param_;
};

/// `count` stop-loss kinks equally spaced strictly inside [lo, hi], then
/// abs_dev at the midpoint, square and exp_scaled(1).
std::vector<ConvexTestFunction> convex_battery(const Scalar& lo, const Scalar& hi, int count);

/// For a <= b, c <= d with b, c in [a, d] and a + d == b + c, tests
/// phi(b) + phi(c) <= phi(a) + phi(d) + tol. Throws HypothesisViolation
/// when the quadruple is not admissible.
bool four_point_check(const RealFunction& phi, const Scalar& a, const Scalar& b, const Scalar& c,
                      const Scalar& d, const Scalar& tol = Scalar(0));

}  // namespace cxorder
