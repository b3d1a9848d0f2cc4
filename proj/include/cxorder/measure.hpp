#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cxorder/scalar.hpp"

namespace cxorder {

/// Two float support points closer than this collapse into one atom.
inline constexpr double kDefaultSnapTolerance = 1e-12;

/// Allowed |sum(weights) + mass_defect - 1| for float-regime measures.
inline constexpr double kMassTolerance = 1e-9;

struct Atom {
    Scalar x;
    Scalar w;

    friend bool operator==(const Atom&, const Atom&) = default;
};

/// A real function evaluated on scalars; float results for transcendental kinds.
using RealFunction = std::function<Scalar(const Scalar&)>;

/**
 * A finitely supported probability measure on the real line.
 *
 * Support points are strictly increasing and every stored weight is
 * positive. Truncated infinite-support laws carry the omitted probability
 * in mass_defect, so that sum(weights) + mass_defect == 1 (exactly in the
 * exact regime, where the defect is always zero, and to kMassTolerance in
 * the float regime). Values are immutable once built.
 */
class FiniteMeasure {
  public:
    /// Sorts, merges coincident points, and drops zero weights. Throws
    /// InvalidArgument on negative weights or a total mass different from one.
    static FiniteMeasure from_atoms(std::vector<Atom> atoms, Scalar mass_defect = Scalar(0),
                                    double snap_tolerance = kDefaultSnapTolerance);

    [[nodiscard]] Regime regime() const noexcept { return regime_; }
    [[nodiscard]] std::span<const Atom> atoms() const noexcept { return atoms_; }
    [[nodiscard]] std::size_t size() const noexcept { return atoms_.size(); }
    [[nodiscard]] const Scalar& mass_defect() const noexcept { return mass_defect_; }

    [[nodiscard]] Scalar total_weight() const;
    [[nodiscard]] const Scalar& min_point() const { return atoms_.front().x; }
    [[nodiscard]] const Scalar& max_point() const { return atoms_.back().x; }
    [[nodiscard]] Scalar diameter() const { return max_point() - min_point(); }

    /// F(x) = weight of (-inf, x].
    [[nodiscard]] Scalar cdf(const Scalar& x) const;

    /// Weight at exactly x (zero if x is not a support point).
    [[nodiscard]] Scalar weight_at(const Scalar& x) const;

    /// Same measure with every value coerced to the given regime.
    [[nodiscard]] FiniteMeasure in_regime(Regime target) const;

    friend bool operator==(const FiniteMeasure&, const FiniteMeasure&) = default;

  private:
    friend class MeasureBuilder;
    FiniteMeasure(std::vector<Atom> atoms, Scalar mass_defect, Regime regime)
        : atoms_(std::move(atoms)), mass_defect_(std::move(mass_defect)), regime_(regime) {}

    std::vector<Atom> atoms_;
    Scalar mass_defect_;
    Regime regime_ = Regime::exact;
};

FiniteMeasure dirac(const Scalar& x);

/// Convex combination sum_i coeffs[i] * parts[i]; coincident points are merged.
FiniteMeasure mixture(std::span<const Scalar> coeffs, std::span<const FiniteMeasure> parts,
                      double snap_tolerance = kDefaultSnapTolerance);

/// Law of the sum of independent draws from a and b.
FiniteMeasure convolve(const FiniteMeasure& a, const FiniteMeasure& b,
                       double snap_tolerance = kDefaultSnapTolerance);

/// m-fold self-convolution; m == 0 gives dirac(0).
FiniteMeasure convolve_power(const FiniteMeasure& a, int m,
                             double snap_tolerance = kDefaultSnapTolerance);

/// Image of a under x -> scale * x + shift.
FiniteMeasure pushforward_affine(const FiniteMeasure& a, const Scalar& scale, const Scalar& shift);

/// Sum of point * weight over the retained support.
Scalar mean(const FiniteMeasure& a);

Scalar variance(const FiniteMeasure& a);

/// Sum of phi(point) * weight. Throws std::domain_error if phi fails or yields NaN.
Scalar expectation(const FiniteMeasure& a, const RealFunction& phi);

}  // namespace cxorder
