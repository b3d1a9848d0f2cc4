#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cxorder/measure.hpp"

namespace cxorder {

/// Binomial law B(n, x). Exact when x is exact.
FiniteMeasure binomial(int n, const Scalar& x);

/// Poisson law truncated at the smallest K whose omitted tail is below tail_eps.
/// Poisson(0) is the point mass at 0.
FiniteMeasure poisson(const Scalar& lambda, double tail_eps);

/// Negative binomial NB(r, p) with pmf C(k+r-1, k) p^k (1-p)^r, truncated like poisson().
/// NB(0, p) and NB(r, 0) are the point mass at 0.
FiniteMeasure negative_binomial(const Scalar& r, const Scalar& p, double tail_eps);

/// Geom(p) = NB(1, 1 - p).
FiniteMeasure geometric(const Scalar& p, double tail_eps);

/// P(X <= k) for the untruncated laws; used by coupling audits.
double poisson_cdf(double lambda, double k);
double negative_binomial_cdf(double r, double p, double k);

/**
 * Gamma (shape, rate), beta (shape, shape) or normal (mean, variance) law.
 *
 * Degenerate conventions: gamma with shape 0 and beta with first shape 0
 * are the point mass at 0; beta with second shape 0 is the point mass at 1.
 * Non-degenerate densities are checked to integrate to one on construction.
 */
class ContinuousFamily {
  public:
    enum class Kind { gamma, beta, normal };

    static ContinuousFamily gamma(double shape, double rate);
    static ContinuousFamily beta(double alpha, double beta);
    static ContinuousFamily normal(double mean, double variance);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] double first() const noexcept { return first_; }
    [[nodiscard]] double second() const noexcept { return second_; }

    /// Location of the point mass for degenerate parameters.
    [[nodiscard]] std::optional<double> point_mass() const noexcept { return point_; }

    /// Throws InvalidArgument for degenerate laws, which have no density.
    [[nodiscard]] double density(double x) const;
    [[nodiscard]] double cdf(double x) const;
    /// 1 - cdf(x), computed without cancellation.
    [[nodiscard]] double sf(double x) const;
    [[nodiscard]] double quantile(double p) const;
    [[nodiscard]] double mean() const;
    [[nodiscard]] double variance() const;
    /// E (X - t)_+ from closed forms.
    [[nodiscard]] double stop_loss(double t) const;

    [[nodiscard]] std::string describe() const;

  private:
    ContinuousFamily(Kind kind, double first, double second);
    void check_normalized() const;

    Kind kind_;
    double first_;
    double second_;
    std::optional<double> point_;
};

/// Tail mass a discretization window may leave out unless told otherwise.
inline constexpr double kDefaultWindowTail = 1e-9;

/// Cell-midpoint discretization of f on [lo, hi] with grid_n equal cells.
/// Each atom carries cdf(right) - cdf(left); the excluded tails become the mass defect.
FiniteMeasure discretize(const ContinuousFamily& f, int grid_n, double lo, double hi,
                         double allowed_tail = kDefaultWindowTail);

/// Textual family descriptor of the form `binom(n,x)`, `poiss(l)`, `nb(r,p)`,
/// `geom(p)`, `gamma(a,b)`, `beta(a,b)`, `norm(m,v)`.
struct FamilySpec {
    enum class Kind { binomial, poisson, negative_binomial, geometric, gamma, beta, normal };

    Kind kind;
    std::vector<Scalar> params;

    static FamilySpec parse(std::string_view text);
    [[nodiscard]] bool is_continuous() const;
    [[nodiscard]] ContinuousFamily continuous() const;
    [[nodiscard]] std::string to_string() const;
};

struct MeasureOptions {
    double tail_eps = 1e-12;
    int cells = 4000;
};

/// Builds measures for a set of specs. Continuous specs are discretized on one
/// shared window covering all of them, so that the results sit on a common grid.
std::vector<FiniteMeasure> build_measures(std::span<const FamilySpec> specs,
                                          const MeasureOptions& options = {});

/// Window [lo, hi] outside which every family leaves less than tail/2 per side.
std::pair<double, double> common_window(std::span<const ContinuousFamily> families, double tail);

}  // namespace cxorder
