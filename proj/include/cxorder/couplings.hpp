#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace cxorder {

using Rng = std::mt19937_64;

/// One draw (x, y) from a monotone coupling; x <= y holds for every draw.
struct CoupledPair {
    double x = 0.0;
    double y = 0.0;
};

/// x ~ Poiss(l1), y = x + Poiss(l2 - l1).
CoupledPair couple_poisson(double l1, double l2, Rng& rng);

/// Mixed-Poisson representation: given T ~ Gamma(r1, 1), x ~ Poiss(theta1 T) and
/// y adds the independent increment Poiss((theta2 - theta1) T) plus an
/// independent NB(r2 - r1, p2) draw, where theta = p / (1 - p).
CoupledPair couple_negative_binomial(double r1, double p1, double r2, double p2, Rng& rng);

/// x ~ Gamma(a1, b1) (shape, rate), y = (b1 / b2) (x + Gamma(a2 - a1, b1)).
CoupledPair couple_gamma(double a1, double b1, double a2, double b2, Rng& rng);

/// x = U / (U + W + Z), y = (U + V) / (U + V + W) from independent gamma variables.
CoupledPair couple_beta(double a1, double b1, double a2, double b2, Rng& rng);

/// x ~ N(m1, var), y = x + (m2 - m1).
CoupledPair couple_normal(double m1, double m2, double var, Rng& rng);

/**
 * A validated coupling together with its own random source.
 *
 * Parameters are checked against the monotonicity hypotheses on
 * construction; HypothesisViolation is thrown otherwise. The draws are
 * arranged so that x <= y also survives floating-point rounding.
 */
class CouplingSampler {
  public:
    enum class Kind { poisson, negative_binomial, gamma, beta, normal_shift };

    static CouplingSampler poisson(double l1, double l2);
    static CouplingSampler negative_binomial(double r1, double p1, double r2, double p2);
    static CouplingSampler gamma(double a1, double b1, double a2, double b2);
    static CouplingSampler beta(double a1, double b1, double a2, double b2);
    static CouplingSampler normal_shift(double m1, double m2, double var);

    /// kind is one of poisson, nb, gamma, beta, normal; params in the order above.
    static CouplingSampler from_args(std::string_view kind, std::span<const double> params);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] std::string_view name() const;
    [[nodiscard]] const std::vector<double>& params() const noexcept { return params_; }

    /// Integer-valued marginals (poisson, negative_binomial).
    [[nodiscard]] bool lattice() const noexcept;

    /// Analytic marginal CDFs.
    [[nodiscard]] double cdf_x(double t) const;
    [[nodiscard]] double cdf_y(double t) const;
    /// CDF of the first (second = false) or second marginal, built once.
    [[nodiscard]] std::function<double(double)> marginal_cdf(bool second) const;

    void seed(std::uint64_t s) { rng_.seed(s); }
    CoupledPair sample() { return sample(rng_); }
    [[nodiscard]] CoupledPair sample(Rng& rng) const;

  private:
    CouplingSampler(Kind kind, std::vector<double> params) : kind_(kind), params_(std::move(params)) {}

    Kind kind_;
    std::vector<double> params_;
    Rng rng_;
};

struct CouplingAuditReport {
    std::string kind;
    std::vector<double> params;
    std::uint64_t samples = 0;
    std::uint64_t dominance_violations = 0;
    double ks_distance_x = 0.0;
    double ks_distance_y = 0.0;
    std::uint64_t seed = 0;

    [[nodiscard]] nlohmann::json to_json() const;
};

/// Kolmogorov distance between the empirical law of `values` and `cdf`.
/// For lattice laws the left limits are taken at v - 1/2.
double ks_distance(std::vector<double> values, const std::function<double(double)>& cdf, bool lattice);

/// Draws n pairs with a fresh generator seeded by `seed`.
CouplingAuditReport audit(const CouplingSampler& sampler, std::uint64_t n, std::uint64_t seed);

}  // namespace cxorder
