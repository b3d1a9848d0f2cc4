#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cxorder/majorization.hpp"
#include "cxorder/measure.hpp"
#include "cxorder/orders.hpp"

namespace cxorder {

/// (mu_{pi(1)})^{*p_1} * ... * (mu_{pi(k)})^{*p_k}; pi is a 0-based permutation.
FiniteMeasure arrangement(std::span<const FiniteMeasure> measures, const ExponentTuple& p,
                          std::span<const int> pi);

/// Uniform mixture of all k! arrangements. Arrangements that only permute equal
/// exponents coincide, so the mixture runs over distinct exponent assignments.
FiniteMeasure symmetrize(std::span<const FiniteMeasure> measures, const ExponentTuple& p);

struct MuirheadOptions {
    Scalar tol = Scalar(kDefaultOrderTolerance);
    /// Run the order checks even when some pair of measures is st-incomparable.
    bool unconditional = false;
};

struct MuirheadReport {
    /// Every pair of measures is ordered one way or the other under check_st.
    bool comparable = true;
    std::vector<std::pair<std::size_t, std::size_t>> incomparable_pairs;
    std::vector<ExponentTuple> chain;
    /// cx verdicts of consecutive chain elements (empty when no verdict was computed).
    std::vector<OrderVerdict> steps;
    /// Absent when the comparability hypothesis fails and the run is conditional.
    std::optional<OrderVerdict> endpoint;
    /// All steps hold exactly when the endpoint holds.
    bool consistent = true;

    [[nodiscard]] bool hypothesis_failed() const { return !endpoint.has_value(); }
    [[nodiscard]] nlohmann::json to_json() const;
};

/// check_cx(symmetrize(ms, p), symmetrize(ms, q)) together with the per-step
/// checks along transfer_chain(p, q). Throws InvalidArgument unless leq(p, q).
MuirheadReport verify_muirhead(std::span<const FiniteMeasure> measures, const ExponentTuple& p,
                               const ExponentTuple& q, const MuirheadOptions& options = {});

/// E phi(S(a*a)) + E phi(S(b*b)) - 2 E phi(S(a*b)) with S(x) = scale * x.
Scalar rasa_gap(const FiniteMeasure& a, const FiniteMeasure& b, const ConvexTestFunction& phi,
                const Scalar& scale);

/// rasa_gap for several test functions sharing the three convolutions.
std::vector<Scalar> rasa_gaps(const FiniteMeasure& a, const FiniteMeasure& b,
                              std::span<const ConvexTestFunction> phis, const Scalar& scale);

/// Same, from already scaled S(a*a), S(b*b) and S(a*b).
std::vector<Scalar> rasa_gaps_from(const FiniteMeasure& aa, const FiniteMeasure& bb,
                                   const FiniteMeasure& ab, std::span<const ConvexTestFunction> phis);

/// sum_l E phi(S(mu_l^{*m})) - m E phi(S(mu_1 * ... * mu_m)) for m = measures.size() >= 2.
Scalar rasa_gap_m(std::span<const FiniteMeasure> measures, const ConvexTestFunction& phi,
                  const Scalar& scale);

enum class OperatorKind { bernstein, szasz, baskakov, beta };

OperatorKind parse_operator_kind(std::string_view name);

/**
 * T(phi)(x) for the Bernstein (B_n), Mirakyan-Szasz (S_n) and Baskakov (V_n)
 * operators, where `order` is n, and for the beta operator B_t with `order` = t.
 * The discrete operators sum phi(i / n) against the binomial, Poisson(n x)
 * and NB(n, x / (1 + x)) weights; the beta operator integrates phi against
 * the Beta(x t, (1 - x) t) density.
 */
Scalar eval_operator(OperatorKind kind, const Scalar& order, const RealFunction& phi, const Scalar& x,
                     double tail_eps = 1e-12);

struct PolynomialTerm {
    Scalar coefficient;
    std::vector<int> exponents;
};

/// Polynomial with non-negative coefficients summing to one.
class DistributionPolynomial {
  public:
    DistributionPolynomial(int arity, std::vector<PolynomialTerm> terms);

    /// {"arity": 2, "terms": [{"c": "1/2", "e": [3, 1]}, ...]}
    static DistributionPolynomial from_json(const nlohmann::json& j);
    [[nodiscard]] nlohmann::json to_json() const;

    [[nodiscard]] int arity() const noexcept { return arity_; }
    [[nodiscard]] const std::vector<PolynomialTerm>& terms() const noexcept { return terms_; }

  private:
    int arity_;
    std::vector<PolynomialTerm> terms_;
};

/// Substitutes measures for the variables: products become convolutions and sums mixtures.
FiniteMeasure eval_poly(const DistributionPolynomial& poly, std::span<const FiniteMeasure> measures);

/// One gap value of a sweep.
struct GapReport {
    std::string family;
    std::string params;
    ConvexTestFunction test_function = ConvexTestFunction::square();
    Scalar scale;
    Scalar gap;
    Regime regime = Regime::exact;
};

}  // namespace cxorder
