#include "cxorder/muirhead.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "cxorder/families.hpp"
#include "cxorder/json_io.hpp"

namespace cxorder {

namespace {

void require_arity(std::span<const FiniteMeasure> measures, std::size_t k) {
    if (measures.size() != k) {
        throw InvalidArgument("expected " + std::to_string(k) + " measures, got " +
                              std::to_string(measures.size()));
    }
}

/// Convolution powers of a fixed list of measures, computed once per (index, exponent).
class PowerCache {
  public:
    explicit PowerCache(std::span<const FiniteMeasure> measures) : measures_(measures) {}

    const FiniteMeasure& power(std::size_t j, int e) {
        auto key = std::pair{j, e};
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            it = cache_.emplace(key, convolve_power(measures_[j], e)).first;
        }
        return it->second;
    }

    /// Convolution of measure j raised to exponents[j], over all j.
    FiniteMeasure product(std::span<const int> exponents) {
        std::optional<FiniteMeasure> acc;
        for (std::size_t j = 0; j < exponents.size(); ++j) {
            if (exponents[j] == 0) {
                continue;
            }
            const auto& f = power(j, exponents[j]);
            acc = acc ? convolve(*acc, f) : f;
        }
        return acc ? std::move(*acc) : dirac(Scalar(0));
    }

  private:
    std::span<const FiniteMeasure> measures_;
    std::map<std::pair<std::size_t, int>, FiniteMeasure> cache_;
};

FiniteMeasure symmetrize_cached(PowerCache& cache, const ExponentTuple& p) {
    std::vector<int> assignment(p.entries().rbegin(), p.entries().rend());
    std::vector<FiniteMeasure> parts;
    do {
        parts.push_back(cache.product(assignment));
    } while (std::next_permutation(assignment.begin(), assignment.end()));
    const std::vector<Scalar> weights(parts.size(), Scalar::fraction(1, static_cast<long>(parts.size())));
    return mixture(weights, parts);
}

}  // namespace

FiniteMeasure arrangement(std::span<const FiniteMeasure> measures, const ExponentTuple& p,
                          std::span<const int> pi) {
    require_arity(measures, p.size());
    if (pi.size() != p.size()) {
        throw InvalidArgument("permutation length differs from tuple length");
    }
    std::vector<int> exponents(p.size(), -1);
    for (std::size_t j = 0; j < pi.size(); ++j) {
        if (pi[j] < 0 || static_cast<std::size_t>(pi[j]) >= p.size() || exponents[pi[j]] != -1) {
            throw InvalidArgument("not a permutation of 0..k-1");
        }
        exponents[pi[j]] = p[j];
    }
    PowerCache cache(measures);
    return cache.product(exponents);
}

FiniteMeasure symmetrize(std::span<const FiniteMeasure> measures, const ExponentTuple& p) {
    require_arity(measures, p.size());
    PowerCache cache(measures);
    return symmetrize_cached(cache, p);
}

nlohmann::json MuirheadReport::to_json() const {
    nlohmann::json j;
    j["comparable"] = comparable;
    j["incomparable_pairs"] = nlohmann::json::array();
    for (const auto& [a, b] : incomparable_pairs) {
        j["incomparable_pairs"].push_back({a, b});
    }
    j["chain"] = nlohmann::json::array();
    for (const auto& t : chain) {
        j["chain"].push_back(t.to_string());
    }
    j["steps"] = nlohmann::json::array();
    for (const auto& v : steps) {
        j["steps"].push_back(verdict_to_json(v));
    }
    j["endpoint"] = endpoint ? verdict_to_json(*endpoint) : nlohmann::json(nullptr);
    j["consistent"] = consistent;
    return j;
}

MuirheadReport verify_muirhead(std::span<const FiniteMeasure> measures, const ExponentTuple& p,
                               const ExponentTuple& q, const MuirheadOptions& options) {
    require_arity(measures, p.size());
    MuirheadReport report;
    report.chain = transfer_chain(p, q);

    for (std::size_t i = 0; i < measures.size(); ++i) {
        for (std::size_t j = i + 1; j < measures.size(); ++j) {
            if (!check_st(measures[i], measures[j], options.tol).holds &&
                !check_st(measures[j], measures[i], options.tol).holds) {
                report.comparable = false;
                report.incomparable_pairs.emplace_back(i, j);
            }
        }
    }
    if (!report.comparable && !options.unconditional) {
        return report;
    }

    PowerCache cache(measures);
    std::map<std::vector<int>, FiniteMeasure> symmetrized;
    auto sym = [&](const ExponentTuple& t) -> const FiniteMeasure& {
        auto it = symmetrized.find(t.entries());
        if (it == symmetrized.end()) {
            it = symmetrized.emplace(t.entries(), symmetrize_cached(cache, t)).first;
        }
        return it->second;
    };

    report.endpoint = check_cx(sym(p), sym(q), options.tol);
    bool all_steps = true;
    for (std::size_t i = 1; i < report.chain.size(); ++i) {
        report.steps.push_back(check_cx(sym(report.chain[i - 1]), sym(report.chain[i]), options.tol));
        all_steps = all_steps && report.steps.back().holds;
    }
    report.consistent = all_steps == report.endpoint->holds;
    return report;
}

// ---------------------------------------------------------------------------

std::vector<Scalar> rasa_gaps_from(const FiniteMeasure& aa, const FiniteMeasure& bb,
                                   const FiniteMeasure& ab, std::span<const ConvexTestFunction> phis) {
    std::vector<Scalar> out;
    out.reserve(phis.size());
    for (const auto& phi : phis) {
        out.push_back(expectation(aa, phi) + expectation(bb, phi) - Scalar(2) * expectation(ab, phi));
    }
    return out;
}

std::vector<Scalar> rasa_gaps(const FiniteMeasure& a, const FiniteMeasure& b,
                              std::span<const ConvexTestFunction> phis, const Scalar& scale) {
    const Scalar zero(0);
    return rasa_gaps_from(pushforward_affine(convolve(a, a), scale, zero),
                          pushforward_affine(convolve(b, b), scale, zero),
                          pushforward_affine(convolve(a, b), scale, zero), phis);
}

Scalar rasa_gap(const FiniteMeasure& a, const FiniteMeasure& b, const ConvexTestFunction& phi,
                const Scalar& scale) {
    return rasa_gaps(a, b, std::span(&phi, 1), scale).front();
}

Scalar rasa_gap_m(std::span<const FiniteMeasure> measures, const ConvexTestFunction& phi,
                  const Scalar& scale) {
    const int m = static_cast<int>(measures.size());
    if (m < 2) {
        throw InvalidArgument("rasa_gap_m needs at least two measures");
    }
    const Scalar zero(0);
    Scalar sum(0);
    for (const auto& mu : measures) {
        sum += expectation(pushforward_affine(convolve_power(mu, m), scale, zero), phi);
    }
    FiniteMeasure prod = measures[0];
    for (int l = 1; l < m; ++l) {
        prod = convolve(prod, measures[l]);
    }
    return sum - Scalar(m) * expectation(pushforward_affine(prod, scale, zero), phi);
}

// ---------------------------------------------------------------------------

OperatorKind parse_operator_kind(std::string_view name) {
    if (name == "bernstein") {
        return OperatorKind::bernstein;
    }
    if (name == "szasz") {
        return OperatorKind::szasz;
    }
    if (name == "baskakov") {
        return OperatorKind::baskakov;
    }
    if (name == "beta") {
        return OperatorKind::beta;
    }
    throw InvalidArgument("unknown operator '" + std::string(name) + "'");
}

Scalar eval_operator(OperatorKind kind, const Scalar& order, const RealFunction& phi, const Scalar& x,
                     double tail_eps) {
    if (order.sign() <= 0) {
        throw InvalidArgument("operator order must be positive");
    }
    const Scalar zero(0);
    switch (kind) {
        case OperatorKind::bernstein: {
            if (!order.is_integer()) {
                throw InvalidArgument("Bernstein operator needs an integer n");
            }
            if (x.sign() < 0 || x > Scalar(1)) {
                throw InvalidArgument("Bernstein operator needs x in [0, 1]");
            }
            const int n = static_cast<int>(order.to_double());
            return expectation(pushforward_affine(binomial(n, x), Scalar(1) / order, zero), phi);
        }
        case OperatorKind::szasz: {
            if (x.sign() < 0) {
                throw InvalidArgument("Szasz operator needs x >= 0");
            }
            return expectation(pushforward_affine(poisson(order * x, tail_eps), Scalar(1) / order, zero), phi);
        }
        case OperatorKind::baskakov: {
            if (x.sign() < 0) {
                throw InvalidArgument("Baskakov operator needs x >= 0");
            }
            const auto law = negative_binomial(order, x / (Scalar(1) + x), tail_eps);
            return expectation(pushforward_affine(law, Scalar(1) / order, zero), phi);
        }
        case OperatorKind::beta: {
            if (x.sign() < 0 || x > Scalar(1)) {
                throw InvalidArgument("beta operator needs x in [0, 1]");
            }
            if (x.is_zero() || x == Scalar(1)) {
                return phi(x);
            }
            const double t = order.to_double();
            const double xd = x.to_double();
            const auto law = ContinuousFamily::beta(xd * t, (1.0 - xd) * t);
            boost::math::quadrature::tanh_sinh<double> integrator;
            auto integrand = [&](double u) { return phi(Scalar(u)).to_double() * law.density(u); };
            return Scalar(integrator.integrate(integrand, 0.0, 1.0));
        }
    }
    return zero;
}

// ---------------------------------------------------------------------------

DistributionPolynomial::DistributionPolynomial(int arity, std::vector<PolynomialTerm> terms)
    : arity_(arity), terms_(std::move(terms)) {
    if (arity_ < 1) {
        throw InvalidArgument("polynomial arity must be positive");
    }
    if (terms_.empty()) {
        throw InvalidArgument("polynomial has no terms");
    }
    Scalar sum(0);
    bool exact = true;
    for (const auto& t : terms_) {
        if (t.coefficient.sign() < 0) {
            throw InvalidArgument("polynomial coefficient " + t.coefficient.to_string() + " is negative");
        }
        if (t.exponents.size() != static_cast<std::size_t>(arity_)) {
            throw InvalidArgument("polynomial term has " + std::to_string(t.exponents.size()) +
                                  " exponents, arity is " + std::to_string(arity_));
        }
        if (std::any_of(t.exponents.begin(), t.exponents.end(), [](int e) { return e < 0; })) {
            throw InvalidArgument("polynomial exponents must be non-negative");
        }
        sum += t.coefficient;
        exact = exact && t.coefficient.is_exact();
    }
    if (exact ? sum != Scalar(1) : std::abs(sum.to_double() - 1.0) > 1e-12) {
        throw InvalidArgument("polynomial coefficients sum to " + sum.to_string() + ", not 1");
    }
}

DistributionPolynomial DistributionPolynomial::from_json(const nlohmann::json& j) {
    try {
        std::vector<PolynomialTerm> terms;
        for (const auto& t : j.at("terms")) {
            terms.push_back({scalar_from_json(t.at("c")), t.at("e").get<std::vector<int>>()});
        }
        return DistributionPolynomial(j.at("arity").get<int>(), std::move(terms));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed polynomial: ") + e.what());
    }
}

nlohmann::json DistributionPolynomial::to_json() const {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : terms_) {
        terms.push_back({{"c", scalar_to_json(t.coefficient)}, {"e", t.exponents}});
    }
    return {{"arity", arity_}, {"terms", terms}};
}

FiniteMeasure eval_poly(const DistributionPolynomial& poly, std::span<const FiniteMeasure> measures) {
    require_arity(measures, static_cast<std::size_t>(poly.arity()));
    PowerCache cache(measures);
    std::vector<Scalar> coeffs;
    std::vector<FiniteMeasure> parts;
    for (const auto& t : poly.terms()) {
        coeffs.push_back(t.coefficient);
        parts.push_back(cache.product(t.exponents));
    }
    return mixture(coeffs, parts);
}

}  // namespace cxorder
