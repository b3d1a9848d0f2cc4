#include "cxorder/couplings.hpp"

#include <algorithm>
#include <cmath>

#include "cxorder/families.hpp"
#include "cxorder/scalar.hpp"

namespace cxorder {

namespace {

double draw_gamma(double shape, double rate, Rng& rng) {
    if (shape == 0.0) {
        return 0.0;
    }
    return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

double draw_poisson(double mean, Rng& rng) {
    if (mean <= 0.0) {
        return 0.0;
    }
    return static_cast<double>(std::poisson_distribution<long long>(mean)(rng));
}

void require(bool ok, const char* what) {
    if (!ok) {
        throw HypothesisViolation(what);
    }
}

void require_finite(std::span<const double> params) {
    for (double v : params) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("non-finite coupling parameter");
        }
    }
}

void check_poisson(double l1, double l2) {
    require(0.0 <= l1 && l1 <= l2, "poisson coupling needs 0 <= l1 <= l2");
}

void check_negative_binomial(double r1, double p1, double r2, double p2) {
    require(0.0 <= r1 && r1 <= r2, "negative binomial coupling needs 0 <= r1 <= r2");
    require(0.0 <= p1 && p1 <= p2 && p2 < 1.0, "negative binomial coupling needs 0 <= p1 <= p2 < 1");
}

void check_gamma(double a1, double b1, double a2, double b2) {
    require(0.0 <= a1 && a1 <= a2, "gamma coupling needs 0 <= a1 <= a2");
    require(b2 > 0.0 && b1 >= b2, "gamma coupling needs b1 >= b2 > 0");
}

void check_beta(double a1, double b1, double a2, double b2) {
    require(a1 >= 0.0 && b1 >= 0.0 && a2 >= 0.0 && b2 >= 0.0, "beta coupling needs non-negative shapes");
    require(a1 <= a2 && b1 >= b2, "beta coupling needs a1 <= a2 and b1 >= b2");
    require(a1 + b1 > 0.0 && a2 + b2 > 0.0, "beta coupling needs a + b > 0 for both laws");
}

void check_normal(double m1, double m2, double var) {
    require(m1 <= m2, "normal coupling needs m1 <= m2");
    require(var > 0.0, "normal coupling needs a positive variance");
}

}  // namespace

CoupledPair couple_poisson(double l1, double l2, Rng& rng) {
    check_poisson(l1, l2);
    const double x = draw_poisson(l1, rng);
    return {x, x + draw_poisson(l2 - l1, rng)};
}

CoupledPair couple_negative_binomial(double r1, double p1, double r2, double p2, Rng& rng) {
    check_negative_binomial(r1, p1, r2, p2);
    const double theta1 = p1 / (1.0 - p1);
    const double theta2 = p2 / (1.0 - p2);
    // Both evaluation times of the Poisson process share the clock T.
    const double t = draw_gamma(r1, 1.0, rng);
    const double x = draw_poisson(theta1 * t, rng);
    const double increment = draw_poisson((theta2 - theta1) * t, rng);
    const double z = draw_poisson(theta2 * draw_gamma(r2 - r1, 1.0, rng), rng);
    return {x, x + increment + z};
}

CoupledPair couple_gamma(double a1, double b1, double a2, double b2, Rng& rng) {
    check_gamma(a1, b1, a2, b2);
    const double x = draw_gamma(a1, b1, rng);
    const double z = draw_gamma(a2 - a1, b1, rng);
    return {x, (b1 / b2) * (x + z)};
}

CoupledPair couple_beta(double a1, double b1, double a2, double b2, Rng& rng) {
    check_beta(a1, b1, a2, b2);
    const double u = draw_gamma(a1, 1.0, rng);
    const double v = draw_gamma(a2 - a1, 1.0, rng);
    const double w = draw_gamma(b2, 1.0, rng);
    const double z = draw_gamma(b1 - b2, 1.0, rng);
    // 1 / (1 + rest / lead) is monotone in each argument under rounding.
    const double x = u == 0.0 ? 0.0 : 1.0 / (1.0 + (w + z) / u);
    const double uv = u + v;
    const double y = uv == 0.0 ? (w == 0.0 ? 1.0 : 0.0) : 1.0 / (1.0 + w / uv);
    return {x, y};
}

CoupledPair couple_normal(double m1, double m2, double var, Rng& rng) {
    check_normal(m1, m2, var);
    const double x = std::normal_distribution<double>(m1, std::sqrt(var))(rng);
    return {x, x + (m2 - m1)};
}

// ---------------------------------------------------------------------------

CouplingSampler CouplingSampler::poisson(double l1, double l2) {
    require_finite(std::vector{l1, l2});
    check_poisson(l1, l2);
    return {Kind::poisson, {l1, l2}};
}

CouplingSampler CouplingSampler::negative_binomial(double r1, double p1, double r2, double p2) {
    require_finite(std::vector{r1, p1, r2, p2});
    check_negative_binomial(r1, p1, r2, p2);
    return {Kind::negative_binomial, {r1, p1, r2, p2}};
}

CouplingSampler CouplingSampler::gamma(double a1, double b1, double a2, double b2) {
    require_finite(std::vector{a1, b1, a2, b2});
    check_gamma(a1, b1, a2, b2);
    return {Kind::gamma, {a1, b1, a2, b2}};
}

CouplingSampler CouplingSampler::beta(double a1, double b1, double a2, double b2) {
    require_finite(std::vector{a1, b1, a2, b2});
    check_beta(a1, b1, a2, b2);
    return {Kind::beta, {a1, b1, a2, b2}};
}

CouplingSampler CouplingSampler::normal_shift(double m1, double m2, double var) {
    require_finite(std::vector{m1, m2, var});
    check_normal(m1, m2, var);
    return {Kind::normal_shift, {m1, m2, var}};
}

CouplingSampler CouplingSampler::from_args(std::string_view kind, std::span<const double> p) {
    auto arity = [&](std::size_t n) {
        if (p.size() != n) {
            throw InvalidArgument("coupling '" + std::string(kind) + "' takes " + std::to_string(n) +
                                  " parameters");
        }
    };
    if (kind == "poisson") {
        arity(2);
        return poisson(p[0], p[1]);
    }
    if (kind == "nb" || kind == "negative_binomial") {
        arity(4);
        return negative_binomial(p[0], p[1], p[2], p[3]);
    }
    if (kind == "gamma") {
        arity(4);
        return gamma(p[0], p[1], p[2], p[3]);
    }
    if (kind == "beta") {
        arity(4);
        return beta(p[0], p[1], p[2], p[3]);
    }
    if (kind == "normal" || kind == "normal_shift") {
        arity(3);
        return normal_shift(p[0], p[1], p[2]);
    }
    throw InvalidArgument("unknown coupling '" + std::string(kind) + "'");
}

std::string_view CouplingSampler::name() const {
    switch (kind_) {
        case Kind::poisson:
            return "poisson";
        case Kind::negative_binomial:
            return "negative_binomial";
        case Kind::gamma:
            return "gamma";
        case Kind::beta:
            return "beta";
        case Kind::normal_shift:
            return "normal_shift";
    }
    return "";
}

bool CouplingSampler::lattice() const noexcept {
    return kind_ == Kind::poisson || kind_ == Kind::negative_binomial;
}

std::function<double(double)> CouplingSampler::marginal_cdf(bool second) const {
    const auto& p = params_;
    const std::size_t o = second ? 2 : 0;
    switch (kind_) {
        case Kind::poisson: {
            const double l = p[second ? 1 : 0];
            return [l](double t) { return poisson_cdf(l, t); };
        }
        case Kind::negative_binomial: {
            const double r = p[o];
            const double q = p[o + 1];
            return [r, q](double t) { return negative_binomial_cdf(r, q, t); };
        }
        case Kind::gamma: {
            auto f = ContinuousFamily::gamma(p[o], p[o + 1]);
            return [f](double t) { return f.cdf(t); };
        }
        case Kind::beta: {
            auto f = ContinuousFamily::beta(p[o], p[o + 1]);
            return [f](double t) { return f.cdf(t); };
        }
        case Kind::normal_shift: {
            auto f = ContinuousFamily::normal(p[second ? 1 : 0], p[2]);
            return [f](double t) { return f.cdf(t); };
        }
    }
    return {};
}

double CouplingSampler::cdf_x(double t) const { return marginal_cdf(false)(t); }
double CouplingSampler::cdf_y(double t) const { return marginal_cdf(true)(t); }

CoupledPair CouplingSampler::sample(Rng& rng) const {
    const auto& p = params_;
    switch (kind_) {
        case Kind::poisson:
            return couple_poisson(p[0], p[1], rng);
        case Kind::negative_binomial:
            return couple_negative_binomial(p[0], p[1], p[2], p[3], rng);
        case Kind::gamma:
            return couple_gamma(p[0], p[1], p[2], p[3], rng);
        case Kind::beta:
            return couple_beta(p[0], p[1], p[2], p[3], rng);
        case Kind::normal_shift:
            return couple_normal(p[0], p[1], p[2], rng);
    }
    return {};
}

// ---------------------------------------------------------------------------

double ks_distance(std::vector<double> values, const std::function<double(double)>& cdf, bool lattice) {
    if (values.empty()) {
        throw InvalidArgument("ks_distance: no samples");
    }
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double worst = 0.0;
    std::size_t i = 0;
    while (i < values.size()) {
        const double v = values[i];
        std::size_t j = i;
        while (j < values.size() && values[j] == v) {
            ++j;
        }
        const double below = static_cast<double>(i) / n;
        const double upto = static_cast<double>(j) / n;
        const double left = lattice ? cdf(v - 0.5) : cdf(v);
        worst = std::max({worst, std::abs(upto - cdf(v)), std::abs(below - left)});
        i = j;
    }
    return worst;
}

nlohmann::json CouplingAuditReport::to_json() const {
    return {{"kind", kind},
            {"params", params},
            {"samples", samples},
            {"dominance_violations", dominance_violations},
            {"ks_distance_x", ks_distance_x},
            {"ks_distance_y", ks_distance_y},
            {"seed", seed}};
}

CouplingAuditReport audit(const CouplingSampler& sampler, std::uint64_t n, std::uint64_t seed) {
    if (n == 0) {
        throw InvalidArgument("audit needs at least one sample");
    }
    Rng rng(seed);
    std::vector<double> xs;
    std::vector<double> ys;
    xs.reserve(n);
    ys.reserve(n);
    CouplingAuditReport report;
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto [x, y] = sampler.sample(rng);
        report.dominance_violations += !(x <= y);
        xs.push_back(x);
        ys.push_back(y);
    }
    report.kind = std::string(sampler.name());
    report.params = sampler.params();
    report.samples = n;
    report.seed = seed;
    report.ks_distance_x = ks_distance(std::move(xs), sampler.marginal_cdf(false), sampler.lattice());
    report.ks_distance_y = ks_distance(std::move(ys), sampler.marginal_cdf(true), sampler.lattice());
    return report;
}

}  // namespace cxorder
