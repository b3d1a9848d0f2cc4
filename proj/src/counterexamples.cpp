#include "cxorder/counterexamples.hpp"

#include <algorithm>

#include "cxorder/json_io.hpp"
#include "cxorder/orders.hpp"

namespace cxorder {

bool ExampleReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const ExampleCheck& c) { return c.passed; });
}

nlohmann::json ExampleReport::to_json() const {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& c : checks) {
        list.push_back({{"claim", c.claim}, {"passed", c.passed}, {"observed", c.observed}});
    }
    return {{"example", name}, {"passed", passed()}, {"checks", list}};
}

std::vector<std::string> example_names() { return {"ex2.4", "ex3.9"}; }

DistributionPolynomial example_polynomial_v() {
    const Scalar half = Scalar::fraction(1, 2);
    return DistributionPolynomial(2, {{half, {3, 1}}, {half, {1, 3}}});
}

DistributionPolynomial example_polynomial_w() {
    return DistributionPolynomial(
        2, {{Scalar::fraction(1, 8), {4, 0}}, {Scalar::fraction(3, 4), {2, 2}}, {Scalar::fraction(1, 8), {0, 4}}});
}

namespace {

FiniteMeasure two_point(long x1, const Scalar& w1, long x2, const Scalar& w2) {
    const std::vector<Scalar> coeffs{w1, w2};
    const std::vector<FiniteMeasure> parts{dirac(Scalar(x1)), dirac(Scalar(x2))};
    return mixture(coeffs, parts);
}

std::string describe(const FiniteMeasure& m) { return measure_to_json(m).dump(); }

std::string describe(const OrderVerdict& v) { return verdict_to_json(v).dump(); }

/// Checks that m has exactly the given weights on 0, 1, 2, ... with denominator den.
bool has_weights(const FiniteMeasure& m, const std::vector<long>& numerators, long den) {
    if (m.size() != numerators.size() || m.regime() != Regime::exact) {
        return false;
    }
    for (std::size_t k = 0; k < numerators.size(); ++k) {
        if (m.atoms()[k].x != Scalar(static_cast<long>(k)) ||
            m.atoms()[k].w != Scalar::fraction(numerators[k], den)) {
            return false;
        }
    }
    return true;
}

ExampleReport incomparable_pair() {
    ExampleReport r{"ex2.4", {}};
    const auto mu = two_point(-3, Scalar::fraction(1, 2), 1, Scalar::fraction(1, 2));
    const auto nu = two_point(0, Scalar::fraction(3, 4), 4, Scalar::fraction(1, 4));

    const auto st_ab = check_st(mu, nu, Scalar(0));
    const auto st_ba = check_st(nu, mu, Scalar(0));
    r.checks.push_back({"mu <=st nu fails", !st_ab.holds, describe(st_ab)});
    r.checks.push_back({"nu <=st mu fails", !st_ba.holds, describe(st_ba)});

    const std::vector<Scalar> half{Scalar::fraction(1, 2), Scalar::fraction(1, 2)};
    const std::vector<FiniteMeasure> parts{convolve(mu, mu), convolve(nu, nu)};
    const auto lhs = convolve(mu, nu);
    const auto rhs = mixture(half, parts);
    const auto cx = check_cx(lhs, rhs, Scalar(0));
    r.checks.push_back({"mu*nu <=cx (mu*mu + nu*nu)/2 holds with exact margin >= 0",
                        cx.holds && cx.margin.is_exact() && cx.margin.sign() >= 0, describe(cx)});
    return r;
}

ExampleReport polynomial_pair() {
    ExampleReport r{"ex3.9", {}};
    const auto mu = dirac(Scalar(0));
    const auto nu = two_point(0, Scalar::fraction(1, 2), 1, Scalar::fraction(1, 2));
    const std::vector<FiniteMeasure> args{mu, nu};

    const auto st = check_st(mu, nu, Scalar(0));
    r.checks.push_back({"mu <=st nu", st.holds, describe(st)});

    const auto v = eval_poly(example_polynomial_v(), args);
    const auto w = eval_poly(example_polynomial_w(), args);
    r.checks.push_back({"V(mu, nu) = (5, 7, 3, 1)/16 on 0..3", has_weights(v, {5, 7, 3, 1}, 16), describe(v)});
    r.checks.push_back(
        {"W(mu, nu) = (41, 52, 30, 4, 1)/128 on 0..4", has_weights(w, {41, 52, 30, 4, 1}, 128), describe(w)});

    const Scalar two_sums = Scalar(2) * (mean(mu) + mean(nu));
    r.checks.push_back({"E V(mu, nu) = 2(E mu + E nu) = E W(mu, nu)", mean(v) == two_sums && mean(w) == two_sums,
                        mean(v).to_string() + " " + mean(w).to_string()});

    const Scalar sv = stop_loss(v, Scalar(2));
    const Scalar sw = stop_loss(w, Scalar(2));
    r.checks.push_back({"E max(0, V - 2) = 1/16", sv == Scalar::fraction(1, 16), sv.to_string()});
    r.checks.push_back({"E max(0, W - 2) = 6/128", sw == Scalar::fraction(6, 128), sw.to_string()});
    r.checks.push_back({"1/16 > 6/128", sv > sw, sv.to_string() + " > " + sw.to_string()});

    const auto cx = check_cx(v, w, Scalar(0));
    r.checks.push_back({"V(mu, nu) <=cx W(mu, nu) fails at t = 2",
                        !cx.holds && cx.witness && *cx.witness == Scalar(2), describe(cx)});
    return r;
}

}  // namespace

ExampleReport reproduce_example(std::string_view name) {
    if (name == "ex2.4") {
        return incomparable_pair();
    }
    if (name == "ex3.9") {
        return polynomial_pair();
    }
    throw InvalidArgument("unknown example '" + std::string(name) + "' (known: ex2.4, ex3.9)");
}

}  // namespace cxorder
