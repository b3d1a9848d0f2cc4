#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <cxorder/families.hpp>
#include <cxorder/muirhead.hpp>

#include "helpers.hpp"

using namespace cxorder;
using testing::exact;
using testing::q;

namespace {

const FiniteMeasure mu24 = exact({{"-3", "1/2"}, {"1", "1/2"}});
const FiniteMeasure nu24 = exact({{"0", "3/4"}, {"4", "1/4"}});

DistributionPolynomial poly_v() {
    return DistributionPolynomial::from_json(
        nlohmann::json::parse(R"({"arity":2,"terms":[{"c":"1/2","e":[3,1]},{"c":"1/2","e":[1,3]}]})"));
}

DistributionPolynomial poly_w() {
    return DistributionPolynomial(2, {{q(1, 8), {4, 0}}, {q(3, 4), {2, 2}}, {q(1, 8), {0, 4}}});
}

ExponentTuple t(std::vector<int> v) { return ExponentTuple(std::move(v)); }

}  // namespace

TEST_CASE("arrangements") {
    const std::vector<FiniteMeasure> ms{mu24, nu24};
    const std::vector<int> id{0, 1};
    CHECK(arrangement(ms, t({1, 1}), id) == convolve(mu24, nu24));
    CHECK(arrangement(ms, t({2, 0}), id) == convolve(mu24, mu24));
    const std::vector<FiniteMeasure> points{dirac(q(1)), dirac(q(2))};
    const std::vector<int> swap{1, 0};
    CHECK(arrangement(points, t({2, 1}), swap) == dirac(q(5)));
    CHECK(arrangement(points, t({0, 0}), id) == dirac(q(0)));
    CHECK_THROWS_AS(arrangement(points, t({1, 1, 0}), id), InvalidArgument);
    const std::vector<int> bad{0, 0};
    CHECK_THROWS_AS(arrangement(points, t({1, 1}), bad), InvalidArgument);
}

TEST_CASE("symmetrization") {
    const std::vector<FiniteMeasure> ms{mu24, nu24};
    CHECK(symmetrize(ms, t({1, 1})) == convolve(mu24, nu24));
    std::vector<Scalar> half{q(1, 2), q(1, 2)};
    std::vector<FiniteMeasure> parts{convolve(mu24, mu24), convolve(nu24, nu24)};
    CHECK(symmetrize(ms, t({2, 0})) == mixture(half, parts));

    const std::vector<FiniteMeasure> logs{dirac(Scalar(0.0)), dirac(Scalar(std::log(2.0)))};
    const auto e = expectation(symmetrize(logs, t({2, 0})), ConvexTestFunction::exp_scaled(q(1)));
    CHECK(e.to_double() == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("property: symmetrization is permutation invariant") {
    std::mt19937_64 rng(8);
    for (int k = 2; k <= 4; ++k) {
        std::vector<FiniteMeasure> ms;
        for (int i = 0; i < k; ++i) {
            ms.push_back(testing::random_integer_measure(rng, 3, -3, 3));
        }
        for (int total = 0; total <= 3; ++total) {
            for (const auto& p : enumerate_tuples(k, total)) {
                const auto base = symmetrize(ms, p);
                std::vector<int> order(k);
                std::iota(order.begin(), order.end(), 0);
                while (std::next_permutation(order.begin(), order.end())) {
                    std::vector<FiniteMeasure> permuted;
                    for (int i : order) {
                        permuted.push_back(ms[i]);
                    }
                    CHECK(symmetrize(permuted, p) == base);
                }
            }
        }
    }
}

TEST_CASE("property: symmetrizations of equal degree share their mean") {
    const std::vector<FiniteMeasure> ms{binomial(3, q(1, 4)), binomial(3, q(1, 2)), binomial(3, q(3, 4))};
    for (int total = 0; total <= 4; ++total) {
        const auto tuples = enumerate_tuples(3, total);
        const Scalar m = mean(symmetrize(ms, tuples.front()));
        for (const auto& p : tuples) {
            CHECK(mean(symmetrize(ms, p)) == m);
        }
    }
}

TEST_CASE("muirhead verification") {
    const std::vector<FiniteMeasure> b{binomial(3, q(1, 4)), binomial(3, q(3, 4))};
    const auto r = verify_muirhead(b, t({1, 1}), t({2, 0}));
    REQUIRE(r.endpoint.has_value());
    CHECK(r.endpoint->holds);
    CHECK(r.consistent);
    CHECK(r.comparable);
    CHECK(r.endpoint->tolerance == q(0));

    const std::vector<FiniteMeasure> points(3, dirac(q(0)));
    const auto d = verify_muirhead(points, t({1, 1, 1}), t({3, 0, 0}));
    CHECK(d.endpoint->holds);
    CHECK(d.endpoint->margin == q(0));
    CHECK(d.chain.size() == 3);
    CHECK(d.steps.size() == 2);

    const std::vector<FiniteMeasure> p{poisson(Scalar(1), 1e-12), poisson(Scalar(2), 1e-12), poisson(Scalar(3), 1e-12)};
    const auto pr = verify_muirhead(p, t({1, 1, 1}), t({2, 1, 0}));
    CHECK(pr.endpoint->holds);
    CHECK(pr.consistent);

    CHECK_THROWS_AS(verify_muirhead(b, t({2, 0}), t({1, 1})), InvalidArgument);
}

TEST_CASE("incomparable measures need the unconditional flag") {
    const std::vector<FiniteMeasure> ms{mu24, nu24};
    const auto r = verify_muirhead(ms, t({1, 1}), t({2, 0}));
    CHECK_FALSE(r.comparable);
    CHECK(r.hypothesis_failed());
    CHECK(r.incomparable_pairs.size() == 1);
    const auto u = verify_muirhead(ms, t({1, 1}), t({2, 0}), {Scalar(1e-9), true});
    REQUIRE(u.endpoint.has_value());
    CHECK(u.endpoint->holds);
    CHECK(u.to_json()["endpoint"]["holds"] == true);
}

TEST_CASE("gap functionals") {
    const auto a = binomial(3, q(1, 3));
    const auto sq = ConvexTestFunction::square();
    CHECK(rasa_gap(a, a, sq, q(1, 6)) == q(0));
    CHECK(rasa_gap(binomial(1, q(0)), binomial(1, q(1)), ConvexTestFunction::abs_dev(q(1, 2)), q(1, 2)) == q(1));

    // Direct double sum over i, j of the Bernstein weights.
    const auto phi = ConvexTestFunction::stop_loss(q(1, 2));
    const auto bx = binomial(3, q(1, 3));
    const auto by = binomial(3, q(2, 3));
    Scalar brute(0);
    for (const auto& ai : bx.atoms()) {
        for (const auto& aj : bx.atoms()) {
            brute += ai.w * aj.w * phi((ai.x + aj.x) / Scalar(6));
        }
    }
    for (const auto& ai : by.atoms()) {
        for (const auto& aj : by.atoms()) {
            brute += ai.w * aj.w * phi((ai.x + aj.x) / Scalar(6));
        }
    }
    for (const auto& ai : bx.atoms()) {
        for (const auto& aj : by.atoms()) {
            brute -= Scalar(2) * ai.w * aj.w * phi((ai.x + aj.x) / Scalar(6));
        }
    }
    const Scalar gap = rasa_gap(bx, by, phi, q(1, 6));
    CHECK(gap.is_exact());
    CHECK(gap == brute);
    CHECK(gap >= q(0));
}

TEST_CASE("m-fold gap") {
    const auto a = binomial(2, q(1, 3));
    const auto b = binomial(2, q(3, 4));
    const auto phi = ConvexTestFunction::abs_dev(q(1, 2));
    const std::vector<FiniteMeasure> two{a, b};
    CHECK(rasa_gap_m(two, phi, q(1, 4)) == rasa_gap(a, b, phi, q(1, 4)));
    const std::vector<FiniteMeasure> same(3, a);
    CHECK(rasa_gap_m(same, phi, q(1, 6)) == q(0));

    const std::vector<FiniteMeasure> three{binomial(2, q(0)), binomial(2, q(1, 2)), binomial(2, q(1))};
    const auto sq = ConvexTestFunction::square();
    Scalar brute(0);
    for (const auto& m : three) {
        const auto p3 = convolve_power(m, 3);
        for (const auto& atom : p3.atoms()) {
            brute += atom.w * sq(atom.x / Scalar(6));
        }
    }
    for (const auto& i1 : three[0].atoms()) {
        for (const auto& i2 : three[1].atoms()) {
            for (const auto& i3 : three[2].atoms()) {
                brute -= Scalar(3) * i1.w * i2.w * i3.w * sq((i1.x + i2.x + i3.x) / Scalar(6));
            }
        }
    }
    const Scalar gap = rasa_gap_m(three, sq, q(1, 6));
    CHECK(gap == brute);
    CHECK(gap >= q(0));
    CHECK_THROWS_AS(rasa_gap_m(std::vector<FiniteMeasure>{a}, sq, q(1)), InvalidArgument);
}

TEST_CASE("operators") {
    auto affine = [](const Scalar& x) { return Scalar(3) * x - q(1, 2); };
    auto sq = [](const Scalar& x) { return x * x; };
    auto one = [](const Scalar&) { return Scalar(1); };
    for (int j = 0; j <= 5; ++j) {
        CHECK(eval_operator(OperatorKind::bernstein, q(5), affine, q(j, 5)) == affine(q(j, 5)));
    }
    CHECK(eval_operator(OperatorKind::bernstein, q(2), sq, q(1, 2)) == q(3, 8));
    CHECK(std::abs(eval_operator(OperatorKind::szasz, q(4), one, q(3, 2)).to_double() - 1.0) < 1e-11);
    CHECK(std::abs(eval_operator(OperatorKind::szasz, q(4), affine, q(3, 2)).to_double() - 4.0) < 1e-10);
    CHECK(std::abs(eval_operator(OperatorKind::baskakov, q(3), affine, q(2)).to_double() - 5.5) < 1e-9);
    CHECK(std::abs(eval_operator(OperatorKind::beta, q(4), affine, q(1, 3)).to_double() - 0.5) < 1e-10);
    CHECK(eval_operator(OperatorKind::beta, q(4), sq, q(0)) == q(0));
    // Beta(x t, (1 - x) t) has second moment x (x t + 1) / (t + 1).
    CHECK(eval_operator(OperatorKind::beta, q(4), sq, q(1, 2)).to_double() == doctest::Approx(0.3).epsilon(1e-10));
    CHECK_THROWS_AS(eval_operator(OperatorKind::bernstein, q(2), sq, q(2)), InvalidArgument);
    CHECK_THROWS_AS(eval_operator(OperatorKind::bernstein, q(5, 2), sq, q(1, 2)), InvalidArgument);
    CHECK_THROWS_AS(eval_operator(OperatorKind::szasz, q(2), sq, q(-1)), InvalidArgument);
    CHECK_THROWS_AS(parse_operator_kind("durrmeyer"), InvalidArgument);
}

TEST_CASE("distribution polynomials") {
    const std::vector<FiniteMeasure> ms{dirac(q(0)), exact({{"0", "1/2"}, {"1", "1/2"}})};
    CHECK(eval_poly(poly_v(), ms) == exact({{"0", "5/16"}, {"1", "7/16"}, {"2", "3/16"}, {"3", "1/16"}}));
    CHECK(eval_poly(poly_w(), ms) ==
          exact({{"0", "41/128"}, {"1", "52/128"}, {"2", "30/128"}, {"3", "4/128"}, {"4", "1/128"}}));
    const DistributionPolynomial xy(2, {{q(1), {1, 1}}});
    CHECK(eval_poly(xy, std::vector{mu24, nu24}) == convolve(mu24, nu24));
    CHECK(DistributionPolynomial::from_json(poly_v().to_json()).to_json() == poly_v().to_json());
    CHECK_THROWS_AS(DistributionPolynomial(2, {{q(1, 2), {1, 1}}}), InvalidArgument);
    CHECK_THROWS_AS(DistributionPolynomial(2, {{q(-1), {1, 1}}, {q(2), {2, 0}}}), InvalidArgument);
    CHECK_THROWS_AS(DistributionPolynomial(2, {{q(1), {1}}}), InvalidArgument);
    CHECK_THROWS_AS(DistributionPolynomial::from_json(nlohmann::json::parse(R"({"terms":[]})")), InvalidArgument);
    CHECK_THROWS_AS(eval_poly(xy, std::vector{mu24}), InvalidArgument);
}

TEST_CASE("counterexample polynomials have equal means but no cx order") {
    const std::vector<FiniteMeasure> ms{dirac(q(0)), exact({{"0", "1/2"}, {"1", "1/2"}})};
    const auto v = eval_poly(poly_v(), ms);
    const auto w = eval_poly(poly_w(), ms);
    CHECK(mean(v) == mean(w));
    CHECK(mean(v) == q(2) * (mean(ms[0]) + mean(ms[1])));
    CHECK_FALSE(check_cx(v, w).holds);
    for (int x = -3; x <= 3; ++x) {
        for (int y = -3; y <= 3; ++y) {
            const Scalar vx = q(1, 2) * q(x * x * x * y) + q(1, 2) * q(x * y * y * y);
            const Scalar wx = q(1, 8) * q(x * x * x * x) + q(3, 4) * q(x * x * y * y) + q(1, 8) * q(y * y * y * y);
            CHECK(wx - vx == q((x - y) * (x - y) * (x - y) * (x - y), 8));
        }
    }
}

TEST_CASE("property: classical Muirhead via point masses") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    const auto exp1 = ConvexTestFunction::exp_scaled(q(1));
    for (int trial = 0; trial < 20; ++trial) {
        for (int k = 2; k <= 3; ++k) {
            std::vector<double> xs(k);
            std::vector<FiniteMeasure> ms;
            for (auto& x : xs) {
                x = u(rng);
                ms.push_back(dirac(Scalar(std::log(x))));
            }
            for (int total = 0; total <= 4; ++total) {
                const auto tuples = enumerate_tuples(k, total);
                for (const auto& p : tuples) {
                    for (const auto& qq : tuples) {
                        if (!leq(p, qq)) {
                            continue;
                        }
                        const double lhs = expectation(symmetrize(ms, p), exp1).to_double();
                        const double rhs = expectation(symmetrize(ms, qq), exp1).to_double();
                        CHECK(lhs <= rhs * (1 + 1e-10));
                    }
                }
            }
        }
    }
}
