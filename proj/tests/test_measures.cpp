#include <doctest.h>

#include <cmath>
#include <random>

#include <cxorder/json_io.hpp>
#include <cxorder/measure.hpp>

#include "helpers.hpp"

using namespace cxorder;
using testing::exact;
using testing::q;

TEST_CASE("scalar parsing keeps rationals exact") {
    CHECK(Scalar::parse("3/6") == q(1, 2));
    CHECK(Scalar::parse("3/6").is_exact());
    CHECK(Scalar::parse("-4").exact() == Rational(-4));
    CHECK_FALSE(Scalar::parse("0.5").is_exact());
    CHECK(Scalar::parse("0.5").to_double() == 0.5);
    CHECK_THROWS_AS(Scalar::parse("1/0"), InvalidArgument);
    CHECK_THROWS_AS(Scalar::parse("abc"), InvalidArgument);
    CHECK_THROWS_AS(Scalar::parse(""), InvalidArgument);
}

TEST_CASE("mixed arithmetic falls back to float") {
    const Scalar s = q(1, 3) + Scalar(0.5);
    CHECK_FALSE(s.is_exact());
    CHECK(s.to_double() == doctest::Approx(5.0 / 6.0));
    CHECK((q(1, 3) + q(1, 6)) == q(1, 2));
    CHECK_THROWS_AS(q(1) / q(0), InvalidArgument);
}

TEST_CASE("dirac") {
    const auto d = dirac(q(-3));
    REQUIRE(d.size() == 1);
    CHECK(d.atoms()[0].x == q(-3));
    CHECK(d.atoms()[0].w == q(1));
    CHECK(mean(dirac(q(7, 2))) == q(7, 2));
    CHECK(d.mass_defect().is_zero());
}

TEST_CASE("from_atoms validates and merges") {
    const auto m = FiniteMeasure::from_atoms({{q(1), q(1, 4)}, {q(0), q(1, 2)}, {q(1), q(1, 4)}});
    REQUIRE(m.size() == 2);
    CHECK(m.atoms()[0].x == q(0));
    CHECK(m.atoms()[1].w == q(1, 2));
    CHECK_THROWS_AS(FiniteMeasure::from_atoms({{q(0), q(1, 2)}}), InvalidArgument);
    CHECK_THROWS_AS(FiniteMeasure::from_atoms({{q(0), q(3, 2)}, {q(1), q(-1, 2)}}), InvalidArgument);
    const auto dropped = FiniteMeasure::from_atoms({{q(0), q(1)}, {q(5), q(0)}});
    CHECK(dropped.size() == 1);
}

TEST_CASE("mixture builds the two measures of the counterexample") {
    std::vector<FiniteMeasure> parts{dirac(q(-3)), dirac(q(1))};
    std::vector<Scalar> half{q(1, 2), q(1, 2)};
    CHECK(mixture(half, parts) == exact({{"-3", "1/2"}, {"1", "1/2"}}));

    std::vector<FiniteMeasure> parts2{dirac(q(0)), dirac(q(4))};
    std::vector<Scalar> c2{q(3, 4), q(1, 4)};
    CHECK(mixture(c2, parts2) == exact({{"0", "3/4"}, {"4", "1/4"}}));

    std::vector<FiniteMeasure> same{dirac(q(0)), dirac(q(0))};
    CHECK(mixture(half, same) == dirac(q(0)));

    std::vector<Scalar> bad{q(1, 2), q(1, 3)};
    CHECK_THROWS_AS(mixture(bad, parts), InvalidArgument);
    std::vector<Scalar> negative{q(3, 2), q(-1, 2)};
    CHECK_THROWS_AS(mixture(negative, parts), InvalidArgument);
}

TEST_CASE("convolution examples") {
    CHECK(convolve(dirac(q(2)), dirac(q(-5))) == dirac(q(-3)));
    const auto b = exact({{"0", "1/2"}, {"1", "1/2"}});
    CHECK(convolve(b, b) == exact({{"0", "1/4"}, {"1", "1/2"}, {"2", "1/4"}}));
    const auto mu = exact({{"-3", "1/2"}, {"1", "1/2"}});
    const auto nu = exact({{"0", "3/4"}, {"4", "1/4"}});
    CHECK(convolve(mu, nu) == exact({{"-3", "3/8"}, {"1", "4/8"}, {"5", "1/8"}}));
    CHECK(mean(mu) == q(-1));
    CHECK(mean(nu) == q(1));
}

TEST_CASE("convolution powers") {
    const auto b = exact({{"0", "1/2"}, {"1", "1/2"}});
    CHECK(convolve_power(b, 0) == dirac(q(0)));
    CHECK(convolve_power(dirac(q(1)), 3) == dirac(q(3)));
    CHECK(convolve_power(b, 2) == convolve(b, b));
    CHECK(convolve_power(b, 5) == convolve(convolve_power(b, 2), convolve_power(b, 3)));
}

TEST_CASE("pushforward") {
    CHECK(pushforward_affine(dirac(q(2)), q(1, 4), q(0)) == dirac(q(1, 2)));
    const auto m = exact({{"0", "1/4"}, {"1", "1/2"}, {"2", "1/4"}});
    CHECK(pushforward_affine(m, q(1, 2), q(0)) == exact({{"0", "1/4"}, {"1/2", "1/2"}, {"1", "1/4"}}));
    CHECK(pushforward_affine(m, q(1), q(0)) == m);
    const auto flipped = pushforward_affine(m, q(-2), q(1));
    CHECK(flipped.atoms()[0].x == q(-3));
    CHECK_THROWS_AS(pushforward_affine(m, q(0), q(1)), InvalidArgument);
}

TEST_CASE("expectation") {
    auto cube = [](const Scalar& x) { return x * x * x; };
    CHECK(expectation(dirac(q(3, 2)), cube) == q(27, 8));
    auto bad = [](const Scalar& x) { return x.is_zero() ? Scalar(std::nan("")) : x; };
    CHECK_THROWS_AS((void)expectation(exact({{"0", "1/2"}, {"1", "1/2"}}), bad), std::domain_error);
    CHECK(variance(exact({{"-1", "1/2"}, {"1", "1/2"}})) == q(1));
}

TEST_CASE("float lattices collapse under convolution") {
    std::vector<Atom> atoms;
    for (int i = 0; i < 10; ++i) {
        atoms.push_back({Scalar(0.1 * i), Scalar(0.1)});
    }
    const auto m = FiniteMeasure::from_atoms(atoms);
    const auto c = convolve(m, m);
    CHECK(c.size() == 19);
    CHECK(c.total_weight().to_double() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("float mass defect is tracked through convolution and mixture") {
    const auto a = FiniteMeasure::from_atoms({{Scalar(0.0), Scalar(0.6)}, {Scalar(1.0), Scalar(0.39)}}, Scalar(0.01));
    const auto c = convolve(a, a);
    CHECK(c.mass_defect().to_double() == doctest::Approx(1 - 0.99 * 0.99));
    CHECK((c.total_weight() + c.mass_defect()).to_double() == doctest::Approx(1.0));
    std::vector<Scalar> co{Scalar(0.5), Scalar(0.5)};
    std::vector<FiniteMeasure> parts{a, dirac(Scalar(2.0))};
    CHECK(mixture(co, parts).mass_defect().to_double() == doctest::Approx(0.005));
}

TEST_CASE("measure json round trip") {
    const auto m = exact({{"-1/3", "1/4"}, {"2", "3/4"}});
    CHECK(measure_from_json(measure_to_json(m)) == m);
    const auto f = FiniteMeasure::from_atoms({{Scalar(0.25), Scalar(1.0)}});
    CHECK(measure_from_json(measure_to_json(f)) == f);
    CHECK_THROWS_AS(measure_from_json(nlohmann::json::parse(R"({"regime":"exact","atoms":[{"x":0.5,"w":"1"}]})")),
                    InvalidArgument);
}

TEST_CASE("property: convolution algebra in the exact regime") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = testing::random_integer_measure(rng, 5, -6, 6);
        const auto b = testing::random_integer_measure(rng, 5, -6, 6);
        const auto c = testing::random_integer_measure(rng, 4, 0, 30);
        CHECK(convolve(a, b) == convolve(b, a));
        CHECK(convolve(convolve(a, b), c) == convolve(a, convolve(b, c)));
        CHECK(convolve(a, dirac(q(0))) == a);
        CHECK(mean(convolve(a, b)) == mean(a) + mean(b));
        CHECK(convolve(a, b).total_weight() == q(1));
        std::vector<Scalar> co{q(1, 3), q(2, 3)};
        std::vector<FiniteMeasure> parts{a, b};
        CHECK(mean(mixture(co, parts)) == q(1, 3) * mean(a) + q(2, 3) * mean(b));
        const Scalar s = q(trial % 7 - 3 == 0 ? 5 : trial % 7 - 3, 4);
        const Scalar t = q(trial, 9);
        CHECK(pushforward_affine(pushforward_affine(a, s, t), q(1) / s, -t / s) == a);
    }
}

TEST_CASE("property: float convolution commutes and associates to 1e-12") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto random_float = [&](int n) {
        std::vector<Atom> atoms;
        double total = 0.0;
        std::vector<double> w(n);
        for (auto& v : w) {
            v = u(rng) + 0.05;
            total += v;
        }
        for (int i = 0; i < n; ++i) {
            atoms.push_back({Scalar(std::round(u(rng) * 40.0) * 0.25), Scalar(w[i] / total)});
        }
        return FiniteMeasure::from_atoms(atoms);
    };
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = random_float(6);
        const auto b = random_float(5);
        const auto c = random_float(4);
        const auto l = convolve(convolve(a, b), c);
        const auto r = convolve(a, convolve(b, c));
        const auto ab = convolve(a, b);
        const auto ba = convolve(b, a);
        REQUIRE(l.size() == r.size());
        REQUIRE(ab.size() == ba.size());
        for (std::size_t i = 0; i < l.size(); ++i) {
            CHECK(std::abs(l.atoms()[i].x.to_double() - r.atoms()[i].x.to_double()) <= 1e-12);
            CHECK(std::abs(l.atoms()[i].w.to_double() - r.atoms()[i].w.to_double()) <= 1e-12);
        }
        for (std::size_t i = 0; i < ab.size(); ++i) {
            CHECK(std::abs(ab.atoms()[i].w.to_double() - ba.atoms()[i].w.to_double()) <= 1e-12);
        }
    }
}
