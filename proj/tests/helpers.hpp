#pragma once

#include <algorithm>
#include <initializer_list>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <cxorder/measure.hpp>

namespace testing {

using cxorder::Atom;
using cxorder::FiniteMeasure;
using cxorder::Rational;
using cxorder::Scalar;

inline Scalar q(long num, long den = 1) { return Scalar::fraction(num, den); }

/// Exact measure from (point, weight) pairs written as "a/b" strings or integers.
inline FiniteMeasure exact(std::initializer_list<std::pair<const char*, const char*>> atoms) {
    std::vector<Atom> out;
    for (const auto& [x, w] : atoms) {
        out.push_back({Scalar::parse(x), Scalar::parse(w)});
    }
    return FiniteMeasure::from_atoms(std::move(out));
}

/// Random exact measure with integer support in [lo, hi] and at most max_atoms atoms.
inline FiniteMeasure random_integer_measure(std::mt19937_64& rng, int max_atoms, int lo, int hi) {
    std::uniform_int_distribution<int> count(1, max_atoms);
    std::uniform_int_distribution<int> point(lo, hi);
    std::uniform_int_distribution<int> weight(1, 20);
    const int n = count(rng);
    std::vector<int> ws(n);
    long total = 0;
    for (auto& w : ws) {
        w = weight(rng);
        total += w;
    }
    std::vector<Atom> atoms;
    for (int i = 0; i < n; ++i) {
        atoms.push_back({Scalar(point(rng)), Scalar::fraction(ws[i], total)});
    }
    return FiniteMeasure::from_atoms(std::move(atoms));
}

/// b mixed with a point mass at an integer end of [lo, hi] so that its mean equals mean(a).
/// Support stays integral; returns b unchanged when the means already agree.
inline FiniteMeasure mean_matched(const FiniteMeasure& a, const FiniteMeasure& b, int lo, int hi) {
    const Scalar ma = cxorder::mean(a);
    const Scalar mb = cxorder::mean(b);
    if (ma == mb) {
        return b;
    }
    const Scalar z(mb < ma ? hi : lo);
    const Scalar c = (ma - mb) / (z - mb);
    std::vector<Scalar> coeffs{Scalar(1) - c, c};
    std::vector<FiniteMeasure> parts{b, cxorder::dirac(z)};
    return cxorder::mixture(coeffs, parts);
}

/// Moves half of one atom's mass symmetrically outwards by an integer offset.
inline FiniteMeasure integer_spread(std::mt19937_64& rng, const FiniteMeasure& m, int lo, int hi) {
    std::vector<Atom> atoms(m.atoms().begin(), m.atoms().end());
    std::uniform_int_distribution<std::size_t> pick(0, atoms.size() - 1);
    const auto i = pick(rng);
    const int x = static_cast<int>(atoms[i].x.to_double());
    const int room = std::min(x - lo, hi - x);
    if (room == 0) {
        return m;
    }
    const int h = std::uniform_int_distribution<int>(1, room)(rng);
    const Scalar w = atoms[i].w / Scalar(2);
    atoms[i].w = w;
    atoms.push_back({Scalar(x - h), w / Scalar(2)});
    atoms.push_back({Scalar(x + h), w / Scalar(2)});
    return FiniteMeasure::from_atoms(atoms);
}

/// Convex-order oracle that never looks at kinks: integrates a dense family of
/// probe functions directly.
inline bool brute_force_cx(const FiniteMeasure& a, const FiniteMeasure& b, int lo, int hi) {
    auto e = [](const FiniteMeasure& m, auto&& f) {
        Rational s = 0;
        for (const auto& atom : m.atoms()) {
            s += f(atom.x.exact()) * atom.w.exact();
        }
        return s;
    };
    if (e(a, [](const Rational& x) { return x; }) != e(b, [](const Rational& x) { return x; })) {
        return false;
    }
    for (int n = lo * 8 - 8; n <= hi * 8 + 8; ++n) {
        const Rational t(n, 8);
        auto sl = [&](const Rational& x) { return x > t ? Rational(x - t) : Rational(0); };
        auto ab = [&](const Rational& x) { return x > t ? Rational(x - t) : Rational(t - x); };
        if (e(a, sl) > e(b, sl) || e(a, ab) > e(b, ab)) {
            return false;
        }
    }
    return e(a, [](const Rational& x) { return Rational(x * x); }) <=
           e(b, [](const Rational& x) { return Rational(x * x); });
}

}  // namespace testing
