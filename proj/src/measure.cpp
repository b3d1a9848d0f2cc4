#include "cxorder/measure.hpp"

#include <algorithm>
#include <optional>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cxorder {

// Kernels build results that are valid by construction and skip re-validation.
class MeasureBuilder {
  public:
    static FiniteMeasure make(std::vector<Atom> atoms, Scalar defect, Regime regime) {
        return FiniteMeasure(std::move(atoms), std::move(defect), regime);
    }
};

namespace {

template <class T>
struct TypedAtoms {
    std::vector<T> x;
    std::vector<T> w;
};

template <class T>
T scalar_as(const Scalar& s) {
    if constexpr (std::is_same_v<T, Rational>) {
        return s.exact();
    } else {
        return s.to_double();
    }
}

template <class T>
TypedAtoms<T> typed(const FiniteMeasure& m) {
    TypedAtoms<T> out;
    out.x.reserve(m.size());
    out.w.reserve(m.size());
    for (const auto& a : m.atoms()) {
        out.x.push_back(scalar_as<T>(a.x));
        out.w.push_back(scalar_as<T>(a.w));
    }
    return out;
}

bool is_positive(const Rational& q) { return sgn(q) > 0; }
bool is_positive(double d) { return d > 0.0; }

/// Sorts (x, w) pairs by x, merges coincident points and drops non-positive weights.
template <class T>
std::vector<Atom> sort_and_merge(std::vector<std::pair<T, T>> pts, double snap) {
    std::sort(pts.begin(), pts.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Atom> out;
    out.reserve(pts.size());
    std::size_t i = 0;
    while (i < pts.size()) {
        T x = pts[i].first;
        T w = pts[i].second;
        std::size_t j = i + 1;
        if constexpr (std::is_same_v<T, Rational>) {
            while (j < pts.size() && pts[j].first == x) {
                w += pts[j].second;
                ++j;
            }
        } else {
            while (j < pts.size() && pts[j].first - x <= snap) {
                w += pts[j].second;
                ++j;
            }
        }
        if (is_positive(w)) {
            out.push_back(Atom{Scalar(std::move(x)), Scalar(std::move(w))});
        }
        i = j;
    }
    return out;
}

Rational rational_gcd(const Rational& a, const Rational& b) {
    // gcd(p/q, r/s) = gcd(p*s, r*q) / (q*s)
    mpz_class num;
    mpz_class lhs = a.get_num() * b.get_den();
    mpz_class rhs = b.get_num() * a.get_den();
    mpz_gcd(num.get_mpz_t(), lhs.get_mpz_t(), rhs.get_mpz_t());
    Rational g(num, a.get_den() * b.get_den());
    g.canonicalize();
    return g;
}

/// Common lattice step of all offsets from each measure's first point, or
/// zero when every offset is zero (both measures are point masses).
std::optional<Rational> lattice_step(const TypedAtoms<Rational>& a, const TypedAtoms<Rational>& b) {
    Rational step(0);
    for (const auto* m : {&a, &b}) {
        for (std::size_t i = 1; i < m->x.size(); ++i) {
            step = rational_gcd(step, Rational(m->x[i] - m->x[0]));
        }
    }
    return step;
}

std::optional<double> lattice_step(const TypedAtoms<double>& a, const TypedAtoms<double>& b) {
    double step = std::numeric_limits<double>::infinity();
    for (const auto* m : {&a, &b}) {
        for (std::size_t i = 1; i < m->x.size(); ++i) {
            step = std::min(step, m->x[i] - m->x[i - 1]);
        }
    }
    if (!std::isfinite(step)) {
        return 0.0;
    }
    for (const auto* m : {&a, &b}) {
        for (std::size_t i = 1; i < m->x.size(); ++i) {
            double k = (m->x[i] - m->x[0]) / step;
            if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, k)) {
                return std::nullopt;
            }
        }
    }
    return step;
}

std::size_t lattice_index(const Rational& offset, const Rational& step) {
    Rational k = offset / step;
    return static_cast<std::size_t>(k.get_num().get_ui());
}

std::size_t lattice_index(double offset, double step) {
    return static_cast<std::size_t>(std::llround(offset / step));
}

template <class T>
std::vector<Atom> convolve_kernel(const TypedAtoms<T>& a, const TypedAtoms<T>& b, double snap) {
    const std::size_t na = a.x.size();
    const std::size_t nb = b.x.size();
    auto step = lattice_step(a, b);
    if (step) {
        const T origin = a.x.front() + b.x.front();
        if (*step == 0) {
            return {Atom{Scalar(T(origin)), Scalar(T(a.w.front() * b.w.front()))}};
        }
        const T cells = T(T(a.x.back() - a.x.front()) + T(b.x.back() - b.x.front())) / *step;
        if (cells < T(static_cast<long>(na * nb + na + nb))) {
            const std::size_t length = lattice_index(T(cells * *step), *step) + 1;
            std::vector<std::size_t> ia(na);
            std::vector<std::size_t> ib(nb);
            for (std::size_t i = 0; i < na; ++i) {
                ia[i] = lattice_index(T(a.x[i] - a.x.front()), *step);
            }
            for (std::size_t j = 0; j < nb; ++j) {
                ib[j] = lattice_index(T(b.x[j] - b.x.front()), *step);
            }
            std::vector<T> dense(length, T(0));
            for (std::size_t i = 0; i < na; ++i) {
                for (std::size_t j = 0; j < nb; ++j) {
                    dense[ia[i] + ib[j]] += a.w[i] * b.w[j];
                }
            }
            std::vector<Atom> out;
            for (std::size_t k = 0; k < length; ++k) {
                if (is_positive(dense[k])) {
                    T x = origin + T(*step * T(static_cast<long>(k)));
                    out.push_back(Atom{Scalar(std::move(x)), Scalar(std::move(dense[k]))});
                }
            }
            return out;
        }
    }
    std::vector<std::pair<T, T>> pts;
    pts.reserve(na * nb);
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            pts.emplace_back(T(a.x[i] + b.x[j]), T(a.w[i] * b.w[j]));
        }
    }
    return sort_and_merge(std::move(pts), snap);
}

void require_finite(const Scalar& s, const char* what) {
    if (!s.is_exact() && !std::isfinite(s.to_double())) {
        throw InvalidArgument(std::string("non-finite ") + what);
    }
}

}  // namespace

FiniteMeasure FiniteMeasure::from_atoms(std::vector<Atom> atoms, Scalar mass_defect,
                                        double snap_tolerance) {
    bool all_exact = mass_defect.is_exact();
    for (const auto& a : atoms) {
        require_finite(a.x, "support point");
        require_finite(a.w, "weight");
        if (a.w.sign() < 0) {
            throw InvalidArgument("negative weight " + a.w.to_string() + " at " + a.x.to_string());
        }
        all_exact = all_exact && a.x.is_exact() && a.w.is_exact();
    }
    require_finite(mass_defect, "mass defect");
    if (mass_defect.sign() < 0) {
        throw InvalidArgument("negative mass defect");
    }
    const Regime regime = all_exact ? Regime::exact : Regime::floating;
    std::vector<Atom> merged;
    if (regime == Regime::exact) {
        if (!mass_defect.is_zero()) {
            throw InvalidArgument("exact-regime measures cannot carry a mass defect");
        }
        std::vector<std::pair<Rational, Rational>> pts;
        pts.reserve(atoms.size());
        for (auto& a : atoms) {
            pts.emplace_back(a.x.exact(), a.w.exact());
        }
        merged = sort_and_merge(std::move(pts), snap_tolerance);
    } else {
        std::vector<std::pair<double, double>> pts;
        pts.reserve(atoms.size());
        for (auto& a : atoms) {
            pts.emplace_back(a.x.to_double(), a.w.to_double());
        }
        merged = sort_and_merge(std::move(pts), snap_tolerance);
        mass_defect = mass_defect.to_float();
    }
    FiniteMeasure m(std::move(merged), std::move(mass_defect), regime);
    Scalar total = m.total_weight() + m.mass_defect();
    if (regime == Regime::exact) {
        if (total != Scalar(1)) {
            throw InvalidArgument("weights sum to " + total.to_string() + ", expected 1");
        }
    } else if (std::abs(total.to_double() - 1.0) > kMassTolerance) {
        throw InvalidArgument("weights plus mass defect sum to " + total.to_string() + ", expected 1");
    }
    if (m.atoms_.empty()) {
        throw InvalidArgument("measure has no atoms");
    }
    return m;
}

Scalar FiniteMeasure::total_weight() const {
    if (regime_ == Regime::exact) {
        Rational s(0);
        for (const auto& a : atoms_) {
            s += a.w.exact();
        }
        return Scalar(std::move(s));
    }
    // Neumaier summation keeps float totals within an ulp or two of exact.
    double s = 0.0;
    double c = 0.0;
    for (const auto& a : atoms_) {
        double w = a.w.to_double();
        double t = s + w;
        c += std::abs(s) >= std::abs(w) ? (s - t) + w : (w - t) + s;
        s = t;
    }
    return Scalar(s + c);
}

Scalar FiniteMeasure::cdf(const Scalar& x) const {
    Scalar s = Scalar(0).in_regime(regime_);
    for (const auto& a : atoms_) {
        if (a.x > x) {
            break;
        }
        s += a.w;
    }
    return s;
}

Scalar FiniteMeasure::weight_at(const Scalar& x) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                               [](const Atom& a, const Scalar& v) { return a.x < v; });
    if (it != atoms_.end() && it->x == x) {
        return it->w;
    }
    return Scalar(0).in_regime(regime_);
}

FiniteMeasure FiniteMeasure::in_regime(Regime target) const {
    if (target == regime_) {
        return *this;
    }
    if (target == Regime::exact) {
        throw InvalidArgument("cannot coerce a float measure to the exact regime");
    }
    std::vector<Atom> atoms;
    atoms.reserve(atoms_.size());
    for (const auto& a : atoms_) {
        atoms.push_back(Atom{a.x.to_float(), a.w.to_float()});
    }
    return FiniteMeasure(std::move(atoms), mass_defect_.to_float(), Regime::floating);
}

FiniteMeasure dirac(const Scalar& x) {
    require_finite(x, "point");
    return MeasureBuilder::make({Atom{x, Scalar(1).in_regime(x.regime())}},
                                Scalar(0).in_regime(x.regime()), x.regime());
}

FiniteMeasure mixture(std::span<const Scalar> coeffs, std::span<const FiniteMeasure> parts,
                      double snap_tolerance) {
    if (coeffs.size() != parts.size()) {
        throw InvalidArgument("mixture: " + std::to_string(coeffs.size()) + " coefficients for " +
                              std::to_string(parts.size()) + " parts");
    }
    if (parts.empty()) {
        throw InvalidArgument("mixture of zero parts");
    }
    Regime regime = Regime::exact;
    Scalar sum(0);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i].sign() < 0) {
            throw InvalidArgument("mixture: negative coefficient " + coeffs[i].to_string());
        }
        sum += coeffs[i];
        regime = combine(regime, combine(coeffs[i].regime(), parts[i].regime()));
    }
    if (regime == Regime::exact ? sum != Scalar(1) : std::abs(sum.to_double() - 1.0) > 1e-10) {
        throw InvalidArgument("mixture: coefficients sum to " + sum.to_string());
    }
    Scalar defect = Scalar(0).in_regime(regime);
    std::vector<Atom> combined;
    if (regime == Regime::exact) {
        std::vector<std::pair<Rational, Rational>> pts;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const Rational& c = coeffs[i].exact();
            if (sgn(c) == 0) {
                continue;
            }
            for (const auto& a : parts[i].atoms()) {
                pts.emplace_back(a.x.exact(), Rational(c * a.w.exact()));
            }
        }
        combined = sort_and_merge(std::move(pts), snap_tolerance);
    } else {
        std::vector<std::pair<double, double>> pts;
        double d = 0.0;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const double c = coeffs[i].to_double();
            if (c == 0.0) {
                continue;
            }
            d += c * parts[i].mass_defect().to_double();
            for (const auto& a : parts[i].atoms()) {
                pts.emplace_back(a.x.to_double(), c * a.w.to_double());
            }
        }
        combined = sort_and_merge(std::move(pts), snap_tolerance);
        defect = Scalar(d);
    }
    return MeasureBuilder::make(std::move(combined), std::move(defect), regime);
}

FiniteMeasure convolve(const FiniteMeasure& a, const FiniteMeasure& b, double snap_tolerance) {
    const Regime regime = combine(a.regime(), b.regime());
    if (regime == Regime::exact) {
        return MeasureBuilder::make(
            convolve_kernel(typed<Rational>(a), typed<Rational>(b), snap_tolerance), Scalar(0),
            regime);
    }
    const double da = a.mass_defect().to_double();
    const double db = b.mass_defect().to_double();
    return MeasureBuilder::make(
        convolve_kernel(typed<double>(a), typed<double>(b), snap_tolerance),
        Scalar(da + db - da * db), regime);
}

FiniteMeasure convolve_power(const FiniteMeasure& a, int m, double snap_tolerance) {
    if (m < 0) {
        throw InvalidArgument("negative convolution power");
    }
    FiniteMeasure result = dirac(Scalar(0).in_regime(a.regime()));
    FiniteMeasure base = a;
    while (m > 0) {
        if (m & 1) {
            result = convolve(result, base, snap_tolerance);
        }
        m >>= 1;
        if (m > 0) {
            base = convolve(base, base, snap_tolerance);
        }
    }
    return result;
}

FiniteMeasure pushforward_affine(const FiniteMeasure& a, const Scalar& scale, const Scalar& shift) {
    if (scale.is_zero()) {
        throw InvalidArgument("pushforward with zero scale");
    }
    const Regime regime = combine(a.regime(), combine(scale.regime(), shift.regime()));
    std::vector<Atom> atoms;
    atoms.reserve(a.size());
    for (const auto& atom : a.atoms()) {
        atoms.push_back(Atom{(scale * atom.x + shift).in_regime(regime), atom.w.in_regime(regime)});
    }
    if (scale.sign() < 0) {
        std::reverse(atoms.begin(), atoms.end());
    }
    return MeasureBuilder::make(std::move(atoms), a.mass_defect().in_regime(regime), regime);
}

Scalar mean(const FiniteMeasure& a) {
    return expectation(a, [](const Scalar& x) { return x; });
}

Scalar variance(const FiniteMeasure& a) {
    const Scalar m = mean(a);
    return expectation(a, [&m](const Scalar& x) { return (x - m) * (x - m); });
}

Scalar expectation(const FiniteMeasure& a, const RealFunction& phi) {
    Scalar s = Scalar(0).in_regime(a.regime());
    for (const auto& atom : a.atoms()) {
        Scalar v;
        try {
            v = phi(atom.x);
        } catch (const std::exception& e) {
            throw std::domain_error("test function undefined at " + atom.x.to_string() + ": " +
                                    e.what());
        }
        if (!v.is_exact() && std::isnan(v.to_double())) {
            throw std::domain_error("test function undefined at " + atom.x.to_string());
        }
        s += v * atom.w;
    }
    return s;
}

}  // namespace cxorder
