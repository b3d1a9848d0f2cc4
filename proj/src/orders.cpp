#include "cxorder/orders.hpp"

#include <cmath>

#include "cxorder/json_io.hpp"

namespace cxorder {

std::string_view to_string(ConstraintKind kind) {
    switch (kind) {
        case ConstraintKind::cdf:
            return "cdf";
        case ConstraintKind::stop_loss:
            return "stoploss";
        case ConstraintKind::mean:
            return "mean";
    }
    return "";
}

nlohmann::json verdict_to_json(const OrderVerdict& v) {
    return {{"holds", v.holds},
            {"margin", scalar_to_json(v.margin)},
            {"witness", v.witness ? scalar_to_json(*v.witness) : nlohmann::json(nullptr)},
            {"constraint", std::string(to_string(v.constraint))}};
}

namespace {

/// Tolerance actually applied: zero for two exact measures, the float value otherwise.
Scalar effective_tolerance(const FiniteMeasure& a, const FiniteMeasure& b, const Scalar& tol) {
    if (combine(a.regime(), b.regime()) == Regime::exact) {
        return Scalar(0);
    }
    if (tol.sign() < 0) {
        throw InvalidArgument("negative tolerance");
    }
    return tol.to_float();
}

/// Walks the union support in increasing order, calling visit(t, weight_a, weight_b).
template <class Visit>
void for_each_union_point(const FiniteMeasure& a, const FiniteMeasure& b, Scalar zero, Visit visit) {
    const auto aa = a.atoms();
    const auto ba = b.atoms();
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < aa.size() || j < ba.size()) {
        const bool take_a = j == ba.size() || (i < aa.size() && !(ba[j].x < aa[i].x));
        const bool take_b = i == aa.size() || (j < ba.size() && !(aa[i].x < ba[j].x));
        const Scalar& t = take_a ? aa[i].x : ba[j].x;
        visit(t, take_a ? aa[i].w : zero, take_b ? ba[j].w : zero);
        i += take_a;
        j += take_b;
    }
}

OrderVerdict finish(Scalar margin, std::optional<Scalar> witness, ConstraintKind kind, Scalar tol) {
    OrderVerdict v;
    v.holds = margin >= -tol;
    v.margin = std::move(margin);
    v.witness = std::move(witness);
    v.constraint = kind;
    v.tolerance = std::move(tol);
    return v;
}

}  // namespace

OrderVerdict check_st(const FiniteMeasure& a, const FiniteMeasure& b, const Scalar& tol) {
    const Scalar eff = effective_tolerance(a, b, tol);
    const Regime regime = combine(a.regime(), b.regime());
    if (a.mass_defect() + b.mass_defect() > eff) {
        throw DefectBudgetExceeded("check_st: combined mass defect " +
                                   (a.mass_defect() + b.mass_defect()).to_string() +
                                   " exceeds tolerance " + eff.to_string());
    }
    const Scalar zero = Scalar(0).in_regime(regime);
    Scalar fa = zero;
    Scalar fb = zero;
    std::optional<Scalar> margin;
    std::optional<Scalar> witness;
    for_each_union_point(a, b, zero, [&](const Scalar& t, const Scalar& wa, const Scalar& wb) {
        fa += wa;
        fb += wb;
        Scalar slack = fa - fb;
        if (!margin || slack < *margin) {
            margin = std::move(slack);
            witness = t;
        }
    });
    return finish(std::move(*margin), std::move(witness), ConstraintKind::cdf, eff);
}

Scalar stop_loss(const FiniteMeasure& a, const Scalar& t) {
    Scalar s = Scalar(0).in_regime(combine(a.regime(), t.regime()));
    for (const auto& atom : a.atoms()) {
        if (atom.x > t) {
            s += (atom.x - t) * atom.w;
        }
    }
    return s;
}

OrderVerdict check_cx(const FiniteMeasure& a, const FiniteMeasure& b, const Scalar& tol) {
    const Scalar eff = effective_tolerance(a, b, tol);
    const Regime regime = combine(a.regime(), b.regime());
    const Scalar lo = min(a.min_point(), b.min_point());
    const Scalar hi = max(a.max_point(), b.max_point());
    const Scalar defect_cost = (a.mass_defect() + b.mass_defect()) * (hi - lo);
    if (defect_cost > eff) {
        throw DefectBudgetExceeded("check_cx: mass defect times diameter " + defect_cost.to_string() +
                                   " exceeds tolerance " + eff.to_string());
    }

    const Scalar mean_a = mean(a);
    const Scalar mean_b = mean(b);
    Scalar margin = -abs(mean_a - mean_b) / (Scalar(1) + abs(mean_b));
    std::optional<Scalar> witness = mean_a > mean_b ? lo : hi;
    ConstraintKind kind = ConstraintKind::mean;

    // Stop-loss transforms are piecewise linear; step from kink to kink using
    // the mass strictly to the right of the current kink.
    const Scalar zero = Scalar(0).in_regime(regime);
    const Scalar total_a = a.total_weight();
    const Scalar total_b = b.total_weight();
    Scalar sl_a = mean_a - lo * total_a;
    Scalar sl_b = mean_b - lo * total_b;
    Scalar right_a = total_a;
    Scalar right_b = total_b;
    std::optional<Scalar> previous;
    for_each_union_point(a, b, zero, [&](const Scalar& t, const Scalar& wa, const Scalar& wb) {
        if (previous) {
            const Scalar dt = t - *previous;
            sl_a -= dt * right_a;
            sl_b -= dt * right_b;
        }
        right_a -= wa;
        right_b -= wb;
        Scalar slack = sl_b - sl_a;
        if (slack < margin) {
            margin = std::move(slack);
            witness = t;
            kind = ConstraintKind::stop_loss;
        }
        previous = t;
    });
    return finish(std::move(margin), std::move(witness), kind, eff);
}

// ---------------------------------------------------------------------------

ConvexTestFunction ConvexTestFunction::parse(std::string_view text) {
    if (text == "square") {
        return square();
    }
    const auto open = text.find('(');
    if (open == std::string_view::npos || text.back() != ')') {
        throw InvalidArgument("malformed test function '" + std::string(text) + "'");
    }
    const auto name = text.substr(0, open);
    Scalar param = Scalar::parse(text.substr(open + 1, text.size() - open - 2));
    if (name == "stop_loss" || name == "sl") {
        return stop_loss(std::move(param));
    }
    if (name == "abs_dev" || name == "abs") {
        return abs_dev(std::move(param));
    }
    if (name == "exp_scaled" || name == "exp") {
        return exp_scaled(std::move(param));
    }
    throw InvalidArgument("unknown test function '" + std::string(name) + "'");
}

std::string_view ConvexTestFunction::kind_name() const {
    switch (kind_) {
        case Kind::stop_loss:
            return "stop_loss";
        case Kind::abs_dev:
            return "abs_dev";
        case Kind::square:
            return "square";
        case Kind::exp_scaled:
            return "exp_scaled";
    }
    return "";
}

std::string ConvexTestFunction::to_string() const {
    if (kind_ == Kind::square) {
        return "square";
    }
    return std::string(kind_name()) + "(" + param_.to_string() + ")";
}

Scalar ConvexTestFunction::operator()(const Scalar& x) const {
    switch (kind_) {
        case Kind::stop_loss:
            return max(Scalar(0).in_regime(x.regime()), x - param_);
        case Kind::abs_dev:
            return abs(x - param_);
        case Kind::square:
            return x * x;
        case Kind::exp_scaled:
            return Scalar(std::exp(param_.to_double() * x.to_double()));
    }
    return Scalar(0);
}

std::vector<ConvexTestFunction> convex_battery(const Scalar& lo, const Scalar& hi, int count) {
    if (!(lo < hi)) {
        throw InvalidArgument("convex_battery: need lo < hi");
    }
    if (count < 1) {
        throw InvalidArgument("convex_battery: need at least one kink");
    }
    std::vector<ConvexTestFunction> out;
    const Scalar width = hi - lo;
    for (int j = 1; j <= count; ++j) {
        out.push_back(ConvexTestFunction::stop_loss(lo + width * Scalar::fraction(j, count + 1)));
    }
    out.push_back(ConvexTestFunction::abs_dev((lo + hi) / Scalar(2)));
    out.push_back(ConvexTestFunction::square());
    out.push_back(ConvexTestFunction::exp_scaled(Scalar(1)));
    return out;
}

bool four_point_check(const RealFunction& phi, const Scalar& a, const Scalar& b, const Scalar& c,
                      const Scalar& d, const Scalar& tol) {
    if (!(a <= b && a <= c && b <= d && c <= d)) {
        throw HypothesisViolation("four_point_check: need a <= b, c <= d");
    }
    const Scalar imbalance = abs((a + d) - (b + c));
    const bool exact = a.is_exact() && b.is_exact() && c.is_exact() && d.is_exact();
    const Scalar allowed = exact ? Scalar(0)
                                 : max(tol.to_float(), Scalar(1e-12 * (1.0 + std::abs(a.to_double()) +
                                                                       std::abs(d.to_double()))));
    if (imbalance > allowed) {
        throw HypothesisViolation("four_point_check: need a + d == b + c");
    }
    return phi(b) + phi(c) <= phi(a) + phi(d) + tol;
}

}  // namespace cxorder
