#include "cxorder/sweep.hpp"

#include <algorithm>
#include <cmath>

#include "cxorder/families.hpp"
#include "cxorder/json_io.hpp"

namespace cxorder {

SweepFamily parse_sweep_family(std::string_view name) {
    if (name == "binomial" || name == "binom" || name == "bernstein") {
        return SweepFamily::binomial;
    }
    if (name == "poisson" || name == "poiss") {
        return SweepFamily::poisson;
    }
    if (name == "negative_binomial" || name == "nb") {
        return SweepFamily::negative_binomial;
    }
    if (name == "gamma") {
        return SweepFamily::gamma;
    }
    if (name == "beta") {
        return SweepFamily::beta;
    }
    if (name == "normal" || name == "norm") {
        return SweepFamily::normal;
    }
    throw InvalidArgument("unknown sweep family '" + std::string(name) + "'");
}

std::string_view to_string(SweepFamily family) {
    switch (family) {
        case SweepFamily::binomial:
            return "binomial";
        case SweepFamily::poisson:
            return "poisson";
        case SweepFamily::negative_binomial:
            return "negative_binomial";
        case SweepFamily::gamma:
            return "gamma";
        case SweepFamily::beta:
            return "beta";
        case SweepFamily::normal:
            return "normal";
    }
    return "";
}

std::vector<Scalar> parse_grid(std::string_view text) {
    if (text.find(':') != std::string_view::npos) {
        const auto a = text.find(':');
        const auto b = text.find(':', a + 1);
        if (b == std::string_view::npos || text.find(':', b + 1) != std::string_view::npos) {
            throw InvalidArgument("grid '" + std::string(text) + "' is not start:stop:count");
        }
        const Scalar start = Scalar::parse(text.substr(0, a));
        const Scalar stop = Scalar::parse(text.substr(a + 1, b - a - 1));
        const Scalar count = Scalar::parse(text.substr(b + 1));
        if (!count.is_exact() || !count.is_integer() || count.sign() <= 0) {
            throw InvalidArgument("grid count must be a positive integer");
        }
        const long n = count.exact().get_num().get_si();
        if (n == 1) {
            return {start};
        }
        std::vector<Scalar> out;
        for (long i = 0; i < n; ++i) {
            out.push_back(start + (stop - start) * Scalar::fraction(i, n - 1));
        }
        return out;
    }
    std::vector<Scalar> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = std::min(text.find(',', pos), text.size());
        out.push_back(Scalar::parse(text.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return out;
}

namespace {

bool two_parameter(SweepFamily f) {
    return f == SweepFamily::negative_binomial || f == SweepFamily::gamma || f == SweepFamily::beta;
}

bool continuous(SweepFamily f) {
    return f == SweepFamily::gamma || f == SweepFamily::beta || f == SweepFamily::normal;
}

std::pair<std::string, std::string> parameter_names(SweepFamily f) {
    switch (f) {
        case SweepFamily::binomial:
            return {"x", ""};
        case SweepFamily::poisson:
            return {"l", ""};
        case SweepFamily::negative_binomial:
            return {"r", "p"};
        case SweepFamily::gamma:
        case SweepFamily::beta:
            return {"a", "b"};
        case SweepFamily::normal:
            return {"m", ""};
    }
    return {};
}

std::string pair_label(const SweepSpec& spec, const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
    const auto [first, second] = parameter_names(spec.family);
    std::string s;
    if (spec.family == SweepFamily::binomial) {
        s = "n=" + std::to_string(spec.n) + ";";
    } else if (spec.family == SweepFamily::normal) {
        s = "v=" + spec.variance.to_string() + ";";
    }
    for (int side = 1; side <= 2; ++side) {
        const auto& p = side == 1 ? a : b;
        if (side == 2) {
            s += ";";
        }
        s += first + std::to_string(side) + "=" + p[0].to_string();
        if (p.size() > 1) {
            s += ";" + second + std::to_string(side) + "=" + p[1].to_string();
        }
    }
    return s;
}

/// Pair-level st-comparability hypothesis; empty when it holds.
std::string hypothesis_problem(SweepFamily f, const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
    if (f == SweepFamily::negative_binomial && ((a[0] - b[0]) * (a[1] - b[1])).sign() < 0) {
        return "(r1 - r2)(p1 - p2) >= 0 violated";
    }
    if ((f == SweepFamily::gamma || f == SweepFamily::beta) && ((a[0] - b[0]) * (a[1] - b[1])).sign() > 0) {
        return "(a1 - a2)(b1 - b2) <= 0 violated";
    }
    return {};
}

void validate(const SweepSpec& spec) {
    if (spec.grid.empty()) {
        throw InvalidArgument("sweep grid is empty");
    }
    if (two_parameter(spec.family) && spec.grid2.empty()) {
        throw InvalidArgument("sweep for " + std::string(to_string(spec.family)) + " needs a second grid");
    }
    if (spec.battery < 1) {
        throw InvalidArgument("battery size must be at least 1");
    }
    if (spec.family == SweepFamily::binomial && spec.n < 1) {
        throw InvalidArgument("binomial sweep needs n >= 1");
    }
    if (spec.family == SweepFamily::poisson && spec.n < 1) {
        throw InvalidArgument("poisson sweep needs n >= 1");
    }
    if (spec.family == SweepFamily::normal && spec.variance.sign() <= 0) {
        throw InvalidArgument("normal sweep needs a positive variance");
    }
    if (spec.scale && spec.scale->is_zero()) {
        throw InvalidArgument("sweep scale must be non-zero");
    }
    if (!(spec.tail_eps > 0.0 && spec.tail_eps < 1.0)) {
        throw InvalidArgument("tail_eps must lie in (0, 1)");
    }
    if (spec.cells < 2) {
        throw InvalidArgument("need at least two cells");
    }
}

Scalar default_scale(const SweepSpec& spec) {
    if (spec.family == SweepFamily::binomial || spec.family == SweepFamily::poisson) {
        return Scalar::fraction(1, 2L * spec.n);
    }
    return Scalar::fraction(1, 2);
}

Scalar family_mean(SweepFamily f, const std::vector<Scalar>& p) {
    switch (f) {
        case SweepFamily::negative_binomial:
            return p[0] * p[1] / (Scalar(1) - p[1]);
        case SweepFamily::gamma:
            return p[0] / p[1];
        default:
            return p[0];
    }
}

std::pair<Scalar, Scalar> default_domain(const SweepSpec& spec, const std::vector<std::vector<Scalar>>& points,
                                         const Scalar& scale) {
    const Scalar twice = Scalar(2) * scale;
    Scalar lo(0);
    Scalar hi(0);
    switch (spec.family) {
        case SweepFamily::binomial:
            hi = twice * Scalar(spec.n);
            break;
        case SweepFamily::beta:
            hi = twice;
            break;
        case SweepFamily::normal: {
            const Scalar sd(std::sqrt(spec.variance.to_double()));
            Scalar mn = points.front()[0];
            Scalar mx = points.front()[0];
            for (const auto& p : points) {
                mn = min(mn, p[0]);
                mx = max(mx, p[0]);
            }
            lo = twice * (mn - Scalar(2) * sd);
            hi = twice * (mx + Scalar(2) * sd);
            break;
        }
        default: {
            Scalar mx(0);
            for (const auto& p : points) {
                mx = max(mx, family_mean(spec.family, p));
            }
            hi = twice * mx * Scalar(spec.family == SweepFamily::gamma ? 2 : 1);
            break;
        }
    }
    if (hi < lo) {
        std::swap(lo, hi);
    }
    if (!(lo < hi)) {
        hi = lo + Scalar(1);
    }
    return {lo, hi};
}

FamilySpec continuous_spec(const SweepSpec& spec, const std::vector<Scalar>& p) {
    switch (spec.family) {
        case SweepFamily::gamma:
            return {FamilySpec::Kind::gamma, p};
        case SweepFamily::beta:
            return {FamilySpec::Kind::beta, p};
        default:
            return {FamilySpec::Kind::normal, {p[0], spec.variance}};
    }
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
    validate(spec);
    std::vector<std::vector<Scalar>> points;
    for (const auto& g : spec.grid) {
        if (two_parameter(spec.family)) {
            for (const auto& h : spec.grid2) {
                points.push_back({g, h});
            }
        } else {
            points.push_back({g});
        }
    }

    SweepResult result;
    std::vector<FiniteMeasure> measures;
    if (continuous(spec.family)) {
        std::vector<FamilySpec> specs;
        std::vector<ContinuousFamily> families;
        for (const auto& p : points) {
            specs.push_back(continuous_spec(spec, p));
            families.push_back(specs.back().continuous());
        }
        measures = build_measures(specs, {spec.tail_eps, spec.cells});
        const auto [lo, hi] = common_window(families, spec.tail_eps);
        const double s = std::abs((spec.scale ? *spec.scale : default_scale(spec)).to_double());
        const double h = (hi - lo) / spec.cells;
        // Midpoints move each atom of S(a*b) by at most s*h; the battery is
        // L-Lipschitz on the scaled window and the gap has total weight 4.
        const double lipschitz = std::max(1.0, 4.0 * s * std::max(std::abs(lo), std::abs(hi)));
        result.eps_grid = 4.0 * lipschitz * s * h;
    } else {
        for (const auto& p : points) {
            switch (spec.family) {
                case SweepFamily::binomial: {
                    auto m = binomial(spec.n, p[0]);
                    measures.push_back(spec.force_float ? m.in_regime(Regime::floating) : m);
                    break;
                }
                case SweepFamily::poisson:
                    measures.push_back(poisson(p[0], spec.tail_eps));
                    break;
                default:
                    measures.push_back(negative_binomial(p[0], p[1], spec.tail_eps));
                    break;
            }
        }
    }

    result.regime = Regime::exact;
    for (const auto& m : measures) {
        result.regime = combine(result.regime, m.regime());
    }
    if (result.regime == Regime::floating && spec.tol.sign() <= 0) {
        throw InvalidArgument("float sweeps need a positive tolerance");
    }
    result.allowed =
        result.regime == Regime::exact ? Scalar(0) : Scalar(spec.tol.to_double() + result.eps_grid);

    const Scalar scale = spec.scale ? *spec.scale : default_scale(spec);
    const auto [lo, hi] = spec.domain ? *spec.domain : default_domain(spec, points, scale);
    std::vector<ConvexTestFunction> battery;
    const bool truncated = spec.family != SweepFamily::binomial;
    for (auto& phi : convex_battery(lo, hi, spec.battery)) {
        if (phi.preserves_exactness() || (result.regime == Regime::floating && !truncated)) {
            battery.push_back(std::move(phi));
        }
    }

    const Scalar zero(0);
    std::vector<FiniteMeasure> self;
    self.reserve(measures.size());
    for (const auto& m : measures) {
        self.push_back(pushforward_affine(convolve(m, m), scale, zero));
    }

    const std::string family(to_string(spec.family));
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = 0; j < points.size(); ++j) {
            const std::string label = pair_label(spec, points[i], points[j]);
            const std::string problem = hypothesis_problem(spec.family, points[i], points[j]);
            if (!problem.empty()) {
                ++result.hypothesis_violations;
                if (spec.skip_violations) {
                    continue;
                }
                result.warnings.push_back(label + ": hypothesis " + problem);
            }
            const auto cross = pushforward_affine(convolve(measures[i], measures[j]), scale, zero);
            const auto gaps = rasa_gaps_from(self[i], self[j], cross, battery);
            for (std::size_t f = 0; f < battery.size(); ++f) {
                GapReport row{family, label, battery[f], scale, gaps[f], result.regime};
                if (!result.argmin || row.gap < result.rows[*result.argmin].gap) {
                    result.argmin = result.rows.size();
                }
                if (row.gap < -result.allowed) {
                    ++result.failures;
                }
                result.rows.push_back(std::move(row));
            }
        }
    }
    return result;
}

nlohmann::json SweepResult::summary() const {
    nlohmann::json j;
    j["rows"] = rows.size();
    j["regime"] = std::string(to_string(regime));
    j["eps_grid"] = eps_grid;
    j["allowed"] = scalar_to_json(allowed);
    j["failures"] = failures;
    j["hypothesis_violations"] = hypothesis_violations;
    j["passed"] = passed();
    if (argmin) {
        const auto& r = rows[*argmin];
        j["min_gap"] = scalar_to_json(r.gap);
        j["argmin"] = {{"family", r.family}, {"params", r.params}, {"phi", r.test_function.to_string()}};
    } else {
        j["min_gap"] = nullptr;
        j["argmin"] = nullptr;
    }
    return j;
}

std::string gap_csv_header() { return "family,params,phi_kind,phi_param,scale,gap,regime"; }

std::string gap_csv_row(const GapReport& row) {
    const auto& phi = row.test_function;
    const std::string param = phi.kind() == ConvexTestFunction::Kind::square ? "" : phi.parameter().to_string();
    return row.family + "," + row.params + "," + std::string(phi.kind_name()) + "," + param + "," +
           row.scale.to_string() + "," + row.gap.to_string() + "," + std::string(to_string(row.regime));
}

}  // namespace cxorder
