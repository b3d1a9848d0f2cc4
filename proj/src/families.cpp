#include "cxorder/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace cxorder {

namespace bm = boost::math;

namespace {

constexpr int kMaxTruncatedSupport = 10'000'000;

void check_tail_eps(double tail_eps) {
    if (!(tail_eps > 0.0 && tail_eps < 1.0)) {
        throw InvalidArgument("tail_eps must lie in (0, 1)");
    }
}

/// Scans log-pmf values from 0 upwards, stopping at the first k past `mode`
/// whose upper tail P(X > k) drops below tail_eps.
template <class LogPmf, class Tail>
FiniteMeasure truncated_lattice_law(LogPmf log_pmf, Tail tail_above, double mode, double tail_eps) {
    std::vector<Atom> atoms;
    for (int k = 0; k < kMaxTruncatedSupport; ++k) {
        const double w = std::exp(log_pmf(k));
        if (w > 0.0) {
            atoms.push_back(Atom{Scalar(static_cast<double>(k)), Scalar(w)});
        }
        if (k >= mode) {
            const double tail = tail_above(k);
            if (tail < tail_eps) {
                return FiniteMeasure::from_atoms(std::move(atoms), Scalar(std::max(tail, 0.0)));
            }
        }
    }
    throw InvalidArgument("truncated support exceeds the size limit");
}

double beta_ln_norm(double a, double b) { return bm::lgamma(a + b) - bm::lgamma(a) - bm::lgamma(b); }

}  // namespace

FiniteMeasure binomial(int n, const Scalar& x) {
    if (n < 1) {
        throw InvalidArgument("binomial: n must be a positive integer");
    }
    if (x < Scalar(0) || x > Scalar(1)) {
        throw InvalidArgument("binomial: success probability " + x.to_string() + " outside [0, 1]");
    }
    const Regime regime = x.regime();
    const Scalar zero = Scalar(0).in_regime(regime);
    const Scalar q = Scalar(1) - x;
    // Pascal recursion b_{m+1,k} = x b_{m,k-1} + (1-x) b_{m,k}
    std::vector<Scalar> pmf{Scalar(1).in_regime(regime)};
    for (int m = 0; m < n; ++m) {
        std::vector<Scalar> next(pmf.size() + 1, zero);
        for (std::size_t k = 0; k < pmf.size(); ++k) {
            next[k] += q * pmf[k];
            next[k + 1] += x * pmf[k];
        }
        pmf = std::move(next);
    }
    std::vector<Atom> atoms;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        atoms.push_back(Atom{Scalar(static_cast<long>(k)).in_regime(regime), pmf[k]});
    }
    return FiniteMeasure::from_atoms(std::move(atoms), zero);
}

FiniteMeasure poisson(const Scalar& lambda, double tail_eps) {
    check_tail_eps(tail_eps);
    const double l = lambda.to_double();
    if (!(l >= 0.0) || !std::isfinite(l)) {
        throw InvalidArgument("poisson: rate must be >= 0");
    }
    if (l == 0.0) {
        return dirac(Scalar(0.0));
    }
    const double log_l = std::log(l);
    return truncated_lattice_law(
        [&](int k) { return k * log_l - l - bm::lgamma(k + 1.0); },
        [&](int k) { return bm::gamma_p(k + 1.0, l); }, std::floor(l), tail_eps);
}

FiniteMeasure negative_binomial(const Scalar& r, const Scalar& p, double tail_eps) {
    check_tail_eps(tail_eps);
    const double rr = r.to_double();
    const double pp = p.to_double();
    if (!(rr >= 0.0) || !std::isfinite(rr)) {
        throw InvalidArgument("negative_binomial: r must be >= 0");
    }
    if (!(pp >= 0.0 && pp < 1.0)) {
        throw InvalidArgument("negative_binomial: p must lie in [0, 1)");
    }
    if (rr == 0.0 || pp == 0.0) {
        return dirac(Scalar(0.0));
    }
    const double log_p = std::log(pp);
    const double log_q = std::log1p(-pp);
    const double lg_r = bm::lgamma(rr);
    const double mode = rr > 1.0 ? std::floor((rr - 1.0) * pp / (1.0 - pp)) : 0.0;
    return truncated_lattice_law(
        [&](int k) { return bm::lgamma(k + rr) - lg_r - bm::lgamma(k + 1.0) + k * log_p + rr * log_q; },
        [&](int k) { return bm::ibeta(k + 1.0, rr, pp); }, mode, tail_eps);
}

FiniteMeasure geometric(const Scalar& p, double tail_eps) {
    if (!(p > Scalar(0) && p <= Scalar(1))) {
        throw InvalidArgument("geometric: p must lie in (0, 1]");
    }
    return negative_binomial(Scalar(1), Scalar(1) - p, tail_eps);
}

double poisson_cdf(double lambda, double k) {
    if (k < 0.0) {
        return 0.0;
    }
    if (lambda == 0.0) {
        return 1.0;
    }
    return bm::gamma_q(std::floor(k) + 1.0, lambda);
}

double negative_binomial_cdf(double r, double p, double k) {
    if (k < 0.0) {
        return 0.0;
    }
    if (r == 0.0 || p == 0.0) {
        return 1.0;
    }
    return bm::ibeta(r, std::floor(k) + 1.0, 1.0 - p);
}

// ---------------------------------------------------------------------------

ContinuousFamily::ContinuousFamily(Kind kind, double first, double second)
    : kind_(kind), first_(first), second_(second) {
    if (!std::isfinite(first) || !std::isfinite(second)) {
        throw InvalidArgument("non-finite family parameter");
    }
}

ContinuousFamily ContinuousFamily::gamma(double shape, double rate) {
    if (!(shape >= 0.0) || !(rate > 0.0)) {
        throw InvalidArgument("gamma: need shape >= 0 and rate > 0");
    }
    ContinuousFamily f(Kind::gamma, shape, rate);
    if (shape == 0.0) {
        f.point_ = 0.0;
    }
    f.check_normalized();
    return f;
}

ContinuousFamily ContinuousFamily::beta(double alpha, double beta) {
    if (!(alpha >= 0.0) || !(beta >= 0.0) || !(alpha + beta > 0.0)) {
        throw InvalidArgument("beta: need shapes >= 0 with positive sum");
    }
    ContinuousFamily f(Kind::beta, alpha, beta);
    if (alpha == 0.0) {
        f.point_ = 0.0;
    } else if (beta == 0.0) {
        f.point_ = 1.0;
    }
    f.check_normalized();
    return f;
}

ContinuousFamily ContinuousFamily::normal(double mean, double variance) {
    if (!(variance > 0.0)) {
        throw InvalidArgument("normal: variance must be > 0");
    }
    ContinuousFamily f(Kind::normal, mean, variance);
    f.check_normalized();
    return f;
}

void ContinuousFamily::check_normalized() const {
    if (point_) {
        return;
    }
    auto pdf = [this](double x) { return density(x); };
    double total = 0.0;
    switch (kind_) {
        case Kind::beta: {
            // xc is the signed distance to the nearer endpoint, exact near 1.
            auto pdf2 = [this](double x, double xc) {
                const double left = xc < 0 ? -xc : x;
                const double right = xc < 0 ? 1.0 - x : xc;
                return std::exp(beta_ln_norm(first_, second_) + (first_ - 1.0) * std::log(left) +
                                (second_ - 1.0) * std::log(right));
            };
            bm::quadrature::tanh_sinh<double> ts;
            total = ts.integrate(pdf2, 0.0, 1.0);
            break;
        }
        case Kind::gamma: {
            bm::quadrature::tanh_sinh<double> ts;
            bm::quadrature::exp_sinh<double> es;
            const double split = mean();
            total = ts.integrate(pdf, 0.0, split) +
                    es.integrate(pdf, split, std::numeric_limits<double>::infinity());
            break;
        }
        case Kind::normal: {
            bm::quadrature::exp_sinh<double> es;
            const double m = first_;
            total = es.integrate([&](double u) { return density(m + u); }, 0.0,
                                 std::numeric_limits<double>::infinity()) +
                    es.integrate([&](double u) { return density(m - u); }, 0.0,
                                 std::numeric_limits<double>::infinity());
            break;
        }
    }
    if (!(std::abs(total - 1.0) <= 1e-9)) {
        throw InvalidArgument(describe() + ": density integrates to " + std::to_string(total));
    }
}

double ContinuousFamily::density(double x) const {
    if (point_) {
        throw InvalidArgument(describe() + " is a point mass and has no density");
    }
    switch (kind_) {
        case Kind::gamma:
            if (x <= 0.0) {
                return 0.0;
            }
            return std::exp(first_ * std::log(second_) + (first_ - 1.0) * std::log(x) -
                            second_ * x - bm::lgamma(first_));
        case Kind::beta:
            if (x <= 0.0 || x >= 1.0) {
                return 0.0;
            }
            return std::exp(beta_ln_norm(first_, second_) + (first_ - 1.0) * std::log(x) +
                            (second_ - 1.0) * std::log1p(-x));
        case Kind::normal: {
            const double z = (x - first_) / std::sqrt(second_);
            return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi * second_);
        }
    }
    return 0.0;
}

double ContinuousFamily::cdf(double x) const {
    if (point_) {
        return x >= *point_ ? 1.0 : 0.0;
    }
    switch (kind_) {
        case Kind::gamma:
            return x <= 0.0 ? 0.0 : bm::gamma_p(first_, second_ * x);
        case Kind::beta:
            return x <= 0.0 ? 0.0 : (x >= 1.0 ? 1.0 : bm::ibeta(first_, second_, x));
        case Kind::normal:
            return 0.5 * std::erfc(-(x - first_) / std::sqrt(2.0 * second_));
    }
    return 0.0;
}

double ContinuousFamily::sf(double x) const {
    if (point_) {
        return x >= *point_ ? 0.0 : 1.0;
    }
    switch (kind_) {
        case Kind::gamma:
            return x <= 0.0 ? 1.0 : bm::gamma_q(first_, second_ * x);
        case Kind::beta:
            return x <= 0.0 ? 1.0 : (x >= 1.0 ? 0.0 : bm::ibetac(first_, second_, x));
        case Kind::normal:
            return 0.5 * std::erfc((x - first_) / std::sqrt(2.0 * second_));
    }
    return 0.0;
}

double ContinuousFamily::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidArgument("quantile level must lie in (0, 1)");
    }
    if (point_) {
        return *point_;
    }
    switch (kind_) {
        case Kind::gamma:
            return p <= 0.5 ? bm::gamma_p_inv(first_, p) / second_
                            : bm::gamma_q_inv(first_, 1.0 - p) / second_;
        case Kind::beta:
            return p <= 0.5 ? bm::ibeta_inv(first_, second_, p) : bm::ibetac_inv(first_, second_, 1.0 - p);
        case Kind::normal:
            return first_ - std::sqrt(2.0 * second_) * bm::erfc_inv(2.0 * p);
    }
    return 0.0;
}

double ContinuousFamily::mean() const {
    if (point_) {
        return *point_;
    }
    switch (kind_) {
        case Kind::gamma:
            return first_ / second_;
        case Kind::beta:
            return first_ / (first_ + second_);
        case Kind::normal:
            return first_;
    }
    return 0.0;
}

double ContinuousFamily::variance() const {
    if (point_) {
        return 0.0;
    }
    switch (kind_) {
        case Kind::gamma:
            return first_ / (second_ * second_);
        case Kind::beta: {
            const double s = first_ + second_;
            return first_ * second_ / (s * s * (s + 1.0));
        }
        case Kind::normal:
            return second_;
    }
    return 0.0;
}

double ContinuousFamily::stop_loss(double t) const {
    if (point_) {
        return std::max(0.0, *point_ - t);
    }
    switch (kind_) {
        case Kind::gamma:
            // E X 1{X > t} = (a / b) P(Gamma(a + 1, b) > t)
            if (t <= 0.0) {
                return mean() - t;
            }
            return mean() * bm::gamma_q(first_ + 1.0, second_ * t) - t * bm::gamma_q(first_, second_ * t);
        case Kind::beta:
            // E X 1{X > t} = a / (a + b) P(Beta(a + 1, b) > t)
            if (t <= 0.0) {
                return mean() - t;
            }
            if (t >= 1.0) {
                return 0.0;
            }
            return mean() * bm::ibetac(first_ + 1.0, second_, t) - t * bm::ibetac(first_, second_, t);
        case Kind::normal: {
            const double sigma = std::sqrt(second_);
            const double z = (t - first_) / sigma;
            const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
            return sigma * phi + (first_ - t) * 0.5 * std::erfc(z / std::numbers::sqrt2);
        }
    }
    return 0.0;
}

std::string ContinuousFamily::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
        case Kind::gamma:
            os << "gamma(" << first_ << "," << second_ << ")";
            break;
        case Kind::beta:
            os << "beta(" << first_ << "," << second_ << ")";
            break;
        case Kind::normal:
            os << "norm(" << first_ << "," << second_ << ")";
            break;
    }
    return os.str();
}

FiniteMeasure discretize(const ContinuousFamily& f, int grid_n, double lo, double hi, double allowed_tail) {
    if (grid_n < 2) {
        throw InvalidArgument("discretize: need at least 2 cells");
    }
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw InvalidArgument("discretize: need finite lo < hi");
    }
    const double h = (hi - lo) / grid_n;
    if (auto point = f.point_mass()) {
        if (*point < lo || *point > hi) {
            throw InvalidArgument("discretize: point mass of " + f.describe() + " lies outside the window");
        }
        const int cell = std::min(grid_n - 1, static_cast<int>(std::floor((*point - lo) / h)));
        return dirac(Scalar(lo + (cell + 0.5) * h));
    }
    const double left_tail = f.cdf(lo);
    const double right_tail = f.sf(hi);
    if (left_tail + right_tail > allowed_tail) {
        throw InvalidArgument("discretize: window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                              "] leaves out mass " + std::to_string(left_tail + right_tail) + " of " +
                              f.describe());
    }
    const double median = f.quantile(0.5);
    std::vector<Atom> atoms;
    atoms.reserve(static_cast<std::size_t>(grid_n));
    for (int i = 0; i < grid_n; ++i) {
        const double l = lo + i * h;
        const double r = (i + 1 == grid_n) ? hi : lo + (i + 1) * h;
        const double w = r <= median ? f.cdf(r) - f.cdf(l) : f.sf(l) - f.sf(r);
        if (w > 0.0) {
            atoms.push_back(Atom{Scalar(lo + (i + 0.5) * h), Scalar(w)});
        }
    }
    return FiniteMeasure::from_atoms(std::move(atoms), Scalar(left_tail + right_tail));
}

std::pair<double, double> common_window(std::span<const ContinuousFamily> families, double tail) {
    if (families.empty()) {
        throw InvalidArgument("common_window: no families");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    const double side = tail / 2.0;
    for (const auto& f : families) {
        double l = 0.0;
        double h = 0.0;
        if (auto p = f.point_mass()) {
            l = h = *p;
        } else if (f.kind() == ContinuousFamily::Kind::normal) {
            l = f.quantile(side);
            h = f.first() + std::sqrt(2.0 * f.second()) * bm::erfc_inv(2.0 * side);
        } else if (f.kind() == ContinuousFamily::Kind::gamma) {
            l = 0.0;
            h = bm::gamma_q_inv(f.first(), side) / f.second();
        } else {
            l = 0.0;
            h = 1.0;
        }
        lo = std::min(lo, l);
        hi = std::max(hi, h);
    }
    if (!(lo < hi)) {
        lo -= 0.5;
        hi += 0.5;
    }
    return {lo, hi};
}

// ---------------------------------------------------------------------------

namespace {

struct KindName {
    FamilySpec::Kind kind;
    std::string_view name;
    std::size_t arity;
};

constexpr KindName kKindNames[] = {
    {FamilySpec::Kind::binomial, "binom", 2}, {FamilySpec::Kind::poisson, "poiss", 1},
    {FamilySpec::Kind::negative_binomial, "nb", 2}, {FamilySpec::Kind::geometric, "geom", 1},
    {FamilySpec::Kind::gamma, "gamma", 2}, {FamilySpec::Kind::beta, "beta", 2},
    {FamilySpec::Kind::normal, "norm", 2},
};

}  // namespace

FamilySpec FamilySpec::parse(std::string_view text) {
    const auto open = text.find('(');
    const auto close = text.rfind(')');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open ||
        close + 1 != text.size()) {
        throw InvalidArgument("malformed family spec '" + std::string(text) + "'");
    }
    const auto name = text.substr(0, open);
    const auto* entry = std::find_if(std::begin(kKindNames), std::end(kKindNames),
                                     [&](const KindName& k) { return k.name == name; });
    if (entry == std::end(kKindNames)) {
        throw InvalidArgument("unknown family '" + std::string(name) + "'");
    }
    FamilySpec spec{entry->kind, {}};
    auto args = text.substr(open + 1, close - open - 1);
    while (true) {
        const auto comma = args.find(',');
        spec.params.push_back(Scalar::parse(args.substr(0, comma)));
        if (comma == std::string_view::npos) {
            break;
        }
        args.remove_prefix(comma + 1);
    }
    if (spec.params.size() != entry->arity) {
        throw InvalidArgument("family '" + std::string(name) + "' takes " + std::to_string(entry->arity) +
                              " parameter(s)");
    }
    if (spec.kind == Kind::binomial && (!spec.params[0].is_integer() || spec.params[0] < Scalar(1))) {
        throw InvalidArgument("binom: n must be a positive integer");
    }
    return spec;
}

bool FamilySpec::is_continuous() const {
    return kind == Kind::gamma || kind == Kind::beta || kind == Kind::normal;
}

ContinuousFamily FamilySpec::continuous() const {
    switch (kind) {
        case Kind::gamma:
            return ContinuousFamily::gamma(params[0].to_double(), params[1].to_double());
        case Kind::beta:
            return ContinuousFamily::beta(params[0].to_double(), params[1].to_double());
        case Kind::normal:
            return ContinuousFamily::normal(params[0].to_double(), params[1].to_double());
        default:
            throw InvalidArgument(to_string() + " is not a continuous family");
    }
}

std::string FamilySpec::to_string() const {
    const auto* entry = std::find_if(std::begin(kKindNames), std::end(kKindNames),
                                     [&](const KindName& k) { return k.kind == kind; });
    std::string out(entry->name);
    out += '(';
    for (std::size_t i = 0; i < params.size(); ++i) {
        out += (i ? "," : "") + params[i].to_string();
    }
    return out + ')';
}

std::vector<FiniteMeasure> build_measures(std::span<const FamilySpec> specs, const MeasureOptions& options) {
    std::vector<ContinuousFamily> continuous;
    for (const auto& s : specs) {
        if (s.is_continuous()) {
            continuous.push_back(s.continuous());
        }
    }
    std::pair<double, double> window{0.0, 1.0};
    if (!continuous.empty()) {
        window = common_window(continuous, options.tail_eps);
    }
    std::vector<FiniteMeasure> out;
    std::size_t next_continuous = 0;
    for (const auto& s : specs) {
        switch (s.kind) {
            case FamilySpec::Kind::binomial:
                out.push_back(binomial(static_cast<int>(s.params[0].to_double()), s.params[1]));
                break;
            case FamilySpec::Kind::poisson:
                out.push_back(poisson(s.params[0], options.tail_eps));
                break;
            case FamilySpec::Kind::negative_binomial:
                out.push_back(negative_binomial(s.params[0], s.params[1], options.tail_eps));
                break;
            case FamilySpec::Kind::geometric:
                out.push_back(geometric(s.params[0], options.tail_eps));
                break;
            default:
                out.push_back(discretize(continuous[next_continuous++], options.cells, window.first,
                                         window.second, 2.0 * options.tail_eps));
                break;
        }
    }
    return out;
}

}  // namespace cxorder
