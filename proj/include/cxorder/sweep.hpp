#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cxorder/muirhead.hpp"

namespace cxorder {

enum class SweepFamily { binomial, poisson, negative_binomial, gamma, beta, normal };

SweepFamily parse_sweep_family(std::string_view name);
std::string_view to_string(SweepFamily family);

/**
 * Grid of parameter points for a gap sweep. Every ordered pair of points
 * (a, b) contributes one gap per battery function.
 *
 * grid holds x (binomial), lambda (poisson), r (negative binomial), the first
 * shape (gamma, beta) or the mean (normal); grid2 holds p, the rate or the
 * second shape for the two-parameter families.
 */
struct SweepSpec {
    SweepFamily family = SweepFamily::binomial;
    std::vector<Scalar> grid;
    std::vector<Scalar> grid2;
    int n = 1;
    Scalar variance = Scalar(1);
    /// Number of stop-loss kinks in the battery.
    int battery = 9;
    std::optional<Scalar> scale;
    std::optional<std::pair<Scalar, Scalar>> domain;
    Scalar tol = Scalar(kDefaultOrderTolerance);
    double tail_eps = 1e-12;
    int cells = 4000;
    bool force_float = false;
    /// Drop pairs outside the st-comparability hypothesis instead of warning.
    bool skip_violations = false;
};

/// `start:stop:count` (inclusive, equally spaced) or a comma-separated list.
std::vector<Scalar> parse_grid(std::string_view text);

struct SweepResult {
    std::vector<GapReport> rows;
    std::vector<std::string> warnings;
    std::optional<std::size_t> argmin;
    Regime regime = Regime::exact;
    /// Discretization budget 4 L s h for continuous families (see README), zero otherwise.
    double eps_grid = 0.0;
    /// A gap fails when it is below -allowed.
    Scalar allowed;
    std::size_t failures = 0;
    /// Pairs outside the comparability hypothesis, skipped or not.
    std::size_t hypothesis_violations = 0;

    [[nodiscard]] bool passed() const { return failures == 0; }
    [[nodiscard]] nlohmann::json summary() const;
};

SweepResult run_sweep(const SweepSpec& spec);

std::string gap_csv_header();
std::string gap_csv_row(const GapReport& row);

}  // namespace cxorder
