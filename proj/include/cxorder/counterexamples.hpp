#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cxorder/measure.hpp"
#include "cxorder/muirhead.hpp"

namespace cxorder {

struct ExampleCheck {
    std::string claim;
    bool passed = false;
    std::string observed;
};

struct ExampleReport {
    std::string name;
    std::vector<ExampleCheck> checks;

    [[nodiscard]] bool passed() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

/// Names accepted by reproduce_example.
std::vector<std::string> example_names();

/**
 * Replays a named example end to end in exact arithmetic.
 *
 * "ex2.4": mu = (delta_{-3} + delta_1)/2 and nu = (3 delta_0 + delta_4)/4 are
 * st-incomparable, yet mu*nu <=cx (mu*mu + nu*nu)/2.
 * "ex3.9": the polynomials V = (x^3 y + x y^3)/2 and W = (x^4 + 6 x^2 y^2 + y^4)/8
 * evaluated at delta_0 <=st (delta_0 + delta_1)/2 give V(mu, nu) not <=cx W(mu, nu).
 *
 * Throws InvalidArgument for an unknown name.
 */
ExampleReport reproduce_example(std::string_view name);

/// The two polynomials of the second example.
DistributionPolynomial example_polynomial_v();
DistributionPolynomial example_polynomial_w();

}  // namespace cxorder
