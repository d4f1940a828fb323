#pragma once
/**
 * @file analytic.hpp
 * @brief Closed-form kernels: normal CDF and its inverse, binary option
 *        values, and the value function one date before maturity.
 */

#include "qpricer/market_model.hpp"
#include "qpricer/product.hpp"

namespace qpricer {

/// Standard normal CDF. Computed through the complementary error function so
/// the far tails keep full relative accuracy (needed down to N(-10) and below).
double norm_cdf(double x);

/// Standard normal density.
double norm_pdf(double x);

/// Inverse of norm_cdf on (0, 1). Initial rational approximation refined by a
/// Halley step against norm_cdf; absolute error around 1e-15.
/// @throws std::domain_error outside (0, 1).
double norm_cdf_inv(double p);

/// N(hi) - N(lo) without cancellation when both arguments sit in the same
/// tail. Exact sign for hi >= lo.
double norm_cdf_diff(double hi, double lo);

/// Inputs for a single binary (digital) valuation over one interval.
struct BinaryQuote {
    double spot;           ///< asset price at the interval start
    double strike;
    int sign;              ///< +1: pays beyond the strike from above; -1: from below
    IntervalParams params;
};

/// Asset-or-nothing value exp(-q dt) * S * N(sign * d1).
/// @throws std::domain_error if spot or strike is nonpositive.
double binary_asset(const BinaryQuote& q);

/// Cash-or-nothing value exp(-r dt) * N(sign * d2).
/// @throws std::domain_error if spot or strike is nonpositive.
double binary_cash(const BinaryQuote& q);

/// Replace an absent lower/upper level by `substitute_strike` with payoff
/// coefficients matching the middle region, leaving the payoff function
/// unchanged. terminal_value() requires both levels finite and positive.
ObservationLeg normalize_terminal_leg(const ObservationLeg& leg, const TerminalPayoff& terminal,
                                      double substitute_strike);

/// Value one date before maturity of the piecewise-linear terminal payoff:
/// the six-term combination of binaries over the final interval.
/// @throws std::domain_error if spot <= 0, std::invalid_argument if the leg
/// has not been normalized to finite levels.
double terminal_value(double spot, const ObservationLeg& final_leg, const TerminalPayoff& terminal,
                      const IntervalParams& params);

}  // namespace qpricer
