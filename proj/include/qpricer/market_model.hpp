#pragma once
/**
 * @file market_model.hpp
 * @brief Time-dependent market curves, their reduction to per-interval
 *        constants, and the lognormal transition density of the asset.
 *
 * Rates, yields and volatilities are piecewise-constant functions of time.
 * Between two observation dates only their integrals matter for the
 * distribution of the asset price, so each monitoring interval is described
 * by a small set of constants (IntervalParams) that preserve the terminal
 * distribution exactly.
 *
 * Units: times are year fractions, rates/yields are per-year decimals,
 * volatility is per sqrt-year.
 */

#include <span>
#include <vector>

#include "qpricer/errors.hpp"

namespace qpricer {

/// One segment of a piecewise-constant curve: `value` applies on
/// (previous until, until]. The first segment extends to -inf on the left.
struct CurveSegment {
    double until;
    double value;
};

/// Piecewise-constant function of time with right-closed segments.
class PiecewiseCurve {
public:
    PiecewiseCurve() = default;

    /// @throws ConfigError if breakpoints are not strictly increasing or the list is empty.
    explicit PiecewiseCurve(std::vector<CurveSegment> segments);

    /// Curve equal to `value` for all time.
    static PiecewiseCurve constant(double value);

    /// Value at time t. @throws ConfigError if t is past the last breakpoint.
    double value_at(double t) const;

    /// Exact integral over (a, b]. @throws ConfigError if (a, b] is not covered.
    double integral(double a, double b) const;

    /// Exact integral of the squared curve over (a, b].
    double integral_squared(double a, double b) const;

    bool covers(double t) const;

    const std::vector<CurveSegment>& segments() const { return segments_; }

private:
    std::vector<CurveSegment> segments_;
};

/// Market state for the model: risk-free rate r(t), yield q(t), volatility sigma(t).
struct MarketCurves {
    PiecewiseCurve rate;
    PiecewiseCurve yield;
    PiecewiseCurve vol;

    /// @throws ConfigError unless sigma(t) > 0 on every segment.
    void validate() const;
};

/// Distribution-equivalent constants for one monitoring interval.
///
/// rate/yield are plain time averages, sigma is the root of the time average
/// of sigma^2, so the asset distribution at the interval end is unchanged.
struct IntervalParams {
    double rate;   ///< r_m, per year
    double yield;  ///< q_m, per year
    double sigma;  ///< sigma_m, per sqrt-year
    double dt;     ///< interval length, years
    double tau;    ///< sigma_m^2 * dt / 2
    double alpha;  ///< (r_m - q_m - sigma_m^2/2) / sigma_m^2
    double beta;   ///< alpha^2 + 2 r_m / sigma_m^2
};

/// Reduce curves to one IntervalParams per interval (t_{m-1}, t_m].
///
/// `dates` must start at the valuation time and be strictly increasing;
/// the result has dates.size() - 1 entries. Integrals of the piecewise
/// constant inputs are computed exactly, no numeric quadrature.
///
/// @throws ConfigError on non-increasing dates or uncovered horizon.
std::vector<IntervalParams> reduce_curves(const MarketCurves& curves,
                                          std::span<const double> dates);

/// Transition density of the asset price over one interval: the density of
/// the end-of-interval price `y` given the start-of-interval price `s`.
/// @throws std::domain_error if y <= 0 or s <= 0.
double lognormal_density(const IntervalParams& params, double y, double s);

/// Convolution weight w_m(x) = exp(-x^2/(4 tau) - alpha x). Strictly positive,
/// w_m(0) = 1. The transition density in log coordinates is proportional to
/// w_m evaluated at the log-price difference.
double kernel_w(const IntervalParams& params, double x);

}  // namespace qpricer
