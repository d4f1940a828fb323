#pragma once
/**
 * @file validation.hpp
 * @brief Independent checks on the engine: an exact-law Monte-Carlo oracle
 *        with antithetic variates, the certified truncation-error bound, and
 *        a convergence-order harness.
 */

#include <cstdint>

#include "qpricer/engine.hpp"

namespace qpricer {

struct McResult {
    double estimate = 0.0;
    double std_error = 0.0;
    std::int64_t n_pairs = 0;
    std::uint64_t seed = 0;
};

struct McOptions {
    int threads = 0;               ///< 0 = pick from hardware
    bool flip_antithetic = false;  ///< swap the two legs of each pair; must not change the estimate
};

/// Monte-Carlo price with antithetic variates. Asset values at observation
/// dates are sampled from their exact lognormal law (no time-discretization
/// error); the estimate is deterministic for a given seed and independent of
/// the thread count. Requires concrete exercise levels: resolve Bermudan
/// schedules through the engine first.
McResult mc_price(const ProductSchedule& product, const MarketCurves& curves,
                  std::int64_t n_pairs, std::uint64_t seed, const McOptions& options = {});

/// Certified bound on the error introduced by truncating the integration
/// domain to (spot/C, spot*C): the discounted envelope of the payoff mass
/// outside the domain, a sum of binary option values struck at the domain
/// ends over each horizon.
struct TruncationBound {
    double slope_max = 0.0;      ///< largest |payoff slope| across legs and terminal
    double intercept_max = 0.0;  ///< largest |payoff intercept|
    double rate_floor = 0.0;     ///< min(rates, 0)
    double yield_floor = 0.0;    ///< min(yields, 0)
    double d_min = 0.0, d_max = 0.0;  ///< range of the digital arguments (0 when M == 1)
    double value = 0.0;          ///< the bound itself, in currency
};

TruncationBound truncation_bound(const ProductSchedule& product, const MarketCurves& curves,
                                 double log_c);

struct ConvergencePoint {
    int n = 0;
    double value = 0.0;
    double rel_error = 0.0;
};

struct ConvergenceResult {
    std::vector<ConvergencePoint> points;
    int reference_n = 0;
    double reference_value = 0.0;
    /// Least-squares slope of log(error) against log(N), negated. Points at
    /// the round-off floor (error below 100 eps) are excluded from the fit;
    /// NaN when fewer than two points remain.
    double observed_order = 0.0;
};

ConvergenceResult convergence_study(const ProductSchedule& product, const MarketCurves& curves,
                                    std::span<const int> n_list, int reference_n);

}  // namespace qpricer
