#pragma once
// Shared product/market definitions used across the unit and acceptance
// suites: the worked autocallable and double-barrier examples plus a few
// degenerate schedules with closed-form prices.

#include "qpricer/market_model.hpp"
#include "qpricer/product.hpp"

namespace fixtures {

// Knock-out autocallable, spot 3000, vol 20%, five quarterly-ish dates with
// rising barriers and rates; coupon 4% * t on a knock-out, premium -1% at
// maturity otherwise.
inline qpricer::ProductSchedule table1_product() {
    return qpricer::make_autocallable(0.0, 3000.0, {0.2, 0.4, 0.6, 0.8, 1.0},
                                      {3050.0, 3100.0, 3150.0, 3200.0, 3250.0},
                                      {0.008, 0.016, 0.024, 0.032, 0.04}, -0.01);
}

inline qpricer::MarketCurves table1_curves() {
    return {qpricer::PiecewiseCurve({{0.2, 0.020},
                                     {0.4, 0.021},
                                     {0.6, 0.022},
                                     {0.8, 0.023},
                                     {1.0, 0.024}}),
            qpricer::PiecewiseCurve::constant(0.0), qpricer::PiecewiseCurve::constant(0.20)};
}

// Knock-out double-barrier put, spot 2500, strike 2600, vol 25%, two years of
// quarterly observations with widening barriers; no barriers at maturity.
inline qpricer::ProductSchedule table2_product() {
    const std::vector<double> dates{0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
    const std::vector<std::optional<double>> lower{2200.0, 2100.0, 2000.0, 1900.0,
                                                   1800.0, 1700.0, 1600.0, std::nullopt};
    const std::vector<std::optional<double>> upper{2800.0, 2900.0, 3000.0, 3100.0,
                                                   3200.0, 3300.0, 3400.0, std::nullopt};
    return qpricer::make_barrier(0.0, 2500.0, dates, lower, upper,
                                 qpricer::TerminalSpec::put(2600.0));
}

inline qpricer::MarketCurves table2_curves() {
    return {qpricer::PiecewiseCurve({{0.25, 0.010},
                                     {0.50, 0.011},
                                     {0.75, 0.012},
                                     {1.00, 0.013},
                                     {1.25, 0.012},
                                     {1.50, 0.013},
                                     {1.75, 0.014},
                                     {2.00, 0.015}}),
            qpricer::PiecewiseCurve::constant(0.0), qpricer::PiecewiseCurve::constant(0.25)};
}

// Barrier-free multi-date schedule equivalent to a European option.
inline qpricer::ProductSchedule european_schedule(double spot, double strike, bool call,
                                                  const std::vector<double>& dates) {
    const std::vector<std::optional<double>> none(dates.size(), std::nullopt);
    return qpricer::make_barrier(0.0, spot, dates, none, none,
                                 call ? qpricer::TerminalSpec::call(strike)
                                      : qpricer::TerminalSpec::put(strike));
}

inline qpricer::MarketCurves flat_curves(double r, double q, double sigma) {
    return {qpricer::PiecewiseCurve::constant(r), qpricer::PiecewiseCurve::constant(q),
            qpricer::PiecewiseCurve::constant(sigma)};
}

// Pays 1 at maturity unconditionally.
inline qpricer::ProductSchedule cash_bond(double spot, const std::vector<double>& dates) {
    const std::vector<std::optional<double>> none(dates.size(), std::nullopt);
    return qpricer::make_barrier(0.0, spot, dates, none, none, qpricer::TerminalSpec::cash(1.0));
}

}  // namespace fixtures
