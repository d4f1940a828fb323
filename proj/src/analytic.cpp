#include "qpricer/analytic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qpricer {

namespace {

constexpr double inv_sqrt2 = 0.7071067811865475244008443621048490;
constexpr double sqrt_2pi = 2.5066282746310005024157652848110453;

struct D12 {
    double d1;
    double d2;
};

D12 d_values(double spot, double strike, const IntervalParams& p) {
    const double vol_dt = p.sigma * std::sqrt(p.dt);
    const double d1 =
        (std::log(spot / strike) + (p.rate - p.yield) * p.dt) / vol_dt + 0.5 * vol_dt;
    return {d1, d1 - vol_dt};
}

void check_quote(const BinaryQuote& q) {
    if (!(q.spot > 0.0) || !(q.strike > 0.0)) {
        throw std::domain_error("binary: spot and strike must be positive");
    }
}

}  // namespace

double norm_cdf(double x) { return 0.5 * std::erfc(-x * inv_sqrt2); }

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / sqrt_2pi; }

double norm_cdf_inv(double p) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::domain_error("norm_cdf_inv: argument must lie in (0, 1)");
    }
    // Acklam's rational approximation, then one Halley step.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    const double err = norm_cdf(x) - p;
    const double u = err * sqrt_2pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

double norm_cdf_diff(double hi, double lo) {
    if (hi + lo > 0.0) return norm_cdf(-lo) - norm_cdf(-hi);
    return norm_cdf(hi) - norm_cdf(lo);
}

double binary_asset(const BinaryQuote& q) {
    check_quote(q);
    const auto d = d_values(q.spot, q.strike, q.params);
    return std::exp(-q.params.yield * q.params.dt) * q.spot * norm_cdf(q.sign * d.d1);
}

double binary_cash(const BinaryQuote& q) {
    check_quote(q);
    const auto d = d_values(q.spot, q.strike, q.params);
    return std::exp(-q.params.rate * q.params.dt) * norm_cdf(q.sign * d.d2);
}

ObservationLeg normalize_terminal_leg(const ObservationLeg& leg, const TerminalPayoff& terminal,
                                      double substitute_strike) {
    if (!(substitute_strike > 0.0)) {
        throw std::domain_error("normalize_terminal_leg: substitute strike must be positive");
    }
    ObservationLeg out = leg;
    if (!out.has_lower()) {
        out.k_minus = substitute_strike;
        out.a_minus = terminal.slope;
        out.b_minus = terminal.intercept;
    }
    if (!out.has_upper()) {
        out.k_plus = substitute_strike;
        out.a_plus = terminal.slope;
        out.b_plus = terminal.intercept;
    }
    return out;
}

double terminal_value(double spot, const ObservationLeg& final_leg, const TerminalPayoff& terminal,
                      const IntervalParams& params) {
    if (!(spot > 0.0)) throw std::domain_error("terminal_value: spot must be positive");
    if (!final_leg.has_lower() || !final_leg.has_upper()) {
        throw std::invalid_argument("terminal_value: leg must be normalized to finite levels");
    }
    const double k_lo = final_leg.k_minus;
    const double k_hi = *final_leg.k_plus;

    const auto d_lo = d_values(spot, k_lo, params);
    const auto d_hi = d_values(spot, k_hi, params);
    const double asset_df = std::exp(-params.yield * params.dt) * spot;
    const double cash_df = std::exp(-params.rate * params.dt);

    // Lower exercise side, middle payoff, upper exercise side. The middle
    // terms are differences of same-strike binaries, combined tail-stably.
    double v = final_leg.a_minus * asset_df * norm_cdf(-d_lo.d1) +
               final_leg.b_minus * cash_df * norm_cdf(-d_lo.d2);
    v += terminal.slope * asset_df * norm_cdf_diff(d_lo.d1, d_hi.d1) +
         terminal.intercept * cash_df * norm_cdf_diff(d_lo.d2, d_hi.d2);
    v += final_leg.a_plus * asset_df * norm_cdf(d_hi.d1) +
         final_leg.b_plus * cash_df * norm_cdf(d_hi.d2);
    return v;
}

}  // namespace qpricer
