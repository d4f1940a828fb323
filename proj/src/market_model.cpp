#include "qpricer/market_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qpricer {

PiecewiseCurve::PiecewiseCurve(std::vector<CurveSegment> segments)
    : segments_(std::move(segments)) {
    if (segments_.empty()) {
        throw ConfigError("curve: at least one segment required");
    }
    for (std::size_t i = 1; i < segments_.size(); ++i) {
        if (!(segments_[i].until > segments_[i - 1].until)) {
            throw ConfigError("curve: breakpoints must be strictly increasing");
        }
    }
    for (const auto& s : segments_) {
        if (!std::isfinite(s.until) || !std::isfinite(s.value)) {
            throw ConfigError("curve: non-finite segment");
        }
    }
}

PiecewiseCurve PiecewiseCurve::constant(double value) {
    // Far enough out to cover any realistic horizon.
    return PiecewiseCurve({{1.0e9, value}});
}

bool PiecewiseCurve::covers(double t) const {
    return !segments_.empty() && t <= segments_.back().until;
}

double PiecewiseCurve::value_at(double t) const {
    auto it = std::lower_bound(segments_.begin(), segments_.end(), t,
                               [](const CurveSegment& s, double v) { return s.until < v; });
    if (it == segments_.end()) {
        throw ConfigError("curve: time " + std::to_string(t) + " past last breakpoint");
    }
    return it->value;
}

double PiecewiseCurve::integral(double a, double b) const {
    if (b < a) throw ConfigError("curve: integral bounds out of order");
    if (b == a) return 0.0;
    if (!covers(b)) {
        throw ConfigError("curve: horizon up to " + std::to_string(b) + " not covered");
    }
    double sum = 0.0;
    double lo = a;
    for (const auto& s : segments_) {
        if (s.until <= lo) continue;
        const double hi = std::min(s.until, b);
        sum += s.value * (hi - lo);
        lo = hi;
        if (lo >= b) break;
    }
    return sum;
}

double PiecewiseCurve::integral_squared(double a, double b) const {
    if (b < a) throw ConfigError("curve: integral bounds out of order");
    if (b == a) return 0.0;
    if (!covers(b)) {
        throw ConfigError("curve: horizon up to " + std::to_string(b) + " not covered");
    }
    double sum = 0.0;
    double lo = a;
    for (const auto& s : segments_) {
        if (s.until <= lo) continue;
        const double hi = std::min(s.until, b);
        sum += s.value * s.value * (hi - lo);
        lo = hi;
        if (lo >= b) break;
    }
    return sum;
}

void MarketCurves::validate() const {
    if (vol.segments().empty() || rate.segments().empty() || yield.segments().empty()) {
        throw ConfigError("market curves: rate, yield and vol must all be set");
    }
    for (const auto& s : vol.segments()) {
        if (!(s.value > 0.0)) {
            throw ConfigError("market curves: volatility must be positive on every segment");
        }
    }
}

std::vector<IntervalParams> reduce_curves(const MarketCurves& curves,
                                          std::span<const double> dates) {
    curves.validate();
    if (dates.size() < 2) {
        throw ConfigError("reduce_curves: need a valuation date and at least one observation date");
    }
    for (std::size_t i = 1; i < dates.size(); ++i) {
        if (!(dates[i] > dates[i - 1])) {
            throw ConfigError("reduce_curves: dates must be strictly increasing");
        }
    }
    const double horizon_end = dates.back();
    if (!curves.rate.covers(horizon_end) || !curves.yield.covers(horizon_end) ||
        !curves.vol.covers(horizon_end)) {
        throw ConfigError("reduce_curves: curves do not cover the product horizon");
    }

    std::vector<IntervalParams> out;
    out.reserve(dates.size() - 1);
    for (std::size_t m = 1; m < dates.size(); ++m) {
        const double t0 = dates[m - 1];
        const double t1 = dates[m];
        const double dt = t1 - t0;
        IntervalParams p;
        p.dt = dt;
        p.rate = curves.rate.integral(t0, t1) / dt;
        p.yield = curves.yield.integral(t0, t1) / dt;
        const double var = curves.vol.integral_squared(t0, t1) / dt;
        if (!(var > 0.0)) {
            throw ConfigError("reduce_curves: zero variance on an interval");
        }
        p.sigma = std::sqrt(var);
        p.tau = 0.5 * var * dt;
        p.alpha = (p.rate - p.yield - 0.5 * var) / var;
        p.beta = p.alpha * p.alpha + 2.0 * p.rate / var;
        out.push_back(p);
    }
    return out;
}

double lognormal_density(const IntervalParams& params, double y, double s) {
    if (!(y > 0.0) || !(s > 0.0)) {
        throw std::domain_error("lognormal_density: prices must be positive");
    }
    const double d = std::log(y / s) - 2.0 * params.alpha * params.tau;
    return std::exp(-d * d / (4.0 * params.tau)) /
           (2.0 * std::sqrt(std::numbers::pi * params.tau) * y);
}

double kernel_w(const IntervalParams& params, double x) {
    return std::exp(-x * x / (4.0 * params.tau) - params.alpha * x);
}

}  // namespace qpricer
