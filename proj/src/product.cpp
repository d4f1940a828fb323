#include "qpricer/product.hpp"

#include <cmath>

namespace qpricer {

namespace {

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void ObservationLeg::validate() const {
    if (!finite(time)) throw ConfigError("leg: non-finite observation time");
    if (!(k_minus >= 0.0) || !finite(k_minus)) {
        throw ConfigError("leg: lower level must be finite and >= 0");
    }
    if (k_plus) {
        if (!(*k_plus > 0.0) || !finite(*k_plus)) {
            throw ConfigError("leg: upper level must be finite and > 0");
        }
        if (k_minus > *k_plus) {
            throw ConfigError("leg: lower level exceeds upper level");
        }
    }
    if (!finite(a_minus) || !finite(b_minus) || !finite(a_plus) || !finite(b_plus)) {
        throw ConfigError("leg: payoff coefficients must be finite");
    }
}

std::vector<double> ProductSchedule::all_dates() const {
    std::vector<double> dates;
    dates.reserve(legs.size() + 1);
    dates.push_back(valuation_time);
    for (const auto& leg : legs) dates.push_back(leg.time);
    return dates;
}

void ProductSchedule::validate() const {
    if (legs.empty()) throw ConfigError("schedule: at least one observation date required");
    if (!(spot > 0.0) || !finite(spot)) throw ConfigError("schedule: spot must be positive");
    if (!(legs.front().time > valuation_time)) {
        throw ConfigError("schedule: first observation date must be after the valuation time");
    }
    for (std::size_t i = 1; i < legs.size(); ++i) {
        if (!(legs[i].time > legs[i - 1].time)) {
            throw ConfigError("schedule: observation dates must be strictly increasing");
        }
    }
    for (const auto& leg : legs) leg.validate();
    if (!finite(terminal.slope) || !finite(terminal.intercept)) {
        throw ConfigError("schedule: terminal payoff must be finite");
    }
    if (style != ExerciseStyle::Scheduled && !(strike > 0.0)) {
        throw ConfigError("schedule: Bermudan strike must be positive");
    }
}

ProductSchedule make_autocallable(double valuation_time, double spot,
                                  const std::vector<double>& dates,
                                  const std::vector<double>& barriers,
                                  const std::vector<double>& coupons,
                                  double final_premium, BarrierDirection direction) {
    if (dates.size() != barriers.size() || dates.size() != coupons.size()) {
        throw ConfigError("autocallable: dates, barriers and coupons must have equal length");
    }
    ProductSchedule p;
    p.valuation_time = valuation_time;
    p.spot = spot;
    for (std::size_t m = 0; m < dates.size(); ++m) {
        if (!(barriers[m] > 0.0)) throw ConfigError("autocallable: barriers must be positive");
        ObservationLeg leg;
        leg.time = dates[m];
        if (direction == BarrierDirection::UpAndOut) {
            leg.k_plus = barriers[m];
            leg.b_plus = coupons[m];
        } else {
            leg.k_minus = barriers[m];
            leg.b_minus = coupons[m];
        }
        p.legs.push_back(leg);
    }
    p.terminal = {0.0, final_premium};
    p.validate();
    return p;
}

ProductSchedule make_barrier(double valuation_time, double spot,
                             const std::vector<double>& dates,
                             const std::vector<std::optional<double>>& lower_barriers,
                             const std::vector<std::optional<double>>& upper_barriers,
                             const TerminalSpec& terminal) {
    if (dates.size() != lower_barriers.size() || dates.size() != upper_barriers.size()) {
        throw ConfigError("barrier: dates and barrier lists must have equal length");
    }
    using Kind = TerminalSpec::Kind;
    if ((terminal.kind == Kind::Call || terminal.kind == Kind::Put) && !(terminal.value > 0.0)) {
        throw ConfigError("barrier: terminal strike must be positive");
    }
    ProductSchedule p;
    p.valuation_time = valuation_time;
    p.spot = spot;
    for (std::size_t m = 0; m < dates.size(); ++m) {
        const auto& lo = lower_barriers[m];
        const auto& hi = upper_barriers[m];
        if (lo && hi && !(*lo < *hi)) {
            throw ConfigError("barrier: lower barrier must be below upper barrier");
        }
        ObservationLeg leg;
        leg.time = dates[m];
        if (lo) leg.k_minus = *lo;
        if (hi) leg.k_plus = *hi;
        p.legs.push_back(leg);
    }

    // Fold the terminal payoff into the final leg. Knock-out regions pay
    // zero, so a payoff kink at the strike and a barrier on the same side
    // collapse to whichever level is binding.
    ObservationLeg& last = p.legs.back();
    const double lo = last.k_minus;  // 0 when absent
    const std::optional<double> hi = last.k_plus;
    switch (terminal.kind) {
        case Kind::Put: {
            const double k = terminal.value;
            const double upper = hi ? std::min(*hi, k) : k;
            if (lo >= upper) {  // payoff vacuous: knocked out or out of the money everywhere
                ObservationLeg cleared;
                cleared.time = last.time;
                last = cleared;
                p.terminal = {0.0, 0.0};
            } else {
                last.k_plus = upper;
                p.terminal = {-1.0, k};
            }
            break;
        }
        case Kind::Call: {
            const double k = terminal.value;
            const double lower = std::max(lo, k);
            if (hi && *hi <= lower) {
                ObservationLeg cleared;
                cleared.time = last.time;
                last = cleared;
                p.terminal = {0.0, 0.0};
            } else {
                last.k_minus = lower;
                p.terminal = {1.0, -k};
            }
            break;
        }
        case Kind::Cash:
            p.terminal = {0.0, terminal.value};
            break;
        case Kind::Asset:
            p.terminal = {1.0, 0.0};
            break;
    }
    p.validate();
    return p;
}

ProductSchedule make_bermudan(double valuation_time, double spot,
                              const std::vector<double>& dates, double strike,
                              ExerciseStyle style) {
    if (style == ExerciseStyle::Scheduled) {
        throw ConfigError("bermudan: style must be BermudanCall or BermudanPut");
    }
    if (!(strike > 0.0)) throw ConfigError("bermudan: strike must be positive");
    ProductSchedule p;
    p.valuation_time = valuation_time;
    p.spot = spot;
    p.style = style;
    p.strike = strike;
    for (double t : dates) {
        ObservationLeg leg;
        leg.time = t;
        // Exercise levels stay unresolved; the engine solves them. The payoff
        // coefficients on the exercise side are fixed by the intrinsic value.
        if (style == ExerciseStyle::BermudanPut) {
            leg.a_minus = -1.0;
            leg.b_minus = strike;
        } else {
            leg.a_plus = 1.0;
            leg.b_plus = -strike;
        }
        p.legs.push_back(leg);
    }
    p.terminal = {0.0, 0.0};
    p.validate();
    return p;
}

ProductSchedule strip_barriers(const ProductSchedule& schedule) {
    if (schedule.style != ExerciseStyle::Scheduled) {
        throw ConfigError("strip_barriers: only scheduled products have a vanilla counterpart");
    }
    ProductSchedule vanilla = schedule;
    for (std::size_t m = 0; m + 1 < vanilla.legs.size(); ++m) {
        ObservationLeg cleared;
        cleared.time = vanilla.legs[m].time;
        vanilla.legs[m] = cleared;
    }
    // The final leg keeps its levels: they encode the terminal payoff shape.
    return vanilla;
}

}  // namespace qpricer
