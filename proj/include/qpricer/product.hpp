#pragma once
/**
 * @file product.hpp
 * @brief Generic two-sided knock-out product and constructors for the named
 *        products (autocallables, barrier/touch options, Bermudans).
 *
 * A product is a schedule of observation dates. At each date the option is
 * exercised if the asset is at or below the lower level, or at or above the
 * upper level, paying a linear amount a*S + b on the triggering side. If it
 * survives every date, the payoff at maturity is again linear between the
 * final levels.
 */

#include <optional>
#include <string>
#include <vector>

#include "qpricer/errors.hpp"

namespace qpricer {

/// One observation date. A lower level of 0 means "no lower exercise";
/// an absent upper level means unbounded above. Levels are inclusive on the
/// exercise side: S <= k_minus or S >= k_plus triggers.
struct ObservationLeg {
    double time = 0.0;
    double k_minus = 0.0;                ///< lower exercise level, 0 disables
    std::optional<double> k_plus;        ///< upper exercise level, nullopt = unbounded
    double a_minus = 0.0, b_minus = 0.0; ///< payoff a*S + b when S <= k_minus
    double a_plus = 0.0, b_plus = 0.0;   ///< payoff a*S + b when S >= k_plus

    bool has_lower() const { return k_minus > 0.0; }
    bool has_upper() const { return k_plus.has_value(); }

    /// @throws ConfigError on violated invariants (ordering, signs, finiteness).
    void validate() const;
};

/// Payoff a*S + b at maturity when the asset ends between the final levels.
struct TerminalPayoff {
    double slope = 0.0;      // a_M
    double intercept = 0.0;  // b_M
};

/// Scheduled products carry fixed exercise levels; Bermudan products leave
/// them open and the engine solves for the optimal levels date by date.
enum class ExerciseStyle { Scheduled, BermudanCall, BermudanPut };

struct ProductSchedule {
    double valuation_time = 0.0;  ///< t_0
    double spot = 0.0;            ///< asset price at t_0
    std::vector<ObservationLeg> legs;  ///< strictly increasing times, last = maturity
    TerminalPayoff terminal;
    ExerciseStyle style = ExerciseStyle::Scheduled;
    double strike = 0.0;          ///< Bermudan strike; unused otherwise

    double maturity() const { return legs.back().time; }

    /// All dates {t_0, t_1, ..., t_M} for curve reduction.
    std::vector<double> all_dates() const;

    /// @throws ConfigError on violated invariants.
    void validate() const;
};

enum class BarrierDirection { UpAndOut, DownAndOut };

/// Autocallable: redeems with coupon_m if the barrier side is touched at date m;
/// pays final_premium at maturity otherwise. UpAndOut places barriers above,
/// DownAndOut mirrors them below.
ProductSchedule make_autocallable(double valuation_time, double spot,
                                  const std::vector<double>& dates,
                                  const std::vector<double>& barriers,
                                  const std::vector<double>& coupons,
                                  double final_premium,
                                  BarrierDirection direction = BarrierDirection::UpAndOut);

/// Terminal payoff of a barrier product.
struct TerminalSpec {
    enum class Kind { Call, Put, Cash, Asset };
    Kind kind = Kind::Put;
    double value = 0.0;  ///< strike for Call/Put, amount for Cash, unused for Asset

    static TerminalSpec call(double strike) { return {Kind::Call, strike}; }
    static TerminalSpec put(double strike) { return {Kind::Put, strike}; }
    static TerminalSpec cash(double amount) { return {Kind::Cash, amount}; }
    static TerminalSpec asset() { return {Kind::Asset, 0.0}; }
};

/// Knock-out barrier option with per-date (possibly absent) barriers and a
/// vanilla-style terminal payoff. Knock-in variants are priced by parity
/// against the barrier-free product, see strip_barriers().
ProductSchedule make_barrier(double valuation_time, double spot,
                             const std::vector<double>& dates,
                             const std::vector<std::optional<double>>& lower_barriers,
                             const std::vector<std::optional<double>>& upper_barriers,
                             const TerminalSpec& terminal);

/// Bermudan option exercisable into +/-(S - K) at each date. Exercise levels
/// are left unresolved; the engine solves them during backward induction.
ProductSchedule make_bermudan(double valuation_time, double spot,
                              const std::vector<double>& dates, double strike,
                              ExerciseStyle style);

/// The same schedule with every intermediate barrier removed. Together with
/// the knock-out price this gives the knock-in price by parity.
ProductSchedule strip_barriers(const ProductSchedule& schedule);

}  // namespace qpricer
