#pragma once
/**
 * @file bermudan.hpp
 * @brief Optimal exercise levels for Bermudan options.
 *
 * At each date the exercise level is the root of
 *   continuation value == intrinsic value.
 * The continuation value net of intrinsic is strictly monotone across the
 * level (a consequence of the near-contraction property of the continuation
 * value), so a grid scan brackets the root and bisection always converges.
 */

#include <functional>
#include <optional>
#include <span>

namespace qpricer {

enum class OptionSide { Put, Call };
enum class RootMethod { Bisection, Secant };

/// Result of one exercise-level solve.
struct BoundarySolve {
    std::optional<double> level;  ///< exercise price; nullopt = no early exercise
    int bracket_lo = -1;          ///< grid index below the root
    int bracket_hi = -1;          ///< grid index above the root
    int iterations = 0;
    bool tolerance_met = true;
};

/// Solve for the optimal exercise level of one date.
///
/// `continuation_on_grid` holds the continuation value at the grid prices
/// spot*exp(x_i); `continuation_at_log` evaluates it at arbitrary x. For puts
/// the level is where continuation first exceeds strike - S scanning upward;
/// if that happens at the lowest grid point there is no early exercise.
/// Calls mirror with S - strike scanning downward. The bracket is refined to
/// a price tolerance max(h^4 * spot, 1e-12 * spot).
///
/// `scan_margin` (log-price units) keeps the grid scan away from the domain
/// edges, where a truncated convolution contaminates the continuation value;
/// pass the half-width formula of the remaining horizon for FFT-produced
/// functions and 0 for closed-form ones.
///
/// @throws NumericError if no grid point lies on the continuation side
///         (indicates a broken continuation function).
BoundarySolve find_exercise_level(const std::function<double(double)>& continuation_at_log,
                                  std::span<const double> continuation_on_grid,
                                  std::span<const double> grid_x, double grid_step, double spot,
                                  double strike, OptionSide side,
                                  RootMethod method = RootMethod::Bisection,
                                  double scan_margin = 0.0);

}  // namespace qpricer
