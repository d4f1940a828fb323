#pragma once
/**
 * @file engine.hpp
 * @brief Backward-induction quadrature engine on a fixed uniform log-price grid.
 *
 * Each backward step writes the earlier value function as analytic exercise
 * terms plus a convolution of the later value function against a Gaussian
 * kernel over the survival window. The convolution is discretized with
 * composite Simpson weights; at grid points it is evaluated for all points at
 * once through an FFT, at the handful of off-grid points (window boundaries
 * and their midpoints) through direct summation.
 */

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qpricer/analytic.hpp"
#include "qpricer/bermudan.hpp"
#include "qpricer/market_model.hpp"
#include "qpricer/product.hpp"

namespace qpricer {

/// Uniform grid in log-moneyness x = log(S / spot) over [-log_c, log_c].
struct Grid {
    int n = 0;
    double log_c = 0.0;
    double h = 0.0;
    std::vector<double> x;
};

/// Domain half-width log C = 10 sigma0 sqrt(T) + (1 + sigma0^2/2) T with
/// sigma0 the largest interval volatility: wide enough that the tail mass
/// beyond the domain stays at round-off level.
double truncation_half_width(std::span<const IntervalParams> intervals, double horizon);

/// @throws ConfigError if n < 5 or log_c <= 0.
Grid build_grid(double log_c, int n);

/// Integration window of one observation date, clipped to the grid domain.
///
/// Indices are 0-based: p_minus is the first grid point at or above the lower
/// log bound, p_plus the last one strictly below the upper log bound, p0 a
/// parity pad so Simpson segments have an odd point count. xi_minus/xi_plus
/// are the midpoints of the leftover edge intervals. When fewer than three
/// grid points fall inside the window, `narrow` marks the single-panel
/// fallback and xi_minus == xi_plus is the window midpoint.
struct StepWindow {
    double l_minus = 0.0, l_plus = 0.0;  ///< price bounds
    double b_minus = 0.0, b_plus = 0.0;  ///< log bounds
    int p_minus = 0, p_plus = 0;
    int p0 = 0;
    double xi_minus = 0.0, xi_plus = 0.0;
    bool narrow = false;
};

/// Window for one leg, or nullopt when the window misses the domain entirely
/// (the integral is zero by convention).
std::optional<StepWindow> locate_window(const ObservationLeg& leg, const Grid& grid, double spot);

/// Values of one date's function at the four off-grid window points.
struct EdgeValues {
    double at_b_minus = 0.0;
    double at_xi_minus = 0.0;
    double at_xi_plus = 0.0;
    double at_b_plus = 0.0;
};

/// Option values on the grid plus the off-grid edge values of the date's own
/// integration window.
struct ValueFunction {
    std::vector<double> values;
    std::optional<StepWindow> window;
    EdgeValues edges;
};

/// Composite Simpson weights 1,4,2,...,4,1 applied to the values on
/// [p_minus, p_plus + p0]. Requires a non-narrow window.
std::vector<double> simpson_weighted_values(std::span<const double> values, const StepWindow& window);

/// Discrete convolution sum(i) kernel[j + N - i] * weighted[i] for j = 1..N
/// (paper indexing), computed by FFT. Both inputs have length 2N-1; the
/// weighted vector must vanish outside [1, N] so no wrap-around occurs. The
/// transform runs at any power-of-two length >= max(2N-1, min_length);
/// padding cannot change the supported outputs.
/// @throws std::invalid_argument on length mismatch.
std::vector<double> fft_convolve(std::span<const double> weighted, std::span<const double> kernel,
                                 std::size_t min_length = 0);

/// The two 3-point Simpson edge integrals of a step, evaluated at x_eval with
/// the plain kernel w_m. The upper interval may have signed (negative)
/// length when the parity pad lands past the window; the formula subtracts
/// the overshoot. Returns {lower, upper} without the step prefactor.
std::pair<double, double> edge_integrals(const ValueFunction& u, const Grid& grid,
                                         const IntervalParams& params, double x_eval);

/// One backward step: everything needed to evaluate the earlier value
/// function from the later one, at grid points (FFT) or anywhere (direct sum).
class StepEvaluator {
public:
    StepEvaluator(const Grid& grid, double spot, const IntervalParams& params,
                  const ObservationLeg& leg, const ValueFunction& u);

    /// Quadrature part: the discounted convolution over the window.
    double continuation_at(double x) const;

    /// Analytic exercise terms of the leg at S = spot * e^x.
    double exercise_part(double x) const;

    /// Earlier value function at arbitrary log-moneyness x, O(N).
    double value_at(double x) const { return continuation_at(x) + exercise_part(x); }

    /// Earlier value function at all grid points, O(N log N).
    std::vector<double> values_on_grid() const;

private:
    double kernel(double d) const;
    double edge_sum(double x) const;

    const Grid& grid_;
    double spot_;
    IntervalParams params_;
    ObservationLeg leg_;
    const ValueFunction& u_;
    std::vector<double> weighted_;  // Simpson-weighted values on the window support
    double prefactor_ = 0.0;        // exp(-r dt) / (2 sqrt(pi tau)), kernel shift absorbed
    double drift_ = 0.0;            // 2 alpha tau, center offset of the kernel
};

/// Backward step as a single call: grid values via FFT plus, when
/// `next_window` is given, the edge values the following step will need.
ValueFunction step_back(const ValueFunction& u, const ObservationLeg& leg,
                        const IntervalParams& params, const Grid& grid, double spot,
                        const std::optional<StepWindow>& next_window = std::nullopt);

struct StepDiagnostics {
    int leg_index = 0;  ///< 1-based observation index m of the value function
    double time = 0.0;
    double max_abs_value = 0.0;
    std::optional<StepWindow> window;
};

struct PriceOptions {
    std::optional<double> log_c_override;
    RootMethod bermudan_root_method = RootMethod::Bisection;
    /// Called with each intermediate value function (m = M-1 down to 1).
    std::function<void(int leg_index, double time, std::span<const double> values)> step_observer;
};

struct PriceResult {
    double value = 0.0;
    int n_points = 0;
    double log_c = 0.0;
    double grid_step = 0.0;
    double runtime_ms = 0.0;
    std::vector<StepDiagnostics> steps;
    /// Legs with Bermudan exercise levels filled in (identical to the input
    /// legs for scheduled products).
    std::vector<ObservationLeg> resolved_legs;
    /// One entry per early date of a Bermudan product, latest date first.
    std::vector<BoundarySolve> boundary_solves;
};

/// Price a product: closed form at the final date, FFT-Simpson backward
/// induction across the earlier dates, single direct evaluation at the spot.
/// @throws ConfigError on invalid inputs, NumericError on non-finite values.
PriceResult price(const ProductSchedule& product, const MarketCurves& curves, int n_points,
                  const PriceOptions& options = {});

}  // namespace qpricer
