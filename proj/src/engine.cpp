#include "qpricer/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <numbers>

#include "qpricer/fft.hpp"

namespace qpricer {

double truncation_half_width(std::span<const IntervalParams> intervals, double horizon) {
    if (intervals.empty()) throw ConfigError("truncation_half_width: no intervals");
    if (!(horizon > 0.0)) throw ConfigError("truncation_half_width: horizon must be positive");
    double sigma0 = 0.0;
    for (const auto& p : intervals) sigma0 = std::max(sigma0, p.sigma);
    return 10.0 * sigma0 * std::sqrt(horizon) + (1.0 + 0.5 * sigma0 * sigma0) * horizon;
}

Grid build_grid(double log_c, int n) {
    if (n < 5) throw ConfigError("grid: at least 5 points required");
    if (!(log_c > 0.0)) throw ConfigError("grid: half-width must be positive");
    Grid g;
    g.n = n;
    g.log_c = log_c;
    g.h = 2.0 * log_c / (n - 1);
    g.x.resize(n);
    // Mirror construction keeps the endpoints and the symmetry exact; plain
    // accumulation would put x[n-1] a few ulp off log_c.
    for (int i = 0; i * 2 < n; ++i) {
        g.x[i] = -log_c + i * g.h;
        g.x[n - 1 - i] = log_c - i * g.h;
    }
    if (n % 2 == 1) g.x[n / 2] = 0.0;
    return g;
}

std::optional<StepWindow> locate_window(const ObservationLeg& leg, const Grid& grid, double spot) {
    const double c = std::exp(grid.log_c);
    const double lo_clip = spot / c;
    const double hi_clip = spot * c;
    if (leg.k_minus >= hi_clip) return std::nullopt;
    if (leg.has_upper() && *leg.k_plus <= lo_clip) return std::nullopt;

    StepWindow w;
    const bool lo_clamped = !(leg.k_minus > lo_clip);
    const bool hi_clamped = !leg.has_upper() || *leg.k_plus >= hi_clip;
    w.l_minus = lo_clamped ? lo_clip : leg.k_minus;
    w.l_plus = hi_clamped ? hi_clip : *leg.k_plus;
    if (!(w.l_minus < w.l_plus)) return std::nullopt;
    w.b_minus = lo_clamped ? -grid.log_c : std::clamp(std::log(leg.k_minus / spot), -grid.log_c, grid.log_c);
    w.b_plus = hi_clamped ? grid.log_c : std::clamp(std::log(*leg.k_plus / spot), -grid.log_c, grid.log_c);
    if (!(w.b_minus < w.b_plus)) return std::nullopt;

    const auto first_at_or_above = [&](double b) {
        return static_cast<int>(std::lower_bound(grid.x.begin(), grid.x.end(), b) - grid.x.begin());
    };
    w.p_minus = first_at_or_above(w.b_minus);
    w.p_plus = first_at_or_above(w.b_plus) - 1;
    w.p0 = (((w.p_plus - w.p_minus) % 2) + 2) % 2;
    w.narrow = (w.p_plus + w.p0 - w.p_minus) < 2;
    if (w.narrow) {
        w.xi_minus = w.xi_plus = 0.5 * (w.b_minus + w.b_plus);
    } else {
        w.xi_minus = 0.5 * (grid.x[w.p_minus] + w.b_minus);
        w.xi_plus = 0.5 * (grid.x[w.p_plus + w.p0] + w.b_plus);
    }
    return w;
}

std::vector<double> simpson_weighted_values(std::span<const double> values,
                                            const StepWindow& window) {
    if (window.narrow) {
        throw std::invalid_argument("simpson_weighted_values: window too narrow for the composite rule");
    }
    const int lo = window.p_minus;
    const int hi = window.p_plus + window.p0;
    const int count = hi - lo + 1;  // odd, >= 3
    std::vector<double> out(count);
    out[0] = values[lo];
    out[count - 1] = values[hi];
    for (int k = 1; k + 1 < count; ++k) {
        out[k] = (k % 2 == 1 ? 4.0 : 2.0) * values[lo + k];
    }
    return out;
}

std::vector<double> fft_convolve(std::span<const double> weighted, std::span<const double> kernel,
                                 std::size_t min_length) {
    if (weighted.size() != kernel.size() || weighted.size() % 2 != 1 || weighted.size() < 3) {
        throw std::invalid_argument("fft_convolve: inputs must share an odd length 2N-1");
    }
    const std::size_t full = weighted.size();
    const std::size_t n = (full + 1) / 2;
    const std::size_t len = fft::transform_length(std::max(full, min_length));

    // Separate transforms for the two inputs: packing both into one complex
    // pass couples their rounding, and the payoff values can outscale the
    // kernel by many orders of magnitude.
    std::vector<std::complex<double>> a(len), b(len);
    for (std::size_t i = 0; i < full; ++i) {
        a[i] = kernel[i];
        b[i] = weighted[i];
    }
    fft::forward(a);
    fft::forward(b);
    for (std::size_t k = 0; k < len; ++k) a[k] *= b[k];
    fft::inverse(a);

    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = a[j + n - 1].real();
    return out;
}

namespace {

// Shared shape of the two edge integrals; kernel_fn decides which kernel
// normalization is used.
template <typename KernelFn>
std::pair<double, double> edge_pair(const ValueFunction& u, const Grid& grid, double x_eval,
                                    KernelFn&& kernel_fn) {
    const StepWindow& w = *u.window;
    double lower = 0.0;
    double upper = 0.0;
    const double len_lo = grid.x[w.p_minus] - w.b_minus;
    if (len_lo != 0.0) {
        lower = len_lo / 6.0 *
                (kernel_fn(x_eval - w.b_minus) * u.edges.at_b_minus +
                 4.0 * kernel_fn(x_eval - w.xi_minus) * u.edges.at_xi_minus +
                 kernel_fn(x_eval - grid.x[w.p_minus]) * u.values[w.p_minus]);
    }
    const int q = w.p_plus + w.p0;
    const double len_hi = w.b_plus - grid.x[q];
    if (len_hi != 0.0) {
        upper = len_hi / 6.0 *
                (kernel_fn(x_eval - w.b_plus) * u.edges.at_b_plus +
                 4.0 * kernel_fn(x_eval - w.xi_plus) * u.edges.at_xi_plus +
                 kernel_fn(x_eval - grid.x[q]) * u.values[q]);
    }
    return {lower, upper};
}

void populate_edges(ValueFunction& u, const Grid& grid,
                    const std::function<double(double)>& eval_at) {
    if (!u.window) return;
    const StepWindow& w = *u.window;
    if (w.narrow) {
        u.edges.at_b_minus = eval_at(w.b_minus);
        u.edges.at_xi_minus = u.edges.at_xi_plus = eval_at(w.xi_minus);
        u.edges.at_b_plus = eval_at(w.b_plus);
        return;
    }
    // Zero-length edges never contribute, so their values are not evaluated
    // (for one-barrier products only two off-grid points are live).
    if (grid.x[w.p_minus] != w.b_minus) {
        u.edges.at_b_minus = eval_at(w.b_minus);
        u.edges.at_xi_minus = eval_at(w.xi_minus);
    } else {
        u.edges.at_b_minus = u.edges.at_xi_minus = u.values[w.p_minus];
    }
    const int q = w.p_plus + w.p0;
    if (grid.x[q] != w.b_plus) {
        u.edges.at_b_plus = eval_at(w.b_plus);
        u.edges.at_xi_plus = eval_at(w.xi_plus);
    } else {
        u.edges.at_b_plus = u.edges.at_xi_plus = u.values[q];
    }
}

}  // namespace

std::pair<double, double> edge_integrals(const ValueFunction& u, const Grid& grid,
                                         const IntervalParams& params, double x_eval) {
    if (!u.window) throw std::invalid_argument("edge_integrals: value function has no window");
    if (u.window->narrow) {
        throw std::invalid_argument("edge_integrals: narrow window uses the single-panel rule");
    }
    return edge_pair(u, grid, x_eval, [&](double d) { return kernel_w(params, d); });
}

StepEvaluator::StepEvaluator(const Grid& grid, double spot, const IntervalParams& params,
                             const ObservationLeg& leg, const ValueFunction& u)
    : grid_(grid), spot_(spot), params_(params), leg_(leg), u_(u) {
    if (u.values.size() != static_cast<std::size_t>(grid.n)) {
        throw std::invalid_argument("StepEvaluator: value function does not match the grid");
    }
    if (u_.window && !u_.window->narrow) {
        weighted_ = simpson_weighted_values(u_.values, *u_.window);
    }
    // exp(-beta tau) * w(d) == exp(-r dt) * exp(-(d + 2 alpha tau)^2 / (4 tau)):
    // completing the square keeps the kernel bounded by one, so neither factor
    // can overflow for extreme drift parameters.
    prefactor_ = std::exp(-params_.rate * params_.dt) /
                 (2.0 * std::sqrt(std::numbers::pi * params_.tau));
    drift_ = 2.0 * params_.alpha * params_.tau;
}

double StepEvaluator::kernel(double d) const {
    const double z = d + drift_;
    return std::exp(-z * z / (4.0 * params_.tau));
}

double StepEvaluator::exercise_part(double x) const {
    double v = 0.0;
    const double s = spot_ * std::exp(x);
    if (leg_.has_upper()) {
        if (leg_.a_plus != 0.0) v += leg_.a_plus * binary_asset({s, *leg_.k_plus, +1, params_});
        if (leg_.b_plus != 0.0) v += leg_.b_plus * binary_cash({s, *leg_.k_plus, +1, params_});
    }
    if (leg_.has_lower()) {
        if (leg_.a_minus != 0.0) v += leg_.a_minus * binary_asset({s, leg_.k_minus, -1, params_});
        if (leg_.b_minus != 0.0) v += leg_.b_minus * binary_cash({s, leg_.k_minus, -1, params_});
    }
    return v;
}

double StepEvaluator::edge_sum(double x) const {
    const auto [lower, upper] = edge_pair(u_, grid_, x, [&](double d) { return kernel(d); });
    return lower + upper;
}

double StepEvaluator::continuation_at(double x) const {
    if (!u_.window) return 0.0;
    const StepWindow& w = *u_.window;
    if (w.narrow) {
        const double len = w.b_plus - w.b_minus;
        return prefactor_ * len / 6.0 *
               (kernel(x - w.b_minus) * u_.edges.at_b_minus +
                4.0 * kernel(x - w.xi_minus) * u_.edges.at_xi_minus +
                kernel(x - w.b_plus) * u_.edges.at_b_plus);
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < weighted_.size(); ++k) {
        sum += kernel(x - grid_.x[w.p_minus + static_cast<int>(k)]) * weighted_[k];
    }
    sum *= grid_.h / 3.0;
    sum += edge_sum(x);
    return prefactor_ * sum;
}

std::vector<double> StepEvaluator::values_on_grid() const {
    const int n = grid_.n;
    std::vector<double> out(n);
    const bool has_terms = (leg_.has_upper() && (leg_.a_plus != 0.0 || leg_.b_plus != 0.0)) ||
                           (leg_.has_lower() && (leg_.a_minus != 0.0 || leg_.b_minus != 0.0));
    for (int j = 0; j < n; ++j) out[j] = has_terms ? exercise_part(grid_.x[j]) : 0.0;

    if (!u_.window) return out;
    const StepWindow& w = *u_.window;
    if (w.narrow) {
        for (int j = 0; j < n; ++j) out[j] += continuation_at(grid_.x[j]);
        return out;
    }

    const std::size_t full = 2 * static_cast<std::size_t>(n) - 1;
    std::vector<double> kern(full);
    for (std::size_t i = 0; i < full; ++i) {
        kern[i] = kernel((static_cast<int>(i) - (n - 1)) * grid_.h);
    }
    std::vector<double> weighted_full(full, 0.0);
    std::copy(weighted_.begin(), weighted_.end(), weighted_full.begin() + w.p_minus);
    const auto conv = fft_convolve(weighted_full, kern);

    const double scale = prefactor_ * grid_.h / 3.0;
    for (int j = 0; j < n; ++j) {
        out[j] += scale * conv[j] + prefactor_ * edge_sum(grid_.x[j]);
    }
    return out;
}

ValueFunction step_back(const ValueFunction& u, const ObservationLeg& leg,
                        const IntervalParams& params, const Grid& grid, double spot,
                        const std::optional<StepWindow>& next_window) {
    StepEvaluator ev(grid, spot, params, leg, u);
    ValueFunction next;
    next.values = ev.values_on_grid();
    for (double v : next.values) {
        if (!std::isfinite(v)) throw NumericError("step_back: non-finite value function");
    }
    next.window = next_window;
    populate_edges(next, grid, [&](double x) { return ev.value_at(x); });
    return next;
}

PriceResult price(const ProductSchedule& product, const MarketCurves& curves, int n_points,
                  const PriceOptions& options) {
    const auto t_start = std::chrono::steady_clock::now();
    product.validate();
    const auto dates = product.all_dates();
    const auto intervals = reduce_curves(curves, dates);
    const int m_count = static_cast<int>(product.legs.size());
    const bool is_bermudan = product.style != ExerciseStyle::Scheduled;
    const OptionSide side =
        product.style == ExerciseStyle::BermudanPut ? OptionSide::Put : OptionSide::Call;
    if (is_bermudan) {
        for (const auto& p : intervals) {
            if (p.yield < 0.0) {
                throw ConfigError("price: Bermudan exercise levels require nonnegative yields");
            }
        }
    }

    PriceResult result;
    result.n_points = n_points;
    result.log_c = options.log_c_override.value_or(
        truncation_half_width(intervals, dates.back() - dates.front()));
    result.resolved_legs = product.legs;

    if (is_bermudan) {
        for (auto& leg : result.resolved_legs) {
            leg.k_minus = 0.0;
            leg.k_plus.reset();
        }
        // At maturity exercise is optimal exactly when the intrinsic value is
        // positive, so the final level is the strike itself.
        if (side == OptionSide::Put) {
            result.resolved_legs.back().k_minus = product.strike;
        } else {
            result.resolved_legs.back().k_plus = product.strike;
        }
    }

    const IntervalParams& params_last = intervals.back();
    const ObservationLeg term_leg =
        normalize_terminal_leg(result.resolved_legs.back(), product.terminal, product.spot);

    auto finish = [&](double value) {
        if (!std::isfinite(value)) throw NumericError("price: non-finite result");
        result.value = value;
        result.runtime_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - t_start)
                                .count();
        return result;
    };

    if (m_count == 1) {
        return finish(terminal_value(product.spot, term_leg, product.terminal, params_last));
    }

    const Grid grid = build_grid(result.log_c, n_points);
    result.grid_step = grid.h;

    const auto closed_form = [&](double x) {
        return terminal_value(product.spot * std::exp(x), term_leg, product.terminal, params_last);
    };

    auto record_step = [&](int leg_index, const ValueFunction& vf) {
        double max_abs = 0.0;
        for (double v : vf.values) {
            if (!std::isfinite(v)) throw NumericError("price: non-finite value function");
            max_abs = std::max(max_abs, std::abs(v));
        }
        result.steps.push_back(
            {leg_index, product.legs[leg_index - 1].time, max_abs, vf.window});
        if (options.step_observer) {
            options.step_observer(leg_index, product.legs[leg_index - 1].time, vf.values);
        }
    };

    double sigma0 = 0.0;
    for (const auto& p : intervals) sigma0 = std::max(sigma0, p.sigma);
    // Truncation noise reaches inward from the domain edges by the half-width
    // formula of the horizon still to be integrated over; the boundary scan
    // must not look inside that belt. The closed-form date (m = M-1) is exact
    // everywhere and uses no margin.
    auto scan_margin_at = [&](int target_leg) {
        if (target_leg == m_count - 2) return 0.0;
        const double remaining = dates.back() - product.legs[target_leg].time;
        if (!(remaining > 0.0)) return 0.0;
        return 10.0 * sigma0 * std::sqrt(remaining) + (1.0 + 0.5 * sigma0 * sigma0) * remaining;
    };

    auto solve_boundary = [&](const std::function<double(double)>& eval_at,
                              std::span<const double> grid_values, int target_leg) {
        auto bs = find_exercise_level(eval_at, grid_values, grid.x, grid.h, product.spot,
                                      product.strike, side, options.bermudan_root_method,
                                      scan_margin_at(target_leg));
        ObservationLeg& leg = result.resolved_legs[target_leg];
        if (side == OptionSide::Put) {
            leg.k_minus = bs.level.value_or(0.0);
        } else if (bs.level) {
            leg.k_plus = *bs.level;
        } else {
            leg.k_plus.reset();
        }
        result.boundary_solves.push_back(bs);
    };

    // Value function one date before maturity, in closed form.
    ValueFunction u;
    u.values.resize(grid.n);
    for (int j = 0; j < grid.n; ++j) u.values[j] = closed_form(grid.x[j]);
    if (is_bermudan) solve_boundary(closed_form, u.values, m_count - 2);
    u.window = locate_window(result.resolved_legs[m_count - 2], grid, product.spot);
    populate_edges(u, grid, closed_form);
    record_step(m_count - 1, u);

    // Backward induction; at each pass m the later function u is the date-m
    // function and the FFT produces the date-(m-1) grid values.
    for (int m = m_count - 1; m >= 2; --m) {
        const IntervalParams& params = intervals[m - 1];
        const ObservationLeg& leg = result.resolved_legs[m - 1];
        StepEvaluator ev(grid, product.spot, params, leg, u);
        ValueFunction next;
        next.values = ev.values_on_grid();
        const auto eval_at = [&ev](double x) { return ev.value_at(x); };
        if (is_bermudan) solve_boundary(eval_at, next.values, m - 2);
        next.window = locate_window(result.resolved_legs[m - 2], grid, product.spot);
        populate_edges(next, grid, eval_at);
        u = std::move(next);
        record_step(m - 1, u);
    }

    // Final interval: the price is a single direct evaluation at the spot.
    StepEvaluator ev(grid, product.spot, intervals[0], result.resolved_legs[0], u);
    return finish(ev.value_at(0.0));
}

}  // namespace qpricer
