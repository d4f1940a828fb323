#include "qpricer/bermudan.hpp"

#include <algorithm>
#include <cmath>

#include "qpricer/errors.hpp"

namespace qpricer {

namespace {

// g(x) = continuation - intrinsic at S = spot * e^x. Exercise is optimal
// where g < 0; the boundary is the sign change.
double excess(const std::function<double(double)>& continuation_at_log, double x, double spot,
              double strike, OptionSide side) {
    const double s = spot * std::exp(x);
    const double intrinsic = side == OptionSide::Put ? strike - s : s - strike;
    return continuation_at_log(x) - intrinsic;
}

double excess_on_grid(std::span<const double> continuation_on_grid,
                      std::span<const double> grid_x, int i, double spot, double strike,
                      OptionSide side) {
    const double s = spot * std::exp(grid_x[i]);
    const double intrinsic = side == OptionSide::Put ? strike - s : s - strike;
    return continuation_on_grid[i] - intrinsic;
}

}  // namespace

BoundarySolve find_exercise_level(const std::function<double(double)>& continuation_at_log,
                                  std::span<const double> continuation_on_grid,
                                  std::span<const double> grid_x, double grid_step, double spot,
                                  double strike, OptionSide side, RootMethod method,
                                  double scan_margin) {
    const int n = static_cast<int>(grid_x.size());
    BoundarySolve out;

    // Values within the kernel reach of the domain edges carry truncation
    // noise; the scan stays inside the certified zone.
    int scan_lo = 0;
    int scan_hi = n - 1;
    if (scan_margin > 0.0) {
        while (scan_lo < n - 1 && grid_x[scan_lo] < grid_x.front() + scan_margin) ++scan_lo;
        while (scan_hi > 0 && grid_x[scan_hi] > grid_x.back() - scan_margin) --scan_hi;
        if (scan_lo >= scan_hi) {  // degenerate margin; keep the midpoint area
            scan_lo = std::max(0, n / 2 - 1);
            scan_hi = std::min(n - 1, n / 2 + 1);
        }
    }

    // Scan for the first grid point on the continuation side.
    int p = -1;
    if (side == OptionSide::Put) {
        for (int i = scan_lo; i <= scan_hi; ++i) {
            if (excess_on_grid(continuation_on_grid, grid_x, i, spot, strike, side) > 0.0) {
                p = i;
                break;
            }
        }
        if (p < 0) {
            throw NumericError("find_exercise_level: continuation below intrinsic everywhere");
        }
        if (p == scan_lo) return out;  // no early exercise at this date
        out.bracket_lo = p - 1;
        out.bracket_hi = p;
    } else {
        for (int i = scan_hi; i >= scan_lo; --i) {
            if (excess_on_grid(continuation_on_grid, grid_x, i, spot, strike, side) > 0.0) {
                p = i;
                break;
            }
        }
        if (p < 0) {
            throw NumericError("find_exercise_level: continuation below intrinsic everywhere");
        }
        if (p == scan_hi) return out;  // exercise never optimal inside the domain
        out.bracket_lo = p;
        out.bracket_hi = p + 1;
    }

    double lo = grid_x[out.bracket_lo];
    double hi = grid_x[out.bracket_hi];
    // Put: g <= 0 below the level and > 0 above it; calls are mirrored.
    const double sign = side == OptionSide::Put ? 1.0 : -1.0;

    // Root tolerance in price, tied to the quadrature order h^4.
    const double tol = std::max(std::pow(grid_step, 4) * spot, 1e-12 * spot);
    const int max_iterations = 200;

    auto width_price = [&] { return spot * (std::exp(hi) - std::exp(lo)); };

    if (method == RootMethod::Bisection) {
        while (width_price() > tol && out.iterations < max_iterations) {
            const double mid = 0.5 * (lo + hi);
            const double g_mid = excess(continuation_at_log, mid, spot, strike, side);
            ++out.iterations;
            (sign * g_mid > 0.0 ? hi : lo) = mid;
        }
    } else {
        // Secant steps on the last two iterates, kept inside the bracket with
        // bisection fallbacks. The scan guarantees the sign change; endpoint
        // values are only used to seed the iteration.
        double x0 = lo, x1 = hi;
        double g0 = excess(continuation_at_log, x0, spot, strike, side);
        double g1 = excess(continuation_at_log, x1, spot, strike, side);
        while (width_price() > tol && out.iterations < max_iterations) {
            double cand;
            const double denom = g1 - g0;
            if (denom != 0.0) {
                cand = x1 - g1 * (x1 - x0) / denom;
            } else {
                cand = 0.5 * (lo + hi);
            }
            if (!(cand > lo) || !(cand < hi)) cand = 0.5 * (lo + hi);
            const double g_cand = excess(continuation_at_log, cand, spot, strike, side);
            ++out.iterations;
            (sign * g_cand > 0.0 ? hi : lo) = cand;
            x0 = x1;
            g0 = g1;
            x1 = cand;
            g1 = g_cand;
            // A secant step that lands within tolerance of the root ends the
            // search even while the safety bracket is wider.
            if (std::abs(g_cand) == 0.0) break;
            if (spot * std::abs(x1 - x0) < tol && sign * g0 * sign * g1 < 0.0) {
                lo = std::min(x0, x1);
                hi = std::max(x0, x1);
                break;
            }
        }
    }

    out.tolerance_met = width_price() <= tol;
    const double root = 0.5 * (lo + hi);
    out.level = spot * std::exp(root);
    return out;
}

}  // namespace qpricer
