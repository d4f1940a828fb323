#include "oracles.hpp"

#include <cmath>

namespace oracles {

namespace {
const long double kSqrt2Pi = 2.50662827463100050241576528481104525L;
}

long double norm_pdf_ref(long double x) { return std::exp(-0.5L * x * x) / kSqrt2Pi; }

long double norm_cdf_ref(long double x) {
    const long double ax = std::fabs(x);
    long double tail_or_half;
    if (ax <= 3.5L) {
        // Phi(x) = 1/2 + phi(x) * sum_k x^(2k+1) / (1*3*...*(2k+1))
        long double term = ax;
        long double sum = ax;
        for (int k = 1; k < 200; ++k) {
            term *= ax * ax / (2.0L * k + 1.0L);
            sum += term;
            if (term < 1e-25L * sum) break;
        }
        const long double phi_pos = 0.5L + norm_pdf_ref(ax) * sum;
        tail_or_half = 1.0L - phi_pos;  // upper tail at +ax
    } else {
        // Laplace continued fraction for the upper tail.
        long double f = ax;
        for (int k = 300; k >= 1; --k) f = ax + k / f;
        tail_or_half = norm_pdf_ref(ax) / f;
    }
    return x >= 0.0L ? 1.0L - tail_or_half : tail_or_half;
}

namespace {

long double simpson(long double a, long double fa, long double fm, long double b,
                    long double fb) {
    return (b - a) / 6.0L * (fa + 4.0L * fm + fb);
}

long double adaptive(const std::function<long double(long double)>& f, long double a,
                     long double fa, long double b, long double fb, long double m,
                     long double fm, long double whole, long double tol, int depth) {
    const long double lm = 0.5L * (a + m);
    const long double rm = 0.5L * (m + b);
    const long double flm = f(lm);
    const long double frm = f(rm);
    const long double left = simpson(a, fa, flm, m, fm);
    const long double right = simpson(m, fm, frm, b, fb);
    const long double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0L * tol) {
        return left + right + delta / 15.0L;
    }
    return adaptive(f, a, fa, m, fm, lm, flm, left, 0.5L * tol, depth - 1) +
           adaptive(f, m, fm, b, fb, rm, frm, right, 0.5L * tol, depth - 1);
}

}  // namespace

long double integrate(const std::function<long double(long double)>& f, long double a,
                      long double b, long double tol) {
    if (a == b) return 0.0L;
    // A fixed initial subdivision keeps narrow peaks from hiding between the
    // first sample points.
    constexpr int panels = 32;
    const long double step = (b - a) / panels;
    long double total = 0.0L;
    for (int k = 0; k < panels; ++k) {
        const long double lo = a + k * step;
        const long double hi = (k + 1 == panels) ? b : a + (k + 1) * step;
        const long double m = 0.5L * (lo + hi);
        const long double flo = f(lo);
        const long double fhi = f(hi);
        const long double fm = f(m);
        total += adaptive(f, lo, flo, hi, fhi, m, fm, simpson(lo, flo, fm, hi, fhi),
                          tol / panels, 48);
    }
    return total;
}

namespace {

struct D12 {
    long double d1, d2;
};

D12 d_ref(const BsInputs& in) {
    const long double v = in.sigma * std::sqrt(in.expiry);
    const long double d1 =
        (std::log(in.spot / in.strike) + (in.rate - in.yield) * in.expiry) / v + 0.5L * v;
    return {d1, d1 - v};
}

}  // namespace

long double bs_call_ref(const BsInputs& in) {
    const auto d = d_ref(in);
    return in.spot * std::exp(-in.yield * in.expiry) * norm_cdf_ref(d.d1) -
           in.strike * std::exp(-in.rate * in.expiry) * norm_cdf_ref(d.d2);
}

long double bs_put_ref(const BsInputs& in) {
    const auto d = d_ref(in);
    return in.strike * std::exp(-in.rate * in.expiry) * norm_cdf_ref(-d.d2) -
           in.spot * std::exp(-in.yield * in.expiry) * norm_cdf_ref(-d.d1);
}

std::vector<double> direct_convolution(std::span<const double> weighted,
                                       std::span<const double> kernel) {
    const std::size_t full = weighted.size();
    const std::size_t n = (full + 1) / 2;
    std::vector<double> out(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        long double sum = 0.0L;
        for (std::size_t i = 0; i < full; ++i) {
            const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(j + n - 1) -
                                     static_cast<std::ptrdiff_t>(i);
            if (k < 0 || k >= static_cast<std::ptrdiff_t>(full)) continue;
            sum += static_cast<long double>(kernel[static_cast<std::size_t>(k)]) * weighted[i];
        }
        out[j] = static_cast<double>(sum);
    }
    return out;
}

}  // namespace oracles
