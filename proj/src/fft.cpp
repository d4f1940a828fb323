#include "qpricer/fft.hpp"

#include <numbers>
#include <stdexcept>

namespace qpricer::fft {

namespace {

// Twiddle factors exp(-2*pi*i*k/n), k < n/2, computed directly rather than by
// repeated multiplication so long transforms keep O(log n * eps) accuracy.
std::vector<std::complex<double>> twiddles(std::size_t n) {
    std::vector<std::complex<double>> tw(n / 2);
    const double step = -2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double ang = step * static_cast<double>(k);
        tw[k] = {std::cos(ang), std::sin(ang)};
    }
    return tw;
}

void transform(std::span<std::complex<double>> a, bool invert) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) {
        throw std::invalid_argument("fft: length must be a power of two");
    }
    if (n == 1) return;

    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    static thread_local std::size_t cached_n = 0;
    static thread_local std::vector<std::complex<double>> tw;
    if (cached_n != n) {
        tw = twiddles(n);
        cached_n = n;
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t j = 0; j < len / 2; ++j) {
                std::complex<double> w = tw[j * stride];
                if (invert) w = std::conj(w);
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
            }
        }
    }

    if (invert) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= scale;
    }
}

}  // namespace

std::size_t transform_length(std::size_t minimum) {
    std::size_t n = 1;
    while (n < minimum) n <<= 1;
    return n;
}

void forward(std::span<std::complex<double>> data) { transform(data, false); }

void inverse(std::span<std::complex<double>> data) { transform(data, true); }

}  // namespace qpricer::fft
