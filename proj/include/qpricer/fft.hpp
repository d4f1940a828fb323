#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qpricer::fft {

/// Smallest power of two >= minimum.
std::size_t transform_length(std::size_t minimum);

/// In-place radix-2 FFT. data.size() must be a power of two.
void forward(std::span<std::complex<double>> data);

/// In-place inverse FFT including the 1/n scaling.
void inverse(std::span<std::complex<double>> data);

}  // namespace qpricer::fft
