#pragma once

// Thin wrapper over FFTW's complex 2-D transforms. Plans are created with
// FFTW_ESTIMATE (deterministic, no timing measurements) and cached per
// (height, width, direction); execution is thread-safe.

#include <complex>
#include <cstddef>

namespace hyperlens::fft {

enum class Direction { Forward, Inverse };

/// Unnormalized out-of-place transform of a height x width row-major plane.
/// `in` and `out` must not alias.
void transform_2d(const std::complex<double>* in, std::complex<double>* out, std::size_t height,
                  std::size_t width, Direction dir);

}  // namespace hyperlens::fft
