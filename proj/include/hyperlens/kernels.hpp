#pragma once

// Data-parallel inner loops used by the spectral pipeline. Each kernel has a
// scalar reference implementation and an AVX2+FMA variant; the variant is
// picked once at runtime from CPU features and can be pinned with
// HYPERLENS_SIMD=scalar|avx2 or force_backend().

#include <complex>
#include <cstddef>
#include <optional>
#include <string_view>

namespace hyperlens::kernels {

using Complex = std::complex<double>;

enum class Backend { Scalar, Avx2 };

struct KernelTable {
  // out[i] = a[i] * b[i]
  void (*complex_multiply)(const Complex* a, const Complex* b, Complex* out, std::size_t n);
  // out[i] = |h[i]|^2 >= min_abs2 ? y[i] / h[i] : 0, with y/h evaluated as
  // y * conj(h) / |h|^2. Bins with h == 0 always map to 0.
  void (*thresholded_inverse)(const Complex* y, const Complex* h, Complex* out, std::size_t n,
                              double min_abs2);
  // sum (a[i] - b[i])^2
  double (*squared_diff_sum)(const double* a, const double* b, std::size_t n);
  // sum |z[i]|^2
  double (*abs2_sum)(const Complex* z, std::size_t n);
};

std::string_view to_string(Backend b) noexcept;
std::optional<Backend> parse_backend(std::string_view name) noexcept;

bool backend_available(Backend b) noexcept;

/// Table for a specific backend. Requesting an unavailable backend falls back
/// to the scalar table.
const KernelTable& table(Backend b) noexcept;

Backend active_backend() noexcept;
const KernelTable& active() noexcept;

/// Pins the backend for the whole process; std::nullopt restores automatic
/// selection. Intended for tests and benchmarking.
void force_backend(std::optional<Backend> b) noexcept;

namespace detail {
extern const KernelTable kScalarTable;
#if defined(HYPERLENS_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
}  // namespace detail

}  // namespace hyperlens::kernels
