#include "hyperlens/kernels.hpp"

namespace hyperlens::kernels {
namespace {

void complex_multiply(const Complex* a, const Complex* b, Complex* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    out[i] = {ar * br - ai * bi, ar * bi + ai * br};
  }
}

void thresholded_inverse(const Complex* y, const Complex* h, Complex* out, std::size_t n,
                         double min_abs2) {
  for (std::size_t i = 0; i < n; ++i) {
    const double hr = h[i].real(), hi = h[i].imag();
    const double d = hr * hr + hi * hi;
    if (d >= min_abs2 && d > 0.0) {
      const double yr = y[i].real(), yi = y[i].imag();
      out[i] = {(yr * hr + yi * hi) / d, (yi * hr - yr * hi) / d};
    } else {
      out[i] = {0.0, 0.0};
    }
  }
}

double squared_diff_sum(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double abs2_sum(const Complex* z, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
  return s;
}

}  // namespace

namespace detail {
const KernelTable kScalarTable{complex_multiply, thresholded_inverse, squared_diff_sum, abs2_sum};
}

}  // namespace hyperlens::kernels
