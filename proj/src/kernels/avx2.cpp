// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "hyperlens/kernels.hpp"

namespace hyperlens::kernels {
namespace {

inline double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Two complex values per __m256d, interleaved [re0, im0, re1, im1].
void complex_multiply(const Complex* a, const Complex* b, Complex* out, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  double* po = reinterpret_cast<double*>(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * i);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    const __m256d b_re = _mm256_movedup_pd(vb);
    const __m256d b_im = _mm256_permute_pd(vb, 0xF);
    const __m256d a_swap = _mm256_permute_pd(va, 0x5);
    const __m256d cross = _mm256_mul_pd(a_swap, b_im);
    _mm256_storeu_pd(po + 2 * i, _mm256_fmaddsub_pd(va, b_re, cross));
  }
  for (; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    out[i] = {ar * br - ai * bi, ar * bi + ai * br};
  }
}

void thresholded_inverse(const Complex* y, const Complex* h, Complex* out, std::size_t n,
                         double min_abs2) {
  const double* py = reinterpret_cast<const double*>(y);
  const double* ph = reinterpret_cast<const double*>(h);
  double* po = reinterpret_cast<double*>(out);
  const __m256d thr = _mm256_set1_pd(min_abs2);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vy = _mm256_loadu_pd(py + 2 * i);
    const __m256d vh = _mm256_loadu_pd(ph + 2 * i);
    const __m256d h2 = _mm256_mul_pd(vh, vh);
    const __m256d d = _mm256_hadd_pd(h2, h2);
    const __m256d h_re = _mm256_movedup_pd(vh);
    const __m256d h_im = _mm256_permute_pd(vh, 0xF);
    const __m256d y_swap = _mm256_permute_pd(vy, 0x5);
    const __m256d cross = _mm256_mul_pd(y_swap, h_im);
    // y * conj(h): even lanes yr*hr + yi*hi, odd lanes yi*hr - yr*hi
    const __m256d num = _mm256_fmsubadd_pd(vy, h_re, cross);
    const __m256d keep = _mm256_and_pd(_mm256_cmp_pd(d, thr, _CMP_GE_OQ),
                                       _mm256_cmp_pd(d, zero, _CMP_GT_OQ));
    _mm256_storeu_pd(po + 2 * i, _mm256_and_pd(keep, _mm256_div_pd(num, d)));
  }
  for (; i < n; ++i) {
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
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
  }
  double s = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double abs2_sum(const Complex* z, std::size_t n) {
  const double* p = reinterpret_cast<const double*>(z);
  const std::size_t m = 2 * n;
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= m; i += 8) {
    const __m256d v0 = _mm256_loadu_pd(p + i);
    const __m256d v1 = _mm256_loadu_pd(p + i + 4);
    acc0 = _mm256_fmadd_pd(v0, v0, acc0);
    acc1 = _mm256_fmadd_pd(v1, v1, acc1);
  }
  double s = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; i < m; ++i) s += p[i] * p[i];
  return s;
}

}  // namespace

namespace detail {
const KernelTable kAvx2Table{complex_multiply, thresholded_inverse, squared_diff_sum, abs2_sum};
}

}  // namespace hyperlens::kernels
