#include "hyperlens/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "hyperlens/error.hpp"
#include "hyperlens/kernels.hpp"

namespace hyperlens {
namespace {

// Signed frequency index of bin k on an n-point axis.
long signed_bin(std::size_t k, std::size_t n) {
  return 2 * k <= n ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

}  // namespace

std::vector<double> mse(const ImageGrid& a, const ImageGrid& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::DimensionMismatch, "mse needs images of identical shape");
  }
  const auto& k = kernels::active();
  std::vector<double> out(a.channels());
  for (std::size_t c = 0; c < a.channels(); ++c) {
    out[c] = k.squared_diff_sum(a.plane(c).data(), b.plane(c).data(), a.plane_size()) /
             static_cast<double>(a.plane_size());
  }
  return out;
}

double psnr_from_mse(double mse_value, double peak) {
  if (!(peak > 0.0)) throw Error(ErrorCode::InvalidArgument, "psnr peak must be positive");
  if (mse_value == 0.0) return kInfinitePsnr;
  return 10.0 * std::log10(peak * peak / mse_value);
}

PsnrResult psnr(const ImageGrid& a, const ImageGrid& b, double peak) {
  const std::vector<double> per = mse(a, b);
  PsnrResult out;
  double pooled = 0.0;
  for (double m : per) {
    out.per_channel.push_back(psnr_from_mse(m, peak));
    pooled += m;
  }
  out.pooled_mse = pooled / static_cast<double>(per.size());
  out.pooled = psnr_from_mse(out.pooled_mse, peak);
  return out;
}

double band_energy_fraction(const ImageGrid& img, double band) {
  if (!(band > 0.0 && band <= 1.0)) {
    throw Error(ErrorCode::BandOutOfRange, "band must be in (0, 1], got " + std::to_string(band));
  }
  const Spectrum spec = dft2(img);
  const std::size_t h = img.height(), w = img.width();
  const double half_h = band * static_cast<double>(h) / 2.0;
  const double half_w = band * static_cast<double>(w) / 2.0;
  const auto& k = kernels::active();
  double inside = 0.0, total = 0.0;
  for (std::size_t c = 0; c < img.channels(); ++c) {
    total += k.abs2_sum(spec.plane(c).data(), spec.plane_size());
    for (std::size_t r = 0; r < h; ++r) {
      if (static_cast<double>(std::labs(signed_bin(r, h))) > half_h) continue;
      for (std::size_t col = 0; col < w; ++col) {
        if (static_cast<double>(std::labs(signed_bin(col, w))) > half_w) continue;
        inside += std::norm(spec.at(c, r, col));
      }
    }
  }
  if (band == 1.0 || total == 0.0) return 1.0;
  return std::clamp(inside / total, 0.0, 1.0);
}

ImageGrid clipped(const ImageGrid& img) {
  ImageGrid out = img;
  for (double& v : out.samples()) v = std::clamp(v, 0.0, 1.0);
  return out;
}

MetricsReport make_report(const ImageGrid& reference, const ImageGrid& candidate, double peak) {
  MetricsReport report;
  report.peak = peak;
  report.mse = mse(reference, candidate);
  const PsnrResult p = psnr(reference, candidate, peak);
  report.psnr = p.per_channel;
  report.pooled_psnr = p.pooled;
  report.pooled_mse = p.pooled_mse;
  return report;
}

}  // namespace hyperlens
