#pragma once

#include <limits>
#include <string>
#include <vector>

#include "hyperlens/grid.hpp"

namespace hyperlens {

/// PSNR of identical images. Reported as-is, never clamped to a finite
/// stand-in value.
inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

struct PsnrResult {
  std::vector<double> per_channel;  // dB
  double pooled = 0.0;              // dB, from the channel-pooled MSE
  double pooled_mse = 0.0;
};

struct MetricsReport {
  std::vector<double> mse;   // per channel
  std::vector<double> psnr;  // per channel, dB
  double pooled_psnr = 0.0;
  double pooled_mse = 0.0;
  double peak = 1.0;
  std::vector<std::string> notes;
};

/// Mean squared sample difference per channel (DimensionMismatch when the
/// shapes differ).
std::vector<double> mse(const ImageGrid& a, const ImageGrid& b);

/// 10*log10(peak^2 / MSE); kInfinitePsnr when the MSE is zero.
double psnr_from_mse(double mse, double peak = 1.0);

PsnrResult psnr(const ImageGrid& a, const ImageGrid& b, double peak = 1.0);

/// Fraction of spectral energy inside the centred rectangle whose
/// half-widths are band*H/2 and band*W/2 bins. band must be in (0, 1]
/// (BandOutOfRange otherwise). Energy is pooled over channels.
double band_energy_fraction(const ImageGrid& img, double band);

/// Copy with every sample clamped to [0, 1].
ImageGrid clipped(const ImageGrid& img);

MetricsReport make_report(const ImageGrid& reference, const ImageGrid& candidate,
                          double peak = 1.0);

}  // namespace hyperlens
