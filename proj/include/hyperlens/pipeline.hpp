#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "hyperlens/grid.hpp"
#include "hyperlens/psf.hpp"

namespace hyperlens {

enum class SamplingMode {
  Point,  // pick the sample at offset (0,0) of each D x D block
  Area,   // mean over the D x D block (integrating power detector)
};

std::string_view to_string(SamplingMode mode) noexcept;
SamplingMode parse_sampling_mode(std::string_view name);

struct CaptureConfig {
  PsfSpec psf{};
  std::size_t decimation = 10;
  SamplingMode sampling = SamplingMode::Point;
  double noise_sigma = 0.0;  // std of additive Gaussian sensor noise
  std::uint64_t seed = 0;
};

struct ReconstructConfig {
  std::size_t upsample = 10;
  /// Bins with |H| < inverse_epsilon * max|H| are zeroed instead of divided.
  double inverse_epsilon = 1e-3;
  /// Divide by every non-zero bin regardless of magnitude. Noise is
  /// amplified without bound; only for experiments.
  bool unguarded = false;
};

/// Per-channel circular convolution of the scene with the kernel.
ImageGrid diffract(const ImageGrid& scene, const PsfSpec& psf);

/// NotDivisible unless both dimensions are multiples of d (InvalidArgument
/// for d == 0).
void check_decimation(const ImageGrid& img, std::size_t d);

/// Decimates by cfg.decimation (NotDivisible when the size is not a
/// multiple), then adds sensor noise seeded per channel from cfg.seed.
ImageGrid sense(const ImageGrid& img, const CaptureConfig& cfg);

/// Trigonometric interpolation by zero-padding the centred spectrum to
/// (factor*H, factor*W). Even-size Nyquist rows/columns are split
/// half-and-half so the result stays real; amplitudes are preserved.
ImageGrid interpolate_fft(const ImageGrid& img, std::size_t factor);

/// Thresholded inverse filter with the kernel synthesized on img's grid.
/// eps must lie in (0, 1] (EpsilonOutOfRange otherwise).
ImageGrid inverse_filter(const ImageGrid& img, const PsfSpec& psf, double eps);

/// Same, against an explicit forward response (e.g. kernel times box).
/// With `unguarded` the threshold is dropped and eps is ignored.
ImageGrid inverse_filter(const ImageGrid& img, const Otf& response, double eps,
                         bool unguarded = false);

/// Forward response the hyperacuity reconstruction inverts on a recovered
/// grid of recovered_h x recovered_w: the kernel rescaled by U/D, times the
/// block-average response in area mode.
Otf recovered_response(const CaptureConfig& cc, std::size_t upsample, std::size_t recovered_h,
                       std::size_t recovered_w);

/// diffract -> sense -> interpolate -> inverse filter.
ImageGrid run_hyperacuity(const ImageGrid& scene, const CaptureConfig& cc,
                          const ReconstructConfig& rc);

/// Diffraction-free reference: sense -> interpolate; cc.psf is ignored.
ImageGrid run_baseline(const ImageGrid& scene, const CaptureConfig& cc, std::size_t upsample);

}  // namespace hyperlens
