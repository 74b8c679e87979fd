#include "hyperlens/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fft.hpp"
#include "hyperlens/error.hpp"
#include "hyperlens/kernels.hpp"

namespace hyperlens {
namespace {

void check_shape(std::size_t channels, std::size_t height, std::size_t width) {
  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::InvalidArgument,
                "channel count must be 1 or 3, got " + std::to_string(channels));
  }
  if (height == 0 || width == 0) {
    throw Error(ErrorCode::InvalidArgument, "grid dimensions must be at least 1x1");
  }
}

std::size_t mirror(std::size_t k, std::size_t n) { return k == 0 ? 0 : n - k; }

}  // namespace

ImageGrid::ImageGrid(std::size_t channels, std::size_t height, std::size_t width, double fill)
    : channels_(channels), height_(height), width_(width) {
  check_shape(channels, height, width);
  samples_.assign(channels * height * width, fill);
}

ImageGrid::ImageGrid(std::size_t channels, std::size_t height, std::size_t width,
                     std::vector<double> samples)
    : channels_(channels), height_(height), width_(width), samples_(std::move(samples)) {
  check_shape(channels, height, width);
  if (samples_.size() != channels * height * width) {
    throw Error(ErrorCode::DimensionMismatch,
                "sample count " + std::to_string(samples_.size()) + " does not match " +
                    std::to_string(channels) + "x" + std::to_string(height) + "x" +
                    std::to_string(width));
  }
  if (!all_finite()) throw Error(ErrorCode::InvalidArgument, "samples must be finite");
}

bool ImageGrid::all_finite() const noexcept {
  return std::all_of(samples_.begin(), samples_.end(), [](double v) { return std::isfinite(v); });
}

double ImageGrid::channel_mean(std::size_t c) const noexcept {
  double s = 0.0;
  for (double v : plane(c)) s += v;
  return s / static_cast<double>(plane_size());
}

Spectrum::Spectrum(std::size_t channels, std::size_t height, std::size_t width, Complex fill)
    : channels_(channels), height_(height), width_(width) {
  check_shape(channels, height, width);
  bins_.assign(channels * height * width, fill);
}

Spectrum dft2(const ImageGrid& img) {
  Spectrum out(img.channels(), img.height(), img.width());
  std::vector<Complex> staging(img.plane_size());
  for (std::size_t c = 0; c < img.channels(); ++c) {
    const auto src = img.plane(c);
    std::transform(src.begin(), src.end(), staging.begin(), [](double v) { return Complex(v, 0.0); });
    fft::transform_2d(staging.data(), out.plane(c).data(), img.height(), img.width(),
                      fft::Direction::Forward);
  }
  return out;
}

double hermitian_defect(const Spectrum& spec, std::size_t channel) {
  const std::size_t h = spec.height(), w = spec.width();
  double worst = 0.0, scale = 0.0;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const Complex x = spec.at(channel, r, c);
      const Complex partner = std::conj(spec.at(channel, mirror(r, h), mirror(c, w)));
      worst = std::max(worst, std::abs(x - partner));
      scale = std::max(scale, std::abs(x));
    }
  }
  return scale == 0.0 ? 0.0 : worst / scale;
}

void make_hermitian(Spectrum& spec) {
  const std::size_t h = spec.height(), w = spec.width();
  for (std::size_t ch = 0; ch < spec.channels(); ++ch) {
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        const std::size_t mr = mirror(r, h), mc = mirror(c, w);
        // Visit each conjugate pair once; self-paired bins become real.
        if (mr * w + mc < r * w + c) continue;
        const Complex a = spec.at(ch, r, c);
        const Complex b = spec.at(ch, mr, mc);
        const Complex sym = 0.5 * (a + std::conj(b));
        spec.at(ch, r, c) = sym;
        spec.at(ch, mr, mc) = std::conj(sym);
      }
    }
  }
}

ImageGrid idft2(const Spectrum& spec) {
  for (std::size_t c = 0; c < spec.channels(); ++c) {
    const double defect = hermitian_defect(spec, c);
    if (!(defect <= kHermitianTolerance)) {
      throw Error(ErrorCode::NonHermitianSpectrum,
                  "channel " + std::to_string(c) + " has relative conjugate-symmetry defect " +
                      std::to_string(defect));
    }
  }
  ImageGrid out(spec.channels(), spec.height(), spec.width());
  std::vector<Complex> staging(spec.plane_size());
  const double scale = 1.0 / static_cast<double>(spec.plane_size());
  for (std::size_t c = 0; c < spec.channels(); ++c) {
    fft::transform_2d(spec.plane(c).data(), staging.data(), spec.height(), spec.width(),
                      fft::Direction::Inverse);
    auto dst = out.plane(c);
    std::transform(staging.begin(), staging.end(), dst.begin(),
                   [scale](const Complex& z) { return z.real() * scale; });
  }
  if (!out.all_finite()) {
    throw Error(ErrorCode::InvalidArgument, "inverse transform produced non-finite samples");
  }
  return out;
}

Spectrum multiply_spectra(const Spectrum& a, const Spectrum& b) {
  const bool broadcast = b.channels() == 1 && a.channels() != 1;
  if (a.height() != b.height() || a.width() != b.width() ||
      (!broadcast && a.channels() != b.channels())) {
    throw Error(ErrorCode::DimensionMismatch,
                "cannot multiply " + std::to_string(a.channels()) + "x" +
                    std::to_string(a.height()) + "x" + std::to_string(a.width()) + " by " +
                    std::to_string(b.channels()) + "x" + std::to_string(b.height()) + "x" +
                    std::to_string(b.width()));
  }
  Spectrum out(a.channels(), a.height(), a.width());
  const auto& k = kernels::active();
  for (std::size_t c = 0; c < a.channels(); ++c) {
    const auto pb = b.plane(broadcast ? 0 : c);
    k.complex_multiply(a.plane(c).data(), pb.data(), out.plane(c).data(), a.plane_size());
  }
  return out;
}

}  // namespace hyperlens
