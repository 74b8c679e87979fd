#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace hyperlens {

using Complex = std::complex<double>;

/// Planar raster: samples are stored channel-major, then row-major
/// ([channel][row][col]). Channels are either 1 (gray) or 3 (RGB).
/// Values are nominally in [0,1] but may leave that range mid-pipeline.
class ImageGrid {
 public:
  ImageGrid(std::size_t channels, std::size_t height, std::size_t width, double fill = 0.0);
  ImageGrid(std::size_t channels, std::size_t height, std::size_t width, std::vector<double> samples);

  std::size_t channels() const noexcept { return channels_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t plane_size() const noexcept { return height_ * width_; }

  double& at(std::size_t c, std::size_t r, std::size_t col) noexcept {
    return samples_[(c * height_ + r) * width_ + col];
  }
  double at(std::size_t c, std::size_t r, std::size_t col) const noexcept {
    return samples_[(c * height_ + r) * width_ + col];
  }

  std::span<double> plane(std::size_t c) noexcept {
    return {samples_.data() + c * plane_size(), plane_size()};
  }
  std::span<const double> plane(std::size_t c) const noexcept {
    return {samples_.data() + c * plane_size(), plane_size()};
  }

  std::span<const double> samples() const noexcept { return samples_; }
  std::span<double> samples() noexcept { return samples_; }

  bool same_shape(const ImageGrid& other) const noexcept {
    return channels_ == other.channels_ && height_ == other.height_ && width_ == other.width_;
  }
  bool all_finite() const noexcept;
  double channel_mean(std::size_t c) const noexcept;

  friend bool operator==(const ImageGrid&, const ImageGrid&) = default;

 private:
  std::size_t channels_;
  std::size_t height_;
  std::size_t width_;
  std::vector<double> samples_;
};

/// Complex bins in standard DFT ordering (DC at [0][0]) with the same
/// planar layout as ImageGrid.
class Spectrum {
 public:
  Spectrum(std::size_t channels, std::size_t height, std::size_t width, Complex fill = {});

  std::size_t channels() const noexcept { return channels_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t plane_size() const noexcept { return height_ * width_; }

  Complex& at(std::size_t c, std::size_t r, std::size_t col) noexcept {
    return bins_[(c * height_ + r) * width_ + col];
  }
  Complex at(std::size_t c, std::size_t r, std::size_t col) const noexcept {
    return bins_[(c * height_ + r) * width_ + col];
  }

  std::span<Complex> plane(std::size_t c) noexcept {
    return {bins_.data() + c * plane_size(), plane_size()};
  }
  std::span<const Complex> plane(std::size_t c) const noexcept {
    return {bins_.data() + c * plane_size(), plane_size()};
  }

  std::span<const Complex> bins() const noexcept { return bins_; }
  std::span<Complex> bins() noexcept { return bins_; }

 private:
  std::size_t channels_;
  std::size_t height_;
  std::size_t width_;
  std::vector<Complex> bins_;
};

/// Unnormalized forward 2-D DFT of every channel. Any size is accepted.
Spectrum dft2(const ImageGrid& img);

/// Inverse 2-D DFT scaled by 1/(H*W). The spectrum must be Hermitian per
/// channel to relative tolerance 1e-8 (NonHermitianSpectrum otherwise); the
/// imaginary residue is then dropped.
ImageGrid idft2(const Spectrum& spec);

/// Element-wise product. `b` may carry a single channel that is broadcast
/// across every channel of `a`.
Spectrum multiply_spectra(const Spectrum& a, const Spectrum& b);

/// max_k |X[k] - conj(X[-k])| / max_k |X[k]| for one channel, 0 for an
/// all-zero plane.
double hermitian_defect(const Spectrum& spec, std::size_t channel);

/// Replaces every channel by its Hermitian part (X[k] + conj(X[-k])) / 2.
void make_hermitian(Spectrum& spec);

inline constexpr double kHermitianTolerance = 1e-8;

}  // namespace hyperlens
