#pragma once

#include <cstddef>
#include <string_view>

#include "hyperlens/grid.hpp"

namespace hyperlens {

enum class PsfKind { Airy, Gaussian, Delta };

std::string_view to_string(PsfKind kind) noexcept;
PsfKind parse_psf_kind(std::string_view name);

/// First positive zero of J1; the Airy pattern's first dark ring sits at
/// v = kAiryFirstZero.
inline constexpr double kAiryFirstZero = 3.8317059702075123;

/// Blur kernel description in high-resolution pixels.
///  - airy: `radius` is the radius of the first intensity zero.
///  - gaussian: `radius` is the standard deviation.
///  - delta: radius and support are ignored.
/// `support` is the truncation half-width: samples farther than `support`
/// from the centre are zero.
struct PsfSpec {
  PsfKind kind = PsfKind::Airy;
  double radius = 35.0;
  double support = 70.0;

  static PsfSpec airy(double radius);  // support = 2 * radius
  static PsfSpec airy(double radius, double support);
  static PsfSpec gaussian(double sigma);  // support = 8 * sigma
  static PsfSpec gaussian(double sigma, double support);
  static PsfSpec delta();

  /// Same physical kernel expressed on a grid whose pixels are 1/factor as
  /// large (factor > 1 means finer pixels).
  PsfSpec rescaled(double factor) const;

  /// Throws InvalidParams when the invariants are broken.
  void validate() const;

  friend bool operator==(const PsfSpec&, const PsfSpec&) = default;
};

/// First-kind Bessel function of order one. Power series for |x| <= 8,
/// Hankel asymptotic expansion beyond.
double bessel_j1(double x);

/// Unnormalized profile value at distance r from the centre (peak 1 for
/// airy and gaussian, 1 at r == 0 and 0 elsewhere for delta).
double psf_profile(const PsfSpec& spec, double r);

/// Unit-sum kernel on a grid_h x grid_w grid, centred at [0][0] with
/// wrap-around layout. Requires both dimensions >= 2*support + 1
/// (SupportTooLarge otherwise).
ImageGrid make_psf(const PsfSpec& spec, std::size_t grid_h, std::size_t grid_w);

/// Optical transfer function: the single-channel DFT of make_psf.
struct Otf {
  Spectrum response;
};

/// DFT of make_psf, projected onto its Hermitian part so that |H| is exactly
/// symmetric under index negation.
Otf make_otf(const PsfSpec& spec, std::size_t grid_h, std::size_t grid_w);

/// Transfer function of a width x width block average whose output at p is
/// the mean of x[p .. p+width-1] in both axes.
Otf make_box_otf(std::size_t width, std::size_t grid_h, std::size_t grid_w);

/// Rayleigh two-point separation on the high-resolution grid. Airy only
/// (NotApplicable otherwise).
double rayleigh_pitch(const PsfSpec& spec);

}  // namespace hyperlens
