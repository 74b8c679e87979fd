#include "hyperlens/psf.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hyperlens/error.hpp"

namespace hyperlens {
namespace {

constexpr double kSeriesLimit = 8.0;

double j1_series(double x) {
  const double half = 0.5 * x;
  const double q = half * half;
  double term = half;
  double sum = term;
  for (int k = 1; k < 80; ++k) {
    term *= -q / (static_cast<double>(k) * static_cast<double>(k + 1));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// Hankel expansion J1(x) ~ sqrt(2/(pi x)) (P cos(chi) - Q sin(chi)),
// chi = x - 3pi/4, summed up to the smallest term.
double j1_asymptotic(double x) {
  constexpr double mu = 4.0;  // 4 * nu^2 with nu = 1
  double p = 1.0, q = 0.0;
  double term = 1.0;
  double previous = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 64; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (static_cast<double>(k) * 8.0 * x);
    const double mag = std::abs(term);
    if (mag >= previous || mag < 1e-18) break;
    previous = mag;
    // a_k / x^k enters P for even k and Q for odd k with alternating signs.
    const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      p += sign * term;
    } else {
      q += sign * term;
    }
  }
  const double chi = x - 0.75 * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

std::size_t wrap(long offset, std::size_t n) {
  const long m = static_cast<long>(n);
  return static_cast<std::size_t>(((offset % m) + m) % m);
}

}  // namespace

std::string_view to_string(PsfKind kind) noexcept {
  switch (kind) {
    case PsfKind::Airy: return "airy";
    case PsfKind::Gaussian: return "gaussian";
    case PsfKind::Delta: return "delta";
  }
  return "unknown";
}

PsfKind parse_psf_kind(std::string_view name) {
  if (name == "airy") return PsfKind::Airy;
  if (name == "gaussian") return PsfKind::Gaussian;
  if (name == "delta") return PsfKind::Delta;
  throw Error(ErrorCode::ParseError, "unknown psf kind '" + std::string(name) + "'");
}

PsfSpec PsfSpec::airy(double radius) { return airy(radius, 2.0 * radius); }
PsfSpec PsfSpec::airy(double radius, double support) {
  PsfSpec s{PsfKind::Airy, radius, support};
  s.validate();
  return s;
}
PsfSpec PsfSpec::gaussian(double sigma) { return gaussian(sigma, 8.0 * sigma); }
PsfSpec PsfSpec::gaussian(double sigma, double support) {
  PsfSpec s{PsfKind::Gaussian, sigma, support};
  s.validate();
  return s;
}
PsfSpec PsfSpec::delta() { return PsfSpec{PsfKind::Delta, 0.0, 0.0}; }

PsfSpec PsfSpec::rescaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw Error(ErrorCode::InvalidParams, "rescale factor must be positive");
  }
  if (kind == PsfKind::Delta) return *this;
  return PsfSpec{kind, radius * factor, support * factor};
}

void PsfSpec::validate() const {
  if (kind == PsfKind::Delta) return;
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::InvalidParams, "psf radius must be positive and finite");
  }
  if (!(support >= 0.0) || !std::isfinite(support)) {
    throw Error(ErrorCode::InvalidParams, "psf support must be non-negative and finite");
  }
  // The airy truncation must keep at least the central lobe and first ring.
  if (kind == PsfKind::Airy && support < 2.0 * radius) {
    throw Error(ErrorCode::InvalidParams, "airy support " + std::to_string(support) +
                                              " is below 2*radius = " +
                                              std::to_string(2.0 * radius));
  }
}

double bessel_j1(double x) {
  if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "bessel_j1 needs a finite x");
  const double ax = std::abs(x);
  const double v = ax <= kSeriesLimit ? j1_series(ax) : j1_asymptotic(ax);
  return x < 0.0 ? -v : v;
}

double psf_profile(const PsfSpec& spec, double r) {
  switch (spec.kind) {
    case PsfKind::Delta:
      return r == 0.0 ? 1.0 : 0.0;
    case PsfKind::Gaussian:
      return std::exp(-0.5 * (r * r) / (spec.radius * spec.radius));
    case PsfKind::Airy: {
      const double v = kAiryFirstZero * r / spec.radius;
      if (v < 1e-8) return 1.0;
      const double a = 2.0 * bessel_j1(v) / v;
      return a * a;
    }
  }
  return 0.0;
}

ImageGrid make_psf(const PsfSpec& spec, std::size_t grid_h, std::size_t grid_w) {
  spec.validate();
  ImageGrid kernel(1, grid_h, grid_w);
  if (spec.kind == PsfKind::Delta) {
    kernel.at(0, 0, 0) = 1.0;
    return kernel;
  }
  const long reach = static_cast<long>(std::floor(spec.support));
  const auto need = static_cast<std::size_t>(2 * reach + 1);
  if (grid_h < need || grid_w < need) {
    throw Error(ErrorCode::SupportTooLarge,
                "support half-width " + std::to_string(reach) + " needs a grid of at least " +
                    std::to_string(need) + "x" + std::to_string(need) + ", got " +
                    std::to_string(grid_h) + "x" + std::to_string(grid_w));
  }
  const double limit2 = spec.support * spec.support;
  double total = 0.0;
  for (long dy = -reach; dy <= reach; ++dy) {
    for (long dx = -reach; dx <= reach; ++dx) {
      const double r2 = static_cast<double>(dy * dy + dx * dx);
      if (r2 > limit2) continue;
      const double v = psf_profile(spec, std::sqrt(r2));
      kernel.at(0, wrap(dy, grid_h), wrap(dx, grid_w)) = v;
      total += v;
    }
  }
  for (double& v : kernel.samples()) v /= total;
  return kernel;
}

Otf make_otf(const PsfSpec& spec, std::size_t grid_h, std::size_t grid_w) {
  Otf otf{dft2(make_psf(spec, grid_h, grid_w))};
  make_hermitian(otf.response);
  // The DC bin is the kernel sum, which is one by construction.
  otf.response.at(0, 0, 0) = Complex(1.0, 0.0);
  return otf;
}

Otf make_box_otf(std::size_t width, std::size_t grid_h, std::size_t grid_w) {
  if (width == 0 || width > grid_h || width > grid_w) {
    throw Error(ErrorCode::SupportTooLarge,
                "box width " + std::to_string(width) + " does not fit the grid");
  }
  ImageGrid kernel(1, grid_h, grid_w);
  const double v = 1.0 / static_cast<double>(width * width);
  for (std::size_t i = 0; i < width; ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      kernel.at(0, wrap(-static_cast<long>(i), grid_h), wrap(-static_cast<long>(j), grid_w)) = v;
    }
  }
  Otf otf{dft2(kernel)};
  make_hermitian(otf.response);
  otf.response.at(0, 0, 0) = Complex(1.0, 0.0);
  return otf;
}

double rayleigh_pitch(const PsfSpec& spec) {
  if (spec.kind != PsfKind::Airy) {
    throw Error(ErrorCode::NotApplicable,
                "rayleigh pitch is defined for airy kernels only, got " +
                    std::string(to_string(spec.kind)));
  }
  spec.validate();
  return spec.radius;
}

}  // namespace hyperlens
