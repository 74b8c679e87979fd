#include "hyperlens/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hyperlens/error.hpp"
#include "hyperlens/kernels.hpp"
#include "hyperlens/random.hpp"

namespace hyperlens {
namespace {

struct PadTarget {
  std::size_t index;
  double weight;
};

// Where source bin k of an n-point spectrum lands in an (factor*n)-point
// spectrum. Negative frequencies move to the top of the longer axis; an
// even-size Nyquist bin is shared equally between +n/2 and -n/2.
std::vector<std::vector<PadTarget>> pad_map(std::size_t n, std::size_t factor) {
  const std::size_t big = n * factor;
  std::vector<std::vector<PadTarget>> map(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (n % 2 == 0 && k == n / 2) {
      if (factor == 1) {
        map[k] = {{k, 1.0}};
      } else {
        map[k] = {{n / 2, 0.5}, {big - n / 2, 0.5}};
      }
    } else if (2 * k < n) {
      map[k] = {{k, 1.0}};
    } else {
      map[k] = {{k + big - n, 1.0}};
    }
  }
  return map;
}

}  // namespace

std::string_view to_string(SamplingMode mode) noexcept {
  return mode == SamplingMode::Point ? "point" : "area";
}

SamplingMode parse_sampling_mode(std::string_view name) {
  if (name == "point") return SamplingMode::Point;
  if (name == "area") return SamplingMode::Area;
  throw Error(ErrorCode::ParseError, "unknown sampling mode '" + std::string(name) + "'");
}

ImageGrid diffract(const ImageGrid& scene, const PsfSpec& psf) {
  if (psf.kind == PsfKind::Delta) return scene;
  const Otf otf = make_otf(psf, scene.height(), scene.width());
  return idft2(multiply_spectra(dft2(scene), otf.response));
}

void check_decimation(const ImageGrid& img, std::size_t d) {
  if (d == 0) throw Error(ErrorCode::InvalidArgument, "decimation must be at least 1");
  if (img.height() % d != 0 || img.width() % d != 0) {
    throw Error(ErrorCode::NotDivisible,
                std::to_string(img.height()) + "x" + std::to_string(img.width()) +
                    " is not divisible by decimation " + std::to_string(d));
  }
}

ImageGrid sense(const ImageGrid& img, const CaptureConfig& cfg) {
  const std::size_t d = cfg.decimation;
  check_decimation(img, d);
  if (!(cfg.noise_sigma >= 0.0) || !std::isfinite(cfg.noise_sigma)) {
    throw Error(ErrorCode::InvalidArgument, "noise sigma must be a finite non-negative value");
  }
  const std::size_t oh = img.height() / d, ow = img.width() / d;
  ImageGrid out(img.channels(), oh, ow);
  const double inv_block = 1.0 / static_cast<double>(d * d);
  for (std::size_t c = 0; c < img.channels(); ++c) {
    for (std::size_t r = 0; r < oh; ++r) {
      for (std::size_t col = 0; col < ow; ++col) {
        if (cfg.sampling == SamplingMode::Point) {
          out.at(c, r, col) = img.at(c, r * d, col * d);
          continue;
        }
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          for (std::size_t j = 0; j < d; ++j) s += img.at(c, r * d + i, col * d + j);
        }
        out.at(c, r, col) = s * inv_block;
      }
    }
    if (cfg.noise_sigma > 0.0) {
      RandomStream noise(mix_seed(cfg.seed, c));
      for (double& v : out.plane(c)) v += cfg.noise_sigma * noise.normal();
    }
  }
  return out;
}

ImageGrid interpolate_fft(const ImageGrid& img, std::size_t factor) {
  if (factor == 0) throw Error(ErrorCode::InvalidArgument, "interpolation factor must be >= 1");
  if (factor == 1) return img;
  const Spectrum spec = dft2(img);
  const std::size_t h = img.height(), w = img.width();
  const auto rows = pad_map(h, factor);
  const auto cols = pad_map(w, factor);
  Spectrum padded(img.channels(), h * factor, w * factor);
  const double gain = static_cast<double>(factor * factor);
  for (std::size_t c = 0; c < img.channels(); ++c) {
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t col = 0; col < w; ++col) {
        const Complex v = spec.at(c, r, col) * gain;
        for (const auto& rt : rows[r]) {
          for (const auto& ct : cols[col]) {
            padded.at(c, rt.index, ct.index) += v * (rt.weight * ct.weight);
          }
        }
      }
    }
  }
  return idft2(padded);
}

ImageGrid inverse_filter(const ImageGrid& img, const Otf& response, double eps, bool unguarded) {
  const Spectrum& h = response.response;
  if (h.channels() != 1 || h.height() != img.height() || h.width() != img.width()) {
    throw Error(ErrorCode::DimensionMismatch, "inverse filter response does not match the image grid");
  }
  double min_abs2 = std::numeric_limits<double>::min();
  if (!unguarded) {
    if (!(eps > 0.0 && eps <= 1.0)) {
      throw Error(ErrorCode::EpsilonOutOfRange,
                  "inverse epsilon must be in (0, 1], got " + std::to_string(eps));
    }
    double peak2 = 0.0;
    for (const Complex& z : h.plane(0)) peak2 = std::max(peak2, std::norm(z));
    min_abs2 = eps * eps * peak2;
  }
  const auto hp = h.plane(0);
  if (std::all_of(hp.begin(), hp.end(), [](const Complex& z) { return z == Complex(1.0, 0.0); })) {
    return img;  // H == 1: dividing is the identity
  }
  Spectrum y = dft2(img);
  Spectrum x(img.channels(), img.height(), img.width());
  const auto& k = kernels::active();
  for (std::size_t c = 0; c < img.channels(); ++c) {
    k.thresholded_inverse(y.plane(c).data(), h.plane(0).data(), x.plane(c).data(),
                          img.plane_size(), min_abs2);
  }
  return idft2(x);
}

ImageGrid inverse_filter(const ImageGrid& img, const PsfSpec& psf, double eps) {
  return inverse_filter(img, make_otf(psf, img.height(), img.width()), eps);
}

Otf recovered_response(const CaptureConfig& cc, std::size_t upsample, std::size_t recovered_h,
                       std::size_t recovered_w) {
  if (cc.decimation == 0 || upsample == 0) {
    throw Error(ErrorCode::InvalidArgument, "decimation and upsample must be at least 1");
  }
  const double scale = static_cast<double>(upsample) / static_cast<double>(cc.decimation);
  Otf total = make_otf(cc.psf.rescaled(scale), recovered_h, recovered_w);
  if (cc.sampling == SamplingMode::Area && upsample > 1) {
    // A D x D high-res block spans exactly U recovered pixels.
    const Otf box = make_box_otf(upsample, recovered_h, recovered_w);
    total.response = multiply_spectra(total.response, box.response);
  }
  return total;
}

ImageGrid run_hyperacuity(const ImageGrid& scene, const CaptureConfig& cc,
                          const ReconstructConfig& rc) {
  check_decimation(scene, cc.decimation);
  const ImageGrid captured = sense(diffract(scene, cc.psf), cc);
  const ImageGrid upsampled = interpolate_fft(captured, rc.upsample);
  const Otf response =
      recovered_response(cc, rc.upsample, upsampled.height(), upsampled.width());
  return inverse_filter(upsampled, response, rc.inverse_epsilon, rc.unguarded);
}

ImageGrid run_baseline(const ImageGrid& scene, const CaptureConfig& cc, std::size_t upsample) {
  return interpolate_fft(sense(scene, cc), upsample);
}

}  // namespace hyperlens
