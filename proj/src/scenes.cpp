#include "hyperlens/scenes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <string>

#include "hyperlens/error.hpp"
#include "hyperlens/random.hpp"

namespace hyperlens {
namespace {

constexpr std::size_t kMinSide = 64;
constexpr int kCoverageSamples = 16;
constexpr double kEdgesBackground = 0.15;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

class KeyValues {
 public:
  void add(std::string key, std::string value, std::string token) {
    if (values_.count(key) != 0) {
      throw Error(ErrorCode::ParseError, "duplicate key in token '" + token + "'");
    }
    values_[key] = {std::move(value), std::move(token)};
  }

  double number(const std::string& key, double fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    used_.push_back(key);
    const std::string& v = it->second.first;
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
      throw Error(ErrorCode::ParseError, "bad number in token '" + it->second.second + "'");
    }
    return out;
  }

  long integer(const std::string& key, long fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    used_.push_back(key);
    const std::string& v = it->second.first;
    long out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      throw Error(ErrorCode::ParseError, "bad integer in token '" + it->second.second + "'");
    }
    return out;
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    const long v = integer(key, static_cast<long>(fallback));
    if (v < 0) {
      throw Error(ErrorCode::InvalidParams, key + " must be non-negative");
    }
    return static_cast<std::size_t>(v);
  }

  std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    used_.push_back(key);
    const std::string& v = it->second.first;
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      throw Error(ErrorCode::ParseError, "bad integer in token '" + it->second.second + "'");
    }
    return out;
  }

  void reject_unused(std::string_view kind) const {
    for (const auto& [key, entry] : values_) {
      if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
        throw Error(ErrorCode::ParseError, "unknown key for " + std::string(kind) + " in token '" +
                                               entry.second + "'");
      }
    }
  }

 private:
  std::map<std::string, std::pair<std::string, std::string>> values_;
  std::vector<std::string> used_;
};

// Fraction of pixel (r, c) inside `inside(y, x)`, by 16x16 supersampling.
template <class Pred>
double coverage(std::size_t r, std::size_t c, Pred inside) {
  int hits = 0;
  for (int i = 0; i < kCoverageSamples; ++i) {
    const double y = static_cast<double>(r) + (i + 0.5) / kCoverageSamples;
    for (int j = 0; j < kCoverageSamples; ++j) {
      const double x = static_cast<double>(c) + (j + 0.5) / kCoverageSamples;
      if (inside(y, x)) ++hits;
    }
  }
  return static_cast<double>(hits) / (kCoverageSamples * kCoverageSamples);
}

void render_grid_lines(ImageGrid& img, const GridLinesParams& p) {
  auto on_line = [&](std::size_t i) {
    const std::size_t shifted = (i + p.pitch - p.phase % p.pitch) % p.pitch;
    return shifted < p.line_width;
  };
  for (std::size_t r = 0; r < img.height(); ++r) {
    for (std::size_t c = 0; c < img.width(); ++c) {
      if (on_line(r) || on_line(c)) img.at(0, r, c) = kSceneInk;
    }
  }
}

void render_circle(ImageGrid& img, const CircleParams& p) {
  const double half = 0.5 * p.stroke;
  auto ring = [&](double y, double x) {
    return std::abs(std::hypot(y - p.center_row, x - p.center_col) - p.radius) <= half;
  };
  for (std::size_t r = 0; r < img.height(); ++r) {
    for (std::size_t c = 0; c < img.width(); ++c) {
      const double d = std::hypot(r + 0.5 - p.center_row, c + 0.5 - p.center_col);
      // Pixels farther than a pixel diagonal from the ring cannot touch it.
      if (std::abs(d - p.radius) > half + 1.0) continue;
      const double cov = coverage(r, c, ring);
      img.at(0, r, c) = kSceneBackground - cov * (kSceneBackground - kSceneInk);
    }
  }
}

void render_edges(ImageGrid& img) {
  const double h = static_cast<double>(img.height());
  const double w = static_cast<double>(img.width());
  struct Block {
    double top, bottom, left, right, level;
  };
  const Block blocks[] = {
      {h / 6, 5 * h / 6, w / 8, 3 * w / 8, 0.9},
      {h / 4, 3 * h / 4, w / 2, 7 * w / 8, 0.55},
      {3 * h / 8, 5 * h / 8, 5 * w / 8, 3 * w / 4, 0.3},
  };
  const double disc_row = h / 2, disc_col = w / 4, disc_radius = std::min(h, w) / 10;
  for (std::size_t r = 0; r < img.height(); ++r) {
    for (std::size_t c = 0; c < img.width(); ++c) {
      double v = kEdgesBackground;
      const double y = r + 0.5, x = c + 0.5;
      for (const Block& b : blocks) {
        if (y >= b.top && y < b.bottom && x >= b.left && x < b.right) v = b.level;
      }
      const double d = std::hypot(y - disc_row, x - disc_col);
      if (d < disc_radius + 1.0) {
        const double cov = d < disc_radius - 1.0
                               ? 1.0
                               : coverage(r, c, [&](double yy, double xx) {
                                   return std::hypot(yy - disc_row, xx - disc_col) <= disc_radius;
                                 });
        v = v + cov * (0.05 - v);
      }
      img.at(0, r, c) = v;
    }
  }
}

void render_vernier(ImageGrid& img, const VernierParams& p) {
  const std::size_t h = img.height(), w = img.width();
  const std::size_t top = (h - 2 * p.length - p.gap) / 2;
  auto draw = [&](std::size_t row0, long col0) {
    for (std::size_t r = row0; r < row0 + p.length; ++r) {
      for (std::size_t t = 0; t < p.thickness; ++t) {
        const long c = col0 + static_cast<long>(t);
        if (c >= 0 && static_cast<std::size_t>(c) < w) img.at(0, r, static_cast<std::size_t>(c)) = kSceneInk;
      }
    }
  };
  draw(top, static_cast<long>(p.column));
  draw(top + p.length + p.gap, static_cast<long>(p.column) + p.offset);
}

void render_bandlimited_noise(ImageGrid& img, const BandlimitedNoiseParams& p) {
  const std::size_t h = img.height(), w = img.width();
  ImageGrid white(img.channels(), h, w);
  for (std::size_t c = 0; c < img.channels(); ++c) {
    RandomStream rng(mix_seed(p.seed, c));
    for (double& v : white.plane(c)) v = rng.uniform();
  }
  Spectrum spec = dft2(white);
  const double limit_h = p.bandlimit * static_cast<double>(h) / 2.0;
  const double limit_w = p.bandlimit * static_cast<double>(w) / 2.0;
  auto keep = [](std::size_t k, std::size_t n, double limit) {
    const double f = 2 * k <= n ? static_cast<double>(k) : static_cast<double>(n - k);
    return f < limit;
  };
  for (std::size_t c = 0; c < img.channels(); ++c) {
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t col = 0; col < w; ++col) {
        if (!keep(r, h, limit_h) || !keep(col, w, limit_w)) spec.at(c, r, col) = 0.0;
      }
    }
  }
  const ImageGrid smooth = idft2(spec);
  for (std::size_t c = 0; c < img.channels(); ++c) {
    const auto src = smooth.plane(c);
    const auto [lo, hi] = std::minmax_element(src.begin(), src.end());
    const double span = *hi - *lo;
    auto dst = img.plane(c);
    for (std::size_t i = 0; i < src.size(); ++i) {
      dst[i] = span > 0.0 ? std::clamp((src[i] - *lo) / span, 0.0, 1.0) : 0.5;
    }
  }
}

}  // namespace

std::string_view SceneSpec::kind() const noexcept {
  return std::visit(Overloaded{
                        [](const GridLinesParams&) { return std::string_view("grid_lines"); },
                        [](const CircleParams&) { return std::string_view("circle"); },
                        [](const EdgesParams&) { return std::string_view("edges"); },
                        [](const VernierParams&) { return std::string_view("vernier"); },
                        [](const BandlimitedNoiseParams&) {
                          return std::string_view("bandlimited_noise");
                        },
                    },
                    params);
}

SceneSpec parse_scene_spec(std::string_view text) {
  SceneSpec spec;
  spec.text = std::string(text);
  std::vector<std::string_view> tokens;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    tokens.push_back(trim(text.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  const std::string kind(tokens.front());
  if (kind.empty()) throw Error(ErrorCode::ParseError, "scene spec is missing its kind");

  KeyValues kv;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const std::string_view tok = tokens[i];
    const std::size_t eq = tok.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == tok.size()) {
      throw Error(ErrorCode::ParseError, "expected key=value, got token '" + std::string(tok) + "'");
    }
    kv.add(std::string(trim(tok.substr(0, eq))), std::string(trim(tok.substr(eq + 1))),
           std::string(tok));
  }

  spec.height = kv.count("h", spec.height);
  spec.width = kv.count("w", spec.width);
  spec.channels = kv.count("channels", spec.channels);
  spec.margin = kv.count("margin", spec.margin);
  const double h = static_cast<double>(spec.height), w = static_cast<double>(spec.width);

  if (kind == "grid_lines") {
    GridLinesParams p;
    p.pitch = kv.count("pitch", p.pitch);
    p.line_width = kv.count("width", p.line_width);
    p.phase = kv.count("phase", p.pitch / 2);
    spec.params = p;
  } else if (kind == "circle") {
    CircleParams p;
    p.center_row = kv.number("cy", h / 2);
    p.center_col = kv.number("cx", w / 2);
    p.radius = kv.number("radius", std::min(h, w) / 3);
    p.stroke = kv.number("stroke", p.stroke);
    spec.params = p;
  } else if (kind == "edges") {
    spec.params = EdgesParams{};
  } else if (kind == "vernier") {
    VernierParams p;
    p.length = kv.count("length", spec.height / 3);
    p.thickness = kv.count("thickness", p.thickness);
    p.column = kv.count("column", spec.width / 2 + 3);
    p.offset = kv.integer("offset", p.offset);
    p.gap = kv.count("gap", p.gap);
    spec.params = p;
  } else if (kind == "bandlimited_noise") {
    BandlimitedNoiseParams p;
    p.bandlimit = kv.number("bandlimit", p.bandlimit);
    p.seed = kv.unsigned64("seed", p.seed);
    spec.params = p;
  } else {
    throw Error(ErrorCode::ParseError, "unknown scene kind '" + kind + "'");
  }
  kv.reject_unused(kind);
  return spec;
}

ImageGrid generate(const SceneSpec& spec) {
  if (spec.height < kMinSide || spec.width < kMinSide) {
    throw Error(ErrorCode::InvalidParams, "scenes must be at least 64x64");
  }
  if (spec.channels != 1 && spec.channels != 3) {
    throw Error(ErrorCode::InvalidParams, "channels must be 1 or 3");
  }
  if (2 * spec.margin >= std::min(spec.height, spec.width)) {
    throw Error(ErrorCode::InvalidParams, "margin leaves no room for content");
  }
  const bool noise = std::holds_alternative<BandlimitedNoiseParams>(spec.params);
  const double background = std::holds_alternative<EdgesParams>(spec.params) ? kEdgesBackground
                                                                             : kSceneBackground;
  ImageGrid img(noise ? spec.channels : 1, spec.height, spec.width, background);

  std::visit(
      Overloaded{
          [&](const GridLinesParams& p) {
            if (p.pitch == 0 || p.line_width == 0 || p.line_width >= p.pitch) {
              throw Error(ErrorCode::InvalidParams, "grid_lines needs 0 < width < pitch");
            }
            render_grid_lines(img, p);
          },
          [&](const CircleParams& p) {
            if (!(p.radius > 0.0) || !(p.stroke > 0.0)) {
              throw Error(ErrorCode::InvalidParams, "circle needs positive radius and stroke");
            }
            render_circle(img, p);
          },
          [&](const EdgesParams&) { render_edges(img); },
          [&](const VernierParams& p) {
            if (p.length == 0 || p.thickness == 0 || 2 * p.length + p.gap > spec.height ||
                p.column + p.thickness > spec.width) {
              throw Error(ErrorCode::InvalidParams, "vernier segments do not fit the image");
            }
            render_vernier(img, p);
          },
          [&](const BandlimitedNoiseParams& p) {
            if (!(p.bandlimit > 0.0 && p.bandlimit <= 1.0)) {
              throw Error(ErrorCode::InvalidParams, "bandlimit must be in (0, 1]");
            }
            if (spec.margin != 0) {
              throw Error(ErrorCode::InvalidParams, "bandlimited_noise does not support a margin");
            }
            render_bandlimited_noise(img, p);
          },
      },
      spec.params);

  if (spec.margin > 0) {
    for (std::size_t r = 0; r < spec.height; ++r) {
      for (std::size_t c = 0; c < spec.width; ++c) {
        const bool border = r < spec.margin || c < spec.margin || r >= spec.height - spec.margin ||
                            c >= spec.width - spec.margin;
        if (border) img.at(0, r, c) = background;
      }
    }
  }

  if (img.channels() == spec.channels) return img;
  // Deterministic kinds are gray; replicate for RGB.
  std::vector<double> rgb;
  rgb.reserve(3 * img.plane_size());
  for (int c = 0; c < 3; ++c) rgb.insert(rgb.end(), img.plane(0).begin(), img.plane(0).end());
  return ImageGrid(3, spec.height, spec.width, std::move(rgb));
}

double vernier_separability(const ImageGrid& recon_aligned, const ImageGrid& recon_offset) {
  if (!recon_aligned.same_shape(recon_offset)) {
    throw Error(ErrorCode::DimensionMismatch, "vernier reconstructions differ in shape");
  }
  double s = 0.0;
  const auto a = recon_aligned.samples();
  const auto b = recon_offset.samples();
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

const std::vector<std::string>& corpus() {
  static const std::vector<std::string> scenes = {
      "grid_lines,h=600,w=800,pitch=50,width=2",
      "circle,h=600,w=800,radius=180,stroke=3",
      "edges,h=600,w=800",
      "vernier,h=600,w=800,length=200,thickness=1,column=243,offset=3",
      "bandlimited_noise,h=600,w=800,bandlimit=0.3,seed=1",
  };
  return scenes;
}

}  // namespace hyperlens
