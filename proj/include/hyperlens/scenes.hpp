#pragma once

// Procedural test scenes. A scene is described by a spec string of the form
//
//   kind[,key=value]...
//
// Common keys: h, w (pixels), channels (1 or 3), margin (pixels of blank
// background kept along every border). Kind-specific keys:
//
//   grid_lines         pitch, width, phase (row/column of the first line,
//                      default pitch/2)
//   circle             cy, cx (centre, default image centre), radius
//                      (default min(h,w)/3), stroke
//   edges              (no extra keys) blocks and a disc of distinct grey levels
//   vernier            length (segment length), thickness, column (left edge
//                      of the upper segment, default w/2+3), offset (lateral
//                      shift of the lower segment), gap
//   bandlimited_noise  bandlimit (fraction of Nyquist kept, strict), seed
//
// Example: "grid_lines,h=500,w=500,pitch=50,width=1".

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hyperlens/grid.hpp"

namespace hyperlens {

struct GridLinesParams {
  std::size_t pitch = 50;
  std::size_t line_width = 1;
  std::size_t phase = 25;
};

struct CircleParams {
  double center_row = 0.0;
  double center_col = 0.0;
  double radius = 0.0;
  double stroke = 3.0;
};

struct EdgesParams {};

struct VernierParams {
  std::size_t length = 0;
  std::size_t thickness = 1;
  std::size_t column = 0;
  long offset = 0;
  std::size_t gap = 0;
};

struct BandlimitedNoiseParams {
  double bandlimit = 0.08;
  std::uint64_t seed = 1;
};

using SceneParams =
    std::variant<GridLinesParams, CircleParams, EdgesParams, VernierParams, BandlimitedNoiseParams>;

struct SceneSpec {
  std::size_t height = 600;
  std::size_t width = 800;
  std::size_t channels = 1;
  std::size_t margin = 0;
  SceneParams params = EdgesParams{};
  /// The scene string this was parsed from, echoed into reports.
  std::string text;

  std::string_view kind() const noexcept;
};

/// Parses the grammar above. Malformed tokens and unknown keys raise
/// ParseError naming the token.
SceneSpec parse_scene_spec(std::string_view text);

/// Renders the scene. Requires at least 64x64 and kind-consistent params
/// (InvalidParams otherwise). Output samples lie in [0, 1].
ImageGrid generate(const SceneSpec& spec);

/// Pooled MSE between reconstructions of an aligned and an offset vernier
/// target; larger means the two are easier to tell apart.
double vernier_separability(const ImageGrid& recon_aligned, const ImageGrid& recon_offset);

/// The five bundled evaluation scenes (one per kind).
const std::vector<std::string>& corpus();

inline constexpr double kSceneBackground = 1.0;
inline constexpr double kSceneInk = 0.0;

}  // namespace hyperlens
