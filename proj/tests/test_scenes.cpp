#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hyperlens/error.hpp"
#include "hyperlens/metrics.hpp"
#include "hyperlens/pipeline.hpp"
#include "hyperlens/scenes.hpp"

using namespace hyperlens;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("grid lines count") {
  const ImageGrid img = generate(parse_scene_spec("grid_lines,h=500,w=500,pitch=50,width=1"));
  REQUIRE(img.height() == 500);
  std::size_t dark_rows = 0, dark_cols = 0;
  for (std::size_t r = 0; r < 500; ++r) {
    bool all = true;
    for (std::size_t c = 0; c < 500; ++c) all = all && img.at(0, r, c) == kSceneInk;
    dark_rows += all;
  }
  for (std::size_t c = 0; c < 500; ++c) {
    bool all = true;
    for (std::size_t r = 0; r < 500; ++r) all = all && img.at(0, r, c) == kSceneInk;
    dark_cols += all;
  }
  CHECK(dark_rows == 10);
  CHECK(dark_cols == 10);
  // Each line is a single pixel wide: no two dark rows are adjacent.
  CHECK(img.at(0, 25, 10) == kSceneInk);
  CHECK(img.at(0, 24, 10) == kSceneBackground);
  CHECK(img.at(0, 26, 10) == kSceneBackground);
}

TEST_CASE("aligned vernier is mirror symmetric about its line") {
  const ImageGrid img = generate(parse_scene_spec("vernier,h=300,w=200,length=100,offset=0,column=90"));
  const std::size_t axis = 90;
  std::size_t ink = 0;
  for (std::size_t r = 0; r < 300; ++r) {
    for (std::size_t d = 1; d <= 90; ++d) {
      CHECK(img.at(0, r, axis - d) == img.at(0, r, axis + d));
    }
    ink += img.at(0, r, axis) == kSceneInk;
  }
  CHECK(ink == 200);
}

TEST_CASE("offset vernier shifts the lower segment") {
  const ImageGrid img = generate(parse_scene_spec("vernier,h=300,w=200,length=100,offset=3,column=90"));
  CHECK(img.at(0, 60, 90) == kSceneInk);
  CHECK(img.at(0, 240, 93) == kSceneInk);
  CHECK(img.at(0, 240, 90) == kSceneBackground);
}

TEST_CASE("bandlimited noise stays inside its band") {
  const ImageGrid img = generate(parse_scene_spec("bandlimited_noise,h=1500,w=2000,bandlimit=0.08"));
  CHECK(band_energy_fraction(img, 0.1) >= 0.999);
  const auto [lo, hi] = std::minmax_element(img.samples().begin(), img.samples().end());
  CHECK(*lo == 0.0);
  CHECK(*hi == 1.0);
}

TEST_CASE("circle is anti-aliased") {
  const ImageGrid img = generate(parse_scene_spec("circle,h=200,w=200,radius=60,stroke=3"));
  bool partial = false;
  for (double v : img.samples()) partial = partial || (v > 0.0 && v < 1.0);
  CHECK(partial);
  // The ring passes through (100, 160) and the centre is clear.
  CHECK(img.at(0, 100, 160) < 0.5);
  CHECK(img.at(0, 100, 100) == kSceneBackground);
}

TEST_CASE("edges scene has distinct grey levels") {
  const ImageGrid img = generate(parse_scene_spec("edges,h=120,w=160"));
  CHECK(img.at(0, 0, 0) == doctest::Approx(0.15));
  CHECK(img.at(0, 60, 40) == doctest::Approx(0.05));
  CHECK(img.at(0, 35, 90) == doctest::Approx(0.55));
  CHECK(img.at(0, 60, 110) == doctest::Approx(0.3));
}

TEST_CASE("generation is deterministic") {
  for (const std::string& s : corpus()) {
    const SceneSpec spec = parse_scene_spec(s);
    CHECK(spec.text == s);
    CHECK(generate(spec) == generate(spec));
  }
  const SceneSpec a = parse_scene_spec("bandlimited_noise,h=64,w=64,seed=7");
  const SceneSpec b = parse_scene_spec("bandlimited_noise,h=64,w=64,seed=8");
  CHECK_FALSE(generate(a) == generate(b));
}

TEST_CASE("rgb scenes") {
  const ImageGrid gray = generate(parse_scene_spec("edges,h=64,w=64"));
  const ImageGrid rgb = generate(parse_scene_spec("edges,h=64,w=64,channels=3"));
  REQUIRE(rgb.channels() == 3);
  for (std::size_t c = 0; c < 3; ++c) {
    CHECK(std::equal(rgb.plane(c).begin(), rgb.plane(c).end(), gray.plane(0).begin()));
  }
  const ImageGrid noise = generate(parse_scene_spec("bandlimited_noise,h=64,w=64,channels=3"));
  CHECK_FALSE(std::equal(noise.plane(0).begin(), noise.plane(0).end(), noise.plane(1).begin()));
}

TEST_CASE("parse errors name the offending token") {
  CHECK_THROWS_WITH_AS(parse_scene_spec("grid_lines,pitch"), doctest::Contains("pitch"), Error);
  CHECK_THROWS_WITH_AS(parse_scene_spec("grid_lines,h=abc"), doctest::Contains("h=abc"), Error);
  CHECK_THROWS_WITH_AS(parse_scene_spec("circle,pitch=4"), doctest::Contains("pitch=4"), Error);
  CHECK_THROWS_WITH_AS(parse_scene_spec("spiral,h=4"), doctest::Contains("spiral"), Error);
  CHECK(code_of([] { parse_scene_spec(""); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_scene_spec("edges,h=1,h=2"); }) == ErrorCode::ParseError);
}

TEST_CASE("invalid scene parameters") {
  CHECK(code_of([] { generate(parse_scene_spec("edges,h=32,w=64")); }) == ErrorCode::InvalidParams);
  CHECK(code_of([] { generate(parse_scene_spec("edges,channels=2,h=64,w=64")); }) ==
        ErrorCode::InvalidParams);
  CHECK(code_of([] { generate(parse_scene_spec("grid_lines,h=64,w=64,pitch=4,width=4")); }) ==
        ErrorCode::InvalidParams);
  CHECK(code_of([] { generate(parse_scene_spec("vernier,h=64,w=64,length=40")); }) ==
        ErrorCode::InvalidParams);
  CHECK(code_of([] { generate(parse_scene_spec("bandlimited_noise,h=64,w=64,margin=2")); }) ==
        ErrorCode::InvalidParams);
  CHECK(code_of([] { generate(parse_scene_spec("bandlimited_noise,h=64,w=64,bandlimit=0")); }) ==
        ErrorCode::InvalidParams);
}

TEST_CASE("a wide margin keeps the border blank after diffraction") {
  const PsfSpec psf = PsfSpec::airy(35);  // support 70
  const std::size_t margin = 210, n = 600;
  const SceneSpec spec =
      parse_scene_spec("circle,h=600,w=600,radius=80,stroke=3,margin=" + std::to_string(margin));
  const ImageGrid blurred = diffract(generate(spec), psf);
  // Beyond one support of the content area no energy can arrive.
  const std::size_t clear = margin - 70;
  double worst = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const bool outer = r < clear || c < clear || r >= n - clear || c >= n - clear;
      if (outer) worst = std::max(worst, std::abs(blurred.at(0, r, c) - kSceneBackground));
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("vernier separability") {
  const ImageGrid a = generate(parse_scene_spec("vernier,h=200,w=200,offset=0"));
  const ImageGrid b = generate(parse_scene_spec("vernier,h=200,w=200,offset=0"));
  CHECK(vernier_separability(a, a) == 0.0);
  CHECK(vernier_separability(a, b) == 0.0);
  const ImageGrid c = generate(parse_scene_spec("vernier,h=200,w=200,offset=2"));
  CHECK(vernier_separability(a, c) > 0.0);
  CHECK(vernier_separability(a, c) == vernier_separability(c, a));
  CHECK_THROWS_AS(vernier_separability(a, ImageGrid(1, 200, 100)), Error);
}
