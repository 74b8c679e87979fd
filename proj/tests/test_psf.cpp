#include <doctest.h>

#include <cmath>
#include <numeric>

#include "hyperlens/error.hpp"
#include "hyperlens/psf.hpp"
#include "oracles.hpp"

using namespace hyperlens;

namespace {

double sum(const ImageGrid& g) {
  return std::accumulate(g.samples().begin(), g.samples().end(), 0.0);
}

}  // namespace

TEST_CASE("bessel_j1 reference values") {
  CHECK(bessel_j1(0.0) == 0.0);
  CHECK(std::abs(bessel_j1(3.8317059702)) < 1e-7);
  CHECK(std::abs(bessel_j1(1.0) - 0.4400505857) < 1e-7);
  CHECK(bessel_j1(-2.5) == -bessel_j1(2.5));
  CHECK_THROWS_AS(bessel_j1(std::nan("")), Error);
}

TEST_CASE("bessel_j1 matches the long-double series below the switchover") {
  for (double x = 0.0; x <= 8.0; x += 0.0625) {
    CHECK(std::abs(bessel_j1(x) - oracle::bessel_j1_series(x)) < 1e-9);
  }
}

TEST_CASE("bessel_j1 matches std::cyl_bessel_j far from the origin") {
  for (double x = 0.25; x <= 100.0; x += 0.37) {
    CHECK(std::abs(bessel_j1(x) - std::cyl_bessel_j(1.0, x)) < 1e-7);
  }
}

TEST_CASE("bessel_j1 is continuous at the series/asymptotic switchover") {
  const double below = bessel_j1(8.0);
  const double above = bessel_j1(std::nextafter(8.0, 9.0));
  CHECK(std::abs(below - above) < 1e-7);
  CHECK(std::abs(below - oracle::bessel_j1_series(8.0)) < 1e-7);
}

TEST_CASE("psf kind names") {
  CHECK(parse_psf_kind("airy") == PsfKind::Airy);
  CHECK(parse_psf_kind("gaussian") == PsfKind::Gaussian);
  CHECK(parse_psf_kind("delta") == PsfKind::Delta);
  CHECK(to_string(PsfKind::Gaussian) == "gaussian");
  CHECK_THROWS_AS(parse_psf_kind("moffat"), Error);
}

TEST_CASE("psf spec validation") {
  CHECK(PsfSpec::airy(10).support == 20.0);
  CHECK(PsfSpec::gaussian(3).support == 24.0);
  CHECK_THROWS_AS(PsfSpec::airy(10, 15), Error);
  CHECK_THROWS_AS(PsfSpec::gaussian(0.0), Error);
  CHECK_THROWS_AS(PsfSpec::airy(-1.0), Error);
  CHECK(PsfSpec::airy(10).rescaled(0.5) == PsfSpec::airy(5));
  CHECK(PsfSpec::delta().rescaled(3.0) == PsfSpec::delta());
}

TEST_CASE("delta kernel is a single unit sample") {
  const ImageGrid k = make_psf(PsfSpec::delta(), 9, 7);
  CHECK(k.at(0, 0, 0) == 1.0);
  CHECK(sum(k) == 1.0);
}

TEST_CASE("airy kernel vanishes at its first zero") {
  const ImageGrid k = make_psf(PsfSpec::airy(10), 64, 64);
  const double peak = k.at(0, 0, 0);
  CHECK(k.at(0, 0, 10) < 1e-6 * peak);
  CHECK(k.at(0, 10, 0) < 1e-6 * peak);
  CHECK(k.at(0, 64 - 10, 0) < 1e-6 * peak);
  // The first bright ring lies between the first two zeros.
  CHECK(k.at(0, 0, 13) > 1e-3 * peak);
}

TEST_CASE("gaussian kernel falls to exp(-1/2) at one sigma") {
  const ImageGrid k = make_psf(PsfSpec::gaussian(4), 80, 80);
  CHECK(k.at(0, 0, 4) / k.at(0, 0, 0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("kernels have unit sum and dihedral symmetry") {
  for (const PsfSpec& spec :
       {PsfSpec::airy(3.5), PsfSpec::airy(10, 27.3), PsfSpec::gaussian(1.7), PsfSpec::gaussian(5)}) {
    const std::size_t n = 2 * static_cast<std::size_t>(spec.support) + 5;
    const ImageGrid k = make_psf(spec, n, n + 2);
    CHECK(std::abs(sum(k) - 1.0) < 1e-12);
    const long reach = static_cast<long>(spec.support);
    auto at = [&](long dy, long dx) {
      const long h = static_cast<long>(k.height()), w = static_cast<long>(k.width());
      return k.at(0, static_cast<std::size_t>((dy % h + h) % h),
                  static_cast<std::size_t>((dx % w + w) % w));
    };
    for (long dy = 0; dy <= reach; ++dy) {
      for (long dx = 0; dx <= reach; ++dx) {
        const double v = at(dy, dx);
        CHECK(at(-dy, dx) == v);
        CHECK(at(dy, -dx) == v);
        CHECK(at(-dy, -dx) == v);
        CHECK(at(dx, dy) == v);
      }
    }
  }
}

TEST_CASE("kernel support must fit the grid") {
  CHECK_THROWS_WITH_AS(make_psf(PsfSpec::airy(35), 100, 200), doctest::Contains("141"), Error);
  try {
    make_psf(PsfSpec::airy(35), 100, 200);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SupportTooLarge);
  }
  CHECK_NOTHROW(make_psf(PsfSpec::airy(35), 141, 141));
}

TEST_CASE("delta transfer function is all ones") {
  const Otf otf = make_otf(PsfSpec::delta(), 12, 10);
  for (const Complex& z : otf.response.bins()) CHECK(z == Complex(1.0, 0.0));
}

TEST_CASE("gaussian transfer function decreases from DC to Nyquist") {
  const std::size_t n = 64;
  const Otf otf = make_otf(PsfSpec::gaussian(2.5), n, n);
  for (std::size_t k = 1; k <= n / 2; ++k) {
    CHECK(std::abs(otf.response.at(0, 0, k)) <= std::abs(otf.response.at(0, 0, k - 1)) + 1e-9);
    CHECK(std::abs(otf.response.at(0, k, 0)) <= std::abs(otf.response.at(0, k - 1, 0)) + 1e-9);
  }
}

TEST_CASE("airy transfer function has exact unit DC and bounded gain") {
  const Otf otf = make_otf(PsfSpec::airy(10), 200, 200);
  CHECK(otf.response.at(0, 0, 0) == Complex(1.0, 0.0));
  for (const Complex& z : otf.response.bins()) CHECK(std::abs(z) <= 1.0 + 1e-9);
  CHECK(hermitian_defect(otf.response, 0) == 0.0);
}

TEST_CASE("transfer function is the DFT of the kernel") {
  const PsfSpec spec = PsfSpec::gaussian(1.3, 5);
  const ImageGrid k = make_psf(spec, 12, 14);
  const auto ref = oracle::dft_sum(k, 0);
  const Otf otf = make_otf(spec, 12, 14);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    CHECK(std::abs(otf.response.bins()[i] - ref[i]) < 1e-12);
  }
}

TEST_CASE("box transfer function matches a block-mean oracle") {
  const std::size_t w = 3, h = 9, cw = 12;
  const Otf otf = make_box_otf(w, h, cw);
  ImageGrid box(1, h, cw);
  for (std::size_t i = 0; i < w; ++i) {
    for (std::size_t j = 0; j < w; ++j) box.at(0, (h - i) % h, (cw - j) % cw) = 1.0 / 9.0;
  }
  const auto ref = oracle::dft_sum(box, 0);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    CHECK(std::abs(otf.response.bins()[i] - ref[i]) < 1e-12);
  }
  CHECK_THROWS_AS(make_box_otf(0, 8, 8), Error);
  CHECK_THROWS_AS(make_box_otf(9, 8, 8), Error);
}

TEST_CASE("rayleigh pitch") {
  CHECK(rayleigh_pitch(PsfSpec::airy(10)) == 10.0);
  CHECK(rayleigh_pitch(PsfSpec::airy(35)) == 35.0);
  CHECK(rayleigh_pitch(PsfSpec::airy(35)) / 10.0 == doctest::Approx(3.5));
  CHECK(rayleigh_pitch(PsfSpec::airy(35)) / 10.0 > 1.0);
  try {
    rayleigh_pitch(PsfSpec::gaussian(3));
    FAIL("expected NotApplicable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotApplicable);
  }
}
