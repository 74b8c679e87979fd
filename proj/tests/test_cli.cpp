#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hyperlens/app.hpp"
#include "hyperlens/image_io.hpp"
#include "hyperlens/metrics.hpp"
#include "hyperlens/pipeline.hpp"

using namespace hyperlens;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hyperlens");
  std::ostringstream out, err;
  const int code = app::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

// Fresh scratch directory per test case.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("hyperlens_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& f) const { return (dir / f).string(); }
};

}  // namespace

TEST_CASE("scene writes an image of the requested size") {
  Scratch s("scene");
  const Result r = cli({"scene", "grid_lines,h=500,w=500,pitch=50,width=1", "-o", s / "g.pgm"});
  REQUIRE(r.code == app::kExitOk);
  const ImageGrid img = io::read_image(fs::path(s / "g.pgm"));
  CHECK(img.height() == 500);
  CHECK(img.width() == 500);
  CHECK(fs::exists(s / "g.pgm.manifest.json"));

  REQUIRE(cli({"scene", "grid_lines,h=500,w=500,pitch=50,width=1", "-o", s / "g2.pgm"}).code == 0);
  CHECK(slurp(s / "g.pgm") == slurp(s / "g2.pgm"));
}

TEST_CASE("scene reports parse errors with the token") {
  Scratch s("scene_err");
  const Result r = cli({"scene", "grid_lines,pitch=fifty", "-o", s / "x.pgm"});
  CHECK(r.code == app::kExitUsage);
  CHECK(r.err.find("pitch=fifty") != std::string::npos);
  CHECK(cli({"scene"}).code == app::kExitUsage);
  CHECK(cli({"bogus"}).code == app::kExitUsage);
  CHECK(cli({}).code == app::kExitUsage);
  CHECK(cli({"--help"}).code == app::kExitOk);
}

TEST_CASE("capture decimates by D") {
  Scratch s("capture");
  REQUIRE(cli({"scene", "edges,h=1500,w=2000", "-o", s / "in.pfm"}).code == 0);
  const Result r = cli({"capture", "-i", s / "in.pfm", "-o", s / "cap.pfm", "--D", "10"});
  REQUIRE(r.code == 0);
  const ImageGrid cap = io::read_image(fs::path(s / "cap.pfm"));
  CHECK(cap.height() == 150);
  CHECK(cap.width() == 200);
}

TEST_CASE("capture with D = 1 and a delta kernel is lossless") {
  Scratch s("capture_id");
  for (const char* ext : {".pfm", ".pgm"}) {
    const std::string in = s / (std::string("in") + ext), out = s / (std::string("out") + ext);
    REQUIRE(cli({"scene", "circle,h=100,w=120", "-o", in}).code == 0);
    REQUIRE(cli({"capture", "-i", in, "-o", out, "--D", "1", "--psf", "delta"}).code == 0);
    CHECK(slurp(in) == slurp(out));
  }
}

TEST_CASE("capture rejects sizes that D does not divide") {
  Scratch s("capture_nd");
  REQUIRE(cli({"scene", "edges,h=105,w=100", "-o", s / "in.pfm"}).code == 0);
  const Result r = cli({"capture", "-i", s / "in.pfm", "-o", s / "c.pfm", "--D", "10"});
  CHECK(r.code == app::kExitDomain);
  CHECK(r.err.find("NotDivisible") != std::string::npos);
  CHECK(cli({"capture", "-i", s / "missing.pfm", "-o", s / "c.pfm"}).code == app::kExitIo);
}

TEST_CASE("reconstruct stages and eps guard") {
  Scratch s("reconstruct");
  const std::string scene = "edges,h=300,w=400";
  REQUIRE(cli({"scene", scene, "-o", s / "scene.pfm"}).code == 0);
  const std::vector<std::string> flags = {"--D", "10", "--radius", "20"};
  auto with = [&](std::vector<std::string> a) {
    a.insert(a.end(), flags.begin(), flags.end());
    return a;
  };
  REQUIRE(cli(with({"capture", "-i", s / "scene.pfm", "-o", s / "cap.pfm"})).code == 0);
  REQUIRE(cli(with({"reconstruct", "-i", s / "cap.pfm", "-o", s / "interp.pfm",
                    "--stop-after-interpolation"}))
              .code == 0);
  REQUIRE(cli(with({"reconstruct", "-i", s / "cap.pfm", "-o", s / "full.pfm"})).code == 0);
  REQUIRE(cli(with({"reconstruct", "-i", s / "cap.pfm", "-o", s / "dc.pfm", "--eps", "1"})).code ==
          0);

  const ImageGrid cap = io::read_image(fs::path(s / "cap.pfm"));
  const ImageGrid interp = io::read_image(fs::path(s / "interp.pfm"));
  const ImageGrid expected = interpolate_fft(cap, 10);
  double worst = 0.0;
  for (std::size_t i = 0; i < expected.samples().size(); ++i) {
    // The file stores float32 samples.
    worst = std::max(worst, std::abs(interp.samples()[i] - expected.samples()[i]));
  }
  CHECK(worst <= 1e-6);

  const ImageGrid truth = io::read_image(fs::path(s / "scene.pfm"));
  const ImageGrid full = io::read_image(fs::path(s / "full.pfm"));
  CHECK(psnr(clipped(full), truth).pooled > psnr(clipped(interp), truth).pooled);

  const ImageGrid dc = io::read_image(fs::path(s / "dc.pfm"));
  for (double v : dc.samples()) CHECK(v == doctest::Approx(dc.samples()[0]).epsilon(1e-6));

  CHECK(cli(with({"reconstruct", "-i", s / "cap.pfm", "-o", s / "x.pfm", "--eps", "0"})).code ==
        app::kExitDomain);
  CHECK(cli(with({"reconstruct", "-i", s / "cap.pfm", "-o", s / "x.pfm", "--eps", "abc"})).code ==
        app::kExitUsage);
}

TEST_CASE("compare on the default scene favours the hyperacuity pipeline") {
  Scratch s("compare");
  const Result r = cli({"compare", "--out-dir", s.dir.string()});
  REQUIRE(r.code == 0);
  const auto rows = lines(slurp(s / "compare.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == app::csv_header());
  const auto hyper = fields(rows[1]), base = fields(rows[2]);
  REQUIRE(hyper.size() == 14);
  CHECK(hyper[1] == "hyperacuity");
  CHECK(base[1] == "baseline");
  CHECK(std::stod(hyper[12]) > std::stod(base[12]));
  CHECK(fs::exists(s / "hyperacuity.pgm"));
  CHECK(fs::exists(s / "baseline.pgm"));
  CHECK(fs::exists(s / "scene.pgm"));
  CHECK(slurp(s / "manifest.json").find("\"timings_ms\"") != std::string::npos);
}

TEST_CASE("compare under heavy noise still writes well-formed rows") {
  Scratch s("compare_noise");
  const Result r = cli({"compare", "--scene", "circle,h=200,w=200", "--radius", "10", "--noise",
                        "0.2", "--eps", "1e-6", "--out-dir", s.dir.string()});
  REQUIRE(r.code == 0);
  const auto rows = lines(slurp(s / "compare.csv"));
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 1; i < 3; ++i) {
    const auto f = fields(rows[i]);
    REQUIRE(f.size() == 14);
    CHECK(f[7] == "0.2");
    CHECK(std::isfinite(std::stod(f[12])));
    CHECK(std::stod(f[13]) > 0.0);
  }
}

TEST_CASE("compare with identity stages reports infinite PSNR") {
  Scratch s("compare_id");
  const Result r = cli({"compare", "--scene", "edges,h=64,w=64", "--D", "1", "--U", "1", "--psf",
                        "delta", "--out-dir", s.dir.string()});
  REQUIRE(r.code == 0);
  const auto rows = lines(slurp(s / "compare.csv"));
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 1; i < 3; ++i) {
    const auto f = fields(rows[i]);
    CHECK(f[9] == "inf");
    CHECK(f[12] == "inf");
    CHECK(f[13] == "0.000000000e+00");
  }
}

TEST_CASE("compare is byte-for-byte repeatable") {
  Scratch s("compare_det");
  const std::vector<std::string> flags = {"--scene", "vernier,h=200,w=300,offset=3", "--radius",
                                          "12", "--noise", "0.01", "--seed", "4"};
  auto run_into = [&](const std::string& sub) {
    std::vector<std::string> a = {"compare", "--out-dir", s / sub};
    a.insert(a.end(), flags.begin(), flags.end());
    return cli(a).code;
  };
  REQUIRE(run_into("a") == 0);
  REQUIRE(run_into("b") == 0);
  for (const char* f : {"compare.csv", "scene.pgm", "hyperacuity.pgm", "baseline.pgm"}) {
    CHECK(slurp(s.dir / "a" / f) == slurp(s.dir / "b" / f));
  }
}

TEST_CASE("sweep emits one row per combination in a fixed order") {
  Scratch s("sweep");
  const std::vector<std::string> args = {"sweep",   "--scenes", "edges,h=100,w=100",
                                         "--D",     "5",        "--radius",
                                         "4,6",     "--eps",    "1e-3,1e-2",
                                         "--threads", "3"};
  auto run_to = [&](const std::string& out) {
    std::vector<std::string> a = args;
    a.push_back("-o");
    a.push_back(out);
    return cli(a).code;
  };
  REQUIRE(run_to(s / "a.csv") == 0);
  REQUIRE(run_to(s / "b.csv") == 0);
  const auto rows = lines(slurp(s / "a.csv"));
  REQUIRE(rows.size() == 5);
  CHECK(slurp(s / "a.csv") == slurp(s / "b.csv"));
  const std::vector<std::pair<std::string, std::string>> order = {
      {"4", "0.001"}, {"4", "0.01"}, {"6", "0.001"}, {"6", "0.01"}};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto f = fields(rows[i + 1]);
    CHECK(f[0] == "edges,h=100,w=100");
    CHECK(f[5] == order[i].first);
    CHECK(f[6] == order[i].second);
  }
}

TEST_CASE("sweep with an empty grid writes only the header") {
  Scratch s("sweep_empty");
  const Result r = cli({"sweep", "--scenes", "", "-o", s / "e.csv"});
  REQUIRE(r.code == 0);
  CHECK(slurp(s / "e.csv") == std::string(app::csv_header()) + "\n");
}

TEST_CASE("sweep refuses oversized grids") {
  Scratch s("sweep_big");
  std::string seeds;
  for (int i = 0; i < 10001; ++i) seeds += (i ? "," : "") + std::to_string(i);
  const Result r = cli({"sweep", "--scenes", "edges,h=64,w=64", "--seeds", seeds, "-o", s / "x.csv"});
  CHECK(r.code == app::kExitDomain);
  CHECK(r.err.find("GridTooLarge") != std::string::npos);
}

TEST_CASE("radiometry prints the fixed key order") {
  const Result r = cli({"radiometry"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() >= 5);
  const char* keys[] = {"photons=", "dr_ratio=", "dr_db=", "area_ratio=", "cone_estimate="};
  for (std::size_t i = 0; i < 5; ++i) CHECK(ls[i].rfind(keys[i], 0) == 0);
  CHECK(ls[2] == "dr_db=160");
  CHECK(std::stod(ls[0].substr(8)) == doctest::Approx(2768.8).epsilon(1e-4));
  CHECK(std::stod(ls[3].substr(11)) == doctest::Approx(2.74).epsilon(0.005));
  CHECK(std::stod(ls[4].substr(14)) == doctest::Approx(259770).epsilon(1e-4));
  CHECK(cli({"radiometry", "--area", "-1um2"}).code == app::kExitDomain);
  CHECK(cli({"radiometry", "--area", "lots"}).code == app::kExitUsage);
}

TEST_CASE("psf exports the kernel and the Rayleigh diagnostic") {
  Scratch s("psf");
  const Result r = cli({"psf", "--radius", "10", "-o", s / "k.pgm"});
  REQUIRE(r.code == 0);
  CHECK(io::read_image(fs::path(s / "k.pgm")).height() == 41);
  CHECK(r.out.find("rayleigh_pitch=10") != std::string::npos);
  CHECK(r.out.find("rayleigh_pitch_over_D=1") != std::string::npos);
  CHECK(cli({"psf", "--psf", "airy", "--radius", "10", "--support", "5"}).code ==
        app::kExitDomain);
}

TEST_CASE("csv helpers") {
  CHECK(app::csv_escape("a,b") == "\"a,b\"");
  CHECK(app::csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(app::csv_escape("plain") == "plain");
  CHECK(app::format_psnr(kInfinitePsnr) == "inf");
  CHECK(app::format_psnr(12.3456789) == "12.345679");
  app::CsvRow row;
  row.scene = "edges";
  row.pipeline = "baseline";
  row.psf_kind = "airy";
  row.psf_radius = 35;
  row.eps = 1e-3;
  row.psnr = {20.0};
  row.psnr_pooled = 20.0;
  row.mse_pooled = 0.01;
  CHECK(app::format_csv_row(row) ==
        "edges,baseline,10,10,airy,35,0.001,0,0,20.000000,20.000000,20.000000,20.000000,"
        "1.000000000e-02");
}

TEST_CASE("quantities with unit suffixes") {
  CHECK(app::parse_quantity("1um2") == doctest::Approx(1e-12));
  CHECK(app::parse_quantity("4.84um2") == doctest::Approx(4.84e-12));
  CHECK(app::parse_quantity("1ms") == doctest::Approx(1e-3));
  CHECK(app::parse_quantity("550nm") == doctest::Approx(550e-9));
  CHECK(app::parse_quantity("2") == 2.0);
  CHECK_THROWS_AS(app::parse_quantity("um2"), Error);
}

TEST_CASE("exit code mapping") {
  CHECK(app::exit_code_for(ErrorCode::ParseError) == app::kExitUsage);
  CHECK(app::exit_code_for(ErrorCode::NotDivisible) == app::kExitDomain);
  CHECK(app::exit_code_for(ErrorCode::IoError) == app::kExitIo);
  CHECK(app::default_support(PsfKind::Airy, 35) == 70.0);
  CHECK(app::default_support(PsfKind::Gaussian, 3) == 24.0);
}
