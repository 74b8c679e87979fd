#include "hyperlens/app.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "hyperlens/image_io.hpp"
#include "hyperlens/kernels.hpp"
#include "hyperlens/metrics.hpp"
#include "hyperlens/psf.hpp"
#include "hyperlens/radiometry.hpp"

namespace hyperlens::app {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view text, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::ParseError,
                std::string("bad ") + what + " value '" + std::string(text) + "'");
  }
  return value;
}

template <class T>
std::vector<T> parse_list(std::string_view text, const char* what) {
  std::vector<T> out;
  for (const std::string& item : split(text, ',')) out.push_back(parse_number<T>(item, what));
  return out;
}

std::string join_args(const std::vector<std::string>& args) {
  std::string out;
  for (const std::string& a : args) {
    if (!out.empty()) out += ' ';
    out += a;
  }
  return out;
}

/// Flags shared by every command that simulates an acquisition.
struct CaptureFlags {
  std::size_t decimation = 10;
  std::string psf = "airy";
  double radius = 35.0;
  double support = -1.0;  // < 0: default for the kind
  std::string sampling = "point";
  double noise = 0.0;
  std::uint64_t seed = 0;

  void attach(CLI::App* cmd, bool with_noise) {
    cmd->add_option("--D,--decimation", decimation, "Decimation factor (sensor pitch in pixels)")
        ->capture_default_str();
    cmd->add_option("--psf", psf, "Kernel kind: airy, gaussian or delta")->capture_default_str();
    cmd->add_option("--radius", radius,
                    "Airy first-zero radius or gaussian sigma, high-res pixels")
        ->capture_default_str();
    cmd->add_option("--support", support,
                    "Kernel truncation half-width (default 2*radius airy, 4*radius gaussian)");
    cmd->add_option("--sampling", sampling, "Sensor model: point or area")->capture_default_str();
    if (with_noise) {
      cmd->add_option("--noise", noise, "Std of additive sensor noise")->capture_default_str();
      cmd->add_option("--seed", seed, "Noise seed")->capture_default_str();
    }
  }

  CaptureConfig config() const {
    CaptureConfig cc;
    cc.decimation = decimation;
    cc.sampling = parse_sampling_mode(sampling);
    cc.noise_sigma = noise;
    cc.seed = seed;
    const PsfKind kind = parse_psf_kind(psf);
    if (kind == PsfKind::Delta) {
      cc.psf = PsfSpec::delta();
    } else {
      cc.psf = PsfSpec{kind, radius, support < 0.0 ? default_support(kind, radius) : support};
      cc.psf.validate();
    }
    return cc;
  }
};

json capture_json(const CaptureConfig& cc) {
  return json{{"psf_kind", std::string(to_string(cc.psf.kind))},
              {"psf_radius", cc.psf.radius},
              {"psf_support", cc.psf.support},
              {"D", cc.decimation},
              {"sampling", std::string(to_string(cc.sampling))},
              {"noise_sigma", cc.noise_sigma},
              {"seed", cc.seed}};
}

json reconstruct_json(const ReconstructConfig& rc) {
  return json{{"U", rc.upsample}, {"eps", rc.inverse_epsilon}, {"unguarded", rc.unguarded}};
}

void write_manifest(const fs::path& path, const std::vector<std::string>& args, json config,
                    const StageTimings& timings, const std::vector<std::string>& outputs,
                    const std::vector<std::string>& notes = {}) {
  json doc;
  doc["tool"] = "hyperlens";
  doc["version"] = std::string(kVersion);
  doc["command_line"] = join_args(args);
  doc["simd_backend"] = std::string(kernels::to_string(kernels::active_backend()));
  doc["config"] = std::move(config);
  json t = json::object();
  for (const auto& [stage, ms] : timings.ms) t[stage] = ms;
  doc["timings_ms"] = std::move(t);
  doc["outputs"] = outputs;
  doc["notes"] = notes;
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error(ErrorCode::IoError, "cannot write manifest " + path.string());
  os << doc.dump(2) << '\n';
}

fs::path manifest_path_for(const fs::path& output) {
  return fs::path(output.string() + ".manifest.json");
}

std::vector<std::string> diagnostics(const ImageGrid& diffracted, const CaptureConfig& cc) {
  std::vector<std::string> notes;
  if (cc.psf.kind == PsfKind::Airy) {
    const double pitch = rayleigh_pitch(cc.psf);
    notes.push_back("rayleigh_pitch=" + format_g(pitch) + " px (" +
                    format_g(pitch / static_cast<double>(cc.decimation)) + " sensor pitches)");
  }
  const double band = 1.0 / static_cast<double>(cc.decimation);
  notes.push_back("band_energy_fraction(diffracted, 1/D)=" +
                  format_g(band_energy_fraction(diffracted, band)));
  return notes;
}

CsvRow make_row(const std::string& scene, const char* pipeline, const CaptureConfig& cc,
                std::size_t upsample, double eps, const ImageGrid& reference,
                const ImageGrid& output, double peak) {
  const PsnrResult p = psnr(reference, clipped(output), peak);
  CsvRow row;
  row.scene = scene;
  row.pipeline = pipeline;
  row.decimation = cc.decimation;
  row.upsample = upsample;
  row.psf_kind = std::string(to_string(cc.psf.kind));
  row.psf_radius = cc.psf.radius;
  row.eps = eps;
  row.noise_sigma = cc.noise_sigma;
  row.seed = cc.seed;
  row.psnr = p.per_channel;
  row.psnr_pooled = p.pooled;
  row.mse_pooled = p.pooled_mse;
  return row;
}

void write_csv(const fs::path& path, const std::vector<CsvRow>& rows) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  os << csv_header() << '\n';
  for (const CsvRow& r : rows) os << format_csv_row(r) << '\n';
  os.flush();
  if (!os) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

// --- subcommands ----------------------------------------------------------

struct SceneCmd {
  std::string spec;
  std::string out;
  int bits = 16;
};

int cmd_scene(const SceneCmd& o, const std::vector<std::string>& args, std::ostream& out) {
  const auto start = Clock::now();
  const SceneSpec spec = parse_scene_spec(o.spec);
  const ImageGrid img = generate(spec);
  StageTimings t;
  t.ms["generate"] = elapsed_ms(start);
  io::write_image(o.out, img, o.bits);
  write_manifest(manifest_path_for(o.out), args, json{{"scene", spec.text}, {"bits", o.bits}}, t,
                 {o.out});
  out << "wrote " << o.out << " (" << img.height() << "x" << img.width() << ")\n";
  return kExitOk;
}

struct CaptureCmd {
  std::string in, out;
  CaptureFlags capture;
  int bits = 16;
};

int cmd_capture(const CaptureCmd& o, const std::vector<std::string>& args, std::ostream& out) {
  const CaptureConfig cc = o.capture.config();
  StageTimings t;
  auto start = Clock::now();
  const ImageGrid scene = io::read_image(o.in);
  t.ms["read"] = elapsed_ms(start);
  check_decimation(scene, cc.decimation);
  start = Clock::now();
  const ImageGrid blurred = diffract(scene, cc.psf);
  t.ms["diffract"] = elapsed_ms(start);
  start = Clock::now();
  const ImageGrid captured = sense(blurred, cc);
  t.ms["sense"] = elapsed_ms(start);
  io::write_image(o.out, captured, o.bits);
  write_manifest(manifest_path_for(o.out), args,
                 json{{"input", o.in}, {"capture", capture_json(cc)}, {"bits", o.bits}}, t,
                 {o.out}, diagnostics(blurred, cc));
  out << "wrote " << o.out << " (" << captured.height() << "x" << captured.width() << ")\n";
  return kExitOk;
}

struct ReconstructCmd {
  std::string in, out;
  CaptureFlags capture;
  std::optional<std::size_t> upsample;
  double eps = 1e-3;
  bool unguarded = false;
  bool stop_after_interpolation = false;
  int bits = 16;
};

int cmd_reconstruct(const ReconstructCmd& o, const std::vector<std::string>& args,
                    std::ostream& out) {
  const CaptureConfig cc = o.capture.config();
  ReconstructConfig rc;
  rc.upsample = o.upsample.value_or(cc.decimation);
  rc.inverse_epsilon = o.eps;
  rc.unguarded = o.unguarded;
  StageTimings t;
  auto start = Clock::now();
  const ImageGrid captured = io::read_image(o.in);
  t.ms["read"] = elapsed_ms(start);
  start = Clock::now();
  ImageGrid result = interpolate_fft(captured, rc.upsample);
  t.ms["interpolate"] = elapsed_ms(start);
  if (!o.stop_after_interpolation) {
    start = Clock::now();
    const Otf response = recovered_response(cc, rc.upsample, result.height(), result.width());
    result = inverse_filter(result, response, rc.inverse_epsilon, rc.unguarded);
    t.ms["inverse_filter"] = elapsed_ms(start);
  }
  io::write_image(o.out, result, o.bits);
  write_manifest(manifest_path_for(o.out), args,
                 json{{"input", o.in},
                      {"capture", capture_json(cc)},
                      {"reconstruct", reconstruct_json(rc)},
                      {"stop_after_interpolation", o.stop_after_interpolation},
                      {"bits", o.bits}},
                 t, {o.out});
  out << "wrote " << o.out << " (" << result.height() << "x" << result.width() << ")\n";
  return kExitOk;
}

struct CompareCmd {
  std::string scene = corpus()[2];
  CaptureFlags capture;
  std::optional<std::size_t> upsample;
  double eps = 1e-3;
  double peak = 1.0;
  std::string out_dir = ".";
  std::string csv;
  std::string image_format = "pgm";
  int bits = 16;
};

int cmd_compare(const CompareCmd& o, const std::vector<std::string>& args, std::ostream& out) {
  const CaptureConfig cc = o.capture.config();
  ReconstructConfig rc;
  rc.upsample = o.upsample.value_or(cc.decimation);
  rc.inverse_epsilon = o.eps;
  if (o.image_format != "pgm" && o.image_format != "pfm") {
    throw Error(ErrorCode::InvalidArgument, "image format must be pgm or pfm");
  }
  const SceneSpec spec = parse_scene_spec(o.scene);
  const CompareOutcome result = run_compare(spec, cc, rc, o.peak);

  const fs::path dir(o.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string());
  const std::string ext =
      o.image_format == "pfm" ? ".pfm" : (result.scene.channels() == 3 ? ".ppm" : ".pgm");
  const fs::path scene_path = dir / ("scene" + ext);
  const fs::path hyper_path = dir / ("hyperacuity" + ext);
  const fs::path base_path = dir / ("baseline" + ext);
  const fs::path csv_path = o.csv.empty() ? dir / "compare.csv" : fs::path(o.csv);
  io::write_image(scene_path, result.scene, o.bits);
  io::write_image(hyper_path, result.hyperacuity, o.bits);
  io::write_image(base_path, result.baseline, o.bits);
  write_csv(csv_path, {result.hyperacuity_row, result.baseline_row});
  write_manifest(dir / "manifest.json", args,
                 json{{"scene", spec.text},
                      {"capture", capture_json(cc)},
                      {"reconstruct", reconstruct_json(rc)},
                      {"peak", o.peak}},
                 result.timings,
                 {scene_path.string(), hyper_path.string(), base_path.string(), csv_path.string()},
                 result.notes);
  out << "hyperacuity psnr_pooled=" << format_psnr(result.hyperacuity_row.psnr_pooled)
      << " dB\nbaseline    psnr_pooled=" << format_psnr(result.baseline_row.psnr_pooled)
      << " dB\nwrote " << csv_path.string() << '\n';
  return kExitOk;
}

struct SweepCmd {
  std::string scenes;
  std::string pipelines = "hyperacuity";
  std::string decimations = "10";
  std::optional<std::string> upsamples;
  std::string psfs = "airy";
  std::string radii = "35";
  std::string eps = "1e-3";
  std::string noise = "0";
  std::string seeds = "0";
  std::string sampling = "point";
  double peak = 1.0;
  std::string out;
  std::optional<std::size_t> threads;
};

int cmd_sweep(const SweepCmd& o, const std::vector<std::string>& args, std::ostream& out,
              bool scenes_given) {
  SweepGrid grid;
  if (scenes_given) {
    grid.scenes = split(o.scenes, ';');
  } else {
    grid.scenes = corpus();
  }
  grid.pipelines = split(o.pipelines, ',');
  for (const std::string& p : grid.pipelines) {
    if (p != "hyperacuity" && p != "baseline") {
      throw Error(ErrorCode::ParseError, "unknown pipeline '" + p + "'");
    }
  }
  grid.decimations = parse_list<std::size_t>(o.decimations, "decimation");
  grid.upsample_follows_decimation = !o.upsamples.has_value();
  if (o.upsamples) grid.upsamples = parse_list<std::size_t>(*o.upsamples, "upsample");
  grid.psf_kinds = split(o.psfs, ',');
  for (const std::string& k : grid.psf_kinds) parse_psf_kind(k);
  grid.radii = parse_list<double>(o.radii, "radius");
  grid.eps = parse_list<double>(o.eps, "eps");
  grid.noise = parse_list<double>(o.noise, "noise");
  grid.seeds = parse_list<std::uint64_t>(o.seeds, "seed");
  grid.sampling = parse_sampling_mode(o.sampling);
  grid.peak = o.peak;

  const auto start = Clock::now();
  const std::vector<CsvRow> rows = run_sweep(grid, o.threads.value_or(thread_budget()));
  StageTimings t;
  t.ms["sweep"] = elapsed_ms(start);
  write_csv(o.out, rows);
  write_manifest(manifest_path_for(o.out), args,
                 json{{"scenes", grid.scenes},
                      {"pipelines", grid.pipelines},
                      {"D", grid.decimations},
                      {"U", grid.upsample_follows_decimation ? json("D") : json(grid.upsamples)},
                      {"psf_kinds", grid.psf_kinds},
                      {"radii", grid.radii},
                      {"eps", grid.eps},
                      {"noise_sigma", grid.noise},
                      {"seeds", grid.seeds},
                      {"sampling", std::string(to_string(grid.sampling))},
                      {"peak", grid.peak}},
                 t, {o.out});
  out << "wrote " << rows.size() << " rows to " << o.out << '\n';
  return kExitOk;
}

struct RadiometryCmd {
  std::string area = "1um2";
  double irradiance = 1.0;
  std::string exposure = "1ms";
  std::string wavelength = "550nm";
  double sat = 1e8;
  double min = 1.0;
  std::string cone_diameter = "1.5um";
  std::string pixel_area = "4.84um2";
  double density = 147000.0;
  double fovea_diameter = 1.5;
};

int cmd_radiometry(const RadiometryCmd& o, std::ostream& out) {
  radiometry::SensorSpec s;
  s.area = parse_quantity(o.area);
  s.irradiance = o.irradiance;
  s.exposure = parse_quantity(o.exposure);
  s.wavelength = parse_quantity(o.wavelength);
  s.sat_irradiation = o.sat;
  s.min_irradiation = o.min;
  const double photons = radiometry::photon_count(s);
  const radiometry::DynamicRange dr = radiometry::dynamic_range(s);
  const double cone_area = radiometry::circular_area(parse_quantity(o.cone_diameter));
  const double ratio = radiometry::area_ratio(cone_area, parse_quantity(o.pixel_area));
  const double cones = radiometry::fovea_cone_estimate(o.density, o.fovea_diameter);
  out << "photons=" << format_g(photons) << '\n'
      << "dr_ratio=" << format_g(dr.ratio) << '\n'
      << "dr_db=" << format_g(dr.db) << '\n'
      << "area_ratio=" << format_g(ratio) << '\n'
      << "cone_estimate=" << format_g(cones) << '\n'
      << "# photons: A*E*t*lambda/(h*c) with h=6.6260755e-34 J s, c=2.99792458e8 m/s\n"
      << "# dr_db: 20*log10(dr_ratio), the amplitude convention (10*log10 would halve it)\n"
      << "# area_ratio: pixel area " << o.pixel_area << " over the area of a circular cone of "
      << "diameter " << o.cone_diameter << " (" << format_g(cone_area * 1e12) << " um2)\n"
      << "# cone_estimate: " << format_g(o.density) << "/mm2 over a disc of diameter "
      << format_g(o.fovea_diameter) << " mm\n";
  return kExitOk;
}

struct PsfCmd {
  std::string psf = "airy";
  double radius = 35.0;
  double support = -1.0;
  std::size_t size = 0;
  std::size_t decimation = 10;
  std::string out;
};

int cmd_psf(const PsfCmd& o, const std::vector<std::string>& args, std::ostream& out) {
  const PsfKind kind = parse_psf_kind(o.psf);
  const PsfSpec spec = kind == PsfKind::Delta
                           ? PsfSpec::delta()
                           : PsfSpec{kind, o.radius,
                                     o.support < 0.0 ? default_support(kind, o.radius) : o.support};
  spec.validate();
  const std::size_t side =
      o.size > 0 ? o.size : 2 * static_cast<std::size_t>(std::floor(spec.support)) + 1;
  const ImageGrid kernel = make_psf(spec, side, side);
  // Re-centre the wrap-around layout and scale the peak to one for viewing.
  ImageGrid view(1, side, side);
  const double peak = kernel.at(0, 0, 0);
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      view.at(0, (r + side / 2) % side, (c + side / 2) % side) = kernel.at(0, r, c) / peak;
    }
  }
  if (!o.out.empty()) {
    io::write_image(o.out, view);
    write_manifest(manifest_path_for(o.out), args,
                   json{{"psf_kind", o.psf}, {"radius", spec.radius}, {"support", spec.support},
                        {"size", side}},
                   StageTimings{}, {o.out});
    out << "wrote " << o.out << " (" << side << "x" << side << ")\n";
  }
  if (kind == PsfKind::Airy) {
    const double pitch = rayleigh_pitch(spec);
    out << "rayleigh_pitch=" << format_g(pitch) << '\n'
        << "rayleigh_pitch_over_D=" << format_g(pitch / static_cast<double>(o.decimation)) << '\n';
  }
  return kExitOk;
}

std::vector<char*> to_argv(std::vector<std::string>& storage) {
  std::vector<char*> argv;
  for (std::string& s : storage) argv.push_back(s.data());
  return argv;
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::InvalidArgument:
      return kExitUsage;
    case ErrorCode::IoError:
      return kExitIo;
    default:
      return kExitDomain;
  }
}

std::string_view csv_header() {
  return "scene,pipeline,D,U,psf_kind,psf_radius,eps,noise_sigma,seed,psnr_r,psnr_g,psnr_b,"
         "psnr_pooled,mse_pooled";
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string format_psnr(double db) {
  if (std::isinf(db)) return db > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", db);
  return buf;
}

std::string format_csv_row(const CsvRow& row) {
  const double r = row.psnr.empty() ? 0.0 : row.psnr[0];
  const double g = row.psnr.size() >= 3 ? row.psnr[1] : r;
  const double b = row.psnr.size() >= 3 ? row.psnr[2] : r;
  char mse_buf[64];
  std::snprintf(mse_buf, sizeof mse_buf, "%.9e", row.mse_pooled);
  std::ostringstream os;
  os << csv_escape(row.scene) << ',' << row.pipeline << ',' << row.decimation << ','
     << row.upsample << ',' << row.psf_kind << ',' << format_g(row.psf_radius) << ','
     << format_g(row.eps) << ',' << format_g(row.noise_sigma) << ',' << row.seed << ','
     << format_psnr(r) << ',' << format_psnr(g) << ',' << format_psnr(b) << ','
     << format_psnr(row.psnr_pooled) << ',' << mse_buf;
  return os.str();
}

double parse_quantity(std::string_view text) {
  struct Suffix {
    std::string_view name;
    double scale;
  };
  // Longest suffixes first so "um2" wins over "m2" and "m".
  static constexpr Suffix suffixes[] = {
      {"um2", 1e-12}, {"mm2", 1e-6}, {"m2", 1.0}, {"us", 1e-6}, {"ms", 1e-3}, {"nm", 1e-9},
      {"um", 1e-6},   {"mm", 1e-3},  {"s", 1.0},  {"m", 1.0},
  };
  double scale = 1.0;
  std::string_view number = text;
  for (const Suffix& s : suffixes) {
    if (text.size() > s.name.size() && text.substr(text.size() - s.name.size()) == s.name) {
      scale = s.scale;
      number = text.substr(0, text.size() - s.name.size());
      break;
    }
  }
  return parse_number<double>(number, "quantity") * scale;
}

double default_support(PsfKind kind, double radius) {
  switch (kind) {
    case PsfKind::Airy: return 2.0 * radius;
    case PsfKind::Gaussian: return 8.0 * radius;
    case PsfKind::Delta: return 0.0;
  }
  return 0.0;
}

std::size_t thread_budget() {
  if (const char* env = std::getenv("HYPERLENS_THREADS")) {
    long v = 0;
    const std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size() && v >= 1) {
      return static_cast<std::size_t>(v);
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

CompareOutcome run_compare(const SceneSpec& spec, const CaptureConfig& cc,
                           const ReconstructConfig& rc, double peak) {
  StageTimings t;
  auto start = Clock::now();
  ImageGrid scene = generate(spec);
  t.ms["generate"] = elapsed_ms(start);
  check_decimation(scene, cc.decimation);

  start = Clock::now();
  const ImageGrid blurred = diffract(scene, cc.psf);
  t.ms["hyperacuity.diffract"] = elapsed_ms(start);
  start = Clock::now();
  const ImageGrid captured = sense(blurred, cc);
  t.ms["hyperacuity.sense"] = elapsed_ms(start);
  start = Clock::now();
  const ImageGrid upsampled = interpolate_fft(captured, rc.upsample);
  t.ms["hyperacuity.interpolate"] = elapsed_ms(start);
  start = Clock::now();
  const Otf response = recovered_response(cc, rc.upsample, upsampled.height(), upsampled.width());
  ImageGrid hyper = inverse_filter(upsampled, response, rc.inverse_epsilon, rc.unguarded);
  t.ms["hyperacuity.inverse_filter"] = elapsed_ms(start);

  start = Clock::now();
  const ImageGrid base_captured = sense(scene, cc);
  t.ms["baseline.sense"] = elapsed_ms(start);
  start = Clock::now();
  ImageGrid base = interpolate_fft(base_captured, rc.upsample);
  t.ms["baseline.interpolate"] = elapsed_ms(start);

  if (!hyper.same_shape(scene) || !base.same_shape(scene)) {
    throw Error(ErrorCode::DimensionMismatch,
                "recovered grid differs from the scene; comparisons need U == D");
  }
  CompareOutcome outcome{std::move(scene), std::move(hyper), std::move(base), {}, {}, t, {}};
  outcome.hyperacuity_row = make_row(spec.text, "hyperacuity", cc, rc.upsample,
                                     rc.inverse_epsilon, outcome.scene, outcome.hyperacuity, peak);
  outcome.baseline_row = make_row(spec.text, "baseline", cc, rc.upsample, rc.inverse_epsilon,
                                  outcome.scene, outcome.baseline, peak);
  outcome.notes = diagnostics(blurred, cc);
  return outcome;
}

std::size_t sweep_size(const SweepGrid& g) {
  const std::size_t u = g.upsample_follows_decimation ? 1 : g.upsamples.size();
  // Saturating product so absurd grids still report as too large.
  std::size_t total = 1;
  for (std::size_t n : {g.scenes.size(), g.pipelines.size(), g.decimations.size(), u,
                        g.psf_kinds.size(), g.radii.size(), g.eps.size(), g.noise.size(),
                        g.seeds.size()}) {
    if (n == 0) return 0;
    total = total > kMaxSweepRuns * 1000 ? total : total * n;
  }
  return total;
}

std::vector<CsvRow> run_sweep(const SweepGrid& g, std::size_t threads) {
  const std::size_t total = sweep_size(g);
  if (total > kMaxSweepRuns) {
    throw Error(ErrorCode::GridTooLarge, std::to_string(total) + " runs exceed the limit of " +
                                             std::to_string(kMaxSweepRuns));
  }
  if (total == 0) return {};

  std::vector<SceneSpec> specs;
  std::vector<ImageGrid> scenes;
  for (const std::string& s : g.scenes) {
    specs.push_back(parse_scene_spec(s));
    scenes.push_back(generate(specs.back()));
  }

  const std::vector<std::size_t> extents = {
      g.scenes.size(), g.pipelines.size(), g.decimations.size(),
      g.upsample_follows_decimation ? 1 : g.upsamples.size(),
      g.psf_kinds.size(), g.radii.size(), g.eps.size(), g.noise.size(), g.seeds.size()};

  auto run_cell = [&](std::size_t flat) {
    std::vector<std::size_t> idx(extents.size());
    for (std::size_t d = extents.size(); d-- > 0;) {
      idx[d] = flat % extents[d];
      flat /= extents[d];
    }
    CaptureConfig cc;
    cc.decimation = g.decimations[idx[2]];
    cc.sampling = g.sampling;
    cc.noise_sigma = g.noise[idx[7]];
    cc.seed = g.seeds[idx[8]];
    const PsfKind kind = parse_psf_kind(g.psf_kinds[idx[4]]);
    const double radius = g.radii[idx[5]];
    cc.psf = kind == PsfKind::Delta ? PsfSpec::delta()
                                    : PsfSpec{kind, radius, default_support(kind, radius)};
    if (kind == PsfKind::Delta) cc.psf.radius = radius;
    ReconstructConfig rc;
    rc.upsample = g.upsample_follows_decimation ? cc.decimation : g.upsamples[idx[3]];
    rc.inverse_epsilon = g.eps[idx[6]];
    const ImageGrid& scene = scenes[idx[0]];
    const bool hyper = g.pipelines[idx[1]] == "hyperacuity";
    const ImageGrid output =
        hyper ? run_hyperacuity(scene, cc, rc) : run_baseline(scene, cc, rc.upsample);
    if (!output.same_shape(scene)) {
      throw Error(ErrorCode::DimensionMismatch,
                  "recovered grid differs from the scene; sweeps need U == D");
    }
    return make_row(specs[idx[0]].text, hyper ? "hyperacuity" : "baseline", cc, rc.upsample,
                    rc.inverse_epsilon, scene, output, g.peak);
  };

  std::vector<std::optional<CsvRow>> rows(total);
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      try {
        rows[i] = run_cell(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(total);
        return;
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(threads, 1, total);
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<CsvRow> out;
  out.reserve(total);
  for (auto& r : rows) out.push_back(std::move(*r));
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Diffraction-enhanced acquisition simulator", "hyperlens"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  SceneCmd scene_o;
  auto* scene_cmd = app.add_subcommand("scene", "Render a procedural scene to an image file");
  scene_cmd->add_option("spec", scene_o.spec, "Scene spec, e.g. grid_lines,h=500,w=500,pitch=50")
      ->required();
  scene_cmd->add_option("-o,--out", scene_o.out, "Output image (.pgm, .ppm or .pfm)")->required();
  scene_cmd->add_option("--bits", scene_o.bits, "8 or 16 bit integer output")->capture_default_str();

  CaptureCmd cap_o;
  auto* cap_cmd = app.add_subcommand("capture", "Blur with the kernel and sample with the sensor");
  cap_cmd->add_option("-i,--in", cap_o.in, "High-resolution input image")->required();
  cap_cmd->add_option("-o,--out", cap_o.out, "Captured low-resolution image")->required();
  cap_o.capture.attach(cap_cmd, true);
  cap_cmd->add_option("--bits", cap_o.bits, "8 or 16 bit integer output")->capture_default_str();

  ReconstructCmd rec_o;
  auto* rec_cmd =
      app.add_subcommand("reconstruct", "Interpolate a captured image and undo the blur");
  rec_cmd->add_option("-i,--in", rec_o.in, "Captured low-resolution image")->required();
  rec_cmd->add_option("-o,--out", rec_o.out, "Recovered image")->required();
  rec_o.capture.attach(rec_cmd, false);
  rec_cmd->add_option("--U,--upsample", rec_o.upsample, "Interpolation factor (default D)");
  rec_cmd->add_option("--eps", rec_o.eps, "Relative |H| threshold of the inverse filter")
      ->capture_default_str();
  rec_cmd->add_flag("--unguarded", rec_o.unguarded,
                    "Divide by every non-zero |H| (unsafe, amplifies noise without bound)");
  rec_cmd->add_flag("--stop-after-interpolation", rec_o.stop_after_interpolation,
                    "Write the interpolated image without inverse filtering");
  rec_cmd->add_option("--bits", rec_o.bits, "8 or 16 bit integer output")->capture_default_str();

  CompareCmd cmp_o;
  auto* cmp_cmd = app.add_subcommand(
      "compare", "Run the hyperacuity and diffraction-free pipelines on one scene");
  cmp_cmd->add_option("--scene", cmp_o.scene, "Scene spec")->capture_default_str();
  cmp_o.capture.attach(cmp_cmd, true);
  cmp_cmd->add_option("--U,--upsample", cmp_o.upsample, "Interpolation factor (default D)");
  cmp_cmd->add_option("--eps", cmp_o.eps, "Relative |H| threshold of the inverse filter")
      ->capture_default_str();
  cmp_cmd->add_option("--peak", cmp_o.peak, "PSNR peak value")->capture_default_str();
  cmp_cmd->add_option("--out-dir", cmp_o.out_dir, "Directory for images, CSV and manifest")
      ->capture_default_str();
  cmp_cmd->add_option("--csv", cmp_o.csv, "CSV path (default <out-dir>/compare.csv)");
  cmp_cmd->add_option("--image-format", cmp_o.image_format, "pgm (pgm/ppm) or pfm")
      ->capture_default_str();
  cmp_cmd->add_option("--bits", cmp_o.bits, "8 or 16 bit integer output")->capture_default_str();

  SweepCmd sw_o;
  auto* sw_cmd = app.add_subcommand("sweep", "Evaluate a cartesian grid of settings to CSV");
  auto* scenes_opt = sw_cmd->add_option(
      "--scenes", sw_o.scenes, "Scene specs separated by ';' (default: the bundled corpus)");
  sw_cmd->add_option("--pipelines", sw_o.pipelines, "hyperacuity,baseline")->capture_default_str();
  sw_cmd->add_option("--D", sw_o.decimations, "Decimation factors")->capture_default_str();
  sw_cmd->add_option("--U", sw_o.upsamples, "Interpolation factors (default: follow D)");
  sw_cmd->add_option("--psf", sw_o.psfs, "Kernel kinds")->capture_default_str();
  sw_cmd->add_option("--radius", sw_o.radii, "Kernel radii")->capture_default_str();
  sw_cmd->add_option("--eps", sw_o.eps, "Inverse filter thresholds")->capture_default_str();
  sw_cmd->add_option("--noise", sw_o.noise, "Noise sigmas")->capture_default_str();
  sw_cmd->add_option("--seeds", sw_o.seeds, "Noise seeds")->capture_default_str();
  sw_cmd->add_option("--sampling", sw_o.sampling, "point or area")->capture_default_str();
  sw_cmd->add_option("--peak", sw_o.peak, "PSNR peak value")->capture_default_str();
  sw_cmd->add_option("--threads", sw_o.threads, "Worker threads (default HYPERLENS_THREADS)");
  sw_cmd->add_option("-o,--out", sw_o.out, "Output CSV")->required();

  RadiometryCmd rad_o;
  auto* rad_cmd = app.add_subcommand("radiometry", "Photon count and dynamic range report");
  rad_cmd->add_option("--area", rad_o.area, "Collecting area (e.g. 1um2)")->capture_default_str();
  rad_cmd->add_option("--irradiance", rad_o.irradiance, "W/m2")->capture_default_str();
  rad_cmd->add_option("--exposure", rad_o.exposure, "Exposure time (e.g. 1ms)")
      ->capture_default_str();
  rad_cmd->add_option("--wavelength", rad_o.wavelength, "Wavelength (e.g. 550nm)")
      ->capture_default_str();
  rad_cmd->add_option("--sat", rad_o.sat, "Saturation irradiation")->capture_default_str();
  rad_cmd->add_option("--min", rad_o.min, "Minimum detectable irradiation")->capture_default_str();
  rad_cmd->add_option("--cone-diameter", rad_o.cone_diameter, "Photoreceptor diameter")
      ->capture_default_str();
  rad_cmd->add_option("--pixel-area", rad_o.pixel_area, "Camera pixel area")
      ->capture_default_str();
  rad_cmd->add_option("--density", rad_o.density, "Cone density per mm2")->capture_default_str();
  rad_cmd->add_option("--fovea-diameter", rad_o.fovea_diameter, "Fovea diameter in mm")
      ->capture_default_str();

  PsfCmd psf_o;
  auto* psf_cmd = app.add_subcommand("psf", "Export a kernel image and its resolution limits");
  psf_cmd->add_option("--psf", psf_o.psf, "airy, gaussian or delta")->capture_default_str();
  psf_cmd->add_option("--radius", psf_o.radius, "Kernel radius in pixels")->capture_default_str();
  psf_cmd->add_option("--support", psf_o.support, "Truncation half-width");
  psf_cmd->add_option("--size", psf_o.size, "Output side length (default 2*support+1)");
  psf_cmd->add_option("--D,--decimation", psf_o.decimation, "Sensor pitch for the diagnostic")
      ->capture_default_str();
  psf_cmd->add_option("-o,--out", psf_o.out, "Output image");

  std::vector<std::string> storage = args;
  std::vector<char*> argv = to_argv(storage);
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*scene_cmd) return cmd_scene(scene_o, args, out);
    if (*cap_cmd) return cmd_capture(cap_o, args, out);
    if (*rec_cmd) return cmd_reconstruct(rec_o, args, out);
    if (*cmp_cmd) return cmd_compare(cmp_o, args, out);
    if (*sw_cmd) return cmd_sweep(sw_o, args, out, scenes_opt->count() > 0);
    if (*rad_cmd) return cmd_radiometry(rad_o, out);
    if (*psf_cmd) return cmd_psf(psf_o, args, out);
  } catch (const Error& e) {
    err << "hyperlens: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "hyperlens: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace hyperlens::app
