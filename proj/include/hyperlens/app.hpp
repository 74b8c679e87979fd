#pragma once

// Command-line front end. Everything here is callable in-process so the
// tests can drive the same code paths as the hyperlens binary.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hyperlens/error.hpp"
#include "hyperlens/grid.hpp"
#include "hyperlens/pipeline.hpp"
#include "hyperlens/scenes.hpp"

namespace hyperlens::app {

inline constexpr std::string_view kVersion = "1.0.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitIo = 3;

int exit_code_for(ErrorCode code) noexcept;

/// Runs the CLI with argv-style arguments (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// --- reporting -------------------------------------------------------------

struct CsvRow {
  std::string scene;
  std::string pipeline;  // "hyperacuity" or "baseline"
  std::size_t decimation = 10;
  std::size_t upsample = 10;
  std::string psf_kind;
  double psf_radius = 0.0;
  double eps = 0.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> psnr;  // per channel; gray images fill r, g and b alike
  double psnr_pooled = 0.0;
  double mse_pooled = 0.0;
};

/// scene,pipeline,D,U,psf_kind,psf_radius,eps,noise_sigma,seed,psnr_r,psnr_g,psnr_b,psnr_pooled,mse_pooled
std::string_view csv_header();
std::string format_csv_row(const CsvRow& row);
/// RFC 4180 quoting when the field holds a comma, quote or newline.
std::string csv_escape(std::string_view field);
/// PSNR with six decimals, "inf" for the infinite sentinel.
std::string format_psnr(double db);

/// Parses "<number>[suffix]". Recognized suffixes scale to SI: area um2,
/// mm2, m2; time us, ms, s; length nm, um, mm, m. A bare number is taken as
/// already in SI.
double parse_quantity(std::string_view text);

// --- pipelines as driven by the CLI ---------------------------------------

struct StageTimings {
  std::map<std::string, double> ms;
};

struct CompareOutcome {
  ImageGrid scene;
  ImageGrid hyperacuity;
  ImageGrid baseline;
  CsvRow hyperacuity_row;
  CsvRow baseline_row;
  StageTimings timings;
  std::vector<std::string> notes;
};

CompareOutcome run_compare(const SceneSpec& scene, const CaptureConfig& cc,
                           const ReconstructConfig& rc, double peak = 1.0);

struct SweepGrid {
  std::vector<std::string> scenes;
  std::vector<std::string> pipelines;
  std::vector<std::size_t> decimations;
  std::vector<std::size_t> upsamples;  // ignored when upsample_follows_decimation
  std::vector<std::string> psf_kinds;
  std::vector<double> radii;
  std::vector<double> eps;
  std::vector<double> noise;
  std::vector<std::uint64_t> seeds;
  SamplingMode sampling = SamplingMode::Point;
  bool upsample_follows_decimation = false;
  double peak = 1.0;
};

inline constexpr std::size_t kMaxSweepRuns = 10000;

/// Number of combinations (GridTooLarge above kMaxSweepRuns is raised by
/// run_sweep, not here).
std::size_t sweep_size(const SweepGrid& grid);

/// One row per combination, ordered lexicographically over the grid
/// dimensions (scene, pipeline, D, U, psf_kind, radius, eps, noise, seed)
/// whatever the completion order of the worker threads.
std::vector<CsvRow> run_sweep(const SweepGrid& grid, std::size_t threads);

/// Worker count: HYPERLENS_THREADS when set (>= 1), else the hardware
/// concurrency.
std::size_t thread_budget();

/// Default truncation half-width for a kernel kind and radius.
double default_support(PsfKind kind, double radius);

}  // namespace hyperlens::app
