#pragma once

// Command-line front end: phantom generation, denoising runs and metrics.
//
// Settings resolve in three layers: experiment defaults, then a flat
// key = value config file, then command-line flags.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"

#include "infconv/gcg.hpp"
#include "infconv/spectral.hpp"
#include "infconv/testkit.hpp"

namespace infconv::cli {

enum class Experiment { Denoise1D, Denoise2D };

struct RunSpec {
  Experiment experiment = Experiment::Denoise1D;
  int n = 256;

  // phantom
  testkit::PhantomKind phantom = testkit::PhantomKind::TwoMode1D;
  int period = 16;
  int thickness = 2;
  int wave1 = 4;
  int wave2 = 4;
  double noise_std = 0.07;
  std::uint64_t seed = 0;

  // solver
  double alpha = 1.5e-3;
  double eta = 2.0;
  double s_min = 1e-3;
  double gamma = 0.25;
  double zeta = 1e-3;
  double omega = 1e-3;
  int max_iter = 200;
  int n_starts = 16;
  int coarse_grid = 64;
  int cusp_candidates = -1;
  double local_tol = 1e-6;
  double stop_tol = 1e-9;
  double prune_tol = 0.0;
  double sigma_tol = 1e-6;  // parameter gap merged into one sigma support point
  // "empty", or "cosine" (1D): start from 3 sqrt(2/pi) cos(3x) at s = 1 with
  // initial iterate v0 / J(v0, 1)
  std::string init = "empty";

  // files
  std::optional<std::filesystem::path> input;  // noisy data; replaces the phantom
  std::optional<std::filesystem::path> clean;  // reference for PSNR when `input` is set
  std::filesystem::path out = "out";
  bool quiet = false;

  // Throws Usage / ConfigInvalid.
  void validate() const;
  gcg::SolverConfig solver_config() const;
  spectral::Grid grid() const;
  nlohmann::json to_json() const;
};

RunSpec defaults(Experiment experiment);

// Sets one knob from its textual value. Keys use '_' ("noise_std"). Throws Usage.
void apply_setting(RunSpec& spec, const std::string& key, const std::string& value);

// defaults(experiment) <- config entries <- flag entries. The experiment itself
// is taken from the flags, else the config, else denoise1d.
RunSpec resolve(const std::map<std::string, std::string>& config, const std::map<std::string, std::string>& flags);

struct DenoiseReport {
  gcg::RunResult run;
  nlohmann::json manifest;
};

// Writes clean/noisy fields into spec.out.
void cmd_phantom(const RunSpec& spec);
// Writes noisy[/clean]/reconstruction fields, sigma.csv, residual.csv,
// measure.json and manifest.json into spec.out. Progress goes to `log`.
DenoiseReport cmd_denoise(const RunSpec& spec, std::ostream& log);
// { "mse", "l2_error", "peak", "psnr" } with psnr = "inf" for identical fields.
nlohmann::json cmd_metrics(const std::filesystem::path& reference, const std::filesystem::path& test, double peak);

// Exit codes: 0 success, 2 usage, 3 solver failure, 4 IO.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace infconv::cli
