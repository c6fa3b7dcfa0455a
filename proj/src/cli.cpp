#include "infconv/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <sstream>
#include <vector>

#include "CLI11.hpp"

#include "infconv/error.hpp"
#include "infconv/io.hpp"
#include "infconv/measures.hpp"
#include "infconv/weights.hpp"

namespace infconv::cli {

namespace {

const char* experiment_name(Experiment e) { return e == Experiment::Denoise1D ? "denoise1d" : "denoise2d"; }

const char* phantom_name(testkit::PhantomKind k) {
  switch (k) {
    case testkit::PhantomKind::TwoMode1D: return "two_mode";
    case testkit::PhantomKind::Grid2D: return "grid";
    case testkit::PhantomKind::Diagonal2D: return "diagonal";
  }
  return "?";
}

Experiment parse_experiment(const std::string& v) {
  if (v == "denoise1d") return Experiment::Denoise1D;
  if (v == "denoise2d") return Experiment::Denoise2D;
  throw Error(ErrorCode::Usage, "unknown experiment '" + v + "' (expected denoise1d or denoise2d)");
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::Usage, key + ": expected a number, got '" + v + "'");
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::Usage, key + ": expected an integer, got '" + v + "'");
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw Error(ErrorCode::Usage, key + ": expected a boolean, got '" + v + "'");
}

nlohmann::json extended_json(const atoms::ExtendedReal& x) {
  if (x.is_infinite()) return "inf";
  return x.value();
}

double psnr_peak(const RunSpec& spec, const spectral::Field& clean) {
  if (spec.experiment == Experiment::Denoise2D) return 1.0;
  const auto [lo, hi] = std::minmax_element(clean.values.begin(), clean.values.end());
  return *hi > *lo ? *hi - *lo : 1.0;
}

void ensure_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::Io, "cannot create output directory '" + dir.string() + "'");
  }
}

// Least-squares slope of log r_k against log(k + 1) over k >= 1 with r_k > 0.
std::optional<double> loglog_slope(const std::vector<double>& r) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t k = 1; k < r.size(); ++k) {
    if (!(r[k] > 0.0)) continue;
    const double x = std::log(double(k + 1)), y = std::log(r[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) return std::nullopt;
  const double den = count * sxx - sx * sx;
  if (den == 0.0) return std::nullopt;
  return (count * sxy - sx * sy) / den;
}

struct Data {
  spectral::Field noisy;
  std::optional<spectral::Field> clean;
};

Data acquire(const RunSpec& spec) {
  if (spec.input) {
    Data d{io::read_field(*spec.input), std::nullopt};
    const int q = spec.experiment == Experiment::Denoise1D ? 1 : 2;
    if (d.noisy.grid.q != q) {
      throw Error(ErrorCode::Usage, std::string("input dimension does not match experiment ") + experiment_name(spec.experiment));
    }
    if (spec.clean) {
      d.clean = io::read_field(*spec.clean);
      if (!(d.clean->grid == d.noisy.grid)) throw Error(ErrorCode::GridMismatch, "clean reference and input differ in size");
    }
    return d;
  }
  testkit::Phantom ph;
  ph.kind = spec.phantom;
  ph.grid = spec.grid();
  ph.period = spec.period;
  ph.thickness = spec.thickness;
  ph.wave1 = spec.wave1;
  ph.wave2 = spec.wave2;
  spectral::Field clean = ph.render();
  spectral::Field noisy = testkit::add_gaussian_noise(clean, spec.noise_std, spec.seed);
  return {std::move(noisy), std::move(clean)};
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return 4;
    case ErrorCode::Usage:
    case ErrorCode::ConfigInvalid:
    case ErrorCode::InvalidGrid:
    case ErrorCode::ParamOutOfRange:
    case ErrorCode::GridTooSmall:
    case ErrorCode::BadPeriod:
    case ErrorCode::GridMismatch:
      return 2;
    default: return 3;
  }
}

}  // namespace

void RunSpec::validate() const {
  const int q = experiment == Experiment::Denoise1D ? 1 : 2;
  (void)spectral::Grid::make(q, n);
  const bool one_d_phantom = phantom == testkit::PhantomKind::TwoMode1D;
  if (!input && one_d_phantom != (q == 1)) {
    throw Error(ErrorCode::Usage, std::string("phantom '") + phantom_name(phantom) + "' does not fit experiment " +
                                      experiment_name(experiment));
  }
  if (init != "empty" && init != "cosine") throw Error(ErrorCode::Usage, "init must be empty or cosine");
  if (init == "cosine" && q != 1) throw Error(ErrorCode::Usage, "init = cosine is one-dimensional");
  if (clean && !input) throw Error(ErrorCode::Usage, "--clean needs --input");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) throw Error(ErrorCode::Usage, "noise_std must be >= 0");
  if (!(sigma_tol >= 0.0)) throw Error(ErrorCode::Usage, "sigma_tol must be >= 0");
  if (out.empty()) throw Error(ErrorCode::Usage, "output directory is empty");
  solver_config().validate();
}

spectral::Grid RunSpec::grid() const { return spectral::Grid::make(experiment == Experiment::Denoise1D ? 1 : 2, n); }

gcg::SolverConfig RunSpec::solver_config() const {
  gcg::SolverConfig cfg;
  cfg.alpha = alpha;
  cfg.family = experiment == Experiment::Denoise1D ? atoms::AtomFamily::adaptive_order(eta, s_min, 1.0)
                                                   : atoms::AtomFamily::adaptive_aniso(gamma, zeta, omega);
  cfg.max_iter = max_iter;
  cfg.stop_tol = stop_tol;
  cfg.prune_tol = prune_tol;
  cfg.search.n_starts = n_starts;
  cfg.search.coarse_grid = coarse_grid;
  cfg.search.cusp_candidates = cusp_candidates;
  cfg.search.local_tol = local_tol;
  cfg.search.seed = seed;
  if (init == "cosine") {
    const spectral::Grid g = grid();
    spectral::Field v0 = spectral::Field::zeros(g);
    for (std::size_t j = 0; j < v0.values.size(); ++j) {
      v0.values[j] = 3.0 * std::sqrt(2.0 / std::numbers::pi) * std::cos(3.0 * double(j) * g.spacing());
    }
    // Extremal atoms carry alpha J = 1, so weight alpha reproduces v0 / J(v0, 1).
    cfg.initial.push_back({spectral::forward(v0), 1.0, alpha});
  }
  return cfg;
}

nlohmann::json RunSpec::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment_name(experiment);
  j["n"] = n;
  j["phantom"] = input ? nlohmann::json(nullptr) : nlohmann::json(phantom_name(phantom));
  j["period"] = period;
  j["thickness"] = thickness;
  j["wave1"] = wave1;
  j["wave2"] = wave2;
  j["noise_std"] = noise_std;
  j["seed"] = seed;
  j["alpha"] = alpha;
  if (experiment == Experiment::Denoise1D) {
    j["eta"] = eta;
    j["s_min"] = s_min;
  } else {
    j["gamma"] = gamma;
    j["zeta"] = zeta;
    j["omega"] = omega;
  }
  j["max_iter"] = max_iter;
  j["n_starts"] = n_starts;
  j["coarse_grid"] = coarse_grid;
  j["cusp_candidates"] = cusp_candidates;
  j["local_tol"] = local_tol;
  j["stop_tol"] = stop_tol;
  j["prune_tol"] = prune_tol;
  j["sigma_tol"] = sigma_tol;
  j["init"] = init;
  const gcg::SolverConfig cfg;
  j["dedup_s_tol"] = cfg.dedup_s_tol;
  j["dedup_v_tol"] = cfg.dedup_v_tol;
  j["nnls_tol"] = cfg.nnls_tol;
  j["input"] = input ? nlohmann::json(input->string()) : nlohmann::json(nullptr);
  j["clean"] = clean ? nlohmann::json(clean->string()) : nlohmann::json(nullptr);
  j["out"] = out.string();
  j["noise_rng"] = "mt19937_64, 53-bit uniforms, Box-Muller (cos, sin)";
  return j;
}

RunSpec defaults(Experiment experiment) {
  RunSpec s;
  s.experiment = experiment;
  if (experiment == Experiment::Denoise2D) {
    s.n = 64;
    s.phantom = testkit::PhantomKind::Grid2D;
    s.noise_std = 0.3;
    s.alpha = 5.5;
    s.gamma = 0.25;
    s.zeta = 1e-3;
    s.omega = 1e-3;
    s.max_iter = 100;
  }
  return s;
}

void apply_setting(RunSpec& spec, const std::string& key, const std::string& value) {
  auto as_int = [&](int lo) {
    const long long x = parse_int(key, value);
    if (x < lo || x > 1'000'000'000) throw Error(ErrorCode::Usage, key + " out of range: " + value);
    return int(x);
  };
  if (key == "experiment") {
    if (parse_experiment(value) != spec.experiment) throw Error(ErrorCode::Usage, "experiment cannot change here");
  } else if (key == "n") spec.n = as_int(0);
  else if (key == "phantom") {
    if (value == "two_mode" || value == "two-mode") spec.phantom = testkit::PhantomKind::TwoMode1D;
    else if (value == "grid") spec.phantom = testkit::PhantomKind::Grid2D;
    else if (value == "diagonal") spec.phantom = testkit::PhantomKind::Diagonal2D;
    else throw Error(ErrorCode::Usage, "unknown phantom '" + value + "' (two_mode, grid, diagonal)");
  } else if (key == "period") spec.period = as_int(1);
  else if (key == "thickness") spec.thickness = as_int(0);
  else if (key == "wave1") spec.wave1 = int(parse_int(key, value));
  else if (key == "wave2") spec.wave2 = int(parse_int(key, value));
  else if (key == "noise_std") spec.noise_std = parse_double(key, value);
  else if (key == "seed") {
    const long long x = parse_int(key, value);
    if (x < 0) throw Error(ErrorCode::Usage, "seed must be >= 0");
    spec.seed = std::uint64_t(x);
  } else if (key == "alpha") spec.alpha = parse_double(key, value);
  else if (key == "eta") spec.eta = parse_double(key, value);
  else if (key == "s_min") spec.s_min = parse_double(key, value);
  else if (key == "gamma") spec.gamma = parse_double(key, value);
  else if (key == "zeta") spec.zeta = parse_double(key, value);
  else if (key == "omega") spec.omega = parse_double(key, value);
  else if (key == "max_iter") spec.max_iter = as_int(1);
  else if (key == "n_starts") spec.n_starts = as_int(1);
  else if (key == "coarse_grid") spec.coarse_grid = as_int(2);
  else if (key == "cusp_candidates") spec.cusp_candidates = int(parse_int(key, value));
  else if (key == "local_tol") spec.local_tol = parse_double(key, value);
  else if (key == "stop_tol") spec.stop_tol = parse_double(key, value);
  else if (key == "prune_tol") spec.prune_tol = parse_double(key, value);
  else if (key == "sigma_tol") spec.sigma_tol = parse_double(key, value);
  else if (key == "init") spec.init = value;
  else if (key == "input") spec.input = value;
  else if (key == "clean") spec.clean = value;
  else if (key == "out") spec.out = value;
  else if (key == "quiet") spec.quiet = parse_bool(key, value);
  else throw Error(ErrorCode::Usage, "unknown setting '" + key + "'");
}

RunSpec resolve(const std::map<std::string, std::string>& config, const std::map<std::string, std::string>& flags) {
  Experiment e = Experiment::Denoise1D;
  if (auto it = flags.find("experiment"); it != flags.end()) e = parse_experiment(it->second);
  else if (auto jt = config.find("experiment"); jt != config.end()) e = parse_experiment(jt->second);
  RunSpec spec = defaults(e);
  for (const auto& [k, v] : config) apply_setting(spec, k, v);
  for (const auto& [k, v] : flags) apply_setting(spec, k, v);
  spec.validate();
  return spec;
}

void cmd_phantom(const RunSpec& spec) {
  spec.validate();
  if (spec.input) throw Error(ErrorCode::Usage, "phantom does not take --input");
  const Data d = acquire(spec);
  ensure_out_dir(spec.out);
  io::write_field(spec.out / "clean", *d.clean);
  io::write_field(spec.out / "noisy", d.noisy);
  nlohmann::json manifest;
  manifest["command"] = "phantom";
  manifest["config"] = spec.to_json();
  io::write_text(spec.out / "manifest.json", manifest.dump(2) + "\n");
}

DenoiseReport cmd_denoise(const RunSpec& spec, std::ostream& log) {
  spec.validate();
  const Data d = acquire(spec);
  ensure_out_dir(spec.out);
  const gcg::SolverConfig cfg = spec.solver_config();

  const auto t0 = std::chrono::steady_clock::now();
  gcg::IterationLog on_iter;
  if (!spec.quiet) {
    on_iter = [&log](const gcg::IterationRecord& r) {
      char line[200];
      std::snprintf(line, sizeof line, "iter %3d  E=%.10e  dual=%.6f  s=%s  atoms=%d  %.3fs\n", r.k, r.energy, r.dual,
                    r.s_inserted ? io::format_double(*r.s_inserted).c_str() : "-", r.atom_count, r.seconds);
      log << line << std::flush;
    };
  }
  DenoiseReport report{gcg::run(d.noisy, cfg, on_iter), {}};
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const gcg::GcgState& st = report.run.state;

  const spectral::Field recon = st.reconstruction_with_mean();
  const measures::SparseMeasure mu = measures::from_state(st, d.noisy.grid);
  const measures::SigmaSupport sigma = measures::collapse_sigma(mu, spec.sigma_tol);
  const double final_energy = st.history.records.back().energy;
  const std::vector<double> r = gcg::approx_residual_series(st.history, final_energy);

  if (d.clean) io::write_field(spec.out / "clean", *d.clean);
  io::write_field(spec.out / "noisy", d.noisy);
  io::write_field(spec.out / "reconstruction", recon);

  std::ostringstream sig;
  sig << "s,mass\n";
  for (const auto& p : sigma.points) sig << io::format_double(p.s) << ',' << io::format_double(p.mass) << '\n';
  io::write_text(spec.out / "sigma.csv", sig.str());

  std::ostringstream res;
  res << "k,energy,residual,dual,s_inserted,atoms\n";
  for (std::size_t i = 0; i < st.history.records.size(); ++i) {
    const auto& rec = st.history.records[i];
    res << rec.k << ',' << io::format_double(rec.energy) << ',' << io::format_double(r[i]) << ','
        << io::format_double(rec.dual) << ',' << (rec.s_inserted ? io::format_double(*rec.s_inserted) : "") << ','
        << rec.atom_count << '\n';
  }
  io::write_text(spec.out / "residual.csv", res.str());
  io::write_text(spec.out / "measure.json", measures::to_json(mu).dump(2) + "\n");

  nlohmann::json m;
  m["command"] = "denoise";
  m["config"] = spec.to_json();
  m["termination_reason"] = gcg::to_string(report.run.reason);
  m["iterations"] = report.run.iterations;
  m["final_k"] = st.k;
  m["final_energy"] = final_energy;
  m["final_dual"] = st.history.records.back().dual;
  m["atom_count"] = st.atoms.size();
  m["support_size"] = sigma.points.size();
  m["sigma_total_mass"] = sigma.total_mass();
  m["rate_constant"] = gcg::rate_constant(r);
  m["residual_first"] = r.size() > 1 ? r[1] : 0.0;
  const auto slope = loglog_slope(r);
  m["loglog_slope"] = slope ? nlohmann::json(*slope) : nlohmann::json(nullptr);
  m["data_mean"] = st.data_mean;
  if (d.clean) {
    const double peak = psnr_peak(spec, *d.clean);
    m["psnr_peak"] = peak;
    m["psnr_noisy"] = extended_json(testkit::psnr(*d.clean, d.noisy, peak));
    m["psnr_reconstruction"] = extended_json(testkit::psnr(*d.clean, recon, peak));
  }
  io::write_text(spec.out / "manifest.json", m.dump(2) + "\n");
  report.manifest = std::move(m);

  if (!spec.quiet) {
    log << "done: " << gcg::to_string(report.run.reason) << " after " << report.run.iterations << " iterations, "
        << st.atoms.size() << " atoms, " << seconds << "s\n";
  }
  return report;
}

nlohmann::json cmd_metrics(const std::filesystem::path& reference, const std::filesystem::path& test, double peak) {
  const spectral::Field a = io::read_field(reference);
  const spectral::Field b = io::read_field(test);
  if (!(a.grid == b.grid)) throw Error(ErrorCode::GridMismatch, "reference and test differ in size");
  nlohmann::json j;
  j["mse"] = testkit::mse(a, b);
  j["l2_error"] = testkit::l2_error(a, b);
  j["peak"] = peak;
  j["psnr"] = extended_json(testkit::psnr(a, b, peak));
  return j;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Denoising with infinite infimal convolutions of spectral seminorms"};
  app.require_subcommand(1);

  // Run options are collected as strings so that only explicitly given flags
  // override the config file.
  struct RunOpts {
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> opts;
    std::string config;
    bool quiet = false;
    CLI::Option* quiet_opt = nullptr;
  };
  auto add_run_options = [](CLI::App* sub, RunOpts& o) {
    const std::vector<std::pair<std::string, std::string>> names = {
        {"experiment", "denoise1d | denoise2d"},
        {"n", "grid points per axis (even, >= 8)"},
        {"alpha", "regularization weight"},
        {"eta", "1D: exponent of the s^-2eta factor"},
        {"s-min", "1D: smallest order"},
        {"gamma", "2D: weight exponent"},
        {"zeta", "2D: isotropic part"},
        {"omega", "2D: offset"},
        {"noise-std", "Gaussian noise standard deviation"},
        {"seed", "noise and search seed"},
        {"max-iter", "iteration cap"},
        {"phantom", "two_mode | grid | diagonal"},
        {"period", "grid phantom period"},
        {"thickness", "grid phantom line thickness"},
        {"wave1", "diagonal phantom wave number, first axis"},
        {"wave2", "diagonal phantom wave number, second axis"},
        {"n-starts", "local refinements in the parameter search"},
        {"coarse-grid", "coarse samples in the parameter search"},
        {"cusp-candidates", "2D: extra samples at cusp directions (-1: coarse-grid)"},
        {"local-tol", "golden-section tolerance"},
        {"stop-tol", "dual value slack for stopping"},
        {"prune-tol", "drop atoms with weight <= this"},
        {"sigma-tol", "parameter gap merged into one support point"},
        {"init", "empty | cosine (1D)"},
        {"input", "noisy data (.csv 1D, .f64 2D) instead of a phantom"},
        {"clean", "clean reference for PSNR with --input"},
        {"out", "output directory"},
    };
    for (const auto& [name, help] : names) {
      std::string key = name;
      std::replace(key.begin(), key.end(), '-', '_');
      o.opts[key] = sub->add_option("--" + name, o.values[key], help);
    }
    sub->add_option("--config", o.config, "flat key = value file");
    o.quiet_opt = sub->add_flag("--quiet", o.quiet, "no progress on stderr");
  };

  RunOpts phantom_opts, denoise_opts;
  CLI::App* phantom = app.add_subcommand("phantom", "write a clean and a noisy test signal");
  add_run_options(phantom, phantom_opts);
  CLI::App* denoise = app.add_subcommand("denoise", "run the solver");
  add_run_options(denoise, denoise_opts);

  std::string ref_path, test_path;
  double peak = 1.0;
  CLI::App* metrics = app.add_subcommand("metrics", "PSNR and L2 error between two fields, as JSON");
  metrics->add_option("--reference", ref_path, "reference field")->required();
  metrics->add_option("--test", test_path, "test field")->required();
  metrics->add_option("--peak", peak, "PSNR peak value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  auto resolve_opts = [](const RunOpts& o) {
    std::map<std::string, std::string> flags;
    for (const auto& [key, opt] : o.opts) {
      if (opt->count() > 0) flags[key] = o.values.at(key);
    }
    if (o.quiet_opt->count() > 0) flags["quiet"] = "true";
    std::map<std::string, std::string> config;
    if (!o.config.empty()) config = io::read_config(o.config);
    return resolve(config, flags);
  };

  try {
    if (phantom->parsed()) {
      cmd_phantom(resolve_opts(phantom_opts));
    } else if (denoise->parsed()) {
      cmd_denoise(resolve_opts(denoise_opts), err);
    } else if (metrics->parsed()) {
      out << cmd_metrics(ref_path, test_path, peak).dump(2) << '\n';
    }
  } catch (const weights::NnlsNotConverged& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace infconv::cli
