// Acceptance criteria A1-A9. One PASS/FAIL line per criterion; exit status 1
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "infconv/cli.hpp"
#include "infconv/gcg.hpp"
#include "infconv/insertion.hpp"
#include "infconv/measures.hpp"
#include "infconv/testkit.hpp"
#include "infconv/weights.hpp"
#include "oracles.hpp"

using namespace infconv;
using atoms::AtomFamily;
using spectral::Field;
using spectral::Grid;
using spectral::Spectrum;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(const char* id, bool ok, const std::string& detail, Clock::time_point t0) {
  const double sec = std::chrono::duration<double>(Clock::now() - t0).count();
  std::printf("%s %s  %s  [%.1fs]\n", id, ok ? "PASS" : "FAIL", detail.c_str(), sec);
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Run {
  std::string name;
  Field clean, noisy;
  gcg::SolverConfig cfg;
  gcg::RunResult result;
  measures::SigmaSupport sigma;
};

Run solve(const std::string& name, const Field& clean, const Field& noisy, const gcg::SolverConfig& cfg) {
  Run r{name, clean, noisy, cfg, gcg::run(noisy, cfg), {}};
  r.sigma = measures::collapse_sigma(measures::from_state(r.result.state, noisy.grid), 1e-6);
  return r;
}

Run cli_run(cli::RunSpec spec, const std::string& name) {
  testkit::Phantom ph;
  ph.kind = spec.phantom;
  ph.grid = spec.grid();
  ph.period = spec.period;
  ph.thickness = spec.thickness;
  const Field clean = ph.render();
  return solve(name, clean, testkit::add_gaussian_noise(clean, spec.noise_std, spec.seed), spec.solver_config());
}

// Final residual spectrum p = f_hat - v_hat (mean-free for the 1D family).
Spectrum final_residual(const Run& r) {
  Spectrum p = gcg::prepared_data(r.noisy, r.cfg);
  spectral::axpy(-1.0, r.result.state.v_hat, p);
  return p;
}

double angle_distance(double s) {
  return std::min({std::abs(s), std::abs(s - oracle::kPi / 2), std::abs(s - oracle::kPi)});
}

// Residual mixing a few strong random modes with weaker broadband noise, so
// that the dual has interior maxima.
Spectrum structured_residual(const AtomFamily& fam, const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Spectrum w = spectral::forward(oracle::random_field(g, rng, 0.05));
  std::uniform_int_distribution<int> mode(-g.n / 2 + 1, g.n / 2 - 1);
  for (int t = 0; t < 3; ++t) {
    spectral::Frequency m{mode(rng), g.q == 2 ? mode(rng) : 0};
    if (m == spectral::Frequency{0, 0}) continue;
    const spectral::Complex c(nd(rng), nd(rng));
    w.at(m) += c;
    w.at({-m[0], -m[1]}) += std::conj(c);
  }
  if (fam.zero_mean()) w.coeffs[0] = 0.0;
  return w;
}

Spectrum random_hermitian(const Grid& g, std::mt19937_64& rng, const std::vector<double>& scale) {
  std::normal_distribution<double> nd;
  Spectrum u = Spectrum::zeros(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t j = g.partner(i);
    if (j < i) continue;
    if (j == i) {
      u.coeffs[i] = nd(rng) * scale[i];
    } else {
      u.coeffs[i] = spectral::Complex(nd(rng), nd(rng)) * scale[i];
      u.coeffs[j] = std::conj(u.coeffs[i]);
    }
  }
  return u;
}

}  // namespace

int main() {
  std::printf("acceptance: criteria A1-A9\n");

  // A1 --------------------------------------------------------------------
  std::vector<Run> a1_runs;
  {
    const auto t0 = Clock::now();
    double gain_sum = 0.0, min_frac = 1.0;
    bool frac_ok = true;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      cli::RunSpec spec = cli::defaults(cli::Experiment::Denoise1D);
      spec.seed = seed;
      spec.max_iter = 5000;
      Run r = cli_run(spec, "A1 seed " + std::to_string(seed));
      const Field recon = r.result.state.reconstruction_with_mean();
      const Spectrum rh = spectral::forward(recon);
      double total = 0.0, modes = 0.0;
      for (std::size_t i = 0; i < rh.coeffs.size(); ++i) {
        const double e = std::norm(rh.coeffs[i]);
        total += e;
        const int m = std::abs(rh.grid.frequency(i)[0]);
        if (m == 3 || m == 20) modes += e;
      }
      const double frac = modes / total;
      const auto [lo, hi] = std::minmax_element(r.clean.values.begin(), r.clean.values.end());
      const double peak = *hi - *lo;
      const double p_noisy = testkit::psnr(r.clean, r.noisy, peak).value();
      const double p_rec = testkit::psnr(r.clean, recon, peak).value();
      std::printf("  seed %llu: %s after %d iterations, energy fraction %.4f, PSNR noisy %.2f dB, reconstruction %.2f dB\n",
                  (unsigned long long)seed, gcg::to_string(r.result.reason), r.result.iterations, frac, p_noisy, p_rec);
      frac_ok = frac_ok && frac >= 0.9;
      min_frac = std::min(min_frac, frac);
      gain_sum += p_rec - p_noisy;
      a1_runs.push_back(std::move(r));
    }
    const double gain = gain_sum / 5;
    report("A1", frac_ok && gain >= 3.0,
           fmt("min mode-energy fraction %.4f (>= 0.9), mean PSNR gain %.2f dB (>= 3)", min_frac, gain), t0);
  }

  // A2 --------------------------------------------------------------------
  std::vector<Run> a2_runs;
  {
    const auto t0 = Clock::now();
    Run r = cli_run(cli::defaults(cli::Experiment::Denoise2D), "A2");
    double near = 0.0;
    for (const auto& p : r.sigma.points)
      if (angle_distance(p.s) <= 0.15) near += p.mass;
    const double frac = near / r.sigma.total_mass();
    const double gain = testkit::psnr(r.clean, r.result.state.reconstruction(), 1.0).value() -
                        testkit::psnr(r.clean, r.noisy, 1.0).value();
    std::printf("  %s after %d iterations, final dual %.6f, %zu atoms, %zu support points\n",
                gcg::to_string(r.result.reason), r.result.iterations, r.result.state.history.records.back().dual,
                r.result.state.atoms.size(), r.sigma.points.size());
    report("A2", frac >= 0.7 && gain >= 4.0,
           fmt("sigma mass near {0, pi/2, pi}: %.4f (>= 0.7), PSNR gain %.2f dB (>= 4)", frac, gain), t0);
    a2_runs.push_back(std::move(r));
  }

  // A3 --------------------------------------------------------------------
  {
    const auto t0 = Clock::now();
    bool ok = true;
    std::string worst;
    double worst_ratio = 0.0;
    std::vector<const Run*> runs;
    for (const auto& r : a1_runs) runs.push_back(&r);
    for (const auto& r : a2_runs) runs.push_back(&r);
    for (const Run* r : runs) {
      const auto& hist = r->result.state.history;
      const auto res = gcg::approx_residual_series(hist, hist.records.back().energy);
      bool mono = true;
      for (std::size_t k = 1; k < res.size(); ++k) mono = mono && res[k] <= res[k - 1] + 1e-10;
      const double c = gcg::rate_constant(res);
      const double r1 = res.size() > 1 ? res[1] : 0.0;
      const bool bounded = c <= 10.0 * r1 * 2.0;
      std::printf("  %s: non-increasing %s, C = max r_k (k+1) = %.6g, r_1 = %.6g, ratio %.3f\n", r->name.c_str(),
                  mono ? "yes" : "no", c, r1, r1 > 0 ? c / r1 : 0.0);
      ok = ok && mono && bounded;
      if (r1 > 0 && c / r1 > worst_ratio) {
        worst_ratio = c / r1;
        worst = r->name;
      }
    }
    report("A3", ok, fmt("largest C / r_1 = %.3f on %s (<= 20)", worst_ratio, worst.c_str()), t0);
  }

  // A4 --------------------------------------------------------------------
  {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_margin = 1e300, worst_match = 0.0;
    long probes = 0;
    for (const AtomFamily& fam : {AtomFamily::adaptive_order(2.0), AtomFamily::adaptive_aniso(0.25, 1e-3, 1e-3)}) {
      const Grid g = Grid::make(fam.dimension(), fam.dimension() == 1 ? 64 : 16);
      std::vector<double> radius(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) {
        const auto m = g.frequency(i);
        radius[i] = std::log1p(std::hypot(double(m[0]), double(m[1])));
      }
      for (int t = 0; t < 50; ++t) {
        const Spectrum w = structured_residual(fam, g, rng);
        const double s = fam.s_lo() + u(rng) * (fam.s_hi() - fam.s_lo());
        const double alpha = std::pow(10.0, -3 + 3 * u(rng));
        const insertion::Insertion ins = insertion::inner_maximizer(fam, w, s, alpha);
        const double recomputed = spectral::inner(w, ins.atom.spec);
        worst_match = std::max(worst_match, std::abs(recomputed - ins.dual_value) / std::abs(ins.dual_value));

        std::vector<double> f(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) f[i] = oracle::stored_weight(fam, s, g, i);
        std::vector<double> scale(g.size());
        for (int p = 0; p < 10000; ++p) {
          const double tilt = -2.0 + 4.0 * u(rng);
          for (std::size_t i = 0; i < g.size(); ++i) scale[i] = std::isinf(f[i]) ? 0.0 : std::exp(tilt * radius[i]);
          const Spectrum v = random_hermitian(g, rng, scale);
          double j2 = 0.0, dot = 0.0;
          for (std::size_t i = 0; i < g.size(); ++i) {
            if (scale[i] == 0.0) continue;
            j2 += f[i] * std::norm(v.coeffs[i]);
            dot += (w.coeffs[i] * std::conj(v.coeffs[i])).real();
          }
          // value of the probe rescaled onto the sphere alpha J = 1
          const double value = g.volume() * dot / (alpha * std::sqrt(j2));
          worst_margin = std::min(worst_margin, (ins.dual_value - value) / std::abs(ins.dual_value));
          ++probes;
        }
      }
    }
    report("A4", worst_margin >= -1e-8 && worst_match <= 1e-10,
           fmt("%ld probes, worst relative margin %.3e (>= -1e-8), dual vs inner product %.3e (<= 1e-10)", probes,
               worst_margin, worst_match),
           t0);
  }

  // A5 --------------------------------------------------------------------
  {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(5);
    double worst = 1e300;
    int count = 0;
    for (const AtomFamily& fam : {AtomFamily::adaptive_order(2.0), AtomFamily::adaptive_aniso(0.25, 1e-3, 1e-3)}) {
      const Grid g = Grid::make(fam.dimension(), fam.dimension() == 1 ? 256 : 32);
      for (int t = 0; t < 50; ++t) {
        const Spectrum w = structured_residual(fam, g, rng);
        insertion::SearchConfig sc;
        sc.seed = std::uint64_t(t);
        const auto ins = insertion::search_parameter(fam, w, 0.01, sc);
        const auto dense = testkit::dense_grid_oracle(fam, w, 0.01, 4096);
        worst = std::min(worst, (ins.dual_value - dense.value) / dense.value);
        ++count;
      }
    }
    report("A5", worst >= -1e-6, fmt("%d residuals, worst (search - dense) / dense = %.3e (>= -1e-6)", count, worst), t0);
  }

  // A6 --------------------------------------------------------------------
  {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(6);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_kkt = 0.0, worst_obj = 0.0;
    for (int t = 0; t < 200; ++t) {
      const int n = 1 + int(rng() % 8);
      const int rank = t % 4 == 0 ? std::max(1, n - 3) : n + int(rng() % 6);
      Eigen::MatrixXd v(rank, n);
      for (int i = 0; i < rank; ++i)
        for (int j = 0; j < n; ++j) v(i, j) = nd(rng);
      if (t % 7 == 0 && n > 1) v.col(n - 1) = v.col(0);
      Eigen::VectorXd f(rank);
      for (int i = 0; i < rank; ++i) f(i) = 2 * nd(rng);
      weights::QuadProblem q;
      q.gram = v.transpose() * v;
      q.lin = v.transpose() * f;
      q.penalty = Eigen::VectorXd::NullaryExpr(n, [&] { return 0.1 + 2 * u(rng); });
      q.constant = 0.5 * f.squaredNorm();
      const auto r = weights::solve_nnls(q);
      const auto ref = oracle::enumerate_nnls(q);
      worst_kkt = std::max(worst_kkt, weights::kkt_violation(q, r.weights));
      worst_obj = std::max(worst_obj, std::abs(q.objective(r.weights) - ref.objective) / std::max(1.0, std::abs(ref.objective)));
    }
    report("A6", worst_kkt <= 1e-8 && worst_obj <= 1e-8,
           fmt("200 problems, worst KKT %.3e (<= 1e-8), worst objective gap %.3e (<= 1e-8)", worst_kkt, worst_obj), t0);
  }

  // A7 --------------------------------------------------------------------
  {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int bad_h = 0, bad_s = 0, bad_c = 0, bad_p = 0;
    for (const AtomFamily& fam : {AtomFamily::adaptive_order(2.0), AtomFamily::adaptive_aniso(0.25, 1e-3, 1e-3)}) {
      const Grid g = Grid::make(fam.dimension(), fam.dimension() == 1 ? 64 : 16);
      for (int t = 0; t < 1000; ++t) {
        Spectrum v = spectral::forward(oracle::random_field(g, rng));
        Spectrum w = spectral::forward(oracle::random_field(g, rng));
        if (fam.zero_mean()) v.coeffs[0] = w.coeffs[0] = 0.0;
        const double s = fam.s_lo() + u(rng) * (fam.s_hi() - fam.s_lo());
        const double jv = atoms::seminorm(fam, v, s).value(), jw = atoms::seminorm(fam, w, s).value();
        const double lambda = 10 * u(rng);
        const double jl = atoms::seminorm(fam, spectral::scaled(v, lambda), s).value();
        if (std::abs(jl - lambda * jv) > 1e-12 * lambda * jv) ++bad_h;
        Spectrum sum = v;
        spectral::axpy(1.0, w, sum);
        // 1e-10 slack, scaled with the magnitudes involved (s near s_min gives J ~ 1e6)
        if (atoms::seminorm(fam, sum, s).value() > jv + jw + 1e-10 * std::max(1.0, jv + jw)) ++bad_s;
        const double nv = spectral::norm(v);
        const double bound = fam.zero_mean() ? nv / std::sqrt(2 * oracle::kPi)
                                             : std::pow(fam.omega(), 2 * fam.gamma()) / (2 * oracle::kPi) * nv;
        if (jv < bound - 1e-10) ++bad_c;

        // discrete Poincare on the zero-mean part, s in [0, 1]
        Spectrum z = spectral::project_zero_mean(v);
        const double sp = u(rng);
        double acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
          const auto m = g.frequency(i);
          acc += std::pow(std::hypot(double(m[0]), double(m[1])), 4 * sp) * std::norm(z.coeffs[i]);
        }
        const double rhs = std::sqrt(acc) * std::pow(2 * oracle::kPi, g.q / 2.0);
        if (spectral::norm(z) > rhs * (1 + 1e-12)) ++bad_p;
      }
    }
    report("A7", bad_h + bad_s + bad_c + bad_p == 0,
           fmt("2000 samples; violations: homogeneity %d, subadditivity %d, coercivity %d, Poincare %d", bad_h, bad_s,
               bad_c, bad_p),
           t0);
  }

  // A8 --------------------------------------------------------------------
  {
    const auto t0 = Clock::now();
    std::vector<Run> extra;
    {
      const Grid g = Grid::make(1, 128);
      const Field c = oracle::sampled(g, [](double x, double) { return std::cos(x) + 0.3 * std::sin(5 * x); });
      gcg::SolverConfig cfg;
      cfg.alpha = 0.05;
      cfg.max_iter = 500;
      extra.push_back(solve("smooth 1D, alpha 0.05", c, testkit::add_gaussian_noise(c, 0.05, 1), cfg));
      cfg.alpha = 0.02;
      const Field tm = testkit::two_mode_signal(g);
      extra.push_back(solve("two-mode 1D, alpha 0.02", tm, testkit::add_gaussian_noise(tm, 0.07, 2), cfg));
    }
    {
      const Grid g = Grid::make(2, 32);
      const Field c = testkit::grid_phantom(g, 16, 4);
      gcg::SolverConfig cfg;
      cfg.family = AtomFamily::adaptive_aniso(0.25, 1e-3, 1e-3);
      cfg.alpha = 60.0;
      cfg.max_iter = 300;
      extra.push_back(solve("grid 2D n=32, alpha 60", c, testkit::add_gaussian_noise(c, 0.3, 3), cfg));
      const Field d = testkit::diagonal_phantom(g, 2, 2);
      extra.push_back(solve("diagonal 2D n=32, alpha 60", d, testkit::add_gaussian_noise(d, 0.3, 4), cfg));
    }
    int checked = 0;
    double worst = 0.0;
    auto check = [&](const Run& r) {
      const Spectrum p = final_residual(r);
      const double dense = testkit::dense_grid_oracle(r.cfg.family, p, r.cfg.alpha, 4096).value;
      std::printf("  %s: %s after %d iterations, dense-grid dual %.9f\n", r.name.c_str(),
                  gcg::to_string(r.result.reason), r.result.iterations, dense);
      if (r.result.reason != gcg::TerminationReason::DualBelowOne) return;
      ++checked;
      worst = std::max(worst, dense);
    };
    for (const auto& r : a1_runs) check(r);
    for (const auto& r : a2_runs) check(r);
    for (const auto& r : extra) check(r);
    report("A8", checked > 0 && worst <= 1 + 1e-6,
           fmt("%d DualBelowOne terminations checked, largest dense-grid dual %.9f (<= 1 + 1e-6)", checked, worst), t0);
  }

  // A9 --------------------------------------------------------------------
  {
    const auto t0 = Clock::now();
    bool ok = true;
    std::size_t largest = 0;
    for (const auto& r : a1_runs) {
      std::printf("  %s: %zu atoms, sigma support %zu\n", r.name.c_str(), r.result.state.atoms.size(), r.sigma.points.size());
      ok = ok && r.sigma.points.size() <= 10;
      largest = std::max(largest, r.sigma.points.size());
    }
    for (const auto& r : a2_runs)
      std::printf("  %s: %zu atoms, sigma support %zu\n", r.name.c_str(), r.result.state.atoms.size(), r.sigma.points.size());
    report("A9", ok, fmt("largest A1 sigma support %zu (<= 10)", largest), t0);
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
