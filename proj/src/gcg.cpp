#include "infconv/gcg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <utility>

#include "infconv/error.hpp"
#include "infconv/weights.hpp"

namespace infconv::gcg {

namespace {

using Clock = std::chrono::steady_clock;

bool is_duplicate(const GcgState& state, const atoms::Atom& candidate, const SolverConfig& cfg) {
  for (const atoms::Atom& a : state.atoms) {
    if (cfg.family.parameter_distance(a.s, candidate.s) > cfg.dedup_s_tol) continue;
    spectral::Spectrum diff = candidate.spec;
    spectral::axpy(-1.0, a.spec, diff);
    if (spectral::norm(diff) <= cfg.dedup_v_tol * spectral::norm(a.spec)) return true;
  }
  return false;
}

void append_atom(GcgState& state, atoms::Atom atom, const spectral::Spectrum& f_hat) {
  const Eigen::Index n = Eigen::Index(state.atoms.size());
  Eigen::MatrixXd gram(n + 1, n + 1);
  gram.topLeftCorner(n, n) = state.gram;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double g = spectral::inner(state.atoms[std::size_t(i)].spec, atom.spec);
    gram(i, n) = g;
    gram(n, i) = g;
  }
  gram(n, n) = spectral::inner(atom.spec, atom.spec);
  Eigen::VectorXd lin(n + 1);
  lin.head(n) = state.lin;
  lin(n) = spectral::inner(atom.spec, f_hat);
  state.gram = std::move(gram);
  state.lin = std::move(lin);
  state.atoms.push_back(std::move(atom));
}

void rebuild_reconstruction(GcgState& state, const spectral::Grid& grid) {
  state.v_hat = spectral::Spectrum::zeros(grid);
  for (std::size_t i = 0; i < state.atoms.size(); ++i) spectral::axpy(state.weights[i], state.atoms[i].spec, state.v_hat);
}

// Re-optimizes all weights and keeps atoms with weight > prune_tol. Returns
// whether the most recently appended atom survived.
bool optimize_weights(GcgState& state, const spectral::Spectrum& f_hat, const SolverConfig& cfg) {
  const Eigen::Index n = Eigen::Index(state.atoms.size());
  weights::QuadProblem prob;
  prob.gram = state.gram;
  prob.lin = state.lin;
  prob.penalty.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) prob.penalty(i) = cfg.alpha * state.atoms[std::size_t(i)].j_value;
  prob.constant = 0.5 * spectral::inner(f_hat, f_hat);
  const weights::NnlsResult sol = weights::solve_nnls(prob, cfg.nnls_tol);

  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (sol.weights(i) > cfg.prune_tol && sol.weights(i) > 0.0) keep.push_back(i);
  }
  const Eigen::Index m = Eigen::Index(keep.size());
  Eigen::MatrixXd gram(m, m);
  Eigen::VectorXd lin(m);
  std::vector<atoms::Atom> kept_atoms;
  std::vector<double> kept_weights;
  kept_atoms.reserve(keep.size());
  for (Eigen::Index a = 0; a < m; ++a) {
    lin(a) = state.lin(keep[a]);
    for (Eigen::Index b = 0; b < m; ++b) gram(a, b) = state.gram(keep[a], keep[b]);
    kept_atoms.push_back(std::move(state.atoms[std::size_t(keep[a])]));
    kept_weights.push_back(sol.weights(keep[a]));
  }
  state.atoms = std::move(kept_atoms);
  state.weights = std::move(kept_weights);
  state.gram = std::move(gram);
  state.lin = std::move(lin);
  rebuild_reconstruction(state, f_hat.grid);
  return !keep.empty() && keep.back() == n - 1;
}

}  // namespace

const char* to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::DualBelowOne: return "DualBelowOne";
    case TerminationReason::DuplicateAtom: return "DuplicateAtom";
    case TerminationReason::MaxIter: return "MaxIter";
  }
  return "Unknown";
}

void SolverConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::ConfigInvalid, "alpha must be positive");
  if (max_iter < 1) throw Error(ErrorCode::ConfigInvalid, "max_iter must be >= 1");
  if (!(dedup_s_tol >= 0.0) || !(dedup_v_tol >= 0.0)) {
    throw Error(ErrorCode::ConfigInvalid, "deduplication tolerances must be >= 0");
  }
  if (!(prune_tol >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "prune_tol must be >= 0");
  if (!(stop_tol >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "stop_tol must be >= 0");
  if (!(nnls_tol > 0.0)) throw Error(ErrorCode::ConfigInvalid, "nnls_tol must be > 0");
  search.validate();
  for (const InitialAtom& a : initial) {
    if (!(a.weight > 0.0)) throw Error(ErrorCode::ConfigInvalid, "initial weights must be positive");
    family.require_parameter(a.s);
  }
}

spectral::Field GcgState::reconstruction() const { return spectral::inverse(v_hat); }

spectral::Field GcgState::reconstruction_with_mean() const {
  spectral::Field out = reconstruction();
  for (double& x : out.values) x += data_mean;
  return out;
}

double GcgState::regularizer(double alpha) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) acc += weights[i] * atoms[i].j_value;
  return alpha * acc;
}

double energy(const GcgState& state, const spectral::Spectrum& f_hat, double alpha) {
  spectral::Spectrum r = state.v_hat;
  spectral::axpy(-1.0, f_hat, r);
  return 0.5 * spectral::inner(r, r) + state.regularizer(alpha);
}

spectral::Spectrum prepared_data(const spectral::Field& f, const SolverConfig& cfg) {
  f.validate();
  if (f.grid.q != cfg.family.dimension()) {
    throw Error(ErrorCode::GridMismatch, "data has q=" + std::to_string(f.grid.q) + ", family acts on q=" +
                                             std::to_string(cfg.family.dimension()));
  }
  spectral::Spectrum f_hat = spectral::forward(f);
  if (cfg.family.zero_mean()) f_hat = spectral::project_zero_mean(f_hat);
  return f_hat;
}

GcgState initial_state(const spectral::Field& f, const SolverConfig& cfg) {
  cfg.validate();
  const spectral::Spectrum f_hat = prepared_data(f, cfg);
  GcgState state;
  state.v_hat = spectral::Spectrum::zeros(f.grid);
  state.gram.resize(0, 0);
  state.lin.resize(0);
  if (cfg.family.zero_mean()) state.data_mean = spectral::mean(f);
  for (const InitialAtom& init : cfg.initial) {
    spectral::Spectrum dir = cfg.family.zero_mean() ? spectral::project_zero_mean(init.direction) : init.direction;
    append_atom(state, atoms::normalize_to_extremal(cfg.family, dir, init.s, cfg.alpha), f_hat);
    state.weights.push_back(init.weight);
  }
  rebuild_reconstruction(state, f.grid);
  return state;
}

StepResult step(GcgState state, const spectral::Field& f, const SolverConfig& cfg) {
  return step(std::move(state), prepared_data(f, cfg), cfg);
}

StepResult step(GcgState state, const spectral::Spectrum& f_hat, const SolverConfig& cfg) {
  const auto start = Clock::now();
  IterationRecord rec;
  rec.k = state.k;
  rec.energy = energy(state, f_hat, cfg.alpha);
  rec.atom_count = int(state.atoms.size());
  auto finish = [&](std::optional<TerminationReason> stop) {
    rec.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    state.history.records.push_back(rec);
    return StepResult{std::move(state), stop};
  };

  spectral::Spectrum residual = f_hat;
  spectral::axpy(-1.0, state.v_hat, residual);

  insertion::Insertion ins;
  try {
    ins = insertion::search_parameter(cfg.family, residual, cfg.alpha, cfg.search);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroResidual) throw;
    rec.dual = 0.0;
    return finish(TerminationReason::DualBelowOne);
  }
  rec.dual = ins.dual_value;

  if (state.k >= 1) {
    if (ins.dual_value <= 1.0 + cfg.stop_tol) return finish(TerminationReason::DualBelowOne);
    if (is_duplicate(state, ins.atom, cfg)) return finish(TerminationReason::DuplicateAtom);
  }

  GcgHistory history = std::move(state.history);
  GcgState trial = state;
  state.history = std::move(history);
  append_atom(trial, std::move(ins.atom), f_hat);
  trial.weights.push_back(0.0);
  const bool kept = optimize_weights(trial, f_hat, cfg);

  // The candidate got weight zero and nothing moved: the iterate is a fixed
  // point and every further pass would propose the same atom again.
  if (state.k >= 1 && !kept) {
    const double e_new = energy(trial, f_hat, cfg.alpha);
    if (e_new >= rec.energy - 1e-13 * std::max(1.0, std::abs(rec.energy))) {
      return finish(TerminationReason::DuplicateAtom);
    }
  }
  rec.s_inserted = ins.s;
  trial.history = std::move(state.history);
  state = std::move(trial);
  ++state.k;
  return finish(std::nullopt);
}

RunResult run(const spectral::Field& f, const SolverConfig& cfg, const IterationLog& log) {
  GcgState state = initial_state(f, cfg);
  const spectral::Spectrum f_hat = prepared_data(f, cfg);
  int passes = 0;
  for (;;) {
    if (state.k >= cfg.max_iter) {
      // Record the final iterate with its certificate value, without inserting.
      const auto start = Clock::now();
      IterationRecord rec;
      rec.k = state.k;
      rec.energy = energy(state, f_hat, cfg.alpha);
      rec.atom_count = int(state.atoms.size());
      spectral::Spectrum residual = f_hat;
      spectral::axpy(-1.0, state.v_hat, residual);
      try {
        rec.dual = insertion::search_parameter(cfg.family, residual, cfg.alpha, cfg.search).dual_value;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroResidual) throw;
      }
      rec.seconds = std::chrono::duration<double>(Clock::now() - start).count();
      state.history.records.push_back(rec);
      if (log) log(rec);
      return RunResult{std::move(state), TerminationReason::MaxIter, passes + 1};
    }
    StepResult res = step(std::move(state), f_hat, cfg);
    ++passes;
    if (log) log(res.state.history.records.back());
    state = std::move(res.state);
    if (res.stop) return RunResult{std::move(state), *res.stop, passes};
  }
}

std::vector<double> approx_residual_series(const GcgHistory& history, double final_energy) {
  std::vector<double> out;
  out.reserve(history.records.size());
  for (const IterationRecord& r : history.records) out.push_back(r.energy - final_energy);
  return out;
}

double rate_constant(const std::vector<double>& residuals) {
  double c = 0.0;
  for (std::size_t k = 1; k < residuals.size(); ++k) c = std::max(c, residuals[k] * double(k + 1));
  return c;
}

}  // namespace infconv::gcg
