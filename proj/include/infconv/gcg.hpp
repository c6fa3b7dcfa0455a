#pragma once

// Generalized conditional gradient method for denoising with an infinite
// infimal convolution of the seminorms in atoms.hpp:
//
//   minimize over (v, sigma)   1/2 ||v - f||^2 + alpha R(v, sigma)
//
// Iterates are finite conic combinations of extremal atoms (v_i, s_i). Each
// iteration inserts the atom maximizing <f - v^k, v>, stops once that value
// is <= 1 (or the atom is already present), then re-optimizes all weights
// and drops atoms whose weight vanished.

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "infconv/atoms.hpp"
#include "infconv/insertion.hpp"
#include "infconv/spectral.hpp"

namespace infconv::gcg {

// Starting atom: direction is normalized onto the extremal sphere at s.
struct InitialAtom {
  spectral::Spectrum direction;
  double s = 0.0;
  double weight = 1.0;
};

struct SolverConfig {
  double alpha = 1.0;
  atoms::AtomFamily family = atoms::AtomFamily::adaptive_order(2.0);
  int max_iter = 200;
  double dedup_s_tol = 1e-6;
  double dedup_v_tol = 1e-8;
  double prune_tol = 0.0;
  double stop_tol = 1e-9;  // stop when the dual value is <= 1 + stop_tol
  double nnls_tol = 1e-10;
  insertion::SearchConfig search;
  std::vector<InitialAtom> initial;

  // Throws ConfigInvalid.
  void validate() const;
};

struct IterationRecord {
  int k = 0;
  double energy = 0.0;       // 1/2 ||v^k - f||^2 + alpha sum c_i J(v_i, s_i)
  double dual = 0.0;         // max <p^k, v> over extremal atoms (0 for a zero residual)
  std::optional<double> s_inserted;
  int atom_count = 0;        // N_k
  double seconds = 0.0;      // wall time spent on this iteration
};

struct GcgHistory {
  std::vector<IterationRecord> records;
};

enum class TerminationReason { DualBelowOne, DuplicateAtom, MaxIter };
const char* to_string(TerminationReason reason);

struct GcgState {
  int k = 0;
  std::vector<atoms::Atom> atoms;
  std::vector<double> weights;
  spectral::Spectrum v_hat;  // sum_i c_i v_i
  GcgHistory history;

  // Cached quadratic data for the current atoms against the (mean-free) data.
  Eigen::MatrixXd gram;
  Eigen::VectorXd lin;

  // Mean removed from the data before solving (adaptive-order family only).
  double data_mean = 0.0;

  spectral::Field reconstruction() const;  // without the data mean
  spectral::Field reconstruction_with_mean() const;
  double regularizer(double alpha) const;  // alpha * sum c_i J(v_i, s_i)
};

struct StepResult {
  GcgState state;
  std::optional<TerminationReason> stop;
};

struct RunResult {
  GcgState state;
  TerminationReason reason = TerminationReason::MaxIter;
  int iterations = 0;  // loop passes, including the terminating one
};

using IterationLog = std::function<void(const IterationRecord&)>;

// Upper-bound energy of `state` for data spectrum `f_hat`.
double energy(const GcgState& state, const spectral::Spectrum& f_hat, double alpha);

// Prepares the data (mean split for the adaptive-order family) and the initial
// state. Throws ConfigInvalid, GridMismatch, InvalidField.
GcgState initial_state(const spectral::Field& f, const SolverConfig& cfg);
spectral::Spectrum prepared_data(const spectral::Field& f, const SolverConfig& cfg);

// One insertion + weight optimization + pruning cycle. When a stopping rule
// fires the state is returned unchanged apart from its history record.
StepResult step(GcgState state, const spectral::Field& f, const SolverConfig& cfg);
StepResult step(GcgState state, const spectral::Spectrum& f_hat, const SolverConfig& cfg);

RunResult run(const spectral::Field& f, const SolverConfig& cfg, const IterationLog& log = {});

// r_k = E_k - E_final for every recorded iterate.
std::vector<double> approx_residual_series(const GcgHistory& history, double final_energy);

// max_k r_k (k + 1) over k >= 1, the empirical constant of an O(1/(k+1)) rate.
double rate_constant(const std::vector<double>& residuals);

}  // namespace infconv::gcg
