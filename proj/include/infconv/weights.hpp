#pragma once

// Weight optimization: minimize over c >= 0
//
//   1/2 || sum_i c_i v_i - f ||^2 + sum_i c_i p_i,    p_i = alpha * J(v_i, s_i)
//
// i.e. 1/2 c'Gc - b'c + p'c + 1/2 <f, f> with G_ij = <v_i, v_j>, b_i = <v_i, f>.

#include <Eigen/Dense>
#include <span>

#include "infconv/atoms.hpp"
#include "infconv/error.hpp"
#include "infconv/spectral.hpp"

namespace infconv::weights {

struct QuadProblem {
  Eigen::MatrixXd gram;
  Eigen::VectorXd lin;
  Eigen::VectorXd penalty;
  double constant = 0.0;

  Eigen::Index size() const { return lin.size(); }
  double objective(const Eigen::VectorXd& c) const;
  // G c - b + p
  Eigen::VectorXd gradient(const Eigen::VectorXd& c) const;
  // Throws ConfigInvalid on inconsistent sizes or an asymmetric Gram matrix.
  void validate() const;
};

// Throws GridMismatch, ConfigInvalid (no atoms).
QuadProblem build_problem(std::span<const atoms::Atom> atoms, const spectral::Field& f, double alpha);
QuadProblem build_problem(std::span<const atoms::Atom> atoms, const spectral::Spectrum& f, double alpha);

// Largest violation of the KKT conditions g >= 0, c .* g = 0 at c, where g is
// the gradient. Gradient entries are measured relative to
// max(1, |b|_inf, |p|_inf), and complementarity products additionally relative
// to max(1, |c|_inf).
double kkt_violation(const QuadProblem& prob, const Eigen::VectorXd& c);

struct NnlsResult {
  Eigen::VectorXd weights;
  double kkt_violation = 0.0;
  int iterations = 0;
  bool jittered = false;        // Gram diagonal regularized during the solve
  bool used_fallback = false;   // active-set stalled; projected gradient finished
};

class NnlsNotConverged : public Error {
 public:
  NnlsNotConverged(Eigen::VectorXd best, double violation, int max_iter);
  const Eigen::VectorXd& best() const { return best_; }
  double violation() const { return violation_; }

 private:
  Eigen::VectorXd best_;
  double violation_;
};

// Lawson-Hanson style active-set solve in Gram form, with projected
// Barzilai-Borwein gradient as a fallback. max_iter <= 0 picks 3n + 30.
// Throws NnlsNotConverged when the KKT violation stays above tol.
NnlsResult solve_nnls(const QuadProblem& prob, double tol = 1e-10, int max_iter = 0);

}  // namespace infconv::weights
