#include "infconv/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace infconv::weights {

namespace {

double gradient_scale(const QuadProblem& prob) {
  double s = 1.0;
  if (prob.size() > 0) {
    s = std::max(s, prob.lin.cwiseAbs().maxCoeff());
    s = std::max(s, prob.penalty.cwiseAbs().maxCoeff());
  }
  return s;
}

std::vector<Eigen::Index> members(const std::vector<bool>& mask) {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.push_back(Eigen::Index(i));
  }
  return out;
}

// Solves G_PP z = d_P. Returns false if the factorization is unusable even after jitter.
bool solve_passive(const Eigen::MatrixXd& gram, const Eigen::VectorXd& d, const std::vector<Eigen::Index>& passive,
                   Eigen::VectorXd& z, bool& jittered) {
  const Eigen::Index k = Eigen::Index(passive.size());
  Eigen::MatrixXd sub(k, k);
  Eigen::VectorXd rhs(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    rhs(a) = d(passive[a]);
    for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = gram(passive[a], passive[b]);
  }
  const double diag_max = std::max(1e-300, sub.diagonal().cwiseAbs().maxCoeff());
  Eigen::LDLT<Eigen::MatrixXd> ldlt(sub);
  const auto pivots = ldlt.vectorD();
  const bool ok = ldlt.info() == Eigen::Success && pivots.minCoeff() > 1e-14 * diag_max;
  if (!ok) {
    jittered = true;
    sub.diagonal().array() += 1e-12 * diag_max;
    ldlt.compute(sub);
    if (ldlt.info() != Eigen::Success) return false;
  }
  Eigen::VectorXd sol = ldlt.solve(rhs);
  if (!sol.allFinite()) return false;
  z = Eigen::VectorXd::Zero(gram.rows());
  for (Eigen::Index a = 0; a < k; ++a) z(passive[a]) = sol(a);
  return true;
}

Eigen::VectorXd projected_gradient(const QuadProblem& prob, Eigen::VectorXd c, double tol, int max_iter) {
  const double lipschitz = std::max(1e-300, prob.gram.diagonal().sum());
  Eigen::VectorXd g = prob.gradient(c);
  double step = 1.0 / lipschitz;
  for (int it = 0; it < max_iter; ++it) {
    if (kkt_violation(prob, c) <= tol) break;
    Eigen::VectorXd next = (c - step * g).cwiseMax(0.0);
    // Keep the objective monotone; BB steps may overshoot.
    if (prob.objective(next) > prob.objective(c)) {
      next = (c - g / lipschitz).cwiseMax(0.0);
    }
    const Eigen::VectorXd g_next = prob.gradient(next);
    const Eigen::VectorXd dc = next - c, dg = g_next - g;
    const double curv = dc.dot(dg);
    step = curv > 0.0 ? dc.squaredNorm() / curv : 1.0 / lipschitz;
    c = std::move(next);
    g = g_next;
  }
  return c;
}

}  // namespace

double QuadProblem::objective(const Eigen::VectorXd& c) const {
  return 0.5 * c.dot(gram * c) - lin.dot(c) + penalty.dot(c) + constant;
}

Eigen::VectorXd QuadProblem::gradient(const Eigen::VectorXd& c) const { return gram * c - lin + penalty; }

void QuadProblem::validate() const {
  const Eigen::Index n = lin.size();
  if (gram.rows() != n || gram.cols() != n || penalty.size() != n) {
    throw Error(ErrorCode::ConfigInvalid, "quadratic problem has inconsistent dimensions");
  }
  if (n == 0) return;
  const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
  if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::ConfigInvalid, "Gram matrix is not symmetric");
  }
  if (gram.diagonal().minCoeff() < 0.0) throw Error(ErrorCode::ConfigInvalid, "Gram diagonal is negative");
}

QuadProblem build_problem(std::span<const atoms::Atom> atoms, const spectral::Spectrum& f, double alpha) {
  if (atoms.empty()) throw Error(ErrorCode::ConfigInvalid, "no atoms to weight");
  const Eigen::Index n = Eigen::Index(atoms.size());
  QuadProblem prob;
  prob.gram.resize(n, n);
  prob.lin.resize(n);
  prob.penalty.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& vi = atoms[std::size_t(i)].spec;
    prob.lin(i) = spectral::inner(vi, f);
    prob.penalty(i) = alpha * atoms[std::size_t(i)].j_value;
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double gij = spectral::inner(vi, atoms[std::size_t(j)].spec);
      prob.gram(i, j) = gij;
      prob.gram(j, i) = gij;
    }
  }
  prob.constant = 0.5 * spectral::inner(f, f);
  return prob;
}

QuadProblem build_problem(std::span<const atoms::Atom> atoms, const spectral::Field& f, double alpha) {
  return build_problem(atoms, spectral::forward(f), alpha);
}

double kkt_violation(const QuadProblem& prob, const Eigen::VectorXd& c) {
  if (prob.size() == 0) return 0.0;
  const Eigen::VectorXd g = prob.gradient(c) / gradient_scale(prob);
  const double c_scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  double v = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    v = std::max(v, -g(i));
    v = std::max(v, std::abs(c(i) * g(i)) / c_scale);
    v = std::max(v, -c(i));
  }
  return v;
}

NnlsNotConverged::NnlsNotConverged(Eigen::VectorXd best, double violation, int max_iter)
    : Error(ErrorCode::NotConverged, "weight solve stopped after " + std::to_string(max_iter) +
                                         " iterations with KKT violation " + std::to_string(violation)),
      best_(std::move(best)),
      violation_(violation) {}

NnlsResult solve_nnls(const QuadProblem& prob, double tol, int max_iter) {
  prob.validate();
  if (!(tol > 0.0)) throw Error(ErrorCode::ConfigInvalid, "tolerance must be positive");
  const Eigen::Index n = prob.size();
  NnlsResult res;
  res.weights = Eigen::VectorXd::Zero(n);
  if (n == 0) return res;
  if (max_iter <= 0) max_iter = int(3 * n + 30);

  const Eigen::VectorXd d = prob.lin - prob.penalty;
  const double enter_tol = 0.1 * tol * gradient_scale(prob);
  Eigen::VectorXd& c = res.weights;
  std::vector<bool> passive(std::size_t(n), false);
  bool stalled = false;
  Eigen::Index last_entered = -1;

  while (res.iterations < max_iter) {
    ++res.iterations;
    const Eigen::VectorXd w = d - prob.gram * c;
    Eigen::Index entering = -1;
    double best = enter_tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[std::size_t(j)] && w(j) > best) {
        best = w(j);
        entering = j;
      }
    }
    if (entering < 0) break;
    if (entering == last_entered) {
      // Re-entering the index that just left means no progress is possible.
      stalled = true;
      break;
    }
    passive[std::size_t(entering)] = true;
    last_entered = entering;

    int inner = 0;
    for (;;) {
      Eigen::VectorXd z;
      if (!solve_passive(prob.gram, d, members(passive), z, res.jittered)) {
        stalled = true;
        break;
      }
      bool feasible = true;
      double step = 1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (passive[std::size_t(i)] && z(i) <= 0.0) {
          feasible = false;
          const double denom = c(i) - z(i);
          if (denom > 0.0) step = std::min(step, c(i) / denom);
        }
      }
      if (feasible) {
        c = z;
        break;
      }
      c += step * (z - c);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (passive[std::size_t(i)] && (c(i) <= 0.0 || (z(i) <= 0.0 && c(i) <= 1e-15 * c.maxCoeff()))) {
          passive[std::size_t(i)] = false;
          c(i) = 0.0;
        }
      }
      if (++inner > 3 * n + 30) {
        stalled = true;
        break;
      }
    }
    if (stalled) break;
    // Only an index that was dropped again right away can signal a stall.
    if (passive[std::size_t(entering)]) last_entered = -1;
  }
  c = c.cwiseMax(0.0);
  res.kkt_violation = kkt_violation(prob, c);

  if (res.kkt_violation > tol || stalled) {
    Eigen::VectorXd pg = projected_gradient(prob, c, tol, 20000);
    const double v = kkt_violation(prob, pg);
    if (v < res.kkt_violation || prob.objective(pg) < prob.objective(c)) {
      c = pg;
      res.kkt_violation = v;
      res.used_fallback = true;
    }
  }
  if (res.kkt_violation > tol) throw NnlsNotConverged(c, res.kkt_violation, max_iter);
  return res;
}

}  // namespace infconv::weights
