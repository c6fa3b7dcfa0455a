#pragma once

// Insertion step of the conditional gradient method.
//
// For a residual w and a fixed parameter s the maximizer of <w, v> over the
// sphere {alpha * J(v, s) = 1} is available in closed form:
//
//   v*^(m) = w^(m) / (A f_s(m)),   A = alpha * sqrt( sum_m |w^(m)|^2 / f_s(m) )
//
// with value g(s) = (2 pi)^q / alpha * sqrt( sum_m |w^(m)|^2 / f_s(m) ).
// The remaining search over s is one-dimensional.

#include <cstdint>
#include <vector>

#include "infconv/atoms.hpp"
#include "infconv/spectral.hpp"

namespace infconv::insertion {

struct SearchConfig {
  int n_starts = 16;
  double local_tol = 1e-6;
  int coarse_grid = 64;
  // Extra samples at cusp directions of the anisotropic family; -1 means coarse_grid.
  int cusp_candidates = -1;
  std::uint64_t seed = 0;

  // Throws ConfigInvalid.
  void validate() const;
};

struct Insertion {
  double s = 0.0;
  atoms::Atom atom;
  double dual_value = 0.0;
};

// g(s) for a fixed residual, with the residual's mode energies cached.
class DualObjective {
 public:
  // Throws GridMismatch, ConfigInvalid (alpha <= 0).
  DualObjective(const atoms::AtomFamily& family, const spectral::Spectrum& w, double alpha);

  // Throws ParamOutOfRange.
  double operator()(double s) const;
  // True when the residual has no energy on modes with finite weight.
  bool vanishes() const { return terms_.empty(); }
  // Parameters where some residual mode is annihilated by the directional
  // part of the anisotropic weight, ranked by the height of the resulting cusp
  // in g. Empty for the adaptive-order family.
  std::vector<double> cusp_parameters(std::size_t max_count) const;

 private:
  struct Term {
    std::size_t index;
    double energy;
  };
  atoms::AtomFamily family_;
  spectral::Grid grid_;
  double scale_;
  std::vector<Term> terms_;
};

// Throws ZeroResidual, ParamOutOfRange, ConfigInvalid, GridMismatch.
Insertion inner_maximizer(const atoms::AtomFamily& family, const spectral::Spectrum& w, double s, double alpha);

// g(s); zero for a zero residual.
double dual_value(const atoms::AtomFamily& family, const spectral::Spectrum& w, double s, double alpha);

// Deterministic multi-start maximization of g over the family's parameter
// interval. Ties within 1e-12 (relative) resolve to the smallest s.
// Throws ZeroResidual, ConfigInvalid.
Insertion search_parameter(const atoms::AtomFamily& family, const spectral::Spectrum& w, double alpha,
                           const SearchConfig& cfg);

}  // namespace infconv::insertion
