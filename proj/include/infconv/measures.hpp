#pragma once

// Sparse measure mu = sum_i c_i v_i delta_{s_i} and its collapse to the pair
// (v, sigma) with v = sum_i c_i v_i and
// sigma = sum_s || sum_{s_j = s} c_j v_j || delta_s.

#include "json.hpp"
#include <vector>

#include "infconv/atoms.hpp"
#include "infconv/gcg.hpp"
#include "infconv/spectral.hpp"

namespace infconv::measures {

struct MeasureEntry {
  double weight = 0.0;
  atoms::Atom atom;
};

struct SparseMeasure {
  spectral::Grid grid;
  std::vector<MeasureEntry> entries;

  // Throws ConfigInvalid for non-positive weights, GridMismatch for foreign atoms.
  void validate() const;
};

struct SupportPoint {
  double s = 0.0;     // weight-averaged parameter of the group
  double mass = 0.0;  // || sum_group c_j v_j ||
  std::size_t count = 0;
};

struct SigmaSupport {
  std::vector<SupportPoint> points;  // ascending s
  double total_mass() const;
};

SparseMeasure from_state(const gcg::GcgState& state, const spectral::Grid& grid);

spectral::Field reconstruct(const SparseMeasure& mu);

// Groups entries whose sorted parameters are chained by gaps <= s_cluster_tol.
SigmaSupport collapse_sigma(const SparseMeasure& mu, double s_cluster_tol);

// sum_i c_i ||v_i||
double tv_norm_upper(const SparseMeasure& mu);

// 1/2 ||reconstruct(mu) - f||^2 + alpha sum_i c_i J(v_i, s_i), evaluated independently of the solver.
double lifted_objective(const SparseMeasure& mu, const spectral::Spectrum& f_hat, double alpha);

// JSON document
//   { "grid": {"q", "n"},
//     "family": {"kind", "s_lo", "s_hi", "eta" | "gamma","zeta","omega"},
//     "entries": [ {"s", "weight", "j_value", "spectrum": [re0, im0, re1, im1, ...]} ] }
// with spectra in FFT order (see spectral.hpp).
nlohmann::json to_json(const SparseMeasure& mu);
// Throws ConfigInvalid on schema violations.
SparseMeasure measure_from_json(const nlohmann::json& doc);
// { "points": [ {"s", "mass", "count"} ], "total_mass" }
nlohmann::json to_json(const SigmaSupport& sigma);

nlohmann::json family_to_json(const atoms::AtomFamily& family);
atoms::AtomFamily family_from_json(const nlohmann::json& doc);

}  // namespace infconv::measures
