#pragma once

// Parametrized Fourier-weight seminorms
//
//   J(v, s) = sqrt( sum_m f_s(m) |v^(m)|^2 )
//
// and the extremal points of their balls {alpha * J(., s) <= 1}, which are
// exactly the spheres {alpha * J(., s) = 1}.
//
// Two families are provided:
//   adaptive order (q = 1):      f_s(m) = |m|^{4s} / s^{2 eta},  s in [s_min, 1],
//                                m = 0 excluded (zero-mean space)
//   adaptive anisotropy (q = 2): f_s(m) = (|m.(cos s, sin s)| + zeta |m| + omega)^{4 gamma},
//                                s in [0, pi]

#include <limits>

#include "infconv/spectral.hpp"

namespace infconv::atoms {

// A nonnegative real or +infinity. Infinity is carried as a flag and never
// enters floating-point sums.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr explicit ExtendedReal(double value) : value_(value) {}
  static constexpr ExtendedReal infinity() {
    ExtendedReal r;
    r.infinite_ = true;
    return r;
  }

  constexpr bool is_finite() const { return !infinite_; }
  constexpr bool is_infinite() const { return infinite_; }
  // Throws InfiniteSeminorm when infinite.
  double value() const;
  // Finite value or std::numeric_limits<double>::infinity(), for reporting.
  constexpr double as_double() const { return infinite_ ? std::numeric_limits<double>::infinity() : value_; }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

enum class FamilyKind { AdaptiveOrder1D, AdaptiveAniso2D };

class AtomFamily {
 public:
  // Throws ConfigInvalid unless eta > 0 and 0 < s_min < s_max <= 1.
  static AtomFamily adaptive_order(double eta, double s_min = 1e-3, double s_max = 1.0);
  // Throws ConfigInvalid unless gamma in (0,1], zeta >= 0, omega > 0.
  static AtomFamily adaptive_aniso(double gamma, double zeta, double omega);

  FamilyKind kind() const { return kind_; }
  int dimension() const { return kind_ == FamilyKind::AdaptiveOrder1D ? 1 : 2; }
  double s_lo() const { return s_lo_; }
  double s_hi() const { return s_hi_; }
  double eta() const { return eta_; }
  double gamma() const { return gamma_; }
  double zeta() const { return zeta_; }
  double omega() const { return omega_; }

  bool zero_mean() const { return kind_ == FamilyKind::AdaptiveOrder1D; }
  // Directions s and s + pi coincide for the anisotropic family.
  bool periodic_parameter() const { return kind_ == FamilyKind::AdaptiveAniso2D; }
  double parameter_distance(double a, double b) const;
  bool contains(double s) const { return s >= s_lo_ && s <= s_hi_; }
  // Throws ParamOutOfRange.
  void require_parameter(double s) const;

  friend bool operator==(const AtomFamily&, const AtomFamily&) = default;

 private:
  FamilyKind kind_ = FamilyKind::AdaptiveOrder1D;
  double s_lo_ = 0.0, s_hi_ = 1.0;
  double eta_ = 0.0, gamma_ = 0.0, zeta_ = 0.0, omega_ = 0.0;
};

// Pointwise weight f_s(m) as written above, with no grid aliasing applied.
// Infinite for m = 0 in the adaptive-order family. Throws ParamOutOfRange.
ExtendedReal weight(const AtomFamily& family, double s, spectral::Frequency m);

// Evaluates 1 / f_s at stored coefficients for one fixed s.
class InverseWeights {
 public:
  // Throws ParamOutOfRange.
  InverseWeights(const AtomFamily& family, double s);
  double at(const spectral::Grid& grid, std::size_t index) const;
  double at(spectral::Frequency m) const;  // no aliasing; 0 for excluded modes

 private:
  const AtomFamily* family_;
  double s_, cos_s_, sin_s_, log_s_term_;
};

// 1 / f_s at a stored coefficient of `grid`; 0 where f_s is infinite.
// Coefficients on the Nyquist row/column of a 2D grid stand for two aliased
// frequencies whose anisotropic weights differ; those use the average of the
// two, which keeps the multiplier Hermitian. Small s in the adaptive-order
// family is evaluated in the log domain.
double inverse_mode_weight(const AtomFamily& family, double s, const spectral::Grid& grid, std::size_t index);
// f_s at a stored coefficient, consistent with inverse_mode_weight.
ExtendedReal mode_weight(const AtomFamily& family, double s, const spectral::Grid& grid, std::size_t index);

// J(v, s). Infinite in the adaptive-order family when v has a mean component.
// Throws ParamOutOfRange, GridMismatch (family dimension vs grid).
ExtendedReal seminorm(const AtomFamily& family, const spectral::Spectrum& v, double s);

struct Atom {
  spectral::Spectrum spec;
  double s = 0.0;
  AtomFamily family;
  double j_value = 0.0;  // J(spec, s)
};

// Rescales w onto {alpha * J(., s) = 1}. Throws ZeroInput, InfiniteSeminorm,
// ParamOutOfRange, ConfigInvalid (alpha <= 0).
Atom normalize_to_extremal(const AtomFamily& family, const spectral::Spectrum& w, double s, double alpha);

}  // namespace infconv::atoms
