#include "infconv/atoms.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "infconv/error.hpp"

namespace infconv::atoms {

namespace {

constexpr double kLogDomainBelow = 1e-2;

void require_grid(const AtomFamily& family, const spectral::Grid& grid) {
  if (family.dimension() != grid.q) {
    throw Error(ErrorCode::GridMismatch, "family acts on q=" + std::to_string(family.dimension()) +
                                             ", spectrum has q=" + std::to_string(grid.q));
  }
}

double radius(double m1, double m2) { return std::hypot(m1, m2); }

bool on_nyquist(const spectral::Grid& grid, const spectral::Frequency& m) {
  return m[0] == grid.n / 2 || m[1] == grid.n / 2;
}

spectral::Frequency alias(const spectral::Grid& grid, spectral::Frequency m) {
  if (m[0] == grid.n / 2) m[0] = -m[0];
  if (m[1] == grid.n / 2) m[1] = -m[1];
  return m;
}

}  // namespace

double ExtendedReal::value() const {
  if (infinite_) throw Error(ErrorCode::InfiniteSeminorm, "value is +infinity");
  return value_;
}

AtomFamily AtomFamily::adaptive_order(double eta, double s_min, double s_max) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw Error(ErrorCode::ConfigInvalid, "eta must be positive");
  if (!(s_min > 0.0) || !(s_min < s_max) || !(s_max <= 1.0)) {
    throw Error(ErrorCode::ConfigInvalid, "order interval must satisfy 0 < s_min < s_max <= 1");
  }
  AtomFamily f;
  f.kind_ = FamilyKind::AdaptiveOrder1D;
  f.s_lo_ = s_min;
  f.s_hi_ = s_max;
  f.eta_ = eta;
  return f;
}

AtomFamily AtomFamily::adaptive_aniso(double gamma, double zeta, double omega) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw Error(ErrorCode::ConfigInvalid, "gamma must lie in (0, 1]");
  if (!(zeta >= 0.0) || !std::isfinite(zeta)) throw Error(ErrorCode::ConfigInvalid, "zeta must be >= 0");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw Error(ErrorCode::ConfigInvalid, "omega must be > 0");
  AtomFamily f;
  f.kind_ = FamilyKind::AdaptiveAniso2D;
  f.s_lo_ = 0.0;
  f.s_hi_ = std::numbers::pi;
  f.gamma_ = gamma;
  f.zeta_ = zeta;
  f.omega_ = omega;
  return f;
}

double AtomFamily::parameter_distance(double a, double b) const {
  const double d = std::abs(a - b);
  if (!periodic_parameter()) return d;
  const double period = s_hi_ - s_lo_;
  const double r = std::fmod(d, period);
  return std::min(r, period - r);
}

void AtomFamily::require_parameter(double s) const {
  if (!contains(s)) {
    throw Error(ErrorCode::ParamOutOfRange, "s=" + std::to_string(s) + " outside [" + std::to_string(s_lo_) + ", " +
                                                std::to_string(s_hi_) + "]");
  }
}

ExtendedReal weight(const AtomFamily& family, double s, spectral::Frequency m) {
  family.require_parameter(s);
  if (family.kind() == FamilyKind::AdaptiveOrder1D) {
    if (m[0] == 0 && m[1] == 0) return ExtendedReal::infinity();
    const double abs_m = radius(m[0], m[1]);
    return ExtendedReal(std::pow(abs_m, 4.0 * s) / std::pow(s, 2.0 * family.eta()));
  }
  const double base = std::abs(m[0] * std::cos(s) + m[1] * std::sin(s)) + family.zeta() * radius(m[0], m[1]) +
                      family.omega();
  return ExtendedReal(std::pow(base, 4.0 * family.gamma()));
}

InverseWeights::InverseWeights(const AtomFamily& family, double s)
    : family_(&family), s_(s), cos_s_(std::cos(s)), sin_s_(std::sin(s)), log_s_term_(0.0) {
  family.require_parameter(s);
  if (family.kind() == FamilyKind::AdaptiveOrder1D) log_s_term_ = 2.0 * family.eta() * std::log(s);
}

double InverseWeights::at(spectral::Frequency m) const {
  if (family_->kind() == FamilyKind::AdaptiveOrder1D) {
    if (m[0] == 0 && m[1] == 0) return 0.0;
    const double abs_m = radius(m[0], m[1]);
    if (s_ < kLogDomainBelow) return std::exp(log_s_term_ - 4.0 * s_ * std::log(abs_m));
    return std::pow(s_, 2.0 * family_->eta()) * std::pow(abs_m, -4.0 * s_);
  }
  const double base = std::abs(m[0] * cos_s_ + m[1] * sin_s_) + family_->zeta() * radius(m[0], m[1]) +
                      family_->omega();
  return std::pow(base, -4.0 * family_->gamma());
}

double InverseWeights::at(const spectral::Grid& grid, std::size_t index) const {
  const spectral::Frequency m = grid.frequency(index);
  const double direct = at(m);
  if (family_->kind() == FamilyKind::AdaptiveAniso2D && grid.q == 2 && on_nyquist(grid, m)) {
    const spectral::Frequency a = alias(grid, m);
    if (a != m) return 2.0 / (1.0 / direct + 1.0 / at(a));
  }
  return direct;
}

double inverse_mode_weight(const AtomFamily& family, double s, const spectral::Grid& grid, std::size_t index) {
  return InverseWeights(family, s).at(grid, index);
}

ExtendedReal mode_weight(const AtomFamily& family, double s, const spectral::Grid& grid, std::size_t index) {
  const double inv = inverse_mode_weight(family, s, grid, index);
  if (inv == 0.0) return ExtendedReal::infinity();
  return ExtendedReal(1.0 / inv);
}

ExtendedReal seminorm(const AtomFamily& family, const spectral::Spectrum& v, double s) {
  family.require_parameter(s);
  require_grid(family, v.grid);
  const InverseWeights inv_weights(family, s);
  double acc = 0.0;
  for (std::size_t i = 0; i < v.coeffs.size(); ++i) {
    const double e = std::norm(v.coeffs[i]);
    if (e == 0.0) continue;
    const double inv = inv_weights.at(v.grid, i);
    if (inv == 0.0) return ExtendedReal::infinity();
    acc += e / inv;
  }
  return ExtendedReal(std::sqrt(acc));
}

Atom normalize_to_extremal(const AtomFamily& family, const spectral::Spectrum& w, double s, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::ConfigInvalid, "alpha must be positive");
  const ExtendedReal j = seminorm(family, w, s);
  if (j.is_infinite()) throw Error(ErrorCode::InfiniteSeminorm, "input has a component with infinite weight");
  if (j.value() == 0.0) throw Error(ErrorCode::ZeroInput, "cannot normalize a zero-seminorm input");
  const double scale = 1.0 / (alpha * j.value());
  Atom atom{spectral::scaled(w, scale), s, family, 0.0};
  atom.j_value = seminorm(family, atom.spec, s).value();
  return atom;
}

}  // namespace infconv::atoms
