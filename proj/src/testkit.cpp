#include "infconv/testkit.hpp"

#include <cmath>
#include <random>
#include <string>

#include "infconv/error.hpp"

namespace infconv::testkit {

namespace {

double unit_uniform(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

void require_same_grid(const spectral::Field& a, const spectral::Field& b) {
  if (!(a.grid == b.grid)) throw Error(ErrorCode::GridMismatch, "fields live on different grids");
  a.validate();
  b.validate();
}

// f_s at a stored coefficient: the two aliases of a Nyquist frequency are averaged.
atoms::ExtendedReal stored_weight(const atoms::AtomFamily& family, double s, const spectral::Grid& grid,
                                  std::size_t index) {
  spectral::Frequency m = grid.frequency(index);
  const atoms::ExtendedReal direct = atoms::weight(family, s, m);
  if (grid.q != 2 || family.kind() != atoms::FamilyKind::AdaptiveAniso2D) return direct;
  spectral::Frequency other = m;
  if (other[0] == grid.n / 2) other[0] = -other[0];
  if (other[1] == grid.n / 2) other[1] = -other[1];
  if (other == m) return direct;
  return atoms::ExtendedReal(0.5 * (direct.value() + atoms::weight(family, s, other).value()));
}

}  // namespace

spectral::Field Phantom::render() const {
  switch (kind) {
    case PhantomKind::TwoMode1D: return two_mode_signal(grid);
    case PhantomKind::Grid2D: return grid_phantom(grid, period, thickness);
    case PhantomKind::Diagonal2D: return diagonal_phantom(grid, wave1, wave2);
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown phantom kind");
}

spectral::Field two_mode_signal(const spectral::Grid& grid) {
  if (grid.q != 1) throw Error(ErrorCode::ConfigInvalid, "two-mode signal is one-dimensional");
  if (grid.n < 64) throw Error(ErrorCode::GridTooSmall, "two-mode signal needs n >= 64, got " + std::to_string(grid.n));
  spectral::Spectrum s = spectral::Spectrum::zeros(grid);
  s.at({3, 0}) = s.at({-3, 0}) = 8.0 / spectral::kTwoPi;
  s.at({20, 0}) = s.at({-20, 0}) = 2.0 / spectral::kTwoPi;
  return spectral::inverse(s);
}

spectral::Field grid_phantom(const spectral::Grid& grid, int period, int thickness) {
  if (grid.q != 2) throw Error(ErrorCode::ConfigInvalid, "grid phantom is two-dimensional");
  if (period < 1 || period > grid.n || grid.n % period != 0) {
    throw Error(ErrorCode::BadPeriod, "period must divide n=" + std::to_string(grid.n) + ", got " + std::to_string(period));
  }
  if (thickness < 0 || thickness > period) {
    throw Error(ErrorCode::BadPeriod, "thickness must lie in [0, period], got " + std::to_string(thickness));
  }
  spectral::Field out = spectral::Field::zeros(grid);
  for (int r = 0; r < grid.n; ++r) {
    for (int c = 0; c < grid.n; ++c) {
      const bool on = (r % period) < thickness || (c % period) < thickness;
      out.values[std::size_t(r) * grid.n + c] = on ? 1.0 : 0.0;
    }
  }
  return out;
}

spectral::Field diagonal_phantom(const spectral::Grid& grid, int k1, int k2) {
  if (grid.q != 2) throw Error(ErrorCode::ConfigInvalid, "diagonal phantom is two-dimensional");
  if (k1 == 0 && k2 == 0) throw Error(ErrorCode::ConfigInvalid, "stripe wave vector must be nonzero");
  spectral::Field out = spectral::Field::zeros(grid);
  const double h = grid.spacing();
  for (int r = 0; r < grid.n; ++r) {
    for (int c = 0; c < grid.n; ++c) {
      // Phase reduced exactly in integers before scaling keeps the pattern periodic bit for bit.
      const long phase = (long(k1) * r + long(k2) * c) % grid.n;
      out.values[std::size_t(r) * grid.n + c] = std::sin(double(phase) * h) >= 0.0 ? 1.0 : 0.0;
    }
  }
  return out;
}

spectral::Field add_gaussian_noise(const spectral::Field& v, double std, std::uint64_t seed) {
  v.validate();
  if (!(std >= 0.0) || !std::isfinite(std)) throw Error(ErrorCode::ConfigInvalid, "noise std must be >= 0");
  spectral::Field out = v;
  if (std == 0.0) return out;
  std::mt19937_64 rng(seed);
  double spare = 0.0;
  bool have_spare = false;
  for (double& x : out.values) {
    double z;
    if (have_spare) {
      z = spare;
      have_spare = false;
    } else {
      const double u1 = unit_uniform(rng);
      const double u2 = unit_uniform(rng);
      const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
      z = r * std::cos(spectral::kTwoPi * u2);
      spare = r * std::sin(spectral::kTwoPi * u2);
      have_spare = true;
    }
    x += std * z;
  }
  return out;
}

double mse(const spectral::Field& reference, const spectral::Field& test) {
  require_same_grid(reference, test);
  double acc = 0.0;
  for (std::size_t i = 0; i < reference.values.size(); ++i) {
    const double d = reference.values[i] - test.values[i];
    acc += d * d;
  }
  return acc / double(reference.values.size());
}

atoms::ExtendedReal psnr(const spectral::Field& reference, const spectral::Field& test, double peak) {
  if (!(peak > 0.0)) throw Error(ErrorCode::ConfigInvalid, "peak must be positive");
  const double e = mse(reference, test);
  if (e == 0.0) return atoms::ExtendedReal::infinity();
  return atoms::ExtendedReal(10.0 * std::log10(peak * peak / e));
}

double l2_error(const spectral::Field& reference, const spectral::Field& test) {
  return std::sqrt(mse(reference, test) * reference.grid.volume());
}

double oracle_dual_value(const atoms::AtomFamily& family, const spectral::Spectrum& w, double s, double alpha) {
  double acc = 0.0;
  for (std::size_t i = 0; i < w.coeffs.size(); ++i) {
    const double e = std::norm(w.coeffs[i]);
    if (e == 0.0) continue;
    const atoms::ExtendedReal f = stored_weight(family, s, w.grid, i);
    if (f.is_infinite()) continue;
    acc += e / f.value();
  }
  return w.grid.volume() / alpha * std::sqrt(acc);
}

OracleResult dense_grid_oracle(const atoms::AtomFamily& family, const spectral::Spectrum& w, double alpha,
                               int grid_points) {
  if (grid_points < 2) throw Error(ErrorCode::ConfigInvalid, "oracle needs at least two grid points");
  OracleResult best{family.s_lo(), -1.0};
  const double h = (family.s_hi() - family.s_lo()) / (grid_points - 1);
  for (int i = 0; i < grid_points; ++i) {
    const double s = i == grid_points - 1 ? family.s_hi() : family.s_lo() + i * h;
    const double g = oracle_dual_value(family, w, s, alpha);
    if (g > best.value) best = {s, g};
  }
  return best;
}

}  // namespace infconv::testkit
