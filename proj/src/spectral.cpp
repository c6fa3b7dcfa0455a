#include "infconv/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "infconv/error.hpp"

namespace infconv::spectral {

namespace {

// FFTW's planner is not thread-safe; execution on a private plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void transform(const Grid& grid, std::vector<Complex>& data, int sign) {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = grid.q == 1 ? fftw_plan_dft_1d(grid.n, buf, buf, sign, FFTW_ESTIMATE)
                       : fftw_plan_dft_2d(grid.n, grid.n, buf, buf, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) {
    throw Error(ErrorCode::GridMismatch, "grids (q=" + std::to_string(a.q) + ", n=" +
                                             std::to_string(a.n) + ") and (q=" + std::to_string(b.q) +
                                             ", n=" + std::to_string(b.n) + ") differ");
  }
}

int centered(int k, int n) { return k <= n / 2 ? k : k - n; }
int wrap(int m, int n) { return ((m % n) + n) % n; }

}  // namespace

Grid Grid::make(int q, int n) {
  if (q != 1 && q != 2) throw Error(ErrorCode::InvalidGrid, "dimension must be 1 or 2, got " + std::to_string(q));
  if (n < 8 || n % 2 != 0) {
    throw Error(ErrorCode::InvalidGrid, "samples per axis must be even and >= 8, got " + std::to_string(n));
  }
  return Grid{q, n};
}

Frequency Grid::frequency(std::size_t index) const {
  if (q == 1) return {centered(int(index), n), 0};
  return {centered(int(index / n), n), centered(int(index % n), n)};
}

std::size_t Grid::index(Frequency m) const {
  if (q == 1) return std::size_t(wrap(m[0], n));
  return std::size_t(wrap(m[0], n)) * n + std::size_t(wrap(m[1], n));
}

std::size_t Grid::partner(std::size_t idx) const {
  if (q == 1) return (n - idx) % n;
  const std::size_t r = idx / n, c = idx % n;
  return ((n - r) % n) * n + (n - c) % n;
}

void Field::validate() const {
  if (values.size() != grid.size()) {
    throw Error(ErrorCode::InvalidField, "expected " + std::to_string(grid.size()) + " values, got " +
                                             std::to_string(values.size()));
  }
  for (double x : values) {
    if (!std::isfinite(x)) throw Error(ErrorCode::InvalidField, "non-finite sample");
  }
}

double Spectrum::hermitian_defect() const {
  double scale = 0.0;
  for (const auto& c : coeffs) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return 0.0;
  double defect = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    defect = std::max(defect, std::abs(coeffs[grid.partner(i)] - std::conj(coeffs[i])));
  }
  return defect / scale;
}

Spectrum forward(const Field& v) {
  v.validate();
  Spectrum out{v.grid, std::vector<Complex>(v.values.begin(), v.values.end())};
  transform(v.grid, out.coeffs, FFTW_FORWARD);
  const double inv = 1.0 / double(v.grid.size());
  for (auto& c : out.coeffs) c *= inv;
  // Make the real-input symmetry exact.
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    const std::size_t j = v.grid.partner(i);
    if (j == i) {
      out.coeffs[i] = Complex(out.coeffs[i].real(), 0.0);
    } else if (j > i) {
      const Complex avg = 0.5 * (out.coeffs[i] + std::conj(out.coeffs[j]));
      out.coeffs[i] = avg;
      out.coeffs[j] = std::conj(avg);
    }
  }
  return out;
}

Field inverse(const Spectrum& spectrum) {
  if (spectrum.coeffs.size() != spectrum.grid.size()) {
    throw Error(ErrorCode::InvalidField, "spectrum size does not match its grid");
  }
  const double defect = spectrum.hermitian_defect();
  if (defect > 1e-12) {
    throw Error(ErrorCode::NonHermitian, "relative symmetry defect " + std::to_string(defect));
  }
  std::vector<Complex> data = spectrum.coeffs;
  transform(spectrum.grid, data, FFTW_BACKWARD);
  Field out = Field::zeros(spectrum.grid);
  for (std::size_t i = 0; i < data.size(); ++i) out.values[i] = data[i].real();
  return out;
}

double inner(const Field& v, const Field& w) {
  require_same_grid(v.grid, w.grid);
  double acc = 0.0;
  for (std::size_t i = 0; i < v.values.size(); ++i) acc += v.values[i] * w.values[i];
  return v.grid.volume() / double(v.grid.size()) * acc;
}

double inner(const Spectrum& v, const Spectrum& w) {
  require_same_grid(v.grid, w.grid);
  double acc = 0.0;
  for (std::size_t i = 0; i < v.coeffs.size(); ++i) {
    acc += v.coeffs[i].real() * w.coeffs[i].real() + v.coeffs[i].imag() * w.coeffs[i].imag();
  }
  return v.grid.volume() * acc;
}

double norm(const Field& v) { return std::sqrt(std::max(0.0, inner(v, v))); }
double norm(const Spectrum& v) { return std::sqrt(std::max(0.0, inner(v, v))); }

double mean(const Field& v) {
  double acc = 0.0;
  for (double x : v.values) acc += x;
  return v.values.empty() ? 0.0 : acc / double(v.values.size());
}

Field project_zero_mean(const Field& v) {
  v.validate();
  Field out = v;
  const double m = mean(v);
  for (double& x : out.values) x -= m;
  return out;
}

Spectrum project_zero_mean(const Spectrum& v) {
  Spectrum out = v;
  out.coeffs[0] = 0.0;
  return out;
}

void axpy(double a, const Spectrum& x, Spectrum& y) {
  require_same_grid(x.grid, y.grid);
  for (std::size_t i = 0; i < x.coeffs.size(); ++i) y.coeffs[i] += a * x.coeffs[i];
}

Spectrum scaled(const Spectrum& x, double a) {
  Spectrum out = x;
  for (auto& c : out.coeffs) c *= a;
  return out;
}

}  // namespace infconv::spectral
