#pragma once

// Discrete Fourier analysis on the periodic torus T^q = [0, 2*pi)^q, q in {1, 2}.
//
// Conventions used everywhere in the library:
//   grid points     x_j = 2*pi*j/n per axis, j = 0..n-1 (row-major for q = 2,
//                   first coordinate is the slow/row axis)
//   coefficients    v^(m) = n^-q * sum_j v_j exp(-i m.x_j)
//   synthesis       v(x_j) = sum_m v^(m) exp(i m.x_j)
//   inner product   <v, w> = (2*pi)^q n^-q sum_j v_j w_j = (2*pi)^q sum_m v^(m) conj(w^(m))
// Frequencies are centered, m in {-n/2+1, ..., n/2}; the Nyquist mode is +n/2.

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace infconv::spectral {

using Complex = std::complex<double>;
using Frequency = std::array<int, 2>;  // (m1, m2); m2 = 0 when q = 1

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Grid {
  int q = 1;
  int n = 8;

  // Throws InvalidGrid unless q in {1,2}, n even and n >= 8.
  static Grid make(int q, int n);

  std::size_t size() const { return q == 1 ? std::size_t(n) : std::size_t(n) * std::size_t(n); }
  double spacing() const { return kTwoPi / n; }
  // (2*pi)^q, the measure of the torus.
  double volume() const { return q == 1 ? kTwoPi : kTwoPi * kTwoPi; }

  // Centered frequency stored at linear (FFT-ordered) index.
  Frequency frequency(std::size_t index) const;
  // Linear index of a centered frequency; frequencies are taken modulo n.
  std::size_t index(Frequency m) const;
  // Index of the coefficient that must equal the conjugate of the one at `index`.
  std::size_t partner(std::size_t index) const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

struct Field {
  Grid grid;
  std::vector<double> values;

  static Field zeros(const Grid& grid) { return {grid, std::vector<double>(grid.size(), 0.0)}; }
  // Throws InvalidField on size mismatch or non-finite values.
  void validate() const;
};

struct Spectrum {
  Grid grid;
  std::vector<Complex> coeffs;  // FFT order, see Grid::frequency

  static Spectrum zeros(const Grid& grid) { return {grid, std::vector<Complex>(grid.size())}; }

  Complex& at(Frequency m) { return coeffs[grid.index(m)]; }
  const Complex& at(Frequency m) const { return coeffs[grid.index(m)]; }

  // Largest |coeffs(-m) - conj(coeffs(m))| relative to max |coeffs|.
  double hermitian_defect() const;
};

Spectrum forward(const Field& v);
// Throws NonHermitian when hermitian_defect() > 1e-12.
Field inverse(const Spectrum& spectrum);

// Trapezoid quadrature inner product. Throws GridMismatch.
double inner(const Field& v, const Field& w);
// Same pairing evaluated through Parseval. Throws GridMismatch.
double inner(const Spectrum& v, const Spectrum& w);
double norm(const Field& v);
double norm(const Spectrum& v);

Field project_zero_mean(const Field& v);
Spectrum project_zero_mean(const Spectrum& v);
double mean(const Field& v);

// Elementwise helpers on spectra sharing a grid.
void axpy(double a, const Spectrum& x, Spectrum& y);
Spectrum scaled(const Spectrum& x, double a);

}  // namespace infconv::spectral
