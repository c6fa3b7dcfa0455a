#pragma once

// Synthetic phantoms, seeded noise, image metrics and a brute-force oracle for
// the parameter search.
//
// Noise stream: std::mt19937_64 seeded with the user seed; each pair of 53-bit
// uniforms (u1, u2) = ((x >> 11) * 2^-53) from consecutive engine outputs is
// mapped by Box-Muller to sqrt(-2 ln(1 - u1)) * (cos(2 pi u2), sin(2 pi u2)),
// consumed in that order. This mapping is part of the file-format contract of
// the CLI and does not change between releases.

#include <cstdint>

#include "infconv/atoms.hpp"
#include "infconv/spectral.hpp"

namespace infconv::testkit {

enum class PhantomKind { TwoMode1D, Grid2D, Diagonal2D };

struct Phantom {
  PhantomKind kind = PhantomKind::TwoMode1D;
  spectral::Grid grid;
  int period = 16;    // Grid2D
  int thickness = 2;  // Grid2D
  int wave1 = 4;      // Diagonal2D stripe wave vector
  int wave2 = 4;

  spectral::Field render() const;
};

// Coefficients 8/(2 pi) at m = +-3 and 2/(2 pi) at m = +-20, zero elsewhere.
// Throws ConfigInvalid (q != 1), GridTooSmall (n < 64).
spectral::Field two_mode_signal(const spectral::Grid& grid);

// Binary image: 1 on rows or columns whose index mod period is < thickness.
// Throws ConfigInvalid (q != 2), BadPeriod.
spectral::Field grid_phantom(const spectral::Grid& grid, int period, int thickness);

// Binary stripes: 1 where sin(k1 x1 + k2 x2) >= 0. Throws ConfigInvalid.
spectral::Field diagonal_phantom(const spectral::Grid& grid, int k1, int k2);

// Throws ConfigInvalid for std < 0.
spectral::Field add_gaussian_noise(const spectral::Field& v, double std, std::uint64_t seed);

double mse(const spectral::Field& reference, const spectral::Field& test);
// 10 log10(peak^2 / MSE); infinite when the fields are identical.
// Throws GridMismatch, ConfigInvalid (peak <= 0).
atoms::ExtendedReal psnr(const spectral::Field& reference, const spectral::Field& test, double peak);
// ||reference - test|| in the torus L2 norm.
double l2_error(const spectral::Field& reference, const spectral::Field& test);

struct OracleResult {
  double s_best = 0.0;
  double value = 0.0;
};

// Exhaustive evaluation of (2 pi)^q / alpha * sqrt(sum_m |w^(m)|^2 / f_s(m)) on
// `grid_points` uniform parameters, summed directly from atoms::weight.
// Largest value wins; ties go to the smaller s.
OracleResult dense_grid_oracle(const atoms::AtomFamily& family, const spectral::Spectrum& w, double alpha,
                               int grid_points);

// The same sum at one parameter.
double oracle_dual_value(const atoms::AtomFamily& family, const spectral::Spectrum& w, double s, double alpha);

}  // namespace infconv::testkit
