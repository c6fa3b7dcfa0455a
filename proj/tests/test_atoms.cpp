#include "doctest.h"

#include <cmath>
#include <random>

#include "infconv/atoms.hpp"
#include "infconv/error.hpp"
#include "oracles.hpp"

using namespace infconv;
using namespace infconv::atoms;
using spectral::Complex;
using spectral::Grid;
using spectral::Spectrum;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::Usage;
}

Spectrum two_cos3(const Grid& g) {
  Spectrum s = Spectrum::zeros(g);
  s.at({3, 0}) = 1.0;
  s.at({-3, 0}) = 1.0;
  return s;
}

}  // namespace

TEST_CASE("family construction") {
  CHECK_NOTHROW(AtomFamily::adaptive_order(2.0));
  CHECK(code_of([] { AtomFamily::adaptive_order(0.0); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { AtomFamily::adaptive_order(2.0, 0.0); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { AtomFamily::adaptive_order(2.0, 0.5, 1.5); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { AtomFamily::adaptive_aniso(0.0, 0.0, 1.0); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { AtomFamily::adaptive_aniso(1.5, 0.0, 1.0); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { AtomFamily::adaptive_aniso(0.25, -1.0, 1.0); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { AtomFamily::adaptive_aniso(0.25, 0.0, 0.0); }) == ErrorCode::ConfigInvalid);
  const auto a = AtomFamily::adaptive_aniso(0.25, 1e-3, 1e-3);
  CHECK(a.s_lo() == 0.0);
  CHECK(a.s_hi() == doctest::Approx(oracle::kPi).epsilon(1e-15));
  CHECK(a.parameter_distance(0.01, a.s_hi() - 0.01) == doctest::Approx(0.02));
  const auto o = AtomFamily::adaptive_order(2.0);
  CHECK(o.s_lo() == 1e-3);
  CHECK(o.parameter_distance(0.1, 0.9) == doctest::Approx(0.8));
}

TEST_CASE("weight examples") {
  const auto o = AtomFamily::adaptive_order(2.0);
  CHECK(weight(o, 0.5, {3, 0}).value() == doctest::Approx(144.0).epsilon(1e-14));
  CHECK(weight(o, 0.5, {-3, 0}).value() == doctest::Approx(144.0).epsilon(1e-14));
  CHECK(weight(o, 0.5, {0, 0}).is_infinite());
  CHECK(code_of([&] { (void)weight(o, 0.0, {1, 0}); }) == ErrorCode::ParamOutOfRange);
  CHECK(code_of([&] { (void)weight(o, 1.01, {1, 0}); }) == ErrorCode::ParamOutOfRange);

  const auto a1 = AtomFamily::adaptive_aniso(0.25, 0.0, 1.0);
  CHECK(weight(a1, oracle::kPi / 2, {1, 0}).value() == doctest::Approx(1.0).epsilon(1e-14));
  const auto a2 = AtomFamily::adaptive_aniso(0.25, 1e-3, 1e-3);
  CHECK(weight(a2, 0.0, {2, 0}).value() == doctest::Approx(2.003).epsilon(1e-14));
  CHECK(weight(a2, 0.0, {0, 0}).value() == doctest::Approx(1e-3).epsilon(1e-14));
  CHECK(code_of([&] { (void)weight(a2, 3.2, {1, 0}); }) == ErrorCode::ParamOutOfRange);
}

TEST_CASE("small s uses a stable log-domain weight") {
  const auto o = AtomFamily::adaptive_order(2.0, 1e-3);
  const double s = 1e-3;
  for (int m : {1, 7, 128}) {
    const double expect = std::exp(4 * s * std::log(double(m)) - 4 * std::log(s));
    CHECK(weight(o, s, {m, 0}).value() == doctest::Approx(expect).epsilon(1e-12));
    const Grid g = Grid::make(1, 256);
    CHECK(inverse_mode_weight(o, s, g, g.index({m, 0})) == doctest::Approx(1.0 / expect).epsilon(1e-12));
  }
}

TEST_CASE("Nyquist aliases are averaged in 2D") {
  const auto a = AtomFamily::adaptive_aniso(0.25, 1e-3, 1e-3);
  const Grid g = Grid::make(2, 8);
  const double s = 0.7;
  const std::size_t idx = g.index({4, 1});
  const double fa = weight(a, s, {4, 1}).value(), fb = weight(a, s, {-4, 1}).value();
  CHECK(mode_weight(a, s, g, idx).value() == doctest::Approx(0.5 * (fa + fb)).epsilon(1e-14));
  // partner coefficient (-4,-1) ~ (4,-1) gets the same value, so the multiplier is Hermitian
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(mode_weight(a, s, g, i).value() == doctest::Approx(mode_weight(a, s, g, g.partner(i)).value()).epsilon(1e-15));
  }
}

TEST_CASE("seminorm examples") {
  const Grid g = Grid::make(1, 32);
  const auto o = AtomFamily::adaptive_order(2.0);
  CHECK(seminorm(o, two_cos3(g), 0.5).value() == doctest::Approx(12 * std::sqrt(2.0)).epsilon(1e-13));
  CHECK(seminorm(o, Spectrum::zeros(g), 0.5).value() == 0.0);
  Spectrum with_mean = two_cos3(g);
  with_mean.coeffs[0] = 1.0;
  CHECK(seminorm(o, with_mean, 0.5).is_infinite());

  // cos(y): modes (0, +-1), coefficient 1/2, direction (1,0) is orthogonal to them
  const Grid g2 = Grid::make(2, 16);
  const auto a = AtomFamily::adaptive_aniso(0.25, 0.0, 1.0);
  Spectrum cy = Spectrum::zeros(g2);
  cy.at({0, 1}) = 0.5;
  cy.at({0, -1}) = 0.5;
  const double j = seminorm(a, cy, 0.0).value();
  CHECK(j == doctest::Approx(oracle::seminorm(a, cy, 0.0)).epsilon(1e-14));
  CHECK(j == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(seminorm(a, Spectrum::zeros(g2), 1.0).value() == 0.0);

  CHECK(code_of([&] { (void)seminorm(o, cy, 0.5); }) == ErrorCode::GridMismatch);
  CHECK(code_of([&] { (void)seminorm(o, two_cos3(g), 2.0); }) == ErrorCode::ParamOutOfRange);
}

TEST_CASE("seminorm agrees with direct summation") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto o = AtomFamily::adaptive_order(2.0);
  const auto a = AtomFamily::adaptive_aniso(0.25, 1e-3, 1e-3);
  for (int t = 0; t < 50; ++t) {
    const Grid g1 = Grid::make(1, 64);
    Spectrum v = spectral::forward(oracle::random_field(g1, rng));
    v.coeffs[0] = 0.0;
    const double s1 = o.s_lo() + u(rng) * (o.s_hi() - o.s_lo());
    CHECK(seminorm(o, v, s1).value() == doctest::Approx(oracle::seminorm(o, v, s1)).epsilon(1e-12));
    const Grid g2 = Grid::make(2, 16);
    const Spectrum w = spectral::forward(oracle::random_field(g2, rng));
    const double s2 = u(rng) * oracle::kPi;
    CHECK(seminorm(a, w, s2).value() == doctest::Approx(oracle::seminorm(a, w, s2)).epsilon(1e-12));
  }
}

TEST_CASE("normalize_to_extremal") {
  const Grid g = Grid::make(1, 32);
  const auto o = AtomFamily::adaptive_order(2.0);
  const Atom at = normalize_to_extremal(o, two_cos3(g), 0.5, 1e-2);
  const double scale = 100.0 / (12 * std::sqrt(2.0));
  CHECK(at.spec.at({3, 0}).real() == doctest::Approx(scale).epsilon(1e-13));
  CHECK(2 * scale == doctest::Approx(11.785).epsilon(1e-4));
  CHECK(1e-2 * at.j_value == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(at.s == 0.5);

  const Atom again = normalize_to_extremal(o, at.spec, 0.5, 1e-2);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(again.spec.coeffs[i] - at.spec.coeffs[i]) <= 1e-12 * scale);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    Spectrum w = spectral::forward(oracle::random_field(g, rng));
    w.coeffs[0] = 0.0;
    const double s = 1e-3 + u(rng) * (1 - 1e-3);
    const double alpha = std::pow(10.0, -3 + 4 * u(rng));
    const Atom a = normalize_to_extremal(o, w, s, alpha);
    CHECK(alpha * oracle::seminorm(o, a.spec, s) == doctest::Approx(1.0).epsilon(1e-10));
    // direction preserved
    const double ratio = a.spec.coeffs[1].real() / w.coeffs[1].real();
    CHECK(ratio > 0.0);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(std::abs(a.spec.coeffs[i] - ratio * w.coeffs[i]) <= 1e-10 * std::abs(ratio * w.coeffs[i]) + 1e-300);
  }

  CHECK(code_of([&] { (void)normalize_to_extremal(o, Spectrum::zeros(g), 0.5, 1.0); }) == ErrorCode::ZeroInput);
  Spectrum m = two_cos3(g);
  m.coeffs[0] = 1.0;
  CHECK(code_of([&] { (void)normalize_to_extremal(o, m, 0.5, 1.0); }) == ErrorCode::InfiniteSeminorm);
  CHECK(code_of([&] { (void)normalize_to_extremal(o, two_cos3(g), 0.5, 0.0); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("seminorm properties on random samples") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto o = AtomFamily::adaptive_order(2.0);
  const auto a = AtomFamily::adaptive_aniso(0.25, 1e-3, 1e-3);
  for (int t = 0; t < 100; ++t) {
    for (const AtomFamily* fam : {&o, &a}) {
      const Grid g = Grid::make(fam->dimension(), fam->dimension() == 1 ? 64 : 16);
      Spectrum v = spectral::forward(oracle::random_field(g, rng));
      Spectrum w = spectral::forward(oracle::random_field(g, rng));
      if (fam->zero_mean()) v.coeffs[0] = w.coeffs[0] = 0.0;
      const double s = fam->s_lo() + u(rng) * (fam->s_hi() - fam->s_lo());
      const double jv = seminorm(*fam, v, s).value(), jw = seminorm(*fam, w, s).value();
      const double lambda = 10 * u(rng);
      CHECK(seminorm(*fam, spectral::scaled(v, lambda), s).value() == doctest::Approx(lambda * jv).epsilon(1e-12));
      Spectrum sum = v;
      spectral::axpy(1.0, w, sum);
      CHECK(seminorm(*fam, sum, s).value() <= jv + jw + 1e-10);
      const double nv = spectral::norm(v);
      if (fam->zero_mean()) {
        CHECK(jv >= nv / std::sqrt(2 * oracle::kPi) - 1e-10);
      } else {
        CHECK(jv >= std::pow(fam->omega(), 2 * fam->gamma()) / (2 * oracle::kPi) * nv - 1e-10);
      }
    }
  }
}
