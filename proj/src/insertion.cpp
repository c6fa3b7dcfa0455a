#include "infconv/insertion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <utility>

#include "infconv/error.hpp"

namespace infconv::insertion {

namespace {

constexpr double kTieTolerance = 1e-12;

struct Sample {
  double s;
  double value;
};

void require_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::ConfigInvalid, "alpha must be positive");
}

void require_grid(const atoms::AtomFamily& family, const spectral::Grid& grid) {
  if (family.dimension() != grid.q) {
    throw Error(ErrorCode::GridMismatch, "family acts on q=" + std::to_string(family.dimension()) +
                                             ", residual has q=" + std::to_string(grid.q));
  }
}

// 53-bit uniform in [0, 1) from the raw engine output; stable across standard libraries.
double unit_uniform(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

// a is better than b: larger value, or equal value (relative tie) and smaller s.
bool better(const Sample& a, const Sample& b) {
  const double scale = std::max(std::abs(a.value), std::abs(b.value));
  if (std::abs(a.value - b.value) <= kTieTolerance * scale) return a.s < b.s;
  return a.value > b.value;
}

template <class F>
Sample golden_section(const F& g, double a, double b, double tol) {
  constexpr double kInvPhi = 0.6180339887498948482;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double gc = g(c), gd = g(d);
  Sample best = better({c, gc}, {d, gd}) ? Sample{c, gc} : Sample{d, gd};
  while (b - a > tol) {
    if (gc >= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - kInvPhi * (b - a);
      gc = g(c);
      if (better({c, gc}, best)) best = {c, gc};
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + kInvPhi * (b - a);
      gd = g(d);
      if (better({d, gd}, best)) best = {d, gd};
    }
  }
  return best;
}

}  // namespace

void SearchConfig::validate() const {
  if (n_starts < 1) throw Error(ErrorCode::ConfigInvalid, "n_starts must be >= 1");
  if (coarse_grid < 2) throw Error(ErrorCode::ConfigInvalid, "coarse_grid must be >= 2");
  if (!(local_tol > 0.0)) throw Error(ErrorCode::ConfigInvalid, "local_tol must be > 0");
}

DualObjective::DualObjective(const atoms::AtomFamily& family, const spectral::Spectrum& w, double alpha)
    : family_(family), grid_(w.grid), scale_(0.0) {
  require_alpha(alpha);
  require_grid(family, w.grid);
  scale_ = w.grid.volume() / alpha;
  for (std::size_t i = 0; i < w.coeffs.size(); ++i) {
    if (family.zero_mean() && i == 0) continue;
    const double e = std::norm(w.coeffs[i]);
    if (e > 0.0) terms_.push_back({i, e});
  }
}

double DualObjective::operator()(double s) const {
  const atoms::InverseWeights inv(family_, s);
  double acc = 0.0;
  for (const Term& t : terms_) acc += inv.at(grid_, t.index) * t.energy;
  return scale_ * std::sqrt(acc);
}

std::vector<double> DualObjective::cusp_parameters(std::size_t max_count) const {
  if (family_.kind() != atoms::FamilyKind::AdaptiveAniso2D || max_count == 0) return {};
  std::map<std::pair<int, int>, double> height;
  for (const Term& t : terms_) {
    auto [m1, m2] = grid_.frequency(t.index);
    if (m1 == 0 && m2 == 0) continue;
    const int g = std::gcd(std::abs(m1), std::abs(m2));
    int d1 = m1 / g, d2 = m2 / g;
    if (d1 < 0 || (d1 == 0 && d2 < 0)) {
      d1 = -d1;
      d2 = -d2;
    }
    const double base = family_.zeta() * std::hypot(double(m1), double(m2)) + family_.omega();
    height[{d1, d2}] += t.energy * std::pow(base, -4.0 * family_.gamma());
  }
  std::vector<std::pair<double, std::pair<int, int>>> ranked;
  ranked.reserve(height.size());
  for (const auto& [dir, h] : height) ranked.push_back({h, dir});
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  if (ranked.size() > max_count) ranked.resize(max_count);

  std::vector<double> out;
  out.reserve(ranked.size());
  for (const auto& [h, dir] : ranked) {
    // (cos s, sin s) orthogonal to dir.
    double s = std::atan2(double(dir.second), double(dir.first)) + std::numbers::pi / 2;
    if (s >= std::numbers::pi) s -= std::numbers::pi;
    out.push_back(std::clamp(s, family_.s_lo(), family_.s_hi()));
  }
  return out;
}

Insertion inner_maximizer(const atoms::AtomFamily& family, const spectral::Spectrum& w, double s, double alpha) {
  require_alpha(alpha);
  require_grid(family, w.grid);
  const atoms::InverseWeights inv(family, s);

  std::vector<double> inv_w(w.coeffs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < w.coeffs.size(); ++i) {
    if (family.zero_mean() && i == 0) continue;
    const double e = std::norm(w.coeffs[i]);
    if (e == 0.0) continue;
    inv_w[i] = inv.at(w.grid, i);
    acc += inv_w[i] * e;
  }
  if (!(acc > 0.0)) throw Error(ErrorCode::ZeroResidual, "residual has no energy on admissible modes");

  const double big_a = alpha * std::sqrt(acc);
  spectral::Spectrum v = spectral::Spectrum::zeros(w.grid);
  for (std::size_t i = 0; i < w.coeffs.size(); ++i) v.coeffs[i] = (inv_w[i] / big_a) * w.coeffs[i];

  Insertion out;
  out.s = s;
  out.atom = atoms::Atom{std::move(v), s, family, 0.0};
  out.atom.j_value = atoms::seminorm(family, out.atom.spec, s).value();
  out.dual_value = w.grid.volume() / alpha * std::sqrt(acc);
  return out;
}

double dual_value(const atoms::AtomFamily& family, const spectral::Spectrum& w, double s, double alpha) {
  return DualObjective(family, w, alpha)(s);
}

Insertion search_parameter(const atoms::AtomFamily& family, const spectral::Spectrum& w, double alpha,
                           const SearchConfig& cfg) {
  cfg.validate();
  const DualObjective g(family, w, alpha);
  if (g.vanishes()) throw Error(ErrorCode::ZeroResidual, "residual has no energy on admissible modes");

  const double lo = family.s_lo(), hi = family.s_hi();
  const int count = cfg.coarse_grid;
  const double h = (hi - lo) / (count - 1);
  std::mt19937_64 rng(cfg.seed);

  std::vector<Sample> samples;
  samples.reserve(std::size_t(2 * count));
  for (int i = 0; i < count; ++i) {
    double s = (i == count - 1) ? hi : lo + i * h;
    if (i > 0 && i < count - 1) s += (unit_uniform(rng) - 0.5) * 0.5 * h;
    samples.push_back({s, 0.0});
  }
  const int cusps = cfg.cusp_candidates < 0 ? count : cfg.cusp_candidates;
  for (double s : g.cusp_parameters(std::size_t(cusps))) samples.push_back({s, 0.0});
  std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) { return a.s < b.s; });
  samples.erase(std::unique(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) { return a.s == b.s; }),
                samples.end());
  for (Sample& p : samples) p.value = g(p.s);

  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const bool left_ok = i == 0 || samples[i].value >= samples[i - 1].value;
    const bool right_ok = i + 1 == samples.size() || samples[i].value >= samples[i + 1].value;
    if (left_ok && right_ok) peaks.push_back(i);
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [&](std::size_t a, std::size_t b) { return better(samples[a], samples[b]); });
  if (peaks.size() > std::size_t(cfg.n_starts)) peaks.resize(std::size_t(cfg.n_starts));

  Sample best = samples.front();
  for (const Sample& p : samples) {
    if (better(p, best)) best = p;
  }
  for (std::size_t i : peaks) {
    const double a = samples[i == 0 ? 0 : i - 1].s;
    const double b = samples[std::min(i + 1, samples.size() - 1)].s;
    if (b - a <= cfg.local_tol) continue;
    const Sample refined = golden_section(g, a, b, cfg.local_tol);
    if (better(refined, best)) best = refined;
  }

  return inner_maximizer(family, w, best.s, alpha);
}

}  // namespace infconv::insertion
