#include "infconv/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "infconv/error.hpp"

namespace infconv::measures {

double SigmaSupport::total_mass() const {
  double acc = 0.0;
  for (const SupportPoint& p : points) acc += p.mass;
  return acc;
}

void SparseMeasure::validate() const {
  for (const MeasureEntry& e : entries) {
    if (!(e.weight > 0.0)) throw Error(ErrorCode::ConfigInvalid, "measure weights must be positive");
    if (!(e.atom.spec.grid == grid)) throw Error(ErrorCode::GridMismatch, "atom lives on a different grid");
  }
}

SparseMeasure from_state(const gcg::GcgState& state, const spectral::Grid& grid) {
  SparseMeasure mu{grid, {}};
  mu.entries.reserve(state.atoms.size());
  for (std::size_t i = 0; i < state.atoms.size(); ++i) mu.entries.push_back({state.weights[i], state.atoms[i]});
  return mu;
}

spectral::Field reconstruct(const SparseMeasure& mu) {
  mu.validate();
  spectral::Spectrum acc = spectral::Spectrum::zeros(mu.grid);
  for (const MeasureEntry& e : mu.entries) spectral::axpy(e.weight, e.atom.spec, acc);
  return spectral::inverse(acc);
}

SigmaSupport collapse_sigma(const SparseMeasure& mu, double s_cluster_tol) {
  mu.validate();
  if (!(s_cluster_tol >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "cluster tolerance must be >= 0");
  std::vector<std::size_t> order(mu.entries.size());
  std::iota(order.begin(), order.end(), 0);
  // Secondary keys make the grouping and summation order independent of input order.
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ea = mu.entries[a];
    const auto& eb = mu.entries[b];
    if (ea.atom.s != eb.atom.s) return ea.atom.s < eb.atom.s;
    if (ea.weight != eb.weight) return ea.weight < eb.weight;
    return a < b;
  });

  SigmaSupport out;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && mu.entries[order[j]].atom.s - mu.entries[order[j - 1]].atom.s <= s_cluster_tol) ++j;
    spectral::Spectrum group = spectral::Spectrum::zeros(mu.grid);
    double weight_sum = 0.0, weighted_s = 0.0;
    for (std::size_t t = i; t < j; ++t) {
      const MeasureEntry& e = mu.entries[order[t]];
      spectral::axpy(e.weight, e.atom.spec, group);
      weight_sum += e.weight;
      weighted_s += e.weight * e.atom.s;
    }
    out.points.push_back({weighted_s / weight_sum, spectral::norm(group), j - i});
    i = j;
  }
  return out;
}

double tv_norm_upper(const SparseMeasure& mu) {
  double acc = 0.0;
  for (const MeasureEntry& e : mu.entries) acc += e.weight * spectral::norm(e.atom.spec);
  return acc;
}

double lifted_objective(const SparseMeasure& mu, const spectral::Spectrum& f_hat, double alpha) {
  mu.validate();
  spectral::Spectrum r = spectral::scaled(f_hat, -1.0);
  double reg = 0.0;
  for (const MeasureEntry& e : mu.entries) {
    spectral::axpy(e.weight, e.atom.spec, r);
    reg += e.weight * atoms::seminorm(e.atom.family, e.atom.spec, e.atom.s).value();
  }
  return 0.5 * spectral::inner(r, r) + alpha * reg;
}

nlohmann::json family_to_json(const atoms::AtomFamily& family) {
  nlohmann::json j;
  j["s_lo"] = family.s_lo();
  j["s_hi"] = family.s_hi();
  if (family.kind() == atoms::FamilyKind::AdaptiveOrder1D) {
    j["kind"] = "adaptive_order_1d";
    j["eta"] = family.eta();
  } else {
    j["kind"] = "adaptive_aniso_2d";
    j["gamma"] = family.gamma();
    j["zeta"] = family.zeta();
    j["omega"] = family.omega();
  }
  return j;
}

atoms::AtomFamily family_from_json(const nlohmann::json& doc) {
  try {
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "adaptive_order_1d") {
      return atoms::AtomFamily::adaptive_order(doc.at("eta").get<double>(), doc.at("s_lo").get<double>(),
                                               doc.at("s_hi").get<double>());
    }
    if (kind == "adaptive_aniso_2d") {
      return atoms::AtomFamily::adaptive_aniso(doc.at("gamma").get<double>(), doc.at("zeta").get<double>(),
                                               doc.at("omega").get<double>());
    }
    throw Error(ErrorCode::ConfigInvalid, "unknown family kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("family document: ") + e.what());
  }
}

nlohmann::json to_json(const SparseMeasure& mu) {
  nlohmann::json doc;
  doc["grid"] = {{"q", mu.grid.q}, {"n", mu.grid.n}};
  doc["family"] = mu.entries.empty() ? nlohmann::json(nullptr) : family_to_json(mu.entries.front().atom.family);
  doc["entries"] = nlohmann::json::array();
  for (const MeasureEntry& e : mu.entries) {
    std::vector<double> interleaved;
    interleaved.reserve(2 * e.atom.spec.coeffs.size());
    for (const auto& c : e.atom.spec.coeffs) {
      interleaved.push_back(c.real());
      interleaved.push_back(c.imag());
    }
    doc["entries"].push_back(
        {{"s", e.atom.s}, {"weight", e.weight}, {"j_value", e.atom.j_value}, {"spectrum", std::move(interleaved)}});
  }
  return doc;
}

SparseMeasure measure_from_json(const nlohmann::json& doc) {
  try {
    SparseMeasure mu;
    mu.grid = spectral::Grid::make(doc.at("grid").at("q").get<int>(), doc.at("grid").at("n").get<int>());
    const auto& entries = doc.at("entries");
    if (entries.empty()) return mu;
    const atoms::AtomFamily family = family_from_json(doc.at("family"));
    for (const auto& e : entries) {
      const auto values = e.at("spectrum").get<std::vector<double>>();
      if (values.size() != 2 * mu.grid.size()) throw Error(ErrorCode::ConfigInvalid, "spectrum length mismatch");
      spectral::Spectrum spec = spectral::Spectrum::zeros(mu.grid);
      for (std::size_t i = 0; i < mu.grid.size(); ++i) spec.coeffs[i] = {values[2 * i], values[2 * i + 1]};
      atoms::Atom atom{std::move(spec), e.at("s").get<double>(), family, e.at("j_value").get<double>()};
      mu.entries.push_back({e.at("weight").get<double>(), std::move(atom)});
    }
    mu.validate();
    return mu;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("measure document: ") + e.what());
  }
}

nlohmann::json to_json(const SigmaSupport& sigma) {
  nlohmann::json doc;
  doc["points"] = nlohmann::json::array();
  for (const SupportPoint& p : sigma.points) doc["points"].push_back({{"s", p.s}, {"mass", p.mass}, {"count", p.count}});
  doc["total_mass"] = sigma.total_mass();
  return doc;
}

}  // namespace infconv::measures
