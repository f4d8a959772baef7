#include "xtal/decomp.hpp"

#include "xtal/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace xtal {

Real site_three_body(const Configuration& config, const PotentialTriple& psi, std::size_t x) {
  if (x >= config.size()) throw UnknownIdError("unknown particle " + std::to_string(x));
  const NeighborList nl = build_neighbors(config, PotentialTriple::kSupport);
  const auto& nb = nl.of[x];
  std::vector<Real> terms;
  for (std::size_t a = 0; a < nb.size(); ++a)
    for (std::size_t b = a + 1; b < nb.size(); ++b) {
      const Real rab = (nb[b].d - nb[a].d).norm();
      if (nb[a].r >= PotentialTriple::kSupport || nb[b].r >= PotentialTriple::kSupport ||
          rab >= PotentialTriple::kSupport)
        continue;
      terms.push_back(psi.value(nb[a].r, nb[b].r, rab));
    }
  return 2.0 * pairwise_sum(terms);
}

DecompositionReport decompose(const Configuration& config, const PotentialPair& v, const PotentialTriple& psi,
                              const SiteClassification& cls, const PairSets& pairs) {
  if (cls.cls.size() != config.size() || pairs.defect_distance.size() != config.size())
    throw DomainError("decompose: inputs belong to different configurations");
  DecompositionReport r;
  const EnergyBreakdown eb = energy(config, v, psi);
  r.total = eb.total;
  r.e3 = eb.e3;
  r.e3_sum = eb.triple_sum;

  std::vector<Real> structural, s_short, s_med, s_long, defect;
  std::map<std::int64_t, std::size_t> counts;
  for (const auto& p : pairs.pairs) {
    const Real vr = v.value(p.r);
    if (p.cls == PairClass::Defect) {
      defect.push_back(2.0 * vr);
      continue;
    }
    ++counts[p.key6];
    const Real vl = v.value(key_lambda(p.key6));
    const Real el = 2.0 * (vr - vl);
    switch (p.cls) {
      case PairClass::Bond: s_short.push_back(el); break;
      case PairClass::Medium: s_med.push_back(el); break;
      default: s_long.push_back(el); break;
    }
  }
  for (const auto& [key, c] : counts) structural.push_back(2.0 * static_cast<Real>(c) * v.value(key_lambda(key)));
  r.e_struct = pairwise_sum(structural) + r.e3_sum;
  r.e_short = pairwise_sum(s_short);
  r.e_med = pairwise_sum(s_med);
  r.e_long = pairwise_sum(s_long);
  r.e_elast = r.e_short + r.e_med + r.e_long;
  r.e_defect = pairwise_sum(defect);
  r.closure_error = std::abs(r.e_struct + r.e_elast + r.e_defect - r.total) / std::max(1.0, std::abs(r.total));

  const Real psi111 = psi.value(1.0, 1.0, 1.0);
  r.e3_bound_margin = std::numeric_limits<Real>::infinity();
  for (std::size_t i = 0; i < config.size(); ++i) {
    const bool regular = cls.cls[i] != SiteClass::Defect;
    const Real bound = (regular ? 48.0 : 46.0) * psi111;
    const Real margin = r.e3[i] - bound;
    r.e3_bound_margin = std::min(r.e3_bound_margin, margin);
    if (margin < -1e-9 * std::max(1.0, std::abs(bound))) ++r.e3_bound_violations;
  }

  auto& c = r.counts;
  c.n = config.size();
  c.x12 = cls.count_x12();
  c.xreg = cls.count_xreg();
  c.co = cls.count(SiteClass::CO);
  c.tco = cls.count(SiteClass::TCO);
  c.boundary = cls.boundary_count();
  c.bonds = pairs.bonds;
  c.defect_pairs = pairs.defect;
  c.regular = counts;
  return r;
}

FineBoundReport fine_bound_report(const Configuration& config, const PotentialPair& v, const PotentialTriple& psi,
                                  Real alpha) {
  FineBoundReport f;
  const BondGraph g = bond_graph(config, alpha);
  const SiteClassification cls = classify(config, g);
  f.energy = energy(config, v, psi).total;
  f.e_star = efcc(v, psi, 1.0);
  f.n = config.size();
  f.lhs = f.energy - f.e_star * static_cast<Real>(f.n);
  std::vector<Real> d;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (const auto& e : g.adj[i]) {
      // Each bond appears once from each endpoint.
      const Real x = e.r - 1.0;
      d.push_back(0.5 * x * x);
    }
  f.distortion_sq = pairwise_sum(d);
  f.boundary = cls.boundary_count();
  f.boundary_term = std::sqrt(alpha) * static_cast<Real>(f.boundary);
  const Real denom = f.distortion_sq + f.boundary_term;
  if (denom > 1e-12) {
    f.c_defined = true;
    f.c_hat = f.lhs / denom;
  }
  return f;
}

std::string decomposition_csv_header() {
  return "radius,n,boundary,bonds,total,e_struct,e_elast,e_defect,e_short,e_med,e_long,per_particle\n";
}

std::string decomposition_csv_row(Real radius, const DecompositionReport& r) {
  std::string s = format_real(radius) + "," + std::to_string(r.counts.n) + "," +
                  std::to_string(r.counts.boundary) + "," + std::to_string(r.counts.bonds);
  for (const Real x : {r.total, r.e_struct, r.e_elast, r.e_defect, r.e_short, r.e_med, r.e_long,
                       r.total / static_cast<Real>(std::max<std::size_t>(1, r.counts.n))})
    s += "," + format_real(x);
  return s + "\n";
}

nlohmann::json to_json(const DecompositionReport& r) {
  nlohmann::json regular = nlohmann::json::array();
  for (const auto& [key, c] : r.counts.regular) regular.push_back({{"lambda", key_lambda(key)}, {"count", c}});
  const auto& c = r.counts;
  return {{"total", r.total},
          {"e_struct", r.e_struct},
          {"e_elast", r.e_elast},
          {"e_defect", r.e_defect},
          {"e_short", r.e_short},
          {"e_med", r.e_med},
          {"e_long", r.e_long},
          {"e3_sum", r.e3_sum},
          {"closure_error", r.closure_error},
          {"e3_bound_violations", r.e3_bound_violations},
          {"e3_bound_margin", r.e3_bound_margin},
          {"counts",
           {{"n", c.n},
            {"x12", c.x12},
            {"xreg", c.xreg},
            {"co", c.co},
            {"tco", c.tco},
            {"boundary", c.boundary},
            {"bonds", c.bonds},
            {"defect_pairs", c.defect_pairs},
            {"regular", regular}}}};
}

nlohmann::json to_json(const FineBoundReport& f) {
  return {{"energy", f.energy},
          {"e_star", f.e_star},
          {"n", f.n},
          {"lhs", f.lhs},
          {"distortion_sq", f.distortion_sq},
          {"boundary", f.boundary},
          {"boundary_term", f.boundary_term},
          {"c_defined", f.c_defined},
          {"c_hat", f.c_defined ? nlohmann::json(f.c_hat) : nlohmann::json(nullptr)}};
}

}  // namespace xtal
