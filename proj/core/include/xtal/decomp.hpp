#pragma once

#include "xtal/common.hpp"
#include "xtal/energy.hpp"
#include "xtal/paths.hpp"
#include "xtal/potential.hpp"
#include "xtal/topology.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <string>
#include <vector>

namespace xtal {

/// e₃(x) = 2 Σ_{unordered {x₁,x₂}} Ψ over triangles at x.
Real site_three_body(const Configuration& config, const PotentialTriple& psi, std::size_t x);

struct DecompositionCounts {
  std::size_t n = 0, x12 = 0, xreg = 0, co = 0, tco = 0, boundary = 0, bonds = 0, defect_pairs = 0;
  std::map<std::int64_t, std::size_t> regular;  // per λ key (6λ²)
};

struct DecompositionReport {
  Real total = 0.0;  // energy module total
  Real e_struct = 0.0, e_elast = 0.0, e_defect = 0.0;
  Real e_short = 0.0, e_med = 0.0, e_long = 0.0;
  Real e3_sum = 0.0;
  std::vector<Real> e3;
  Real closure_error = 0.0;  // |struct + elast + defect - total| / max(1, |total|)
  std::size_t e3_bound_violations = 0;
  Real e3_bound_margin = 0.0;  // min over x of e₃(x) - bound(x)
  DecompositionCounts counts;
};

DecompositionReport decompose(const Configuration& config, const PotentialPair& v, const PotentialTriple& psi,
                              const SiteClassification& cls, const PairSets& pairs);

struct FineBoundReport {
  Real energy = 0.0;
  Real e_star = 0.0;
  std::size_t n = 0;
  Real lhs = 0.0;            // E - e*·n
  Real distortion_sq = 0.0;  // Σ_{q∈𝒮} (|Δq| - 1)²
  std::size_t boundary = 0;
  Real boundary_term = 0.0;  // α^{1/2}·#∂X
  bool c_defined = false;   // denominator above 1e-12
  Real c_hat = 0.0;
};

FineBoundReport fine_bound_report(const Configuration& config, const PotentialPair& v, const PotentialTriple& psi,
                                  Real alpha);

std::string decomposition_csv_header();
std::string decomposition_csv_row(Real radius, const DecompositionReport& r);

nlohmann::json to_json(const DecompositionReport& r);
nlohmann::json to_json(const FineBoundReport& r);

}  // namespace xtal
