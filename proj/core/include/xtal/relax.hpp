#pragma once

#include "xtal/common.hpp"
#include "xtal/energy.hpp"
#include "xtal/potential.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace xtal {

enum class RelaxMethod { Fire, GradientBacktrack };
std::string to_string(RelaxMethod m);
RelaxMethod parse_relax_method(const std::string& s);

struct RelaxOptions {
  RelaxMethod method = RelaxMethod::Fire;
  Real force_tol = 1e-8;       // on max_i |F_i|
  std::size_t max_steps = 100000;
  Real step_init = 1e-2;
  Real step_max = 0.05;
  Real max_displacement = 0.1;  // per particle and step
  Real alpha = 0.05;            // for the minimum-distance post-check
  std::uint64_t seed = 0;
  std::size_t trajectory_every = 0;  // 0: no frames
};

struct RelaxResult {
  Configuration final;
  std::vector<Real> energy_trace;  // accepted energies, first entry = initial
  std::vector<Configuration> frames;
  bool converged = false;
  std::size_t steps = 0;
  std::size_t rejected = 0;
  Real max_force = 0.0;
  Real min_distance = 0.0;
  bool min_distance_ok = false;  // min distance > 1 - alpha
  std::string reason;
  Real initial_energy() const { return energy_trace.front(); }
  Real final_energy() const { return energy_trace.back(); }
};

/// Accepted steps never raise the energy by more than this floor.
Real energy_noise_floor(Real e);

RelaxResult relax(const Configuration& config, const PotentialPair& v, const PotentialTriple& psi,
                  const RelaxOptions& opts = {});

struct UpperBoundRow {
  Real radius = 0.0;
  std::size_t n = 0;
  Real energy = 0.0;
  Real per_particle = 0.0;
  Real gap = 0.0;  // per_particle - E^fcc(1)
  Real gap_times_radius = 0.0;
};

/// Energies of the unrelaxed balls B(0,R) ∩ fcc.
std::vector<UpperBoundRow> experiment_upper_bound(const PotentialPair& v, const PotentialTriple& psi,
                                                  const std::vector<Real>& radii);
std::string upper_bound_csv(const std::vector<UpperBoundRow>& rows);

struct FccHcpComparison {
  Real radius = 0.0;
  Real interior_radius = 0.0;
  std::size_t fcc_interior = 0, hcp_interior = 0;
  Real fcc_mean = 0.0;  // interior per-particle energy
  Real hcp_mean = 0.0;
  Real difference = 0.0;  // hcp - fcc
  Real predicted = 0.0;   // 2 V(√(8/3)) - 6 V(√3)
  Real ratio = 0.0;       // difference / predicted
  bool fcc_lower = false;
};

/// Interior sites are those within radius - depth of the center.
FccHcpComparison experiment_fcc_vs_hcp(const PotentialPair& v, const PotentialTriple& psi, Real radius,
                                       Real depth = 2.5);

struct RecoveryResult {
  Real radius = 0.0;
  Real sigma = 0.0;
  std::uint64_t seed = 0;
  Real clean_per_particle = 0.0;
  Real perturbed_per_particle = 0.0;
  Real difference = 0.0;
  std::size_t interior = 0;
  std::size_t interior_co = 0;
  Real min_distance = 0.0;
  bool converged = false;
  bool min_distance_ok = false;
  bool interior_all_co() const { return interior_co == interior; }
};

/// Relaxes the clean fcc ball and a Gaussian-perturbed copy. Interior sites
/// are those with |p| <= radius - 1.5.
RecoveryResult experiment_recovery(const PotentialPair& v, const PotentialTriple& psi, Real radius, Real sigma,
                                   std::uint64_t seed, const RelaxOptions& opts = {});

struct GradientCheck {
  Real max_abs_error = 0.0;
  Real max_force = 0.0;
  Real relative_error = 0.0;  // max_abs_error / max(1, max |F|)
};

/// Central differences with one Richardson step against forces().
GradientCheck fd_gradient_check(const Configuration& config, const PotentialPair& v, const PotentialTriple& psi,
                                Real h = 1e-5);

nlohmann::json to_json(const RelaxResult& r, bool include_positions = false);
nlohmann::json to_json(const UpperBoundRow& r);
nlohmann::json to_json(const FccHcpComparison& r);
nlohmann::json to_json(const RecoveryResult& r);
nlohmann::json to_json(const GradientCheck& r);

}  // namespace xtal
