#pragma once

#include "xtal/common.hpp"
#include "xtal/lattice.hpp"
#include "xtal/potential.hpp"

#include <nlohmann/json.hpp>

#include <vector>

namespace xtal {

/// One neighbor of a particle: its index and the displacement y(j) - y(i)
/// (image-resolved for periodic configurations).
struct Neighbor {
  int j = 0;
  Vec3 d = Vec3::Zero();
  Real r = 0.0;
};

/// Per-particle neighbor lists within a cutoff, ordered by (j, displacement).
struct NeighborList {
  Real cutoff = 0.0;
  std::vector<std::vector<Neighbor>> of;
  Real min_distance = 0.0;  // smallest neighbor distance seen (cutoff if none)
};

/// Cell-list neighbor search. Periodic configurations include every image
/// within the cutoff, so a particle may appear several times in a list.
NeighborList build_neighbors(const Configuration& config, Real cutoff);

/// Smallest pair distance (periodic images included); infinity for n < 2.
Real min_pair_distance(const Configuration& config);

struct EnergyBreakdown {
  Real total = 0.0;
  Real pair_sum = 0.0;
  Real triple_sum = 0.0;
  std::vector<Real> per_particle;
  std::vector<Real> e3;  // three-body share of per_particle
  Real tail_bound = 0.0;
};

/// E = 2 Σ_{pairs} V + 6 Σ_{triples} Ψ. per_particle[i] = Σ_j V(r_ij) + e3[i],
/// e3[i] = 2 Σ_{j<k} Ψ over triangles at i. Periodic inputs are summed over the
/// motif with all images (energy per cell).
EnergyBreakdown energy(const Configuration& config, const PotentialPair& v, const PotentialTriple& psi);

/// Negative gradient of energy() with respect to each position.
std::vector<Vec3> forces(const Configuration& config, const PotentialPair& v, const PotentialTriple& psi);

/// Energy and forces from one neighbor search.
EnergyBreakdown energy_and_forces(const Configuration& config, const PotentialPair& v, const PotentialTriple& psi,
                                  std::vector<Vec3>& f);

/// Upper bound on Σ_i Σ_{j : r_ij > cutoff} |V(r_ij)| for n particles with
/// pairwise distance >= d_min, using |V(r)| <= |c| r^-8 beyond the cutoff.
Real pair_tail_bound(const PotentialPair& v, std::size_t n, Real d_min, Real cutoff);

struct PeriodicEnergy {
  Real per_particle = 0.0;  // mean over the motif
  Real relative = 0.0;      // per_particle - efcc(1)
  Real tail_bound = 0.0;    // per particle
  EnergyBreakdown cell;
};

PeriodicEnergy periodic_energy(const Configuration& z, const PotentialPair& v, const PotentialTriple& psi);

/// Stored energy W(F) per lattice site of F·L. The pair sum runs over the
/// fixed site set |k| <= kStoredRadius; hcp averages the two motif sites.
Real stored_energy(LatticeKind kind, const Mat3& f, const PotentialPair& v, const PotentialTriple& psi);
/// d/dr W(r·Id).
Real stored_energy_radial_derivative(LatticeKind kind, Real r, const PotentialPair& v, const PotentialTriple& psi);
/// Root of the radial derivative near r = 1.
Real radial_minimizer(LatticeKind kind, const PotentialPair& v, const PotentialTriple& psi);
/// S_ij = ∂W/∂F_ij by central differences (h = 1e-6) with one Richardson step.
Mat3 piola(LatticeKind kind, const Mat3& f, const PotentialPair& v, const PotentialTriple& psi);

inline constexpr Real kStoredRadius = 12.0;
inline constexpr Real kTrustRadius = 0.3;

/// Conventional periodic cells: fcc cubic cell (4 sites, edge √2) and hcp
/// orthohexagonal cell (4 sites), replicated n1×n2×n3.
Configuration periodic_crystal(LatticeKind kind, int n1, int n2, int n3);

/// Lattice sites of the closed ball B(center, radius) as a finite configuration.
Configuration lattice_ball(LatticeKind kind, Real radius);

nlohmann::json to_json(const EnergyBreakdown& e);

}  // namespace xtal
