#pragma once

#include "xtal/common.hpp"
#include "xtal/lattice.hpp"
#include "xtal/topology.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <vector>

namespace xtal {

struct GrowOptions {
  Real accept_radius = 0.0;  // 0 -> 3 alpha
};

/// Lattice domain Ω, label map Φ and the piecewise-affine interpolation u.
struct ReferenceConfiguration {
  LatticeKind kind = LatticeKind::FCC;
  int scale = 0;  // s of s·Q_o; 0 for the hcp local star
  UnitDomain domain;
  int seed_site = 0;
  std::vector<int> phi;              // particle per domain site, -1 if unmapped
  std::vector<Vec3> u;               // image of each mapped site (unwrapped)
  std::vector<Mat3> gradients;       // per simplex
  std::vector<char> gradient_valid;  // all four vertices mapped
  std::vector<Vec3> center_values;   // per unit; octahedra: mean of the 6 vertex images
  std::vector<int> unmapped;         // domain sites left without a label
  Real defect_distance = 0.0;        // dist(y(seed), y(∂X))
  bool precondition_ok = false;      // defect_distance >= 2r + 3
  bool complete() const { return unmapped.empty(); }
  std::size_t mapped_count() const;
};

/// Flood-fill growth of a reference configuration around a regular seed.
/// fcc: Ω = s·Q_o with s = ceil(5r/2 + 3); hcp: the local star of the seed.
ReferenceConfiguration grow_reference(const Configuration& config, const BondGraph& g,
                                      const SiteClassification& cls, int seed, Real r,
                                      const GrowOptions& opts = {});

/// Per-simplex affine gradients; fills gradients, gradient_valid and center_values.
void deformation_gradients(ReferenceConfiguration& ref);

/// Unordered mapped site pairs violating "bonded iff unit lattice distance".
std::size_t bond_violations(const ReferenceConfiguration& ref, const BondGraph& g, const Configuration& config);

enum class MatrixNorm { Frobenius, Operator };
/// Distance to SO(3) from the singular values, smallest one sign-flipped when det F < 0.
Real dist_so3(const Mat3& f, MatrixNorm norm = MatrixNorm::Frobenius);

/// Σ over reference vertex pairs at distance 1 of (|u(η) - u(η')| - 1)^2.
Real w_tau(const std::vector<Vec3>& reference, const std::vector<Vec3>& values);

/// Hessian of w_tau at the identity for the unit tetrahedron or octahedron.
Eigen::MatrixXd w_tau_hessian(UnitType type);
/// Eigenvalues rounded to 1e-8 with multiplicities.
std::map<Real, int> w_tau_hessian_spectrum(UnitType type);
/// Vertices of the reference unit.
std::vector<Vec3> unit_vertices(UnitType type);

struct ConstrainedRotation {
  Mat3 g = Mat3::Identity();
  Real deviation_sq = 0.0;  // |F - G|^2 (Frobenius)
  Real dist_sq = 0.0;       // dist^2(F, SO(3))
  Real ratio = 0.0;         // deviation_sq / dist_sq (0 when both vanish)
  bool bound_ok = false;    // deviation_sq <= 66 dist_sq
};

/// G = T·S with S the rotation of the polar decomposition of F and T the
/// smallest rotation taking S v to the direction of F v.
ConstrainedRotation constrained_rotation(const Mat3& f, const Vec3& v);

struct RigidityReport {
  Mat3 best_rotation = Mat3::Identity();
  Real l2_deviation_sq = 0.0;
  Real bond_distortion_sq = 0.0;
  Real ratio = 0.0;
  Real sup_distortion = 0.0;
  Real max_dist_so3 = 0.0;  // operator norm
  std::size_t simplices = 0;
  std::size_t bonds = 0;
  Real volume = 0.0;
};

RigidityReport rigidity_report(const ReferenceConfiguration& ref, std::uint64_t seed = 0);

nlohmann::json to_json(const ReferenceConfiguration& ref);
nlohmann::json to_json(const RigidityReport& r);

}  // namespace xtal
