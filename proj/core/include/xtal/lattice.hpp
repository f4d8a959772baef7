#pragma once

#include "xtal/common.hpp"

#include <array>
#include <string>
#include <unordered_map>
#include <vector>

namespace xtal {

enum class LatticeKind { FCC, HCP };

std::string to_string(LatticeKind kind);
LatticeKind parse_lattice_kind(const std::string& s);

/// Integer lattice coordinates over the basis plus the motif index (0 for fcc).
struct LatticeSite {
  std::array<std::int64_t, 3> a{0, 0, 0};
  int motif = 0;
  bool operator==(const LatticeSite&) const = default;
};

struct Vec3iHash {
  std::size_t operator()(const Vec3i& v) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (int i = 0; i < 3; ++i) {
      h ^= static_cast<std::uint64_t>(v[i]) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

// Exact arithmetic. Every site p is stored as an integer vector w = c·p with
// c = sqrt(2) (fcc) or 3·sqrt(2) (hcp); squared distances become integers
// ("keys") key = m·|p|^2 with m = 2 (fcc) or 6 (hcp).
Real coord_scale(LatticeKind kind);
std::int64_t key_scale(LatticeKind kind);
std::int64_t key_of(LatticeKind kind, const Vec3i& w);
Real key_to_distance(LatticeKind kind, std::int64_t key);
Vec3 to_position(LatticeKind kind, const Vec3i& w);

Mat3 basis(LatticeKind kind);
std::vector<Vec3> motif(LatticeKind kind);
Vec3i scaled_coords(LatticeKind kind, const LatticeSite& site);
Vec3 position(LatticeKind kind, const LatticeSite& site);

/// All sites with |p| <= radius (closed ball), ordered by (shell key, a, motif).
std::vector<LatticeSite> generate(LatticeKind kind, Real radius, std::size_t max_sites = 20'000'000);

struct Shell {
  std::int64_t key = 0;
  Real radius = 0.0;
  std::int64_t count = 0;
};

/// Distance shells around the origin site, excluding the origin itself.
std::vector<Shell> shells(LatticeKind kind, Real rmax);

struct ShellDifference {
  std::int64_t key6 = 0;  // 6·|p|^2
  Real radius = 0.0;
  std::int64_t fcc = 0;
  std::int64_t hcp = 0;
};
/// Per-distance shell counts of both lattices; only rows where they differ.
std::vector<ShellDifference> shell_differences(Real rmax);

/// Lattice distances of the fcc lattice up to rmax (exact enumeration).
std::vector<Real> fcc_distances(Real rmax);

/// The 12 unit fcc vectors in scaled coordinates, lexicographically ordered.
const std::vector<Vec3i>& unit_vectors();

/// Number of ordered pairs (k1, k2) of fcc sites with |k1| = |k2| = |k2 - k1| = 1.
std::int64_t unit_triangle_count();

struct OrderedBasis {
  std::array<int, 3> idx{};             // indices into unit_vectors()
  Eigen::Matrix<std::int64_t, 3, 3> W;  // columns in scaled coordinates
  Mat3 B;                               // columns as unit vectors
};

/// Ordered triples of unit fcc vectors with nonzero determinant.
const std::vector<OrderedBasis>& enumerate_bases();

/// Reflection Id - 2 v⊗v for a unit vector v.
Mat3 reflection(const Vec3& v);

/// Orthogonal maps fixing the origin site and mapping the lattice onto itself.
std::vector<Mat3> point_group(LatticeKind kind);

struct Polyhedron {
  LatticeKind kind = LatticeKind::FCC;
  std::vector<Vec3i> scaled;
  std::vector<Vec3> vertices;
};

/// Unit-sphere section of the lattice: the cuboctahedron (fcc) or the twisted
/// cuboctahedron (hcp), in canonical vertex order.
const Polyhedron& kissing_polyhedron(LatticeKind kind);

/// Vertices of the unit octahedron with one vertex at the origin.
std::vector<Vec3> octahedron_vertices();

struct ContactGraph {
  int n = 0;
  std::vector<std::vector<int>> adj;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 4>> squares;  // chordless 4-cycles in cyclic order
};

ContactGraph contact_graph(const std::vector<Vec3>& points, Real tol = 1e-9);

enum class UnitType { Tetrahedron, Octahedron };

struct Unit {
  UnitType type = UnitType::Tetrahedron;
  std::vector<int> vertices;
  Vec3 center = Vec3::Zero();
};

/// Four points of diameter 1: three or four lattice sites plus, for the eight
/// simplices of an octahedron, the octahedron center (index -1).
struct Simplex {
  int unit = 0;
  std::array<int, 4> v{};
};

struct UnitDomain {
  LatticeKind kind = LatticeKind::FCC;
  std::vector<Vec3i> sites;
  std::vector<Vec3> positions;
  std::vector<Unit> units;
  std::vector<Simplex> simplices;
  std::unordered_map<Vec3i, int, Vec3iHash> index;

  int find(const Vec3i& w) const {
    auto it = index.find(w);
    return it == index.end() ? -1 : it->second;
  }
  /// Reference vertex positions of a simplex (center resolved).
  std::array<Vec3, 4> simplex_points(const Simplex& s) const;
};

Real unit_volume(UnitType type);
Real simplex_volume(const UnitDomain& d, const Simplex& s);

/// Units tiling s·conv(Q_o); fcc only, s a positive integer.
UnitDomain decompose_scaled_octahedron(LatticeKind kind, int s);
/// Units whose vertices all belong to the given site set.
UnitDomain decompose_sites(LatticeKind kind, std::vector<Vec3i> sites);
/// Union of the units containing the origin site.
UnitDomain local_star(LatticeKind kind);

}  // namespace xtal
