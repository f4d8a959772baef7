#pragma once

#include "xtal/common.hpp"
#include "xtal/energy.hpp"
#include "xtal/lattice.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <map>
#include <string>
#include <vector>

namespace xtal {

/// Edges | |y(x') - y(x)| - 1 | <= alpha, with image-resolved displacements.
struct BondGraph {
  Real alpha = 0.05;
  std::vector<std::vector<Neighbor>> adj;  // sorted by (j, displacement)
  std::vector<std::array<int, 2>> edges;   // i < j; one entry per bonded image

  std::size_t size() const { return adj.size(); }
  std::size_t degree(std::size_t i) const { return adj.at(i).size(); }
  std::size_t bond_count() const;
};

BondGraph bond_graph(const Configuration& config, Real alpha);

/// A(x): bonds with both endpoints in N(x), as index pairs into adj[x], and
/// the neighboring triangles at x.
struct NeighborhoodEdges {
  std::vector<std::array<int, 2>> edges;      // a < b, positions in adj[x]
  std::vector<std::array<int, 2>> triangles;  // triangles {x, a, b}; same as edges
  std::size_t half_count() const { return edges.size(); }
};

NeighborhoodEdges neighborhood_edges(const BondGraph& g, std::size_t x);

enum class SiteClass { Defect, CO, TCO };
std::string to_string(SiteClass c);

struct Registration {
  Mat3 rotation = Mat3::Identity();  // template -> neighbor cloud
  Real deviation = 0.0;              // max |R t_σ(i) - d_i|
  LatticeKind kind = LatticeKind::FCC;
  std::array<int, 12> perm{};        // neighbor slot i matches template vertex perm[i]
  Real deviation_other = 0.0;        // best deviation for the other template
};

struct ClassifyOptions {
  Real eps_max = 0.0;  // 0 -> 10 alpha
};

struct SiteClassification {
  Real alpha = 0.05;
  Real eps_max = 0.5;
  std::vector<SiteClass> cls;
  std::vector<char> in_x12;
  std::vector<char> in_xreg;
  std::vector<char> in_xreg2;
  std::vector<std::size_t> half_edges;
  std::map<int, Registration> registration;          // regular sites
  std::map<int, std::vector<int>> second_neighbors;  // sites in Xreg2
  std::size_t ties = 0;

  std::size_t count(SiteClass c) const;
  std::size_t count_x12() const;
  std::size_t count_xreg() const;
  std::size_t count_xreg2() const;
  std::size_t boundary_count() const { return cls.size() - count(SiteClass::CO); }
  bool in_boundary(std::size_t i) const { return cls.at(i) != SiteClass::CO; }
};

SiteClassification classify(const Configuration& config, const BondGraph& g, const ClassifyOptions& opts = {});

/// N²(x) for x in Xreg2.
const std::vector<int>& second_neighbors(const SiteClassification& c, std::size_t x);

/// Best registration of a 12-point neighbor cloud against one template over
/// all contact-graph isomorphisms; deviation = +inf if none exists.
Registration register_cloud(const std::vector<Vec3>& cloud, const std::vector<std::array<int, 2>>& edges,
                            LatticeKind kind);

/// min over proper rotations Q of the Hausdorff distance between Q·a and b.
/// Candidate rotations come from matching a fixed non-collinear triple of a
/// to every ordered triple of b.
Real point_set_deviation(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

/// Graph isomorphisms between two 12-vertex graphs (adjacency lists),
/// as vertex maps a -> b.
std::vector<std::array<int, 12>> isomorphisms(const std::vector<std::vector<int>>& a,
                                              const std::vector<std::vector<int>>& b);

/// CSV lines: id,class,degree,half_edges,rmsd.
std::string classification_csv(const SiteClassification& c, const BondGraph& g);
/// Extended XYZ with a per-site class column.
std::string classification_xyz(const Configuration& config, const SiteClassification& c);
nlohmann::json to_json(const SiteClassification& c);

}  // namespace xtal
