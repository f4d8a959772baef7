#pragma once

#include "xtal/common.hpp"
#include "xtal/energy.hpp"
#include "xtal/lattice.hpp"
#include "xtal/topology.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace xtal {

/// Number of bases generic endpoints are reachable from; M(µ) = count / kBasisNorm.
inline constexpr int kBasisNorm = 96;

/// A lattice path in scaled fcc coordinates (unit steps have |w|^2 = 2).
struct Path {
  std::vector<Vec3i> sites;
  std::optional<std::array<int, 3>> basis;  // first basis producing the path
  Vec3i k = Vec3i::Zero();
  std::int64_t basis_count = 0;
  Real weight = 0.0;              // raw M
  Real weight_renormalized = 0.0;  // M / Σ M over the endpoint's path set
  Vec3 center = Vec3::Zero();     // ζ
  Real radius = 0.0;              // ρ
  Real length() const;            // |k|
  std::vector<Vec3> positions() const;
};

/// Builds a path object from its sites, filling k, M, ζ and ρ.
Path make_path(std::vector<Vec3i> sites);

/// #{B : µ ∈ Γ[B]}: bases whose columns cover every step in non-decreasing order.
std::int64_t basis_count(const std::vector<Vec3i>& sites);

/// Paths 0 -> k. |k|^2 ∈ {2, 3}: all two-step paths; otherwise the monotone
/// basis paths over all bases. Throws CapacityError if |k| > cap.
std::vector<Path> enumerate_paths(const Vec3i& k, Real cap = 4.0);
/// Same by length: union over all endpoints with |k| = lambda.
std::vector<Path> enumerate_paths(Real lambda, Real cap = 4.0);

/// True when k lies in no plane spanned by two non-collinear unit vectors.
bool is_generic(const Vec3i& k);

struct NormalizationResult {
  Real sum = 0.0;
  bool generic = false;
  std::size_t paths = 0;
};
NormalizationResult normalization_check(const Vec3i& k, Real cap = 4.0);

/// Circumcenter of the segment end points inside their affine span, and the
/// largest distance from it to a site of the path.
std::pair<Vec3, Real> path_center(const std::vector<Vec3i>& sites);

/// κ_v applied to the reversed path; identity when no step equals v.
Path reflect(const Path& mu, const Vec3i& v);
/// Closure under all twelve reflections, ordered by site sequence.
std::vector<Path> orbit(const Path& mu);

/// a_k(v, B) = kᵀB^{-T}B^{-1}v when v is a column of B, else 0.
Real a_coefficient(const Vec3i& k, const Vec3i& v, const OrderedBasis& b);

struct LemmaLambdaResult {
  Real lhs = 0.0;
  Real rhs = 0.0;
  std::int64_t m = 0;
};
/// Σ_{|k|=λ} a_k(v,B)(k·v) against m(λ)λ²/3 for the column v of B.
LemmaLambdaResult lemma_lambda_check(Real lambda, const OrderedBasis& b, int column);

std::string paths_jsonl(const std::vector<Path>& paths);
nlohmann::json to_json(const Path& p);

// ---------------------------------------------------------------------------
// Pair sets

/// 6·λ² as an integer: fcc distances and √(8/3) alike.
std::int64_t lambda_key(Real lambda);
Real key_lambda(std::int64_t key6);

enum class PairClass { Bond, Medium, Long, Defect };
std::string to_string(PairClass c);

/// Unordered pair within the cutoff. The partner is the image y(j) + cell·shift.
struct ParticlePair {
  int i = 0;
  int j = 0;
  std::array<std::int8_t, 3> shift{0, 0, 0};
  Real r = 0.0;
  PairClass cls = PairClass::Defect;
  std::int64_t key6 = 0;  // λ(p) for regular pairs, 0 for defect pairs
};

struct PairSetOptions {
  Real cutoff = 0.0;         // 0 -> V's cutoff
  Real distance_factor = 10.0;  // endpoints at least factor·λ from y(∂X)
};

/// Lattice labels from a flood over bonded CO particles.
struct LatticeLabels {
  std::vector<char> labelled;
  std::vector<Vec3i> coord;       // scaled fcc coordinates
  std::vector<int> component;     // -1 when unlabelled
  std::array<Vec3i, 3> cell_coord{};  // lattice image of each cell vector
  std::size_t conflicts = 0;
};

LatticeLabels label_lattice(const Configuration& config, const BondGraph& g, const SiteClassification& cls);

struct PairSets {
  std::vector<ParticlePair> pairs;
  std::map<std::int64_t, std::size_t> count;  // per λ key, regular pairs
  std::size_t bonds = 0;
  std::size_t defect = 0;
  std::vector<Real> defect_distance;  // per particle: dist(y(x), y(∂X))
  LatticeLabels labels;
  std::size_t size_of(Real lambda) const;
};

PairSets pair_sets(const Configuration& config, const BondGraph& g, const SiteClassification& cls,
                   const PotentialPair& v, const PairSetOptions& opts = {});

struct CardinalityRow {
  Real lambda = 0.0;
  std::int64_t m = 0;
  Real expected = 0.0;  // m(λ)/m(1)·#𝒮
  std::size_t count = 0;
  Real gap = 0.0;       // expected - count
  Real constant = 0.0;  // gap / (λ³ #∂X)
};
/// Medium-pair cardinality diagnostics; m(√(8/3)) uses the hcp count 2.
std::vector<CardinalityRow> cardinality_report(const PairSets& p, const SiteClassification& cls);

nlohmann::json to_json(const PairSets& p);

}  // namespace xtal
