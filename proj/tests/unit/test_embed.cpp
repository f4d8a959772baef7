#include "oracles.hpp"
#include "xtal/embed.hpp"
#include "xtal/energy.hpp"
#include "xtal/topology.hpp"

#include <doctest.h>
#include <optional>

using namespace xtal;

namespace {

std::size_t nearest(const Configuration& c, const Vec3& x) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < c.size(); ++i)
    if ((c.positions[i] - x).norm() < (c.positions[best] - x).norm()) best = i;
  return best;
}

}  // namespace

TEST_CASE("reference grows over a perfect ball without violations") {
  const auto c = lattice_ball(LatticeKind::FCC, 9.0);
  const auto g = bond_graph(c, 0.05);
  const auto s = classify(c, g);
  const auto ref = grow_reference(c, g, s, static_cast<int>(nearest(c, Vec3::Zero())), 1.0);
  CHECK(ref.complete());
  CHECK(bond_violations(ref, g, c) == 0);
  for (std::size_t k = 0; k < ref.gradients.size(); ++k)
    if (ref.gradient_valid[k]) CHECK(dist_so3(ref.gradients[k]) < 1e-9);
}

TEST_CASE("rotated ball yields one constant rotation gradient") {
  auto c = lattice_ball(LatticeKind::FCC, 8.0);
  std::mt19937_64 rng(8);
  const Mat3 q = oracle::random_rotation(rng);
  for (auto& p : c.positions) p = q * p;
  const auto g = bond_graph(c, 0.05);
  const auto s = classify(c, g);
  const auto ref = grow_reference(c, g, s, static_cast<int>(nearest(c, Vec3::Zero())), 1.0);
  CHECK(ref.complete());
  std::optional<Mat3> first;
  for (std::size_t k = 0; k < ref.gradients.size(); ++k) {
    if (!ref.gradient_valid[k]) continue;
    if (!first) first = ref.gradients[k];
    CHECK((ref.gradients[k] - *first).norm() < 1e-9);
  }
  REQUIRE(first);
  CHECK(dist_so3(*first) < 1e-9);
  // the rotation is q up to a lattice symmetry
  const Mat3 sym = q.transpose() * *first;
  bool in_group = false;
  for (const auto& h : point_group(LatticeKind::FCC)) in_group |= (h - sym).norm() < 1e-9;
  CHECK(in_group);
}

TEST_CASE("distance to SO(3)") {
  CHECK(dist_so3(Mat3::Identity()) < 1e-15);
  const Mat3 d = 1.1 * Mat3::Identity();
  CHECK(dist_so3(d) == doctest::Approx(0.1 * std::sqrt(3.0)).epsilon(1e-12));
  Mat3 refl = Mat3::Identity();
  refl(2, 2) = -1;
  CHECK(dist_so3(refl) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("unit energy vanishes exactly on rigid motions") {
  for (auto type : {UnitType::Tetrahedron, UnitType::Octahedron}) {
    const auto ref = unit_vertices(type);
    std::mt19937_64 rng(3);
    const Mat3 q = oracle::random_rotation(rng);
    std::vector<Vec3> moved;
    for (const auto& p : ref) moved.push_back(q * p + Vec3(0.3, -2, 1));
    CHECK(w_tau(ref, moved) < 1e-20);
    moved[0] += Vec3(0.01, 0, 0);
    CHECK(w_tau(ref, moved) > 0);
    const auto spec = w_tau_hessian_spectrum(type);
    CHECK(spec.begin()->second == 6);  // rigid motions
    CHECK(std::abs(spec.begin()->first) < 1e-10);
  }
}
