#include "fixtures.hpp"
#include "oracles.hpp"
#include "xtal/lattice.hpp"
#include "xtal/topology.hpp"

#include <doctest.h>

using namespace xtal;

TEST_CASE("periodic crystals are classified uniformly") {
  const auto fcc = periodic_crystal(LatticeKind::FCC, 4, 4, 4);
  const auto s1 = classify(fcc, bond_graph(fcc, 0.05));
  CHECK(s1.count(SiteClass::CO) == fcc.size());
  const auto hcp = periodic_crystal(LatticeKind::HCP, 4, 4, 4);
  const auto s2 = classify(hcp, bond_graph(hcp, 0.05));
  CHECK(s2.count(SiteClass::TCO) == hcp.size());
}

TEST_CASE("bond graph degree is twelve in a crystal and respects alpha") {
  const auto c = periodic_crystal(LatticeKind::FCC, 3, 3, 3);
  const auto g = bond_graph(c, 0.05);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.degree(i) == 12);
  CHECK(g.bond_count() == 6 * c.size());
}

TEST_CASE("small jitter keeps the classification, a vacancy marks its shell") {
  const auto base = periodic_crystal(LatticeKind::FCC, 4, 4, 4);
  const auto j = fx::jitter(base, 0.004, 2);
  CHECK(classify(j, bond_graph(j, 0.05)).count(SiteClass::CO) == base.size());
  auto v = base;
  v.positions.erase(v.positions.begin());
  const auto s = classify(v, bond_graph(v, 0.05));
  CHECK(s.count(SiteClass::Defect) >= 12);
}

TEST_CASE("point set deviation") {
  const auto& co = kissing_polyhedron(LatticeKind::FCC).vertices;
  const auto& tco = kissing_polyhedron(LatticeKind::HCP).vertices;
  std::mt19937_64 rng(4);
  const Mat3 q = oracle::random_rotation(rng);
  std::vector<Vec3> rotated;
  for (const auto& p : co) rotated.push_back(q * p);
  std::reverse(rotated.begin(), rotated.end());
  CHECK(point_set_deviation(co, rotated) < 1e-9);
  CHECK(point_set_deviation(co, tco) > 0.3);
}
