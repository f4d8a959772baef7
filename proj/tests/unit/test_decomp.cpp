#include "fixtures.hpp"
#include "xtal/decomp.hpp"
#include "xtal/paths.hpp"
#include "xtal/topology.hpp"

#include <doctest.h>

using namespace xtal;

namespace {

DecompositionReport run(const Configuration& c) {
  const auto& p = fx::canonical();
  const auto g = bond_graph(c, 0.05);
  const auto s = classify(c, g);
  const auto ps = pair_sets(c, g, s, p.v);
  return decompose(c, p.v, p.psi, s, ps);
}

}  // namespace

TEST_CASE("decomposition closes on the total energy") {
  const auto& p = fx::canonical();
  for (Real R : {3.0, 4.5}) {
    const auto c = fx::jitter(lattice_ball(LatticeKind::FCC, R), 0.01, 17);
    const auto r = run(c);
    const Real total = energy(c, p.v, p.psi).total;
    CHECK(r.total == doctest::Approx(total).epsilon(1e-12));
    CHECK(r.e_struct + r.e_elast + r.e_defect == doctest::Approx(total).epsilon(1e-10));
    CHECK(r.closure_error < 1e-9);
  }
}

TEST_CASE("no elastic or defect energy in a periodic crystal") {
  const auto c = periodic_crystal(LatticeKind::FCC, 5, 5, 5);
  const auto r = run(c);
  CHECK(std::abs(r.e_elast) < 1e-9);
  CHECK(r.e_defect == 0.0);
}

TEST_CASE("three-body site term on the cuboctahedral star") {
  const auto& p = fx::canonical();
  const auto c = periodic_crystal(LatticeKind::FCC, 3, 3, 3);
  // 24 nearest-neighbour pairs of the star at unit distance, counted in both orders
  const Real expected = 2.0 * 24.0 * p.psi.value(1.0, 1.0, 1.0);
  CHECK(site_three_body(c, p.psi, 0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("pair set cardinalities in a periodic crystal") {
  const auto& p = fx::canonical();
  const auto c = periodic_crystal(LatticeKind::FCC, 6, 6, 6);
  const auto g = bond_graph(c, 0.05);
  const auto s = classify(c, g);
  const auto ps = pair_sets(c, g, s, p.v);
  CHECK(ps.bonds == 6 * c.size());
  CHECK(ps.count.at(12) == 3 * c.size());
  CHECK(ps.count.at(18) == 12 * c.size());
  CHECK(ps.defect == 0);
}
