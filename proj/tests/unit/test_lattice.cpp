#include "oracles.hpp"
#include "xtal/lattice.hpp"

#include <doctest.h>

using namespace xtal;

TEST_CASE("fcc shells match brute-force integer enumeration") {
  const auto sh = shells(LatticeKind::FCC, 3.0);
  const auto ref = oracle::fcc_shell_counts(18);
  REQUIRE(sh.size() == ref.size());
  std::size_t k = 0;
  for (const auto& [q, count] : ref) {
    CHECK(sh[k].radius == doctest::Approx(std::sqrt(q / 2.0)).epsilon(1e-14));
    CHECK(sh[k].count == count);
    ++k;
  }
}

TEST_CASE("hcp shells match explicit ABAB stacking") {
  const auto sh = shells(LatticeKind::HCP, 2.2);
  const auto ref = oracle::shells_about_origin(oracle::hcp_points(6), 2.2);
  REQUIRE(sh.size() == ref.size());
  for (std::size_t k = 0; k < ref.size(); ++k) {
    CHECK(sh[k].radius == doctest::Approx(ref[k].first).epsilon(1e-12));
    CHECK(sh[k].count == ref[k].second);
  }
  CHECK(sh[0].count == 12);
}

TEST_CASE("unit vectors and ordered bases") {
  CHECK(unit_vectors().size() == 12);
  for (const auto& w : unit_vectors()) CHECK(w.squaredNorm() == 2);
  const auto t = oracle::count_triples();
  CHECK(t.ordered_noncollinear == 960);
  CHECK(enumerate_bases().size() == static_cast<std::size_t>(t.nonsingular));
  for (const auto& b : enumerate_bases()) CHECK(std::abs(b.B.determinant()) > 1e-9);
}

TEST_CASE("generated ball contains exactly the sites within the radius") {
  const Real R = 2.5;
  const auto sites = generate(LatticeKind::FCC, R);
  long expected = 1;
  for (const auto& [q, c] : oracle::fcc_shell_counts(static_cast<long>(2 * R * R)))
    if (q / 2.0 <= R * R + 1e-12) expected += c;
  CHECK(static_cast<long>(sites.size()) == expected);
  for (const auto& s : sites) CHECK(position(LatticeKind::FCC, s).norm() <= R + 1e-12);
}

TEST_CASE("kissing polyhedra have the contact graph of the cuboctahedron family") {
  for (auto kind : {LatticeKind::FCC, LatticeKind::HCP}) {
    const auto& p = kissing_polyhedron(kind);
    REQUIRE(p.vertices.size() == 12);
    for (const auto& v : p.vertices) CHECK(v.norm() == doctest::Approx(1.0));
    const auto g = contact_graph(p.vertices);
    CHECK(g.edges.size() == 24);
    CHECK(g.triangles.size() == 8);
    CHECK(g.squares.size() == 6);
    for (const auto& a : g.adj) CHECK(a.size() == 4);
  }
}

TEST_CASE("point groups map the lattice to itself") {
  for (auto kind : {LatticeKind::FCC, LatticeKind::HCP}) {
    const auto& p = kissing_polyhedron(kind);
    const auto group = point_group(kind);
    CHECK(group.size() == (kind == LatticeKind::FCC ? 48u : 12u));
    for (const auto& g : group) {
      CHECK((g.transpose() * g - Mat3::Identity()).norm() < 1e-12);
      for (const auto& v : p.vertices) {
        Real best = 1e9;
        for (const auto& w : p.vertices) best = std::min(best, (g * v - w).norm());
        CHECK(best < 1e-12);
      }
    }
  }
}

TEST_CASE("reflection is an involution fixing the plane") {
  const Vec3 v = Vec3(1, 1, 0).normalized();
  const Mat3 s = reflection(v);
  CHECK((s * s - Mat3::Identity()).norm() < 1e-14);
  CHECK((s * v + v).norm() < 1e-14);
  CHECK((s * Vec3(0, 0, 1) - Vec3(0, 0, 1)).norm() < 1e-14);
}

TEST_CASE("unit domain volumes add up") {
  CHECK(unit_volume(UnitType::Tetrahedron) == doctest::Approx(std::sqrt(2.0) / 12));
  CHECK(unit_volume(UnitType::Octahedron) == doctest::Approx(std::sqrt(2.0) / 3));
  for (int sc : {1, 2, 3}) {
    const auto d = decompose_scaled_octahedron(LatticeKind::FCC, sc);
    Real vol = 0, diam = 0;
    for (const auto& s : d.simplices) vol += simplex_volume(d, s);
    for (const auto& a : d.positions)
      for (const auto& b : d.positions) diam = std::max(diam, (a - b).norm());
    const Real edge = diam / std::sqrt(2.0);
    CHECK(vol == doctest::Approx(std::sqrt(2.0) / 3 * edge * edge * edge));
  }
}
