#include "fixtures.hpp"
#include "xtal/io.hpp"

#include <doctest.h>

using namespace xtal;

TEST_CASE("pair potential shape") {
  const auto& v = fx::canonical().v;
  CHECK(v.value(1.0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(v.continuity_defect() < 1e-9);
  CHECK(v.value(0.5) > 0.0);
  CHECK(std::abs(v.value(v.cutoff + 1.0)) < std::abs(v.value(v.cutoff)));
}

TEST_CASE("pair derivatives agree with central differences") {
  const auto& v = fx::canonical().v;
  const Real h = 1e-6;
  for (Real r = 0.8; r < 5.5; r += 0.0371) {
    const Real fd1 = (v.value(r + h) - v.value(r - h)) / (2 * h);
    const Real fd2 = (v.d1(r + h) - v.d1(r - h)) / (2 * h);
    CHECK(v.d1(r) == doctest::Approx(fd1).epsilon(1e-6).scale(1.0));
    CHECK(v.d2(r) == doctest::Approx(fd2).epsilon(1e-5).scale(1.0));
    Real val, dv;
    v.eval(r, val, dv);
    CHECK(val == doctest::Approx(v.value(r)).epsilon(1e-13).scale(1e-12));
    CHECK(dv == doctest::Approx(v.d1(r)).epsilon(1e-13).scale(1e-12));
  }
}

TEST_CASE("three-body term is symmetric and its gradient matches differences") {
  const auto& psi = fx::canonical().psi;
  const Real a = 1.03, b = 0.98, c = 1.21;
  CHECK(psi.value(a, b, c) == psi.value(c, a, b));
  CHECK(psi.value(a, b, c) == psi.value(b, a, c));
  CHECK(psi.value(1.0, 1.0, PotentialTriple::kSupport + 0.01) == 0.0);
  const auto g = psi.gradient(a, b, c);
  const Real h = 1e-7;
  CHECK(g[0] == doctest::Approx((psi.value(a + h, b, c) - psi.value(a - h, b, c)) / (2 * h)).epsilon(1e-5));
  CHECK(g[1] == doctest::Approx((psi.value(a, b + h, c) - psi.value(a, b - h, c)) / (2 * h)).epsilon(1e-5));
  CHECK(g[2] == doctest::Approx((psi.value(a, b, c + h) - psi.value(a, b, c - h)) / (2 * h)).epsilon(1e-5));
}

TEST_CASE("canonical potential passes validation and is tuned to equilibrium") {
  const auto& p = fx::canonical();
  const auto r = validate(p.v, p.psi);
  CHECK(r.ok());
  CHECK(std::abs(efcc_derivative(p.v, p.psi, 1.0)) < 1e-9);
  CHECK(efcc_argmin(p.v, p.psi) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("efcc equals the per-particle energy of a periodic crystal") {
  const auto& p = fx::canonical();
  const auto crystal = periodic_crystal(LatticeKind::FCC, 6, 6, 6);
  const auto e = energy(crystal, p.v, p.psi);
  // the periodic sum stops at the cutoff, efcc carries the full tail
  const Real per = e.total / crystal.size();
  CHECK(std::abs(per - efcc(p.v, p.psi, 1.0)) <= e.tail_bound / crystal.size());
}

TEST_CASE("potential JSON round-trip is exact") {
  const auto& p = fx::canonical();
  const auto j = nlohmann::json::parse(dump_json(to_json(p.v, &p.psi)));
  const auto v2 = pair_from_json(j);
  const auto psi2 = triple_from_json(j);
  for (Real r = 0.7; r < 6.5; r += 0.013) CHECK(v2.value(r) == p.v.value(r));
  CHECK(psi2.value(1.01, 0.99, 1.3) == p.psi.value(1.01, 0.99, 1.3));
}
