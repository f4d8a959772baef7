#include "fixtures.hpp"
#include "oracles.hpp"
#include "xtal/lattice.hpp"

#include <doctest.h>

using namespace xtal;

TEST_CASE("dimer at unit distance") {
  const auto& p = fx::canonical();
  Configuration c;
  c.positions = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
  const auto e = energy(c, p.v, p.psi);
  CHECK(e.total == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(e.triple_sum == 0.0);
  for (const auto& f : forces(c, p.v, p.psi)) CHECK(f.norm() < 1e-9);
}

TEST_CASE("energy matches direct triple loop on a jittered cluster") {
  const auto& p = fx::canonical();
  const auto c = fx::jitter(lattice_ball(LatticeKind::FCC, 1.8), 0.03, 7);
  const auto e = energy(c, p.v, p.psi);
  const Real ref = oracle::energy(c.positions, p.v, p.psi);
  CHECK(e.total == doctest::Approx(ref).epsilon(1e-12));
  Real s = 0;
  for (Real x : e.per_particle) s += x;
  CHECK(s == doctest::Approx(e.total).epsilon(1e-12));
}

TEST_CASE("forces are minus the gradient of the direct energy") {
  const auto& p = fx::canonical();
  const auto c = fx::jitter(lattice_ball(LatticeKind::HCP, 1.5), 0.04, 11);
  const auto f = forces(c, p.v, p.psi);
  const auto ref = oracle::fd_forces(c.positions, [&](const std::vector<Vec3>& x) {
    return oracle::energy(x, p.v, p.psi);
  });
  for (std::size_t i = 0; i < f.size(); ++i) CHECK((f[i] - ref[i]).norm() < 1e-5 * (1 + ref[i].norm()));
}

TEST_CASE("energy is invariant under rigid motions and relabelling") {
  const auto& p = fx::canonical();
  auto c = fx::jitter(lattice_ball(LatticeKind::FCC, 2.2), 0.02, 3);
  const Real e0 = energy(c, p.v, p.psi).total;
  std::mt19937_64 rng(5);
  const Mat3 q = oracle::random_rotation(rng);
  Configuration moved;
  for (auto it = c.positions.rbegin(); it != c.positions.rend(); ++it) moved.positions.push_back(q * *it + Vec3(3, -1, 2));
  CHECK(energy(moved, p.v, p.psi).total == doctest::Approx(e0).epsilon(1e-11));
}

TEST_CASE("result does not depend on the thread count") {
  const auto& p = fx::canonical();
  const auto c = fx::jitter(lattice_ball(LatticeKind::FCC, 4.0), 0.02, 9);
  set_thread_count(1);
  const auto e1 = energy(c, p.v, p.psi);
  const auto f1 = forces(c, p.v, p.psi);
  set_thread_count(4);
  const auto e4 = energy(c, p.v, p.psi);
  const auto f4 = forces(c, p.v, p.psi);
  set_thread_count(1);
  CHECK(e1.total == e4.total);
  for (std::size_t i = 0; i < f1.size(); ++i) CHECK(f1[i] == f4[i]);
}

TEST_CASE("periodic fcc beats periodic hcp") {
  const auto& p = fx::canonical();
  const auto f = periodic_energy(periodic_crystal(LatticeKind::FCC, 4, 4, 4), p.v, p.psi);
  const auto h = periodic_energy(periodic_crystal(LatticeKind::HCP, 4, 4, 4), p.v, p.psi);
  CHECK(std::abs(f.relative) <= f.tail_bound);
  CHECK(h.per_particle > f.per_particle);
}

TEST_CASE("stored energy is stationary at the identity and rotation invariant") {
  const auto& p = fx::canonical();
  const Mat3 id = Mat3::Identity();
  CHECK(piola(LatticeKind::FCC, id, p.v, p.psi).norm() < 1e-6);
  std::mt19937_64 rng(1);
  const Mat3 q = oracle::random_rotation(rng);
  CHECK(stored_energy(LatticeKind::FCC, q, p.v, p.psi) ==
        doctest::Approx(stored_energy(LatticeKind::FCC, id, p.v, p.psi)).epsilon(1e-10));
}
