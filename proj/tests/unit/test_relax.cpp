#include "fixtures.hpp"
#include "xtal/relax.hpp"

#include <doctest.h>

using namespace xtal;

TEST_CASE("stretched dimer relaxes to unit distance") {
  const auto& p = fx::canonical();
  Configuration c;
  c.positions = {Vec3(0, 0, 0), Vec3(1.07, 0.02, 0)};
  for (auto m : {RelaxMethod::Fire, RelaxMethod::GradientBacktrack}) {
    RelaxOptions o;
    o.method = m;
    const auto r = relax(c, p.v, p.psi, o);
    CHECK(r.converged);
    CHECK((r.final.positions[0] - r.final.positions[1]).norm() == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(r.final_energy() == doctest::Approx(-2.0).epsilon(1e-12));
  }
}

TEST_CASE("accepted energies never rise beyond the noise floor") {
  const auto& p = fx::canonical();
  const auto c = fx::jitter(lattice_ball(LatticeKind::FCC, 2.5), 0.03, 21);
  RelaxOptions o;
  o.max_steps = 400;
  const auto r = relax(c, p.v, p.psi, o);
  for (std::size_t i = 1; i < r.energy_trace.size(); ++i)
    CHECK(r.energy_trace[i] <= r.energy_trace[i - 1] + energy_noise_floor(r.energy_trace[i - 1]));
  CHECK(r.final_energy() < r.initial_energy());
}

TEST_CASE("analytic forces pass the finite-difference check") {
  const auto& p = fx::canonical();
  const auto c = fx::jitter(lattice_ball(LatticeKind::FCC, 1.5), 0.05, 2);
  const auto g = fd_gradient_check(c, p.v, p.psi);
  CHECK(g.relative_error < 1e-6);
}

TEST_CASE("method names round-trip") {
  for (auto m : {RelaxMethod::Fire, RelaxMethod::GradientBacktrack}) CHECK(parse_relax_method(to_string(m)) == m);
  CHECK_THROWS(parse_relax_method("newton"));
}
