#pragma once

#include "xtal/energy.hpp"
#include "xtal/potential.hpp"

#include <random>

namespace fx {

struct Potentials {
  xtal::PotentialPair v;
  xtal::PotentialTriple psi;
};

inline const Potentials& canonical() {
  static const Potentials p{xtal::tune_equilibrium(xtal::build_canonical_pair(0.05)).pair,
                            xtal::build_canonical_triple(0.05)};
  return p;
}

inline xtal::Configuration jitter(xtal::Configuration c, xtal::Real sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<xtal::Real> n(0.0, sigma);
  for (auto& p : c.positions) p += xtal::Vec3(n(rng), n(rng), n(rng));
  return c;
}

}  // namespace fx
