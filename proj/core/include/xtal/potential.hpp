#pragma once

#include "xtal/common.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <string>
#include <vector>

namespace xtal {

/// Cubic polynomial in (r - x0) on [lo, hi).
struct PolyPiece {
  Real lo = 0.0;
  Real hi = 0.0;
  Real x0 = 0.0;
  std::array<Real, 4> c{0, 0, 0, 0};
};

/// An interval on which a named condition is knowingly not met by construction.
struct Repair {
  std::string condition;
  Real lo = 0.0;
  Real hi = 0.0;
  std::string reason;
};

/// Piecewise-cubic pair potential on [0, tail_start) followed by the power
/// tail tail_amplitude · r^-8. C^1 across every breakpoint.
class PotentialPair {
 public:
  Real alpha = 0.05;
  std::vector<PolyPiece> pieces;
  Real tail_start = 0.0;
  Real tail_amplitude = 0.0;
  Real cutoff = 6.0;
  std::vector<Repair> repairs;

  Real value(Real r) const;
  Real d1(Real r) const;
  Real d2(Real r) const;
  /// Value and first derivative in one lookup.
  void eval(Real r, Real& v, Real& dv) const;

  /// Same potential with a new tail amplitude; the last polynomial piece is
  /// re-fitted so the potential stays C^1 at tail_start.
  PotentialPair with_tail_amplitude(Real c) const;

  /// Largest jump of value or derivative across breakpoints.
  Real continuity_defect() const;

 private:
  const PolyPiece* piece(Real r) const;
};

/// Three-body potential -depth·h(r1)h(r2)h(r3) + A·s(min r)·t(max r).
class PotentialTriple {
 public:
  Real alpha = 0.05;
  Real amplitude = 40.0;
  Real depth = 1.0;  // multiplies the product well

  Real h(Real r) const;
  Real dh(Real r) const;
  Real s(Real r) const;
  Real ds(Real r) const;
  Real t(Real r) const;
  Real dt(Real r) const;

  Real value(Real r1, Real r2, Real r3) const;
  /// Partial derivatives with respect to r1, r2, r3.
  std::array<Real, 3> gradient(Real r1, Real r2, Real r3) const;

  static constexpr Real kSupport = 7.0 / 5.0;
  static constexpr Real kPlateau = 4.0 / 3.0;
};

struct CanonicalOptions {
  Real tail_amplitude = 0.0;
};

PotentialPair build_canonical_pair(Real alpha, const CanonicalOptions& opts = {});

/// C^1 piecewise-cubic Hermite interpolant through (r_i, v_i, dv_i) on
/// [0, r.back()], followed by the tail c·r^-8 (r.back() is the tail start).
PotentialPair hermite_pair(Real alpha, const std::vector<Real>& r, const std::vector<Real>& v,
                           const std::vector<Real>& dv, Real tail_amplitude);
PotentialTriple build_canonical_triple(Real alpha);

struct RenormalizedValue {
  Real value = 0.0;
  Real derivative = 0.0;
  Real tail_bound = 0.0;
};

/// V*(r) = Σ_{k ∈ fcc\0} V(r|k|) and its r-derivative. Shells up to
/// |k| = 24 are summed exactly; the remainder uses the power tail.
RenormalizedValue renormalized_pair(const PotentialPair& v, Real r);

/// Energy per particle of the dilated fcc lattice r·fcc.
Real efcc(const PotentialPair& v, const PotentialTriple& psi, Real r);
/// d/dr efcc(r).
Real efcc_derivative(const PotentialPair& v, const PotentialTriple& psi, Real r);
/// Minimizer of efcc near r = 1 (root of the radial derivative).
Real efcc_argmin(const PotentialPair& v, const PotentialTriple& psi);

enum class CheckStatus { Pass, Fail, Repaired };
std::string to_string(CheckStatus s);

struct ConditionCheck {
  std::string condition;
  CheckStatus status = CheckStatus::Pass;
  Real margin = 0.0;
  Real worst_location = 0.0;
  std::vector<std::array<Real, 2>> violations;
};

struct ValidationReport {
  std::vector<ConditionCheck> entries;
  bool ok() const;  // no entry has status Fail
  const ConditionCheck& at(const std::string& condition) const;
};

ValidationReport validate(const PotentialPair& v, const PotentialTriple& psi, Real grid_step = 0.0);

/// Consequences of the admissibility conditions that are implied on the
/// regions where those conditions hold.
ValidationReport derived_bounds(const PotentialPair& v);

struct TuningResult {
  PotentialPair pair;
  Real residual = 0.0;
  int iterations = 0;
  std::vector<std::string> broken;  // re-validated conditions now failing
};

/// Adjusts tail_amplitude so that (V*)'(1) = 0.
TuningResult tune_equilibrium(const PotentialPair& v, Real lo = 0.0, Real hi = 0.0, Real tol = 1e-12);

nlohmann::json to_json(const PotentialPair& v, const PotentialTriple* psi = nullptr);
PotentialPair pair_from_json(const nlohmann::json& j);
PotentialTriple triple_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ValidationReport& r);

}  // namespace xtal
