#include "xtal/relax.hpp"

#include "xtal/io.hpp"
#include "xtal/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace xtal {

std::string to_string(RelaxMethod m) { return m == RelaxMethod::Fire ? "fire" : "gradient-backtrack"; }

RelaxMethod parse_relax_method(const std::string& s) {
  if (s == "fire" || s == "FIRE") return RelaxMethod::Fire;
  if (s == "gradient-backtrack" || s == "GRADIENT_BACKTRACK") return RelaxMethod::GradientBacktrack;
  throw DomainError("unknown relaxation method '" + s + "'");
}

Real energy_noise_floor(Real e) { return 1e-12 * std::max(1.0, std::abs(e)); }

namespace {

Real max_norm(const std::vector<Vec3>& f) {
  Real m = 0.0;
  for (const auto& x : f) m = std::max(m, x.norm());
  return m;
}

struct Trial {
  bool ok = false;
  Real e = 0.0;
  std::vector<Vec3> f;
};

Trial evaluate(const Configuration& c, const PotentialPair& v, const PotentialTriple& psi) {
  Trial t;
  try {
    t.e = energy_and_forces(c, v, psi, t.f).total;
    t.ok = std::isfinite(t.e);
  } catch (const SingularConfigurationError&) {
    t.ok = false;
  }
  return t;
}

}  // namespace

RelaxResult relax(const Configuration& config, const PotentialPair& v, const PotentialTriple& psi,
                  const RelaxOptions& opts) {
  if (!(opts.force_tol > 0.0) || !(opts.step_init > 0.0) || !(opts.step_max >= opts.step_init))
    throw DomainError("relax: tolerances and step sizes must be positive");
  RelaxResult r;
  Configuration x = config;
  Trial cur = evaluate(x, v, psi);
  if (!cur.ok) throw SingularConfigurationError("relax: initial configuration has overlapping particles");
  r.energy_trace.push_back(cur.e);
  const std::size_t n = x.size();

  // FIRE parameters.
  constexpr Real f_inc = 1.1, f_dec = 0.5, alpha_start = 0.1, f_alpha = 0.99;
  constexpr std::size_t n_min = 5;
  constexpr Real dt_min = 1e-12;
  std::vector<Vec3> vel(n, Vec3::Zero());
  Real dt = opts.step_init, a = alpha_start;
  std::size_t n_pos = 0;

  for (r.steps = 0; r.steps < opts.max_steps; ++r.steps) {
    r.max_force = max_norm(cur.f);
    if (r.max_force <= opts.force_tol) {
      r.converged = true;
      r.reason = "force tolerance reached";
      break;
    }
    if (dt < dt_min) {
      r.reason = "step size collapse";
      break;
    }
    Configuration trial = x;
    if (opts.method == RelaxMethod::Fire) {
      Real p = 0.0, vn = 0.0, fn = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        p += cur.f[i].dot(vel[i]);
        vn += vel[i].squaredNorm();
        fn += cur.f[i].squaredNorm();
      }
      if (p > 0.0) {
        const Real scale = std::sqrt(vn / fn);
        for (std::size_t i = 0; i < n; ++i) vel[i] = (1.0 - a) * vel[i] + a * scale * cur.f[i];
        if (n_pos++ > n_min) {
          dt = std::min(dt * f_inc, opts.step_max);
          a *= f_alpha;
        }
      } else {
        std::fill(vel.begin(), vel.end(), Vec3::Zero());
        dt *= f_dec;
        a = alpha_start;
        n_pos = 0;
      }
      Real dmax = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        vel[i] += dt * cur.f[i];
        dmax = std::max(dmax, dt * vel[i].norm());
      }
      const Real shrink = dmax > opts.max_displacement ? opts.max_displacement / dmax : 1.0;
      for (std::size_t i = 0; i < n; ++i) trial.positions[i] += shrink * dt * vel[i];
    } else {
      const Real shrink = std::min(1.0, opts.max_displacement / (dt * r.max_force));
      for (std::size_t i = 0; i < n; ++i) trial.positions[i] += shrink * dt * cur.f[i];
    }

    Trial next = evaluate(trial, v, psi);
    bool accept = next.ok;
    if (accept) {
      if (opts.method == RelaxMethod::Fire) {
        accept = next.e <= cur.e + energy_noise_floor(cur.e);
      } else {
        Real fsq = 0.0;
        for (const auto& f : cur.f) fsq += f.squaredNorm();
        const Real shrink = std::min(1.0, opts.max_displacement / (dt * r.max_force));
        accept = next.e <= cur.e - 1e-4 * shrink * dt * fsq + energy_noise_floor(cur.e);
      }
    }
    if (!accept) {
      ++r.rejected;
      std::fill(vel.begin(), vel.end(), Vec3::Zero());
      dt *= f_dec;
      a = alpha_start;
      n_pos = 0;
      continue;
    }
    if (opts.method == RelaxMethod::GradientBacktrack) dt = std::min(dt * f_inc, opts.step_max);
    x = std::move(trial);
    cur = std::move(next);
    r.energy_trace.push_back(cur.e);
    if (opts.trajectory_every > 0 && r.steps % opts.trajectory_every == 0) r.frames.push_back(x);
  }
  if (!r.converged && r.reason.empty()) r.reason = "max_steps exceeded";
  r.max_force = max_norm(cur.f);
  r.min_distance = min_pair_distance(x);
  r.min_distance_ok = r.min_distance > 1.0 - opts.alpha;
  r.final = std::move(x);
  return r;
}

std::vector<UpperBoundRow> experiment_upper_bound(const PotentialPair& v, const PotentialTriple& psi,
                                                  const std::vector<Real>& radii) {
  const Real e_star = efcc(v, psi, 1.0);
  std::vector<UpperBoundRow> rows(radii.size());
  for (std::size_t k = 0; k < radii.size(); ++k) {
    UpperBoundRow& row = rows[k];
    row.radius = radii[k];
    const Configuration c = lattice_ball(LatticeKind::FCC, radii[k]);
    row.n = c.size();
    row.energy = energy(c, v, psi).total;
    row.per_particle = row.energy / static_cast<Real>(row.n);
    row.gap = row.per_particle - e_star;
    row.gap_times_radius = row.gap * row.radius;
  }
  return rows;
}

std::string upper_bound_csv(const std::vector<UpperBoundRow>& rows) {
  std::string s = "radius,n,energy,per_particle,gap,gap_times_radius\n";
  for (const auto& r : rows)
    s += format_real(r.radius) + "," + std::to_string(r.n) + "," + format_real(r.energy) + "," +
         format_real(r.per_particle) + "," + format_real(r.gap) + "," + format_real(r.gap_times_radius) + "\n";
  return s;
}

FccHcpComparison experiment_fcc_vs_hcp(const PotentialPair& v, const PotentialTriple& psi, Real radius, Real depth) {
  FccHcpComparison out;
  out.radius = radius;
  out.interior_radius = radius - depth;
  if (out.interior_radius < 0.0) throw DomainError("experiment_fcc_vs_hcp: radius smaller than the interior depth");
  auto interior_mean = [&](LatticeKind kind, std::size_t& count) {
    const Configuration c = lattice_ball(kind, radius);
    const EnergyBreakdown e = energy(c, v, psi);
    std::vector<Real> vals;
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c.positions[i].norm() <= out.interior_radius + 1e-9) vals.push_back(e.per_particle[i]);
    count = vals.size();
    return pairwise_sum(vals) / static_cast<Real>(vals.size());
  };
  out.fcc_mean = interior_mean(LatticeKind::FCC, out.fcc_interior);
  out.hcp_mean = interior_mean(LatticeKind::HCP, out.hcp_interior);
  out.difference = out.hcp_mean - out.fcc_mean;
  out.predicted = 2.0 * v.value(std::sqrt(8.0 / 3.0)) - 6.0 * v.value(std::sqrt(3.0));
  out.ratio = out.predicted != 0.0 ? out.difference / out.predicted : 0.0;
  out.fcc_lower = out.fcc_mean < out.hcp_mean;
  return out;
}

RecoveryResult experiment_recovery(const PotentialPair& v, const PotentialTriple& psi, Real radius, Real sigma,
                                   std::uint64_t seed, const RelaxOptions& opts) {
  RecoveryResult out;
  out.radius = radius;
  out.sigma = sigma;
  out.seed = seed;
  const Configuration clean = lattice_ball(LatticeKind::FCC, radius);
  Configuration noisy = clean;
  std::mt19937_64 rng(seed);
  std::normal_distribution<Real> gauss(0.0, sigma);
  for (auto& p : noisy.positions)
    for (int k = 0; k < 3; ++k) p[k] += gauss(rng);
  const RelaxResult a = relax(clean, v, psi, opts);
  const RelaxResult b = relax(noisy, v, psi, opts);
  const auto n = static_cast<Real>(clean.size());
  out.clean_per_particle = a.final_energy() / n;
  out.perturbed_per_particle = b.final_energy() / n;
  out.difference = out.perturbed_per_particle - out.clean_per_particle;
  out.converged = a.converged && b.converged;
  out.min_distance = b.min_distance;
  out.min_distance_ok = b.min_distance_ok;
  const BondGraph g = bond_graph(b.final, opts.alpha);
  const SiteClassification cls = classify(b.final, g);
  for (std::size_t i = 0; i < clean.size(); ++i)
    if (clean.positions[i].norm() <= radius - 1.5 + 1e-9) {
      ++out.interior;
      if (cls.cls[i] == SiteClass::CO) ++out.interior_co;
    }
  return out;
}

GradientCheck fd_gradient_check(const Configuration& config, const PotentialPair& v, const PotentialTriple& psi,
                                Real h) {
  if (config.size() > 100) throw PreconditionError("fd_gradient_check: at most 100 particles");
  GradientCheck out;
  const std::vector<Vec3> f = forces(config, v, psi);
  out.max_force = max_norm(f);
  Configuration c = config;
  auto central = [&](std::size_t i, int k, Real step) {
    const Real x0 = c.positions[i][k];
    c.positions[i][k] = x0 + step;
    const Real ep = energy(c, v, psi).total;
    c.positions[i][k] = x0 - step;
    const Real em = energy(c, v, psi).total;
    c.positions[i][k] = x0;
    return (ep - em) / (2.0 * step);
  };
  for (std::size_t i = 0; i < c.size(); ++i)
    for (int k = 0; k < 3; ++k) {
      const Real d1 = central(i, k, h), d2 = central(i, k, 0.5 * h);
      const Real grad = (4.0 * d2 - d1) / 3.0;
      out.max_abs_error = std::max(out.max_abs_error, std::abs(grad + f[i][k]));
    }
  out.relative_error = out.max_abs_error / std::max(1.0, out.max_force);
  return out;
}

nlohmann::json to_json(const RelaxResult& r, bool include_positions) {
  nlohmann::json j = {{"converged", r.converged},
                      {"reason", r.reason},
                      {"steps", r.steps},
                      {"rejected", r.rejected},
                      {"initial_energy", r.initial_energy()},
                      {"final_energy", r.final_energy()},
                      {"max_force", r.max_force},
                      {"min_distance", r.min_distance},
                      {"min_distance_ok", r.min_distance_ok},
                      {"accepted_steps", r.energy_trace.size() - 1}};
  if (include_positions) {
    nlohmann::json pos = nlohmann::json::array();
    for (const auto& p : r.final.positions) pos.push_back({p[0], p[1], p[2]});
    j["positions"] = pos;
  }
  return j;
}

nlohmann::json to_json(const UpperBoundRow& r) {
  return {{"radius", r.radius},
          {"n", r.n},
          {"energy", r.energy},
          {"per_particle", r.per_particle},
          {"gap", r.gap},
          {"gap_times_radius", r.gap_times_radius}};
}

nlohmann::json to_json(const FccHcpComparison& r) {
  return {{"radius", r.radius},
          {"interior_radius", r.interior_radius},
          {"fcc_interior", r.fcc_interior},
          {"hcp_interior", r.hcp_interior},
          {"fcc_mean", r.fcc_mean},
          {"hcp_mean", r.hcp_mean},
          {"difference", r.difference},
          {"predicted", r.predicted},
          {"ratio", r.ratio},
          {"fcc_lower", r.fcc_lower}};
}

nlohmann::json to_json(const RecoveryResult& r) {
  return {{"radius", r.radius},
          {"sigma", r.sigma},
          {"seed", r.seed},
          {"clean_per_particle", r.clean_per_particle},
          {"perturbed_per_particle", r.perturbed_per_particle},
          {"difference", r.difference},
          {"interior", r.interior},
          {"interior_co", r.interior_co},
          {"min_distance", r.min_distance},
          {"converged", r.converged},
          {"min_distance_ok", r.min_distance_ok}};
}

nlohmann::json to_json(const GradientCheck& r) {
  return {{"max_abs_error", r.max_abs_error}, {"max_force", r.max_force}, {"relative_error", r.relative_error}};
}

}  // namespace xtal
