#include "xtal/verify.hpp"

#include "xtal/embed.hpp"
#include "xtal/energy.hpp"
#include "xtal/io.hpp"
#include "xtal/lattice.hpp"
#include "xtal/paths.hpp"
#include "xtal/potential.hpp"
#include "xtal/relax.hpp"
#include "xtal/topology.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace xtal {

namespace {

struct Potentials {
  PotentialPair v;
  PotentialTriple psi;
};

const Potentials& tuned(Real alpha) {
  static thread_local Real cached_alpha = -1.0;
  static thread_local Potentials p;
  if (cached_alpha != alpha) {
    p.v = tune_equilibrium(build_canonical_pair(alpha)).pair;
    p.psi = build_canonical_triple(alpha);
    cached_alpha = alpha;
  }
  return p;
}

nlohmann::json mat_json(const Mat3& m) {
  return {{m(0, 0), m(0, 1), m(0, 2)}, {m(1, 0), m(1, 1), m(1, 2)}, {m(2, 0), m(2, 1), m(2, 2)}};
}

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<Real> g(0.0, 1.0);
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  q.normalize();
  return q.toRotationMatrix();
}

CriterionResult shell_counts() {
  CriterionResult r;
  std::map<std::int64_t, std::int64_t> fcc;
  for (const auto& s : shells(LatticeKind::FCC, 1.8)) fcc[s.key] = s.count;
  Real hcp_83 = 0, hcp_3 = 0, fcc_3 = 0;
  for (const auto& d : shell_differences(1.8)) {
    if (d.key6 == 16) hcp_83 = static_cast<Real>(d.hcp);
    if (d.key6 == 18) {
      hcp_3 = static_cast<Real>(d.hcp);
      fcc_3 = static_cast<Real>(d.fcc);
    }
  }
  r.detail = {{"fcc_m1", fcc[2]}, {"fcc_m_sqrt2", fcc[4]}, {"fcc_m_sqrt3", fcc[6]},
              {"hcp_m_sqrt8_3", hcp_83}, {"hcp_m_sqrt3", hcp_3}, {"fcc_m_sqrt3_row", fcc_3}};
  r.passed = fcc[2] == 12 && fcc[4] == 6 && fcc[6] == 24 && hcp_83 == 2 && hcp_3 == 18;
  return r;
}

CriterionResult triangle_identity() {
  CriterionResult r;
  const auto n = unit_triangle_count();
  r.detail = {{"count", n}, {"expected", 48}};
  r.passed = n == 48;
  return r;
}

CriterionResult basis_count_check() {
  CriterionResult r;
  const auto& b = enumerate_bases();
  std::size_t singular = 0;
  for (const auto& x : b)
    if (std::abs(x.B.determinant()) < 1e-12) ++singular;
  // Ordered triples of pairwise non-collinear unit vectors, singular ones included.
  const auto& u = unit_vectors();
  std::size_t noncollinear = 0, coplanar = 0;
  for (const auto& a : u)
    for (const auto& c : u)
      for (const auto& d : u) {
        if (a.cross(c).squaredNorm() == 0 || a.cross(d).squaredNorm() == 0 || c.cross(d).squaredNorm() == 0) continue;
        ++noncollinear;
        if (a.dot(c.cross(d)) == 0) ++coplanar;
      }
  r.detail = {{"bases", b.size()},
              {"expected", 960},
              {"singular_members", singular},
              {"noncollinear_triples", noncollinear},
              {"coplanar_triples", coplanar}};
  r.passed = b.size() == 960 && singular == 0;
  return r;
}

CriterionResult contact_graphs() {
  CriterionResult r;
  const auto& co = kissing_polyhedron(LatticeKind::FCC).vertices;
  const auto& tco = kissing_polyhedron(LatticeKind::HCP).vertices;
  const ContactGraph a = contact_graph(co), b = contact_graph(tco);
  const Real dev = point_set_deviation(co, tco);
  r.detail = {{"co", {{"edges", a.edges.size()}, {"triangles", a.triangles.size()}, {"squares", a.squares.size()}}},
              {"tco", {{"edges", b.edges.size()}, {"triangles", b.triangles.size()}, {"squares", b.squares.size()}}},
              {"registration_deviation", dev}};
  r.passed = a.edges.size() == 24 && a.triangles.size() == 8 && a.squares.size() == 6 && b.edges.size() == 24 &&
             b.triangles.size() == 8 && b.squares.size() == 6 && dev > 0.1;
  return r;
}

CriterionResult hessian_spectra() {
  CriterionResult r;
  auto spec_json = [](const std::map<Real, int>& m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, c] : m) j[format_real(k)] = c;
    return j;
  };
  const auto t = w_tau_hessian_spectrum(UnitType::Tetrahedron);
  const auto o = w_tau_hessian_spectrum(UnitType::Octahedron);
  const std::map<Real, int> t_exp{{0.0, 6}, {2.0, 2}, {4.0, 3}, {8.0, 1}};
  const std::map<Real, int> o_exp{{0.0, 6}, {2.0, 5}, {4.0, 3}, {6.0, 3}, {8.0, 1}};
  r.detail = {{"tetrahedron", spec_json(t)}, {"octahedron", spec_json(o)}};
  r.passed = t == t_exp && o == o_exp;
  return r;
}

CriterionResult lemma_lambda(std::uint64_t seed) {
  CriterionResult r;
  std::mt19937_64 rng(seed);
  const auto& bases = enumerate_bases();
  std::uniform_int_distribution<std::size_t> pick(0, bases.size() - 1);
  std::vector<std::size_t> chosen;
  for (int i = 0; i < 20; ++i) chosen.push_back(pick(rng));
  Real worst = 0.0;
  std::size_t checks = 0;
  nlohmann::json rows = nlohmann::json::array();
  for (const Real lambda : fcc_distances(3.0)) {
    Real w = 0.0;
    LemmaLambdaResult last;
    for (std::size_t b : chosen)
      for (int c = 0; c < 3; ++c) {
        last = lemma_lambda_check(lambda, bases[b], c);
        w = std::max(w, std::abs(last.lhs - last.rhs));
        ++checks;
      }
    rows.push_back({{"lambda", lambda}, {"m", last.m}, {"rhs", last.rhs}, {"max_error", w}});
    worst = std::max(worst, w);
  }
  r.detail = {{"rows", rows}, {"checks", checks}, {"max_error", worst}};
  r.passed = worst <= 1e-9 && checks > 0;
  return r;
}

CriterionResult path_normalization() {
  CriterionResult r;
  nlohmann::json generic = nlohmann::json::array(), degenerate = nlohmann::json::array();
  Real worst = 0.0;
  std::size_t ng = 0;
  for (const auto& s : generate(LatticeKind::FCC, 4.0)) {
    const Vec3i k = scaled_coords(LatticeKind::FCC, s);
    if (k.squaredNorm() <= 6) continue;
    const auto res = normalization_check(k);
    nlohmann::json row = {{"k", {k[0], k[1], k[2]}}, {"sum", res.sum}, {"paths", res.paths}};
    if (res.generic && ng < 10) {
      ++ng;
      worst = std::max(worst, std::abs(res.sum - 1.0));
      generic.push_back(row);
    } else if (!res.generic && degenerate.size() < 5) {
      row["flag"] = "degenerate";
      degenerate.push_back(row);
    }
  }
  r.detail = {{"generic", generic}, {"degenerate", degenerate}, {"max_error", worst}};
  r.passed = ng == 10 && worst <= 1e-12;
  return r;
}

CriterionResult reflection_suite() {
  CriterionResult r;
  std::size_t checked = 0, involution = 0, weight = 0, center = 0, parallel = 0, length = 0;
  for (const auto& s : generate(LatticeKind::FCC, 2.0)) {
    const Vec3i k = scaled_coords(LatticeKind::FCC, s);
    if (k.squaredNorm() == 0) continue;
    for (const auto& p : enumerate_paths(k))
      for (const auto& v : unit_vectors()) {
        ++checked;
        const Path q = reflect(p, v);
        if (reflect(q, v).sites != p.sites) ++involution;
        if (q.basis_count != p.basis_count) ++weight;
        if ((q.center - p.center).norm() > 1e-10) ++center;
        if (q.k.squaredNorm() != p.k.squaredNorm()) ++length;
        bool has_v = false;
        for (std::size_t i = 0; i + 1 < p.sites.size(); ++i) has_v = has_v || p.sites[i + 1] - p.sites[i] == v;
        if (has_v && (p.k + q.k).cross(v).squaredNorm() != 0) ++parallel;
      }
  }
  r.detail = {{"checked", checked},
              {"involution_failures", involution},
              {"weight_failures", weight},
              {"center_failures", center},
              {"length_failures", length},
              {"parallel_failures", parallel}};
  r.passed = checked > 0 && involution + weight + center + parallel + length == 0;
  return r;
}

CriterionResult center_radius() {
  CriterionResult r;
  std::size_t checked = 0, failures = 0;
  Real worst = 0.0;
  for (const auto& s : generate(LatticeKind::FCC, 3.0)) {
    const Vec3i k = scaled_coords(LatticeKind::FCC, s);
    if (k.squaredNorm() == 0) continue;
    for (const auto& p : enumerate_paths(k)) {
      ++checked;
      worst = std::max(worst, p.radius / p.length());
      if (!(p.radius < 2.0 * p.length())) ++failures;
    }
  }
  r.detail = {{"paths", checked}, {"failures", failures}, {"max_rho_over_length", worst}};
  r.passed = checked > 0 && failures == 0;
  return r;
}

CriterionResult potential_validation(Real alpha) {
  CriterionResult r;
  const PotentialPair raw = build_canonical_pair(alpha);
  const PotentialTriple psi = build_canonical_triple(alpha);
  const TuningResult t = tune_equilibrium(raw);
  const ValidationReport rep = validate(t.pair, psi);
  nlohmann::json conds = nlohmann::json::object();
  bool ok = true;
  for (const auto& e : rep.entries) {
    conds[e.condition] = {{"status", to_string(e.status)}, {"margin", e.margin}};
    if (e.condition == "mid_range_curvature")
      ok = ok && e.status == CheckStatus::Repaired;
    else
      ok = ok && e.status == CheckStatus::Pass;
  }
  const Real slope = renormalized_pair(t.pair, 1.0).derivative;
  const Real argmin = efcc_argmin(t.pair, psi);
  r.detail = {{"conditions", conds},
              {"tail_amplitude", t.pair.tail_amplitude},
              {"renormalized_slope_at_1", slope},
              {"efcc_argmin", argmin},
              {"broken_after_tuning", t.broken}};
  r.passed = ok && std::abs(slope) <= 1e-8 && std::abs(argmin - 1.0) <= 1e-6;
  return r;
}

Configuration random_cluster(std::mt19937_64& rng, std::size_t n, Real dmin, Real radius) {
  std::uniform_real_distribution<Real> u(-radius, radius);
  Configuration c;
  while (c.size() < n) {
    const Vec3 p(u(rng), u(rng), u(rng));
    if (p.norm() > radius) continue;
    bool ok = true;
    for (const auto& q : c.positions) ok = ok && (p - q).norm() >= dmin;
    if (ok) c.positions.push_back(p);
  }
  return c;
}

CriterionResult force_check(Real alpha, std::uint64_t seed) {
  CriterionResult r;
  const auto& p = tuned(alpha);
  std::mt19937_64 rng(seed);
  nlohmann::json rows = nlohmann::json::array();
  Real worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const Configuration c = random_cluster(rng, 20, 1.0 - alpha, 2.0);
    const GradientCheck g = fd_gradient_check(c, p.v, p.psi);
    rows.push_back(to_json(g));
    worst = std::max(worst, g.relative_error);
  }
  r.detail = {{"clusters", rows}, {"max_relative_error", worst}};
  r.passed = worst <= 1e-6;
  return r;
}

CriterionResult piola_diagnostics(Real alpha) {
  CriterionResult r;
  const auto& p = tuned(alpha);
  bool ok = true;
  nlohmann::json iso = nlohmann::json::array();
  for (const Real s : {0.97, 1.0, 1.03}) {
    const Mat3 S = piola(LatticeKind::FCC, s * Mat3::Identity(), p.v, p.psi);
    Real off = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) off = std::max(off, std::abs(S(i, j)));
    const Real spread = S.diagonal().maxCoeff() - S.diagonal().minCoeff();
    iso.push_back({{"r", s}, {"max_off_diagonal", off}, {"diagonal_spread", spread}});
    ok = ok && off <= 1e-6 && spread <= 1e-6;
  }
  const Real rstar = radial_minimizer(LatticeKind::FCC, p.v, p.psi);
  const Mat3 Sstar = piola(LatticeKind::FCC, rstar * Mat3::Identity(), p.v, p.psi);
  const Real trace = Sstar.trace(), norm = Sstar.norm();
  ok = ok && std::abs(trace) <= 1e-6 && norm <= 1e-5;

  Mat3 a;
  a << 0.012, -0.004, 0.007, 0.003, -0.009, 0.005, -0.006, 0.002, 0.011;
  const Mat3 f = Mat3::Identity() + a;
  nlohmann::json eq = nlohmann::json::object();
  for (const LatticeKind kind : {LatticeKind::FCC, LatticeKind::HCP}) {
    const auto group = point_group(kind);
    const Mat3 s0 = piola(kind, f, p.v, p.psi);
    Real worst = 0.0;
    std::size_t used = 0;
    for (std::size_t k = 1; k < group.size() && used < 5; k += std::max<std::size_t>(1, group.size() / 5), ++used) {
      const Mat3& g = group[k];
      const Mat3 s1 = piola(kind, g * f * g.transpose(), p.v, p.psi);
      worst = std::max(worst, (s1 - g * s0 * g.transpose()).cwiseAbs().maxCoeff());
    }
    eq[to_string(kind)] = {{"elements", used}, {"max_error", worst}};
    ok = ok && used == 5 && worst <= 1e-6;
  }
  r.detail = {{"isotropy", iso},
              {"radial_minimizer", rstar},
              {"trace_at_minimizer", trace},
              {"norm_at_minimizer", norm},
              {"stress_at_minimizer", mat_json(Sstar)},
              {"equivariance", eq}};
  r.passed = ok;
  return r;
}

CriterionResult classification_check(Real alpha) {
  CriterionResult r;
  const Real radius = 6.0;
  auto interior = [&](const Vec3& x) { return x.norm() <= radius - 2.0 + 1e-9; };

  const Configuration fcc = lattice_ball(LatticeKind::FCC, radius);
  const SiteClassification cf = classify(fcc, bond_graph(fcc, alpha));
  std::size_t fcc_bad = 0;
  for (std::size_t i = 0; i < fcc.size(); ++i)
    if (interior(fcc.positions[i]) && cf.cls[i] != SiteClass::CO) ++fcc_bad;
  const std::size_t fcc_tco = cf.count(SiteClass::TCO);

  const Configuration hcp = lattice_ball(LatticeKind::HCP, radius);
  const SiteClassification ch = classify(hcp, bond_graph(hcp, alpha));
  std::size_t hcp_bad = 0;
  for (std::size_t i = 0; i < hcp.size(); ++i)
    if (interior(hcp.positions[i]) && ch.cls[i] != SiteClass::TCO) ++hcp_bad;
  const std::size_t hcp_co = ch.count(SiteClass::CO);

  std::size_t center = 0;
  for (std::size_t i = 0; i < fcc.size(); ++i)
    if (fcc.positions[i].norm() < 1e-9) center = i;
  Configuration vac = fcc;
  vac.positions.erase(vac.positions.begin() + static_cast<std::ptrdiff_t>(center));
  const SiteClassification cv = classify(vac, bond_graph(vac, alpha));
  std::size_t flipped = 0, flipped_neighbors = 0, other_changes = 0;
  for (std::size_t i = 0, j = 0; i < fcc.size(); ++i) {
    if (i == center) continue;
    const bool neighbor = std::abs((fcc.positions[i] - fcc.positions[center]).norm() - 1.0) < 1e-9;
    if (cv.cls[j] != cf.cls[i]) {
      if (neighbor && cf.cls[i] == SiteClass::CO && cv.cls[j] == SiteClass::Defect) {
        ++flipped_neighbors;
      } else {
        ++other_changes;
      }
      ++flipped;
    }
    ++j;
  }
  r.detail = {{"fcc", {{"n", fcc.size()}, {"co", cf.count(SiteClass::CO)}, {"tco", fcc_tco}, {"interior_not_co", fcc_bad}}},
              {"hcp", {{"n", hcp.size()}, {"tco", ch.count(SiteClass::TCO)}, {"co", hcp_co}, {"interior_not_tco", hcp_bad}}},
              {"vacancy", {{"changed", flipped}, {"neighbors_to_defect", flipped_neighbors}, {"other_changes", other_changes}}}};
  r.passed = fcc_bad == 0 && fcc_tco == 0 && hcp_bad == 0 && hcp_co == 0 && flipped_neighbors == 12 &&
             other_changes == 0;
  return r;
}

CriterionResult upper_bound(Real alpha) {
  CriterionResult r;
  const auto& p = tuned(alpha);
  const auto rows = experiment_upper_bound(p.v, p.psi, {3, 4, 5, 6, 8});
  bool ok = true;
  nlohmann::json j = nlohmann::json::array();
  Real lo = std::numeric_limits<Real>::infinity(), hi = 0.0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    j.push_back(to_json(rows[k]));
    ok = ok && rows[k].gap > 0.0;
    if (k > 0) ok = ok && rows[k].gap < rows[k - 1].gap;
    if (rows[k].radius == 4 || rows[k].radius == 6 || rows[k].radius == 8) {
      lo = std::min(lo, rows[k].gap_times_radius);
      hi = std::max(hi, rows[k].gap_times_radius);
    }
  }
  r.detail = {{"rows", j}, {"gap_times_radius_ratio", hi / lo}};
  r.passed = ok && hi <= 2.0 * lo;
  return r;
}

CriterionResult fcc_vs_hcp(Real alpha) {
  CriterionResult r;
  const auto& p = tuned(alpha);
  const auto c = experiment_fcc_vs_hcp(p.v, p.psi, 6.0);
  r.detail = to_json(c);
  r.passed = c.fcc_lower;
  return r;
}

CriterionResult recovery(Real alpha, std::uint64_t seed) {
  CriterionResult r;
  const auto& p = tuned(alpha);
  RelaxOptions opts;
  opts.alpha = alpha;
  const auto res = experiment_recovery(p.v, p.psi, 4.0, 0.03, seed, opts);
  r.detail = to_json(res);
  r.passed = res.converged && res.interior_all_co() && std::abs(res.difference) <= 1e-6 && res.min_distance_ok;
  return r;
}

CriterionResult constrained_rotation_bound(std::uint64_t seed) {
  CriterionResult r;
  std::mt19937_64 rng(seed);
  std::normal_distribution<Real> g(0.0, 1.0);
  std::uniform_real_distribution<Real> u(0.0, 0.2);
  Real max_ratio = 0.0, max_ray = 0.0, max_dist = 0.0;
  std::size_t bound_failures = 0;
  for (int k = 0; k < 10000; ++k) {
    Mat3 a;
    for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = g(rng);
    a *= u(rng) / a.norm();
    const Mat3 f = random_rotation(rng) * (Mat3::Identity() + a);
    Vec3 v(g(rng), g(rng), g(rng));
    v.normalize();
    const auto c = constrained_rotation(f, v);
    max_dist = std::max(max_dist, dist_so3(f));
    max_ray = std::max(max_ray, (c.g * v - (f * v).normalized()).norm());
    max_ratio = std::max(max_ratio, c.ratio);
    if (!c.bound_ok) ++bound_failures;
  }
  r.detail = {{"samples", 10000},
              {"max_dist_so3", max_dist},
              {"max_ray_error", max_ray},
              {"max_ratio", max_ratio},
              {"bound_failures", bound_failures}};
  r.passed = max_dist <= 0.2 && max_ray <= 1e-10 && bound_failures == 0;
  return r;
}

nlohmann::json criteria_json(const std::vector<CriterionResult>& rs) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& c : rs) j.push_back({{"id", c.id}, {"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return j;
}

CriterionResult determinism(const AcceptanceOptions& opts) {
  CriterionResult r;
  const int saved = thread_count();
  std::vector<std::string> dumps;
  nlohmann::json runs = nlohmann::json::array();
  for (int t : opts.determinism_threads) {
    set_thread_count(t);
    std::vector<CriterionResult> rs;
    for (int id = 1; id < kCriterionCount; ++id) rs.push_back(run_criterion(id, opts));
    dumps.push_back(dump_json(criteria_json(rs)));
    runs.push_back({{"threads", t}, {"bytes", dumps.back().size()}, {"fnv1a", hex64(fnv1a(dumps.back()))}});
  }
  set_thread_count(saved);
  bool same = !dumps.empty();
  for (const auto& d : dumps) same = same && d == dumps.front();
  r.detail = {{"runs", runs}, {"identical", same}};
  r.passed = same && dumps.size() >= 2;
  return r;
}

}  // namespace

std::size_t AcceptanceReport::passed_count() const {
  return static_cast<std::size_t>(std::count_if(criteria.begin(), criteria.end(), [](const auto& c) { return c.passed; }));
}

std::string criterion_name(int id) {
  static const char* names[] = {"",
                                "shell counts",
                                "triangle identity",
                                "ordered-basis count",
                                "contact graphs",
                                "W_tau Hessian spectra",
                                "lambda identity for a_k coefficients",
                                "path normalization",
                                "reflection suite",
                                "path circumradius bound",
                                "potential validation",
                                "force correctness",
                                "Piola diagnostics",
                                "classification",
                                "upper-bound experiment",
                                "fcc vs hcp",
                                "perturbation recovery",
                                "constrained rotation bound",
                                "determinism"};
  if (id < 1 || id > kCriterionCount) throw DomainError("unknown criterion " + std::to_string(id));
  return names[id];
}

CriterionResult run_criterion(int id, const AcceptanceOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = shell_counts(); break;
      case 2: r = triangle_identity(); break;
      case 3: r = basis_count_check(); break;
      case 4: r = contact_graphs(); break;
      case 5: r = hessian_spectra(); break;
      case 6: r = lemma_lambda(opts.seed); break;
      case 7: r = path_normalization(); break;
      case 8: r = reflection_suite(); break;
      case 9: r = center_radius(); break;
      case 10: r = potential_validation(opts.alpha); break;
      case 11: r = force_check(opts.alpha, opts.seed); break;
      case 12: r = piola_diagnostics(opts.alpha); break;
      case 13: r = classification_check(opts.alpha); break;
      case 14: r = upper_bound(opts.alpha); break;
      case 15: r = fcc_vs_hcp(opts.alpha); break;
      case 16: r = recovery(opts.alpha, opts.seed); break;
      case 17: r = constrained_rotation_bound(opts.seed); break;
      case 18: r = determinism(opts); break;
      default: throw DomainError("unknown criterion " + std::to_string(id));
    }
  } catch (const DomainError&) {
    throw;
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = {{"error", e.what()}};
  }
  r.id = id;
  r.name = criterion_name(id);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

AcceptanceReport run_acceptance(const AcceptanceOptions& opts) {
  AcceptanceReport rep;
  for (int id = 1; id <= kCriterionCount; ++id) {
    if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), id) == opts.only.end()) continue;
    rep.criteria.push_back(run_criterion(id, opts));
  }
  return rep;
}

nlohmann::json to_json(const AcceptanceReport& r, bool timings) {
  nlohmann::json j = criteria_json(r.criteria);
  if (timings)
    for (std::size_t i = 0; i < r.criteria.size(); ++i) j[i]["seconds"] = r.criteria[i].seconds;
  return {{"criteria", j}, {"passed", r.passed_count()}, {"total", r.criteria.size()}};
}

std::string summary_lines(const AcceptanceReport& r) {
  std::string s;
  char buf[160];
  for (const auto& c : r.criteria) {
    std::snprintf(buf, sizeof buf, "%s %2d %-40s %8.3f s\n", c.passed ? "PASS" : "FAIL", c.id, c.name.c_str(),
                  c.seconds);
    s += buf;
  }
  std::snprintf(buf, sizeof buf, "%zu/%zu criteria passed\n", r.passed_count(), r.criteria.size());
  return s + buf;
}

}  // namespace xtal
