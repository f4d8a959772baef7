#include "xtal/potential.hpp"

#include "xtal/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace xtal {

namespace {

constexpr Real kFarRadius = 24.0;
constexpr Real kFourPiSqrt2 = 4.0 * 3.14159265358979323846 * kSqrt2;

PolyPiece hermite(Real lo, Real hi, Real v0, Real d0, Real v1, Real d1) {
  const Real h = hi - lo;
  PolyPiece p;
  p.lo = lo;
  p.hi = hi;
  p.x0 = lo;
  p.c[0] = v0;
  p.c[1] = d0;
  p.c[2] = (3.0 * (v1 - v0) / h - 2.0 * d0 - d1) / h;
  p.c[3] = (2.0 * (v0 - v1) / h + d0 + d1) / (h * h);
  return p;
}

Real poly(const PolyPiece& p, Real r) {
  const Real x = r - p.x0;
  return p.c[0] + x * (p.c[1] + x * (p.c[2] + x * p.c[3]));
}
Real dpoly(const PolyPiece& p, Real r) {
  const Real x = r - p.x0;
  return p.c[1] + x * (2.0 * p.c[2] + 3.0 * x * p.c[3]);
}
Real ddpoly(const PolyPiece& p, Real r) {
  const Real x = r - p.x0;
  return 2.0 * p.c[2] + 6.0 * x * p.c[3];
}

struct ShellTable {
  std::vector<Real> lambda;
  std::vector<Real> count;
};

// fcc shells with |k| <= kFarRadius, from direct enumeration of scaled coordinates.
const ShellTable& far_shells() {
  static const ShellTable table = [] {
    const auto n = static_cast<std::int64_t>(std::ceil(kSqrt2 * kFarRadius));
    const std::int64_t limit = static_cast<std::int64_t>(2.0 * kFarRadius * kFarRadius);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(limit) + 1, 0);
    for (std::int64_t x = -n; x <= n; ++x)
      for (std::int64_t y = -n; y <= n; ++y)
        for (std::int64_t z = -n; z <= n; ++z) {
          if (((x + y + z) & 1) != 0) continue;
          const std::int64_t q = x * x + y * y + z * z;
          if (q > 0 && q <= limit) ++counts[static_cast<std::size_t>(q)];
        }
    ShellTable t;
    for (std::size_t q = 1; q < counts.size(); ++q)
      if (counts[q] > 0) {
        t.lambda.push_back(std::sqrt(static_cast<Real>(q) / 2.0));
        t.count.push_back(static_cast<Real>(counts[q]));
      }
    return t;
  }();
  return table;
}

// Unordered pairs {k, k'} of nonzero fcc sites with all three distances < 7/5
// after scaling by r (r >= 0.5).
struct TripleGeometry {
  std::vector<std::array<Real, 3>> lengths;
};

TripleGeometry fcc_triples(Real r) {
  if (r < 0.5) throw DomainError("efcc: dilation below 0.5 is outside the supported range");
  const Real reach = PotentialTriple::kSupport / r;
  std::vector<Vec3> ks;
  for (const auto& s : generate(LatticeKind::FCC, reach)) {
    const Vec3 p = position(LatticeKind::FCC, s);
    if (p.squaredNorm() > 0.5) ks.push_back(p);
  }
  TripleGeometry g;
  for (std::size_t i = 0; i < ks.size(); ++i)
    for (std::size_t j = i + 1; j < ks.size(); ++j) {
      const Real a = ks[i].norm(), b = ks[j].norm(), c = (ks[i] - ks[j]).norm();
      if (std::max({a, b, c}) * r < PotentialTriple::kSupport) g.lengths.push_back({a, b, c});
    }
  return g;
}

Real smoothstep(Real x) { return x * x * (3.0 - 2.0 * x); }
Real dsmoothstep(Real x) { return 6.0 * x * (1.0 - x); }

}  // namespace

// ---------------------------------------------------------------- pair

const PolyPiece* PotentialPair::piece(Real r) const {
  auto it = std::upper_bound(pieces.begin(), pieces.end(), r, [](Real x, const PolyPiece& p) { return x < p.lo; });
  if (it == pieces.begin()) return &pieces.front();
  return &*(it - 1);
}

Real PotentialPair::value(Real r) const {
  if (r >= tail_start) return tail_amplitude * std::pow(r, -8.0);
  return poly(*piece(r), r);
}

Real PotentialPair::d1(Real r) const {
  if (r >= tail_start) return -8.0 * tail_amplitude * std::pow(r, -9.0);
  return dpoly(*piece(r), r);
}

Real PotentialPair::d2(Real r) const {
  if (r >= tail_start) return 72.0 * tail_amplitude * std::pow(r, -10.0);
  return ddpoly(*piece(r), r);
}

void PotentialPair::eval(Real r, Real& v, Real& dv) const {
  if (r >= tail_start) {
    const Real inv = 1.0 / r;
    const Real i2 = inv * inv, i4 = i2 * i2, i8 = i4 * i4;
    v = tail_amplitude * i8;
    dv = -8.0 * v * inv;
    return;
  }
  const PolyPiece& p = *piece(r);
  v = poly(p, r);
  dv = dpoly(p, r);
}

PotentialPair PotentialPair::with_tail_amplitude(Real c) const {
  PotentialPair out = *this;
  out.tail_amplitude = c;
  PolyPiece& last = out.pieces.back();
  const Real v0 = poly(last, last.lo), d0 = dpoly(last, last.lo);
  const Real R = tail_start;
  last = hermite(last.lo, last.hi, v0, d0, c * std::pow(R, -8.0), -8.0 * c * std::pow(R, -9.0));
  return out;
}

Real PotentialPair::continuity_defect() const {
  Real worst = 0.0;
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    const Real b = pieces[i].hi;
    const Real scale = 1.0 + std::abs(poly(pieces[i], b)) + std::abs(dpoly(pieces[i], b));
    worst = std::max(worst, std::abs(poly(pieces[i], b) - poly(pieces[i + 1], b)) / scale);
    worst = std::max(worst, std::abs(dpoly(pieces[i], b) - dpoly(pieces[i + 1], b)) / scale);
  }
  const PolyPiece& last = pieces.back();
  const Real R = tail_start;
  worst = std::max(worst, std::abs(poly(last, R) - tail_amplitude * std::pow(R, -8.0)));
  worst = std::max(worst, std::abs(dpoly(last, R) + 8.0 * tail_amplitude * std::pow(R, -9.0)));
  return worst;
}

// ---------------------------------------------------------------- triple

Real PotentialTriple::h(Real r) const {
  const Real u = (r - 1.0) / alpha;
  if (std::abs(u) >= 1.0) return 0.0;
  const Real w = 1.0 - u * u;
  return w * w;
}

Real PotentialTriple::dh(Real r) const {
  const Real u = (r - 1.0) / alpha;
  if (std::abs(u) >= 1.0) return 0.0;
  return -4.0 * u * (1.0 - u * u) / alpha;
}

Real PotentialTriple::s(Real r) const {
  const Real lo = 1.0 - alpha, w = alpha / 2.0;
  if (r <= lo) return 1.0;
  if (r >= lo + w) return 0.0;
  return 1.0 - smoothstep((r - lo) / w);
}

Real PotentialTriple::ds(Real r) const {
  const Real lo = 1.0 - alpha, w = alpha / 2.0;
  if (r <= lo || r >= lo + w) return 0.0;
  return -dsmoothstep((r - lo) / w) / w;
}

Real PotentialTriple::t(Real r) const {
  const Real w = kSupport - kPlateau;
  if (r <= kPlateau) return 1.0;
  if (r >= kSupport) return 0.0;
  return 1.0 - smoothstep((r - kPlateau) / w);
}

Real PotentialTriple::dt(Real r) const {
  const Real w = kSupport - kPlateau;
  if (r <= kPlateau || r >= kSupport) return 0.0;
  return -dsmoothstep((r - kPlateau) / w) / w;
}

Real PotentialTriple::value(Real r1, Real r2, Real r3) const {
  const Real lo = std::min({r1, r2, r3}), hi = std::max({r1, r2, r3});
  if (hi >= kSupport) return 0.0;
  return -depth * h(r1) * h(r2) * h(r3) + amplitude * s(lo) * t(hi);
}

std::array<Real, 3> PotentialTriple::gradient(Real r1, Real r2, Real r3) const {
  std::array<Real, 3> g{0, 0, 0};
  const std::array<Real, 3> r{r1, r2, r3};
  int imin = 0, imax = 0;
  for (int i = 1; i < 3; ++i) {
    if (r[i] < r[imin]) imin = i;
    if (r[i] > r[imax]) imax = i;
  }
  if (r[imax] >= kSupport) return g;
  const std::array<Real, 3> hv{h(r1), h(r2), h(r3)};
  for (int i = 0; i < 3; ++i) g[i] = -depth * dh(r[i]) * hv[(i + 1) % 3] * hv[(i + 2) % 3];
  g[imin] += amplitude * ds(r[imin]) * t(r[imax]);
  g[imax] += amplitude * s(r[imin]) * dt(r[imax]);
  return g;
}

// ---------------------------------------------------------------- canonical

PotentialPair build_canonical_pair(Real alpha, const CanonicalOptions& opts) {
  if (!(alpha > 0.0 && alpha <= 0.2)) throw DomainError("canonical potential requires 0 < alpha <= 0.2");
  const Real a = alpha;
  const Real cp = 1.0 / (2.0 * a);
  const Real K = (1.0 / a + 1.0 - cp * a * a) / (a * a * a);
  const Real r1 = 1.0 - a;
  const Real rb = std::max(1.0 + a, 1.25);
  const Real k1 = kSqrt2 + 0.01, k2 = kSqrt3 - 0.01;
  const Real R = std::sqrt(3.5);
  const Real vb = -0.25, db = 1.0, v1 = -0.05, v2 = -0.62 * std::sqrt(a), slope3 = 0.005;
  const Real c_design = a / 144.0;

  auto make = [&](Real d1, Real d2, Real c) {
    PotentialPair v;
    v.alpha = a;
    v.tail_start = R;
    v.tail_amplitude = c;
    const Real s1 = -2.0 * cp * a - 3.0 * K * a * a;
    const Real q = std::abs(s1);
    v.pieces.push_back({0.0, r1, r1, {1.0 / a, s1, q, 0.0}});
    v.pieces.push_back({r1, 1.0, 1.0, {-1.0, 0.0, cp, -K}});
    v.pieces.push_back({1.0, 1.0 + a, 1.0, {-1.0, 0.0, cp, 0.0}});
    if (rb > 1.0 + a) v.pieces.push_back(hermite(1.0 + a, rb, -1.0 + cp * a * a, 2.0 * cp * a, vb, db));
    v.pieces.push_back(hermite(rb, k1, vb, db, v1, d1));
    v.pieces.push_back(hermite(k1, k2, v1, d1, v2, d2));
    v.pieces.push_back(hermite(k2, R, v2, d2, c * std::pow(R, -8.0), -8.0 * c * std::pow(R, -9.0)));
    return v;
  };
  // Both design slopes enter linearly; solve each from two evaluations.
  auto f = [&](Real d2) { return make(0.0, d2, c_design).d1(kSqrt3) - slope3; };
  const Real d2 = -f(0.0) / (f(1.0) - f(0.0));
  auto g = [&](Real d1) { return renormalized_pair(make(d1, d2, c_design), 1.0).derivative; };
  const Real d1 = -g(0.0) / (g(1.0) - g(0.0));

  PotentialPair v = make(d1, d2, opts.tail_amplitude);
  v.repairs.push_back({"mid_range_curvature", 1.0 + a, R,
                       "bridge from the well and shelf carrying the fcc preference, slope sign and tail matching"});
  return v;
}

PotentialPair hermite_pair(Real alpha, const std::vector<Real>& r, const std::vector<Real>& v,
                           const std::vector<Real>& dv, Real tail_amplitude) {
  if (r.size() < 2 || v.size() != r.size() || dv.size() != r.size())
    throw DomainError("hermite_pair: need at least two matching knots");
  if (r.front() != 0.0) throw DomainError("hermite_pair: first knot must be 0");
  PotentialPair out;
  out.alpha = alpha;
  out.tail_start = r.back();
  out.tail_amplitude = tail_amplitude;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    if (!(r[i + 1] > r[i])) throw DomainError("hermite_pair: knots must increase");
    out.pieces.push_back(hermite(r[i], r[i + 1], v[i], dv[i], v[i + 1], dv[i + 1]));
  }
  return out;
}

PotentialTriple build_canonical_triple(Real alpha) {
  if (!(alpha > 0.0 && alpha <= 0.2)) throw DomainError("canonical potential requires 0 < alpha <= 0.2");
  PotentialTriple p;
  p.alpha = alpha;
  p.amplitude = 2.0 / alpha;
  return p;
}

// ---------------------------------------------------------------- lattice sums

RenormalizedValue renormalized_pair(const PotentialPair& v, Real r) {
  if (!(r > 0.0)) throw DomainError("renormalized_pair: r must be positive");
  const ShellTable& t = far_shells();
  std::vector<Real> val(t.lambda.size()), der(t.lambda.size());
  for (std::size_t i = 0; i < t.lambda.size(); ++i) {
    Real vv, dv;
    v.eval(r * t.lambda[i], vv, dv);
    val[i] = t.count[i] * vv;
    der[i] = t.count[i] * t.lambda[i] * dv;
  }
  RenormalizedValue out;
  const Real far = kFourPiSqrt2 * std::pow(kFarRadius, -5.0) / 5.0;
  out.value = pairwise_sum(val) + v.tail_amplitude * std::pow(r, -8.0) * far;
  out.derivative = pairwise_sum(der) - 8.0 * v.tail_amplitude * std::pow(r, -9.0) * far;
  out.tail_bound = std::abs(v.tail_amplitude) * std::pow(r, -8.0) * kFourPiSqrt2 *
                   std::pow(kFarRadius - 1.0, -5.0) / 5.0 * 8.0 / std::min(1.0, r);
  return out;
}

Real efcc(const PotentialPair& v, const PotentialTriple& psi, Real r) {
  const auto g = fcc_triples(r);
  std::vector<Real> terms;
  terms.reserve(g.lengths.size());
  for (const auto& l : g.lengths) terms.push_back(psi.value(r * l[0], r * l[1], r * l[2]));
  return renormalized_pair(v, r).value + 2.0 * pairwise_sum(terms);
}

Real efcc_derivative(const PotentialPair& v, const PotentialTriple& psi, Real r) {
  const auto g = fcc_triples(r);
  std::vector<Real> terms;
  terms.reserve(g.lengths.size());
  for (const auto& l : g.lengths) {
    const auto d = psi.gradient(r * l[0], r * l[1], r * l[2]);
    terms.push_back(d[0] * l[0] + d[1] * l[1] + d[2] * l[2]);
  }
  return renormalized_pair(v, r).derivative + 2.0 * pairwise_sum(terms);
}

Real efcc_argmin(const PotentialPair& v, const PotentialTriple& psi) {
  Real lo = 1.0 - v.alpha / 2.0, hi = 1.0 + v.alpha;
  Real flo = efcc_derivative(v, psi, lo), fhi = efcc_derivative(v, psi, hi);
  if (!(flo < 0.0 && fhi > 0.0)) throw InfeasibleError("efcc_argmin: no stationary point bracketed near r = 1");
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const Real mid = 0.5 * (lo + hi);
    const Real fm = efcc_derivative(v, psi, mid);
    if (fm == 0.0) return mid;
    (fm < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------- validation

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass:
      return "pass";
    case CheckStatus::Fail:
      return "fail";
    case CheckStatus::Repaired:
      return "repaired";
  }
  return "fail";
}

bool ValidationReport::ok() const {
  return std::none_of(entries.begin(), entries.end(), [](const auto& e) { return e.status == CheckStatus::Fail; });
}

const ConditionCheck& ValidationReport::at(const std::string& condition) const {
  for (const auto& e : entries)
    if (e.condition == condition) return e;
  throw DomainError("validation report has no entry '" + condition + "'");
}

namespace {

std::vector<Real> grid(Real lo, Real hi, Real step, bool open_left = false, bool open_right = false) {
  std::vector<Real> g;
  const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / step)));
  for (int i = 0; i <= n; ++i) {
    if ((i == 0 && open_left) || (i == n && open_right)) continue;
    g.push_back(lo + (hi - lo) * i / n);
  }
  return g;
}

// Collects maximal runs of grid points where bad(r) holds.
template <class F>
std::vector<std::array<Real, 2>> runs(const std::vector<Real>& g, F bad) {
  std::vector<std::array<Real, 2>> out;
  bool open = false;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (bad(g[i])) {
      if (!open) out.push_back({g[i], g[i]});
      out.back()[1] = g[i];
      open = true;
    } else {
      open = false;
    }
  }
  return out;
}

ConditionCheck scalar_check(const std::string& name, Real margin, Real where) {
  ConditionCheck c;
  c.condition = name;
  c.margin = margin;
  c.worst_location = where;
  c.status = margin >= 0.0 ? CheckStatus::Pass : CheckStatus::Fail;
  return c;
}

// Grid minimum of f, reported as a margin check f >= 0.
template <class F>
ConditionCheck grid_check(const std::string& name, const std::vector<Real>& g, F f, const PotentialPair& v) {
  ConditionCheck c;
  c.condition = name;
  c.margin = std::numeric_limits<Real>::infinity();
  for (Real r : g) {
    const Real m = f(r);
    if (m < c.margin) {
      c.margin = m;
      c.worst_location = r;
    }
  }
  c.violations = runs(g, [&](Real r) { return f(r) < 0.0; });
  if (c.violations.empty()) {
    c.status = CheckStatus::Pass;
  } else {
    bool covered = true;
    for (const auto& iv : c.violations) {
      bool in = false;
      for (const auto& rep : v.repairs)
        in = in || (rep.condition == name && iv[0] >= rep.lo - 1e-12 && iv[1] <= rep.hi + 1e-12);
      covered = covered && in;
    }
    c.status = covered ? CheckStatus::Repaired : CheckStatus::Fail;
  }
  return c;
}

}  // namespace

ValidationReport validate(const PotentialPair& v, const PotentialTriple& psi, Real grid_step) {
  const Real a = v.alpha;
  if (grid_step <= 0.0) grid_step = a / 10.0;
  if (grid_step > a / 10.0) throw DomainError("validate: grid step must not exceed alpha/10");
  const Real step = std::min(grid_step, 1e-3);
  ValidationReport rep;
  const Real R = std::sqrt(3.5);

  {
    const auto at1 = renormalized_pair(v, 1.0);
    Real worst_dip = 0.0, where = 1.0;
    auto rs = grid(0.7, 2.0, 0.01);
    for (Real r : grid(0.99, 1.01, 1e-4)) rs.push_back(r);
    for (Real r : rs) {
      const Real d = renormalized_pair(v, r).value - at1.value;
      if (d < worst_dip) {
        worst_dip = d;
        where = r;
      }
    }
    ConditionCheck c;
    c.condition = "equilibrium_normalization";
    c.margin = std::min(1e-8 - std::abs(at1.derivative), worst_dip + 1e-10);
    c.worst_location = worst_dip < 0.0 ? where : 1.0;
    c.status = c.margin >= 0.0 ? CheckStatus::Pass : CheckStatus::Fail;
    rep.entries.push_back(c);
  }
  rep.entries.push_back(
      scalar_check("fcc_preference", v.value(std::sqrt(8.0 / 3.0)) - 3.0 * v.value(kSqrt3) - std::sqrt(a), kSqrt3));
  rep.entries.push_back(grid_check("hard_core", grid(0.0, 1.0 - a, step),
                                   [&](Real r) { return v.value(r) - 1.0 / a + 1e-12 / a; }, v));
  rep.entries.push_back(grid_check("well_convexity", grid(1.0 - a, 1.0 + a, step, true, true),
                                   [&](Real r) { return v.d2(r) - 1.0; }, v));
  rep.entries.push_back(scalar_check("slope_sign", v.d1(kSqrt3), kSqrt3));
  rep.entries.push_back(grid_check("mid_range_curvature", grid(1.0 + a, R, step),
                                   [&](Real r) { return std::pow(a, 0.25) - std::abs(v.d2(r)); }, v));
  {
    auto g = grid(R, 4.0, step);
    for (Real r : grid(4.0, 60.0, 0.05)) g.push_back(r);
    rep.entries.push_back(grid_check("tail_decay", g,
                                     [&](Real r) { return a - std::abs(v.d2(r)) * std::pow(r, 10.0); }, v));
  }

  // Three-body conditions on a symmetric grid r1 <= r2 <= r3 over [0, 1.6].
  const auto g3 = grid(0.0, 1.6, grid_step);
  // Exact breakpoints are added so the boundaries of each region are sampled.
  std::vector<Real> pts = g3;
  for (Real b : {1.0 - a, 1.0 - a / 2.0, 1.0, 1.0 + a, PotentialTriple::kPlateau, PotentialTriple::kSupport})
    pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  const std::size_t n = pts.size();
  const Real at111 = psi.value(1.0, 1.0, 1.0);
  Real min_all = at111, min_off = std::numeric_limits<Real>::infinity(), min_core = min_off, max_supp = 0.0;
  std::array<Real, 3> w_off{}, w_core{}, w_supp{}, w_min{1, 1, 1};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      for (std::size_t k = j; k < n; ++k) {
        const Real r1 = pts[i], r2 = pts[j], r3 = pts[k];
        const Real p = psi.value(r1, r2, r3);
        if (p < min_all) {
          min_all = p;
          w_min = {r1, r2, r3};
        }
        const Real off = std::max({std::abs(r1 - 1.0), std::abs(r2 - 1.0), std::abs(r3 - 1.0)});
        if (off >= a && p < min_off) {
          min_off = p;
          w_off = {r1, r2, r3};
        }
        if (r1 <= 1.0 - a && r3 < PotentialTriple::kPlateau && p < min_core) {
          min_core = p;
          w_core = {r1, r2, r3};
        }
        if (r3 >= PotentialTriple::kSupport && std::abs(p) > max_supp) {
          max_supp = std::abs(p);
          w_supp = {r1, r2, r3};
        }
      }
  {
    ConditionCheck c;
    c.condition = "three_body_minimum";
    c.margin = std::min({min_all - at111, -std::abs(at111 + 1.0), min_off});
    c.worst_location = min_off < 0.0 ? w_off[2] : w_min[2];
    c.status = (std::abs(at111 + 1.0) <= 1e-14 && min_all >= at111 - 1e-14 && min_off >= 0.0) ? CheckStatus::Pass
                                                                                              : CheckStatus::Fail;
    rep.entries.push_back(c);
  }
  {
    ConditionCheck c = scalar_check("three_body_core", min_core - 1.0 / a, w_core[0]);
    rep.entries.push_back(c);
  }
  {
    ConditionCheck c = scalar_check("three_body_support", max_supp > 0.0 ? -max_supp : 0.0, w_supp[2]);
    rep.entries.push_back(c);
  }
  return rep;
}

ValidationReport derived_bounds(const PotentialPair& v) {
  const Real a = v.alpha;
  const Real R = std::sqrt(3.5);
  ValidationReport rep;
  const auto mid = grid(1.0 + a, R, 1e-3);
  rep.entries.push_back(grid_check("mid_range_value_and_slope", mid,
                                   [&](Real r) {
                                     return std::pow(a, 0.25) - std::max(std::abs(v.value(r)), std::abs(v.d1(r)));
                                   },
                                   [&] {
                                     PotentialPair w = v;
                                     for (auto& rp : w.repairs) rp.condition = "mid_range_value_and_slope";
                                     return w;
                                   }()));
  auto far = grid(R, 4.0, 1e-3);
  for (Real r : grid(4.0, 60.0, 0.05)) far.push_back(r);
  rep.entries.push_back(
      grid_check("tail_value_decay", far, [&](Real r) { return a * std::pow(r, -8.0) - std::abs(v.value(r)); }, v));
  auto all = grid(0.0, 4.0, 1e-3);
  rep.entries.push_back(grid_check("lower_bound", all, [&](Real r) { return v.value(r) + 2.0; }, v));
  return rep;
}

// ---------------------------------------------------------------- tuning

TuningResult tune_equilibrium(const PotentialPair& v, Real lo, Real hi, Real tol) {
  if (lo == 0.0 && hi == 0.0) {
    lo = -v.alpha / 72.0;
    hi = v.alpha / 72.0;
  }
  auto f = [&](Real c) { return renormalized_pair(v.with_tail_amplitude(c), 1.0).derivative; };
  TuningResult out;
  const Real f0 = f(v.tail_amplitude);
  if (std::abs(f0) <= tol) {
    out.pair = v;
    out.residual = std::abs(f0);
    return out;
  }
  Real flo = f(lo), fhi = f(hi);
  if (flo == 0.0 || fhi == 0.0 || (flo > 0.0) == (fhi > 0.0))
    throw TuningError("tune_equilibrium: (V*)'(1) does not change sign over the admissible tail amplitudes [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  // Monotonicity over the bracket.
  Real prev = flo;
  const bool increasing = fhi > flo;
  for (int i = 1; i <= 8; ++i) {
    const Real fi = f(lo + (hi - lo) * i / 8.0);
    if ((increasing && fi < prev) || (!increasing && fi > prev))
      throw TuningError("tune_equilibrium: (V*)'(1) is not monotone in the tail amplitude");
    prev = fi;
  }
  int it = 0;
  for (; it < 30; ++it) {
    const Real mid = 0.5 * (lo + hi);
    const Real fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  Real x0 = lo, x1 = hi, f0s = flo, f1s = fhi;
  Real best = std::abs(f0s) < std::abs(f1s) ? x0 : x1;
  Real fbest = std::min(std::abs(f0s), std::abs(f1s));
  for (; it < 80 && fbest > tol && f1s != f0s; ++it) {
    const Real x2 = x1 - f1s * (x1 - x0) / (f1s - f0s);
    const Real f2 = f(x2);
    x0 = x1;
    f0s = f1s;
    x1 = x2;
    f1s = f2;
    if (std::abs(f2) < fbest) {
      fbest = std::abs(f2);
      best = x2;
    }
  }
  out.pair = v.with_tail_amplitude(best);
  out.residual = fbest;
  out.iterations = it;
  PotentialPair w = out.pair;
  if (w.value(std::sqrt(8.0 / 3.0)) - 3.0 * w.value(kSqrt3) < std::sqrt(w.alpha)) out.broken.push_back("fcc_preference");
  if (w.d1(kSqrt3) < 0.0) out.broken.push_back("slope_sign");
  if (72.0 * std::abs(w.tail_amplitude) > w.alpha) out.broken.push_back("tail_decay");
  return out;
}

// ---------------------------------------------------------------- json

nlohmann::json to_json(const PotentialPair& v, const PotentialTriple* psi) {
  nlohmann::json j;
  j["version"] = 1;
  j["alpha"] = v.alpha;
  nlohmann::json pieces = nlohmann::json::array();
  for (const auto& p : v.pieces)
    pieces.push_back({{"lo", p.lo}, {"hi", p.hi}, {"x0", p.x0}, {"coeffs", p.c}});
  j["pieces"] = pieces;
  j["tail"] = {{"start", v.tail_start}, {"exponent", 8}};
  j["tail_amplitude"] = v.tail_amplitude;
  j["cutoff"] = v.cutoff;
  nlohmann::json reps = nlohmann::json::array();
  for (const auto& r : v.repairs)
    reps.push_back({{"condition", r.condition}, {"lo", r.lo}, {"hi", r.hi}, {"reason", r.reason}});
  j["repairs"] = reps;
  if (psi) j["triple"] = {{"alpha", psi->alpha}, {"amplitude", psi->amplitude}, {"depth", psi->depth}};
  return j;
}

PotentialPair pair_from_json(const nlohmann::json& j) {
  if (!j.contains("pieces") || !j.contains("tail_amplitude") || !j.contains("alpha"))
    throw DomainError("potential json: missing required fields");
  PotentialPair v;
  v.alpha = j.at("alpha").get<Real>();
  for (const auto& p : j.at("pieces")) {
    PolyPiece q;
    q.lo = p.at("lo").get<Real>();
    q.hi = p.at("hi").get<Real>();
    q.x0 = p.at("x0").get<Real>();
    q.c = p.at("coeffs").get<std::array<Real, 4>>();
    v.pieces.push_back(q);
  }
  if (v.pieces.empty()) throw DomainError("potential json: no pieces");
  v.tail_start = j.at("tail").at("start").get<Real>();
  if (j.at("tail").value("exponent", 8) != 8) throw DomainError("potential json: only r^-8 tails are supported");
  v.tail_amplitude = j.at("tail_amplitude").get<Real>();
  v.cutoff = j.value("cutoff", 6.0);
  for (const auto& r : j.value("repairs", nlohmann::json::array()))
    v.repairs.push_back({r.at("condition").get<std::string>(), r.at("lo").get<Real>(), r.at("hi").get<Real>(),
                         r.value("reason", std::string{})});
  return v;
}

PotentialTriple triple_from_json(const nlohmann::json& j) {
  if (j.contains("triple")) {
    PotentialTriple p;
    p.alpha = j.at("triple").at("alpha").get<Real>();
    p.amplitude = j.at("triple").at("amplitude").get<Real>();
    p.depth = j.at("triple").value("depth", 1.0);
    return p;
  }
  return build_canonical_triple(j.at("alpha").get<Real>());
}

nlohmann::json to_json(const ValidationReport& r) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : r.entries) {
    nlohmann::json viol = nlohmann::json::array();
    for (const auto& iv : e.violations) viol.push_back({iv[0], iv[1]});
    arr.push_back({{"condition", e.condition},
                   {"status", to_string(e.status)},
                   {"margin", e.margin},
                   {"worst_location", e.worst_location},
                   {"violations", viol}});
  }
  return {{"ok", r.ok()}, {"entries", arr}};
}

}  // namespace xtal
