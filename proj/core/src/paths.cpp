#include "xtal/paths.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

namespace xtal {

namespace {


bool lex_less(const Vec3i& a, const Vec3i& b) {
  return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
}

bool seq_less(const std::vector<Vec3i>& a, const std::vector<Vec3i>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), lex_less);
}

int unit_index(const Vec3i& w) {
  const auto& u = unit_vectors();
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u[i] == w) return static_cast<int>(i);
  return -1;
}

std::int64_t det3(const Vec3i& a, const Vec3i& b, const Vec3i& c) { return a.dot(b.cross(c)); }

// Nearest point of the scaled fcc lattice (integer vectors with even sum).
Vec3i round_fcc(const Vec3& x) {
  Vec3i w;
  for (int k = 0; k < 3; ++k) w[k] = static_cast<std::int64_t>(std::llround(x[k]));
  if ((w.sum() & 1) != 0) {
    int worst = 0;
    Real err = -1.0;
    for (int k = 0; k < 3; ++k) {
      const Real e = std::abs(x[k] - static_cast<Real>(w[k]));
      if (e > err) {
        err = e;
        worst = k;
      }
    }
    w[worst] += x[worst] > static_cast<Real>(w[worst]) ? 1 : -1;
  }
  return w;
}

std::vector<Vec3i> corners(const std::vector<Vec3i>& sites) {
  std::vector<Vec3i> c{sites.front()};
  for (std::size_t i = 1; i + 1 < sites.size(); ++i)
    if (sites[i] - sites[i - 1] != sites[i + 1] - sites[i]) c.push_back(sites[i]);
  c.push_back(sites.back());
  return c;
}

}  // namespace

Real Path::length() const { return std::sqrt(static_cast<Real>(k.squaredNorm()) / 2.0); }

std::vector<Vec3> Path::positions() const {
  std::vector<Vec3> out;
  out.reserve(sites.size());
  for (const auto& w : sites) out.push_back(to_position(LatticeKind::FCC, w));
  return out;
}

std::int64_t basis_count(const std::vector<Vec3i>& sites) {
  std::vector<int> steps;
  for (std::size_t i = 1; i < sites.size(); ++i) {
    const int s = unit_index(sites[i] - sites[i - 1]);
    if (s < 0) return 0;
    steps.push_back(s);
  }
  std::int64_t count = 0;
  for (const auto& b : enumerate_bases()) {
    int col = 0;
    bool ok = true;
    for (int s : steps) {
      while (col < 3 && b.idx[col] != s) ++col;
      if (col == 3) {
        ok = false;
        break;
      }
    }
    if (ok) ++count;
  }
  return count;
}

std::pair<Vec3, Real> path_center(const std::vector<Vec3i>& sites) {
  if (sites.size() < 2) throw DomainError("path_center: degenerate path");
  const auto c = corners(sites);
  const Vec3 p0 = to_position(LatticeKind::FCC, c[0]);
  const int m = static_cast<int>(c.size()) - 1;
  Eigen::MatrixXd gram(m, m);
  Eigen::VectorXd rhs(m);
  std::vector<Vec3> e(m);
  for (int i = 0; i < m; ++i) e[i] = to_position(LatticeKind::FCC, c[i + 1]) - p0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) gram(i, j) = e[i].dot(e[j]);
    rhs[i] = 0.5 * e[i].squaredNorm();
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  if (lu.rank() < m) throw DomainError("path_center: segment end points are affinely dependent");
  const Eigen::VectorXd t = lu.solve(rhs);
  Vec3 zeta = p0;
  for (int i = 0; i < m; ++i) zeta += t[i] * e[i];
  Real rho = 0.0;
  for (const auto& w : sites) rho = std::max(rho, (to_position(LatticeKind::FCC, w) - zeta).norm());
  return {zeta, rho};
}

Path make_path(std::vector<Vec3i> sites) {
  if (sites.size() < 2) throw DomainError("make_path: a path needs at least one step");
  Path p;
  p.sites = std::move(sites);
  p.k = p.sites.back() - p.sites.front();
  p.basis_count = basis_count(p.sites);
  p.weight = static_cast<Real>(p.basis_count) / kBasisNorm;
  std::tie(p.center, p.radius) = path_center(p.sites);
  return p;
}

bool is_generic(const Vec3i& k) {
  const auto& u = unit_vectors();
  for (std::size_t a = 0; a < u.size(); ++a)
    for (std::size_t b = a + 1; b < u.size(); ++b) {
      if (u[a].cross(u[b]).squaredNorm() == 0) continue;
      if (det3(u[a], u[b], k) == 0) return false;
    }
  return true;
}

std::vector<Path> enumerate_paths(const Vec3i& k, Real cap) {
  if ((k.sum() & 1) != 0) throw DomainError("enumerate_paths: k is not an fcc lattice site");
  const std::int64_t key = k.squaredNorm();
  if (key == 0) throw DomainError("enumerate_paths: k must be nonzero");
  if (static_cast<Real>(key) > 2.0 * cap * cap + 1e-9)
    throw CapacityError("enumerate_paths: |k| exceeds the enumeration cap");
  std::vector<Path> out;
  if (key == 4 || key == 6) {
    for (const auto& m : unit_vectors())
      if ((k - m).squaredNorm() == 2) out.push_back(make_path({Vec3i::Zero(), m, k}));
  } else {
    std::map<std::vector<Vec3i>, std::array<int, 3>, decltype(&seq_less)> seen(&seq_less);
    for (const auto& b : enumerate_bases()) {
      const auto& w = b.W;
      const std::int64_t d = det3(w.col(0), w.col(1), w.col(2));
      std::array<std::int64_t, 3> c{det3(k, w.col(1), w.col(2)), det3(w.col(0), k, w.col(2)),
                                    det3(w.col(0), w.col(1), k)};
      bool ok = true;
      for (auto& ci : c) {
        if (ci % d != 0) {
          ok = false;
          break;
        }
        ci /= d;
        if (ci < 0) ok = false;
      }
      if (!ok) continue;
      std::vector<Vec3i> sites{Vec3i::Zero()};
      for (int col = 0; col < 3; ++col)
        for (std::int64_t s = 0; s < c[col]; ++s) sites.push_back(sites.back() + w.col(col));
      seen.emplace(std::move(sites), b.idx);
    }
    for (auto& [sites, idx] : seen) {
      Path p = make_path(sites);
      p.basis = idx;
      out.push_back(std::move(p));
    }
  }
  std::sort(out.begin(), out.end(), [](const Path& a, const Path& b) { return seq_less(a.sites, b.sites); });
  Real total = 0.0;
  for (const auto& p : out) total += p.weight;
  for (auto& p : out) p.weight_renormalized = total > 0.0 ? p.weight / total : 0.0;
  return out;
}

std::vector<Path> enumerate_paths(Real lambda, Real cap) {
  const auto key = static_cast<std::int64_t>(std::llround(2.0 * lambda * lambda));
  if (key <= 0 || std::abs(2.0 * lambda * lambda - static_cast<Real>(key)) > 1e-9)
    throw DomainError("enumerate_paths: lambda is not an fcc lattice distance");
  std::vector<Path> out;
  for (const auto& s : generate(LatticeKind::FCC, lambda + 1e-9)) {
    const Vec3i w = scaled_coords(LatticeKind::FCC, s);
    if (w.squaredNorm() != key) continue;
    auto part = enumerate_paths(w, cap);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  if (out.empty()) throw DomainError("enumerate_paths: lambda is not an fcc lattice distance");
  return out;
}

NormalizationResult normalization_check(const Vec3i& k, Real cap) {
  if (k.squaredNorm() <= 6) throw DomainError("normalization_check: requires |k| > sqrt(3)");
  const auto paths = enumerate_paths(k, cap);
  if (paths.empty()) throw DomainError("normalization_check: no paths reach k");
  NormalizationResult r;
  std::vector<Real> w;
  for (const auto& p : paths) w.push_back(p.weight);
  r.sum = pairwise_sum(w);
  r.generic = is_generic(k);
  r.paths = paths.size();
  return r;
}

Path reflect(const Path& mu, const Vec3i& v) {
  if (v.squaredNorm() != 2 || unit_index(v) < 0) throw DomainError("reflect: v must be a unit fcc vector");
  const auto& s = mu.sites;
  std::size_t start = s.size();
  std::int64_t n = 0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    if (s[i + 1] - s[i] == v) {
      if (start == s.size()) start = i;
      ++n;
    }
  if (n == 0) return mu;
  // κ(y) = η + g(y - η) with η the segment midpoint; g(w) = w - (v·w) v.
  const std::int64_t shift = v.dot(s[start]) + n;
  std::vector<Vec3i> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vec3i& y = s[s.size() - 1 - i];
    out[i] = y - v.dot(y) * v + shift * v;
  }
  Path r = make_path(std::move(out));
  r.weight_renormalized = mu.weight_renormalized;
  return r;
}

std::vector<Path> orbit(const Path& mu) {
  std::map<std::vector<Vec3i>, Path, decltype(&seq_less)> seen(&seq_less);
  std::deque<Path> queue{mu};
  seen.emplace(mu.sites, mu);
  while (!queue.empty()) {
    const Path p = queue.front();
    queue.pop_front();
    for (const auto& v : unit_vectors()) {
      Path q = reflect(p, v);
      if (seen.emplace(q.sites, q).second) queue.push_back(std::move(q));
    }
  }
  std::vector<Path> out;
  for (auto& [k, p] : seen) out.push_back(std::move(p));
  return out;
}

Real a_coefficient(const Vec3i& k, const Vec3i& v, const OrderedBasis& b) {
  bool member = false;
  for (int c = 0; c < 3; ++c) member = member || Vec3i(b.W.col(c)) == v;
  if (!member) return 0.0;
  const Mat3 binv = b.B.inverse();
  return (binv * to_position(LatticeKind::FCC, k)).dot(binv * to_position(LatticeKind::FCC, v));
}

LemmaLambdaResult lemma_lambda_check(Real lambda, const OrderedBasis& b, int column) {
  if (column < 0 || column > 2) throw DomainError("lemma_lambda_check: column must be 0, 1 or 2");
  const auto key = static_cast<std::int64_t>(std::llround(2.0 * lambda * lambda));
  if (key <= 0 || std::abs(2.0 * lambda * lambda - static_cast<Real>(key)) > 1e-9)
    throw DomainError("lemma_lambda_check: lambda is not an fcc lattice distance");
  const Vec3i v = b.W.col(column);
  const Vec3 vp = to_position(LatticeKind::FCC, v);
  LemmaLambdaResult r;
  std::vector<Real> terms;
  for (const auto& s : generate(LatticeKind::FCC, lambda + 1e-9)) {
    const Vec3i w = scaled_coords(LatticeKind::FCC, s);
    if (w.squaredNorm() != key) continue;
    ++r.m;
    terms.push_back(a_coefficient(w, v, b) * to_position(LatticeKind::FCC, w).dot(vp));
  }
  if (r.m == 0) throw DomainError("lemma_lambda_check: lambda is not an fcc lattice distance");
  r.lhs = pairwise_sum(terms);
  r.rhs = static_cast<Real>(r.m) * lambda * lambda / 3.0;
  return r;
}

nlohmann::json to_json(const Path& p) {
  nlohmann::json sites = nlohmann::json::array();
  for (const auto& w : p.sites) sites.push_back({w[0], w[1], w[2]});
  return {{"sites", sites},
          {"coordinate_scale", kSqrt2},
          {"k", {p.k[0], p.k[1], p.k[2]}},
          {"weight", p.weight},
          {"weight_renormalized", p.weight_renormalized},
          {"basis_count", p.basis_count},
          {"zeta", {p.center[0], p.center[1], p.center[2]}},
          {"rho", p.radius}};
}

std::string paths_jsonl(const std::vector<Path>& paths) {
  std::string out;
  for (const auto& p : paths) out += to_json(p).dump() + "\n";
  return out;
}

// ---------------------------------------------------------------------------

std::int64_t lambda_key(Real lambda) { return static_cast<std::int64_t>(std::llround(6.0 * lambda * lambda)); }
Real key_lambda(std::int64_t key6) { return std::sqrt(static_cast<Real>(key6) / 6.0); }

std::string to_string(PairClass c) {
  switch (c) {
    case PairClass::Bond: return "bond";
    case PairClass::Medium: return "medium";
    case PairClass::Long: return "long";
    case PairClass::Defect: return "defect";
  }
  return "defect";
}

namespace {

std::array<std::int64_t, 3> image_shift(const Configuration& c, int i, int j, const Vec3& d) {
  std::array<std::int64_t, 3> n{0, 0, 0};
  if (!c.periodic()) return n;
  const Vec3 s = c.cell->inverse() * (c.positions[static_cast<std::size_t>(i)] + d -
                                     c.positions[static_cast<std::size_t>(j)]);
  for (int k = 0; k < 3; ++k) n[k] = std::llround(s[k]);
  return n;
}

struct PairKey {
  int i, j;
  std::array<std::int64_t, 3> n;
  bool operator==(const PairKey&) const = default;
};

struct PairKeyHash {
  std::size_t operator()(const PairKey& k) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](std::uint64_t x) { h = (h ^ x) * 1099511628211ull; };
    mix(static_cast<std::uint64_t>(k.i));
    mix(static_cast<std::uint64_t>(k.j));
    for (auto x : k.n) mix(static_cast<std::uint64_t>(x));
    return static_cast<std::size_t>(h);
  }
};

// Orientation i < j, or i == j with a lexicographically positive shift.
bool canonical(int i, int j, const std::array<std::int64_t, 3>& n) {
  if (i != j) return i < j;
  return n > std::array<std::int64_t, 3>{0, 0, 0};
}

PairKey canonical_key(int i, int j, std::array<std::int64_t, 3> n) {
  if (canonical(i, j, n)) return {i, j, n};
  for (auto& x : n) x = -x;
  return {j, i, n};
}

}  // namespace

LatticeLabels label_lattice(const Configuration& config, const BondGraph& g, const SiteClassification& cls) {
  const std::size_t n = config.size();
  LatticeLabels lab;
  lab.labelled.assign(n, 0);
  lab.coord.assign(n, Vec3i::Zero());
  lab.component.assign(n, -1);
  std::vector<Mat3> frame(n, Mat3::Identity());
  std::vector<char> bad(n, 0);
  const Real accept = 3.0 * g.alpha;

  int comp = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (cls.cls[root] != SiteClass::CO || lab.labelled[root]) continue;
    const Mat3 r0 = cls.registration.at(static_cast<int>(root)).rotation;
    if (comp == 0 && config.periodic())
      for (int k = 0; k < 3; ++k) lab.cell_coord[k] = round_fcc(kSqrt2 * (r0.transpose() * config.cell->col(k)));
    frame[root] = r0;
    lab.labelled[root] = 1;
    lab.component[root] = comp;
    std::deque<int> queue{static_cast<int>(root)};
    while (!queue.empty()) {
      const int x = queue.front();
      queue.pop_front();
      // Refit the frame on labelled neighbors.
      if (x != static_cast<int>(root)) {
        std::vector<Vec3> p, q;
        for (const auto& e : g.adj[static_cast<std::size_t>(x)]) {
          if (!lab.labelled[static_cast<std::size_t>(e.j)] || lab.component[static_cast<std::size_t>(e.j)] != comp)
            continue;
          const auto sh = image_shift(config, x, e.j, e.d);
          Vec3i img = lab.coord[static_cast<std::size_t>(e.j)];
          for (int k = 0; k < 3; ++k) img += sh[k] * lab.cell_coord[k];
          const Vec3i off = img - lab.coord[static_cast<std::size_t>(x)];
          if (off.squaredNorm() != 2) continue;
          p.push_back(to_position(LatticeKind::FCC, off));
          q.push_back(e.d);
        }
        Mat3 cov = Mat3::Zero();
        for (const auto& a : p) cov += a * a.transpose();
        if (p.size() >= 3 && Eigen::FullPivLU<Mat3>(cov).rank() == 3) frame[x] = kabsch(p, q);
      }
      for (const auto& e : g.adj[static_cast<std::size_t>(x)]) {
        const auto j = static_cast<std::size_t>(e.j);
        if (cls.cls[j] != SiteClass::CO) continue;
        const Vec3i u = round_fcc(kSqrt2 * (frame[x].transpose() * e.d));
        if (u.squaredNorm() != 2 || (frame[x] * to_position(LatticeKind::FCC, u) - e.d).norm() > accept) {
          bad[static_cast<std::size_t>(x)] = 1;
          continue;
        }
        const auto sh = image_shift(config, x, e.j, e.d);
        Vec3i cj = lab.coord[static_cast<std::size_t>(x)] + u;
        for (int k = 0; k < 3; ++k) cj -= sh[k] * lab.cell_coord[k];
        if (lab.labelled[j]) {
          if (lab.coord[j] != cj) {
            bad[j] = 1;
            bad[static_cast<std::size_t>(x)] = 1;
          }
          continue;
        }
        lab.labelled[j] = 1;
        lab.coord[j] = cj;
        lab.component[j] = comp;
        frame[j] = frame[x];
        queue.push_back(e.j);
      }
    }
    ++comp;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (bad[i]) {
      ++lab.conflicts;
      lab.labelled[i] = 0;
      lab.component[i] = -1;
    }
  return lab;
}

std::size_t PairSets::size_of(Real lambda) const {
  auto it = count.find(lambda_key(lambda));
  return it == count.end() ? 0 : it->second;
}

PairSets pair_sets(const Configuration& config, const BondGraph& g, const SiteClassification& cls,
                   const PotentialPair& v, const PairSetOptions& opts) {
  const Real cutoff = opts.cutoff > 0.0 ? opts.cutoff : v.cutoff;
  const std::size_t n = config.size();
  PairSets ps;

  // dist(y(x), y(∂X)) by brute force over the boundary set.
  ps.defect_distance.assign(n, std::numeric_limits<Real>::infinity());
  std::vector<std::size_t> boundary;
  for (std::size_t i = 0; i < n; ++i)
    if (cls.in_boundary(i)) boundary.push_back(i);
  parallel_for(n, [&](std::size_t i) {
    Real best = std::numeric_limits<Real>::infinity();
    for (std::size_t b : boundary) {
      Vec3 d = config.positions[b] - config.positions[i];
      if (config.periodic()) {
        Vec3 s = config.cell->inverse() * d;
        for (int k = 0; k < 3; ++k) s[k] -= std::round(s[k]);
        d = *config.cell * s;
      }
      best = std::min(best, d.norm());
    }
    ps.defect_distance[i] = best;
  });

  const NeighborList nl = build_neighbors(config, cutoff);
  std::unordered_map<PairKey, std::size_t, PairKeyHash> index;
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& e : nl.of[i]) {
      const auto sh = image_shift(config, static_cast<int>(i), e.j, e.d);
      if (!canonical(static_cast<int>(i), e.j, sh)) continue;
      ParticlePair p;
      p.i = static_cast<int>(i);
      p.j = e.j;
      for (int k = 0; k < 3; ++k) {
        if (std::abs(sh[k]) > 127) throw CapacityError("pair_sets: image shift out of range");
        p.shift[k] = static_cast<std::int8_t>(sh[k]);
      }
      p.r = e.r;
      index.emplace(PairKey{p.i, p.j, sh}, ps.pairs.size());
      ps.pairs.push_back(p);
    }

  auto lookup = [&](int i, int j, const Vec3& d) -> ParticlePair* {
    auto it = index.find(canonical_key(i, j, image_shift(config, i, j, d)));
    return it == index.end() ? nullptr : &ps.pairs[it->second];
  };

  // Bonds.
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& e : g.adj[i])
      if (ParticlePair* p = lookup(static_cast<int>(i), e.j, e.d); p && p->cls == PairClass::Defect) {
        p->cls = PairClass::Bond;
        p->key6 = 6;
      }

  // Medium pairs from the registered neighborhoods of Xreg².
  for (std::size_t x = 0; x < n; ++x) {
    if (!cls.in_xreg2[x]) continue;
    const Registration& reg = cls.registration.at(static_cast<int>(x));
    const auto& tv = kissing_polyhedron(reg.kind).vertices;
    const auto& adj = g.adj[x];
    for (std::size_t a = 0; a < adj.size(); ++a)
      for (std::size_t b = a + 1; b < adj.size(); ++b) {
        const Real t = (tv[static_cast<std::size_t>(reg.perm[b])] - tv[static_cast<std::size_t>(reg.perm[a])]).norm();
        const std::int64_t key = lambda_key(t);
        if (key != 12 && key != 16 && key != 18) continue;
        ParticlePair* p = lookup(adj[a].j, adj[b].j, adj[b].d - adj[a].d);
        if (!p || p->cls != PairClass::Defect) continue;
        p->cls = PairClass::Medium;
        p->key6 = key;
      }
  }

  // Long regular pairs from the lattice labels.
  ps.labels = label_lattice(config, g, cls);
  const auto& lab = ps.labels;
  for (auto& p : ps.pairs) {
    if (p.cls != PairClass::Defect) continue;
    const auto i = static_cast<std::size_t>(p.i), j = static_cast<std::size_t>(p.j);
    if (!lab.labelled[i] || !lab.labelled[j] || lab.component[i] != lab.component[j]) continue;
    Vec3i d = lab.coord[j] - lab.coord[i];
    for (int k = 0; k < 3; ++k) d += static_cast<std::int64_t>(p.shift[k]) * lab.cell_coord[k];
    const std::int64_t key = 3 * d.squaredNorm();
    if (key <= 18) continue;
    const Real lambda = key_lambda(key);
    if (std::min(ps.defect_distance[i], ps.defect_distance[j]) < opts.distance_factor * lambda) continue;
    p.cls = PairClass::Long;
    p.key6 = key;
  }

  for (const auto& p : ps.pairs) {
    if (p.cls == PairClass::Defect) {
      ++ps.defect;
      continue;
    }
    if (p.cls == PairClass::Bond) ++ps.bonds;
    ++ps.count[p.key6];
  }
  return ps;
}

std::vector<CardinalityRow> cardinality_report(const PairSets& p, const SiteClassification& cls) {
  std::vector<CardinalityRow> out;
  const Real bonds = static_cast<Real>(p.bonds);
  const auto boundary = static_cast<Real>(cls.boundary_count());
  for (auto [key, m] : std::vector<std::pair<std::int64_t, std::int64_t>>{{12, 6}, {16, 2}, {18, 24}}) {
    CardinalityRow r;
    r.lambda = key_lambda(key);
    r.m = m;
    r.expected = static_cast<Real>(m) / 12.0 * bonds;
    auto it = p.count.find(key);
    r.count = it == p.count.end() ? 0 : it->second;
    r.gap = r.expected - static_cast<Real>(r.count);
    r.constant = boundary > 0 ? r.gap / (r.lambda * r.lambda * r.lambda * boundary) : 0.0;
    out.push_back(r);
  }
  return out;
}

nlohmann::json to_json(const PairSets& p) {
  nlohmann::json counts = nlohmann::json::array();
  for (const auto& [key, c] : p.count) counts.push_back({{"lambda", key_lambda(key)}, {"key6", key}, {"count", c}});
  std::size_t labelled = 0;
  for (char c : p.labels.labelled) labelled += c ? 1 : 0;
  return {{"pairs", p.pairs.size()},
          {"bonds", p.bonds},
          {"defect_pairs", p.defect},
          {"regular", counts},
          {"labelled_particles", labelled},
          {"label_conflicts", p.labels.conflicts}};
}

}  // namespace xtal
