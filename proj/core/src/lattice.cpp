#include "xtal/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace xtal {

namespace {

bool lex_less(const Vec3i& a, const Vec3i& b) {
  return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
}

Vec3i cross_i(const Vec3i& a, const Vec3i& b) {
  return Vec3i(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]);
}

std::int64_t det_i(const Eigen::Matrix<std::int64_t, 3, 3>& m) {
  return m.col(0).dot(cross_i(m.col(1), m.col(2)));
}

}  // namespace

std::string to_string(LatticeKind kind) { return kind == LatticeKind::FCC ? "fcc" : "hcp"; }

LatticeKind parse_lattice_kind(const std::string& s) {
  if (s == "fcc") return LatticeKind::FCC;
  if (s == "hcp") return LatticeKind::HCP;
  throw DomainError("unknown lattice kind '" + s + "'");
}

Real coord_scale(LatticeKind kind) { return kind == LatticeKind::FCC ? kSqrt2 : 3.0 * kSqrt2; }

std::int64_t key_scale(LatticeKind kind) { return kind == LatticeKind::FCC ? 2 : 6; }

std::int64_t key_of(LatticeKind kind, const Vec3i& w) {
  const std::int64_t n = w.squaredNorm();
  return kind == LatticeKind::FCC ? n : n / 3;
}

Real key_to_distance(LatticeKind kind, std::int64_t key) {
  return std::sqrt(static_cast<Real>(key) / static_cast<Real>(key_scale(kind)));
}

Vec3 to_position(LatticeKind kind, const Vec3i& w) { return w.cast<Real>() / coord_scale(kind); }

Mat3 basis(LatticeKind kind) {
  Mat3 b;
  b.col(0) = Vec3(0, 1, 1) / kSqrt2;
  b.col(1) = Vec3(1, 0, 1) / kSqrt2;
  if (kind == LatticeKind::FCC)
    b.col(2) = Vec3(1, 1, 0) / kSqrt2;
  else
    b.col(2) = (2.0 * kSqrt2 / 3.0) * Vec3(1, 1, -1);
  return b;
}

std::vector<Vec3> motif(LatticeKind kind) {
  if (kind == LatticeKind::FCC) return {Vec3::Zero()};
  return {Vec3::Zero(), Vec3(1, 1, 0) / kSqrt2};
}

Vec3i scaled_coords(LatticeKind kind, const LatticeSite& s) {
  const std::int64_t a1 = s.a[0], a2 = s.a[1], a3 = s.a[2];
  if (kind == LatticeKind::FCC) return Vec3i(a2 + a3, a1 + a3, a1 + a2);
  Vec3i w(3 * a2, 3 * a1, 3 * (a1 + a2));
  w += 4 * a3 * Vec3i(1, 1, -1);
  if (s.motif == 1) w += Vec3i(3, 3, 0);
  return w;
}

Vec3 position(LatticeKind kind, const LatticeSite& site) { return to_position(kind, scaled_coords(kind, site)); }

std::vector<LatticeSite> generate(LatticeKind kind, Real radius, std::size_t max_sites) {
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw DomainError("generate: radius must be finite and >= 0");
  const Real estimate = kSqrt2 * 4.18879020478639 * std::pow(radius + 1.0, 3);
  if (estimate > static_cast<Real>(max_sites))
    throw CapacityError("generate: radius " + std::to_string(radius) + " exceeds site capacity " +
                        std::to_string(max_sites));
  const Mat3 binv = basis(kind).inverse();
  const auto mot = motif(kind);
  const Real margin = radius + 2.0;
  std::array<std::int64_t, 3> bound{};
  for (int i = 0; i < 3; ++i)
    bound[i] = static_cast<std::int64_t>(std::ceil(binv.row(i).norm() * (margin + 1.0)));
  const Real m = static_cast<Real>(key_scale(kind));
  const auto limit = static_cast<std::int64_t>(std::floor(m * radius * radius * (1.0 + 1e-12) + 1e-9));

  std::vector<std::pair<std::int64_t, LatticeSite>> out;
  for (std::int64_t a1 = -bound[0]; a1 <= bound[0]; ++a1)
    for (std::int64_t a2 = -bound[1]; a2 <= bound[1]; ++a2)
      for (std::int64_t a3 = -bound[2]; a3 <= bound[2]; ++a3)
        for (int mo = 0; mo < static_cast<int>(mot.size()); ++mo) {
          LatticeSite s{{a1, a2, a3}, mo};
          const std::int64_t key = key_of(kind, scaled_coords(kind, s));
          if (key <= limit) out.emplace_back(key, s);
        }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first < y.first;
    if (x.second.a != y.second.a) return x.second.a < y.second.a;
    return x.second.motif < y.second.motif;
  });
  std::vector<LatticeSite> sites;
  sites.reserve(out.size());
  for (auto& p : out) sites.push_back(p.second);
  return sites;
}

std::vector<Shell> shells(LatticeKind kind, Real rmax) {
  std::map<std::int64_t, std::int64_t> counts;
  for (const auto& s : generate(kind, rmax)) {
    const std::int64_t key = key_of(kind, scaled_coords(kind, s));
    if (key > 0) ++counts[key];
  }
  std::vector<Shell> out;
  for (auto [k, c] : counts) out.push_back({k, key_to_distance(kind, k), c});
  return out;
}

std::vector<ShellDifference> shell_differences(Real rmax) {
  std::map<std::int64_t, std::pair<std::int64_t, std::int64_t>> rows;
  for (const auto& s : shells(LatticeKind::FCC, rmax)) rows[3 * s.key].first = s.count;
  for (const auto& s : shells(LatticeKind::HCP, rmax)) rows[s.key].second = s.count;
  std::vector<ShellDifference> out;
  for (auto& [k, c] : rows)
    if (c.first != c.second) out.push_back({k, std::sqrt(static_cast<Real>(k) / 6.0), c.first, c.second});
  return out;
}

std::vector<Real> fcc_distances(Real rmax) {
  std::vector<Real> out;
  for (const auto& s : shells(LatticeKind::FCC, rmax)) out.push_back(s.radius);
  return out;
}

const std::vector<Vec3i>& unit_vectors() {
  static const std::vector<Vec3i> units = [] {
    std::vector<Vec3i> u;
    for (int x = -1; x <= 1; ++x)
      for (int y = -1; y <= 1; ++y)
        for (int z = -1; z <= 1; ++z)
          if (x * x + y * y + z * z == 2) u.emplace_back(x, y, z);
    std::sort(u.begin(), u.end(), lex_less);
    return u;
  }();
  return units;
}

std::int64_t unit_triangle_count() {
  std::int64_t count = 0;
  for (const auto& k1 : unit_vectors())
    for (const auto& k2 : unit_vectors())
      if ((k2 - k1).squaredNorm() == 2) ++count;
  return count;
}

const std::vector<OrderedBasis>& enumerate_bases() {
  static const std::vector<OrderedBasis> bases = [] {
    const auto& u = unit_vectors();
    std::vector<OrderedBasis> out;
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j)
        for (int k = 0; k < 12; ++k) {
          if (i == j || j == k || i == k) continue;
          OrderedBasis b;
          b.idx = {i, j, k};
          b.W.col(0) = u[i];
          b.W.col(1) = u[j];
          b.W.col(2) = u[k];
          if (det_i(b.W) == 0) continue;
          b.B = b.W.cast<Real>() / kSqrt2;
          out.push_back(b);
        }
    return out;
  }();
  return bases;
}

Mat3 reflection(const Vec3& v) {
  if (std::abs(v.norm() - 1.0) > 1e-12) throw DomainError("reflection: vector must have unit length");
  return Mat3::Identity() - 2.0 * v * v.transpose();
}

const Polyhedron& kissing_polyhedron(LatticeKind kind) {
  static const Polyhedron co = [] {
    Polyhedron p;
    p.kind = LatticeKind::FCC;
    p.scaled = unit_vectors();
    for (const auto& w : p.scaled) p.vertices.push_back(to_position(LatticeKind::FCC, w));
    return p;
  }();
  static const Polyhedron tco = [] {
    Polyhedron p;
    p.kind = LatticeKind::HCP;
    for (const auto& s : generate(LatticeKind::HCP, 1.0)) {
      const Vec3i w = scaled_coords(LatticeKind::HCP, s);
      if (key_of(LatticeKind::HCP, w) == 6) p.scaled.push_back(w);
    }
    std::sort(p.scaled.begin(), p.scaled.end(), lex_less);
    for (const auto& w : p.scaled) p.vertices.push_back(to_position(LatticeKind::HCP, w));
    // Stacking cross-check: the lower layer of the cuboctahedron mirrored
    // through the close-packed plane must give the same point set.
    const Vec3 n = Vec3(1, 1, -1).normalized();
    std::vector<Vec3> stacked;
    for (const auto& v : co.vertices) {
      const Real h = v.dot(n);
      if (h > 1e-9) {
        stacked.push_back(v);
        stacked.push_back(v - 2.0 * h * n);
      } else if (h > -1e-9) {
        stacked.push_back(v);
      }
    }
    if (stacked.size() != p.vertices.size()) throw Error("twisted cuboctahedron construction failed");
    for (const auto& s : stacked) {
      bool found = false;
      for (const auto& v : p.vertices) found = found || (s - v).norm() < 1e-12;
      if (!found) throw Error("twisted cuboctahedron construction failed");
    }
    return p;
  }();
  return kind == LatticeKind::FCC ? co : tco;
}

std::vector<Vec3> octahedron_vertices() {
  return {Vec3(0, 0, 0), Vec3(1, 1, 0) / kSqrt2, Vec3(1, -1, 0) / kSqrt2,
          Vec3(1, 0, 1) / kSqrt2, Vec3(1, 0, -1) / kSqrt2, Vec3(2, 0, 0) / kSqrt2};
}

ContactGraph contact_graph(const std::vector<Vec3>& pts, Real tol) {
  ContactGraph g;
  g.n = static_cast<int>(pts.size());
  g.adj.assign(pts.size(), {});
  std::vector<std::vector<char>> a(pts.size(), std::vector<char>(pts.size(), 0));
  for (int i = 0; i < g.n; ++i)
    for (int j = i + 1; j < g.n; ++j)
      if (std::abs((pts[i] - pts[j]).norm() - 1.0) <= tol) {
        g.edges.push_back({i, j});
        g.adj[i].push_back(j);
        g.adj[j].push_back(i);
        a[i][j] = a[j][i] = 1;
      }
  for (auto [i, j] : g.edges)
    for (int k = j + 1; k < g.n; ++k)
      if (a[i][k] && a[j][k]) g.triangles.push_back({i, j, k});
  // Canonical 4-cycle (p, q, r, s): p smallest, q < s, chords p-r and q-s absent.
  for (int p = 0; p < g.n; ++p)
    for (int q : g.adj[p])
      for (int s : g.adj[p]) {
        if (q <= p || s <= q) continue;
        for (int r : g.adj[q]) {
          if (r <= p || r == s || !a[r][s] || a[p][r] || a[q][s]) continue;
          g.squares.push_back({p, q, r, s});
        }
      }
  std::sort(g.squares.begin(), g.squares.end());
  return g;
}

std::vector<Mat3> point_group(LatticeKind kind) {
  const auto& q = kissing_polyhedron(kind).vertices;
  std::vector<Vec3> test;
  for (const auto& s : generate(kind, 2.0))
    if (key_of(kind, scaled_coords(kind, s)) > 0) test.push_back(position(kind, s));
  auto maps_onto = [&](const Mat3& g) {
    for (const auto& v : test) {
      const Vec3 gv = g * v;
      bool found = false;
      for (const auto& w : test)
        if ((gv - w).squaredNorm() < 1e-18) {
          found = true;
          break;
        }
      if (!found) return false;
    }
    return true;
  };
  const Vec3 u1 = q[0];
  int j2 = 1;
  while (u1.cross(q[j2]).norm() < 1e-9) ++j2;
  const Vec3 u2 = q[j2];
  Mat3 src;
  src << u1, u2, u1.cross(u2);
  const Mat3 srcinv = src.inverse();
  std::vector<Mat3> out;
  for (const auto& v1 : q)
    for (const auto& v2 : q) {
      if (std::abs(v1.dot(v2) - u1.dot(u2)) > 1e-12) continue;
      for (int sign : {1, -1}) {
        Mat3 dst;
        dst << v1, v2, sign * v1.cross(v2);
        const Mat3 g = dst * srcinv;
        if ((g.transpose() * g - Mat3::Identity()).norm() > 1e-10) continue;
        if (!maps_onto(g)) continue;
        bool dup = false;
        for (const auto& h : out) dup = dup || (h - g).norm() < 1e-10;
        if (!dup) out.push_back(g);
      }
    }
  return out;
}

std::array<Vec3, 4> UnitDomain::simplex_points(const Simplex& s) const {
  std::array<Vec3, 4> p;
  for (int i = 0; i < 4; ++i) p[i] = s.v[i] < 0 ? units[s.unit].center : positions[s.v[i]];
  return p;
}

Real unit_volume(UnitType type) { return type == UnitType::Tetrahedron ? kSqrt2 / 12.0 : kSqrt2 / 3.0; }

Real simplex_volume(const UnitDomain& d, const Simplex& s) {
  const auto p = d.simplex_points(s);
  Mat3 m;
  m << p[1] - p[0], p[2] - p[0], p[3] - p[0];
  return std::abs(m.determinant()) / 6.0;
}

UnitDomain decompose_sites(LatticeKind kind, std::vector<Vec3i> sites) {
  std::sort(sites.begin(), sites.end(), lex_less);
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  UnitDomain d;
  d.kind = kind;
  d.sites = sites;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    d.index.emplace(sites[i], static_cast<int>(i));
    d.positions.push_back(to_position(kind, sites[i]));
  }
  const std::int64_t k1 = key_scale(kind), k2 = 2 * key_scale(kind);
  const int n = static_cast<int>(sites.size());
  std::vector<std::vector<int>> nb(n);
  std::vector<Vec3i> shell1, shell2;
  for (const auto& s : generate(kind, 1.5)) {
    const Vec3i w = scaled_coords(kind, s);
    const auto key = key_of(kind, w);
    if (key == k1) shell1.push_back(w);
    if (key == k2) shell2.push_back(w);
  }
  // hcp shells differ between the two motif sublattices; use both orientations.
  if (kind == LatticeKind::HCP) {
    const std::size_t n1 = shell1.size(), n2 = shell2.size();
    for (std::size_t i = 0; i < n1; ++i) shell1.push_back(-shell1[i]);
    for (std::size_t i = 0; i < n2; ++i) shell2.push_back(-shell2[i]);
  }
  auto uniq = [](std::vector<Vec3i>& v) {
    std::sort(v.begin(), v.end(), lex_less);
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  uniq(shell1);
  uniq(shell2);
  for (int i = 0; i < n; ++i) {
    for (const auto& e : shell1) {
      const int j = d.find(sites[i] + e);
      if (j >= 0) nb[i].push_back(j);
    }
    std::sort(nb[i].begin(), nb[i].end());
  }
  auto adjacent = [&](int a, int b) { return std::binary_search(nb[a].begin(), nb[a].end(), b); };

  for (int i = 0; i < n; ++i)
    for (int j : nb[i]) {
      if (j <= i) continue;
      for (int k : nb[j]) {
        if (k <= j || !adjacent(i, k)) continue;
        for (int l : nb[k]) {
          if (l <= k || !adjacent(i, l) || !adjacent(j, l)) continue;
          Unit u;
          u.type = UnitType::Tetrahedron;
          u.vertices = {i, j, k, l};
          u.center = (d.positions[i] + d.positions[j] + d.positions[k] + d.positions[l]) / 4.0;
          d.units.push_back(u);
        }
      }
    }
  std::set<std::vector<int>> octs;
  for (int i = 0; i < n; ++i)
    for (const auto& e : shell2) {
      const int j = d.find(sites[i] + e);
      if (j <= i) continue;
      std::vector<int> common;
      std::set_intersection(nb[i].begin(), nb[i].end(), nb[j].begin(), nb[j].end(), std::back_inserter(common));
      if (common.size() != 4) continue;
      bool square = true;
      for (int c : common) {
        int deg = 0;
        for (int c2 : common) deg += (c != c2 && adjacent(c, c2)) ? 1 : 0;
        square = square && deg == 2;
      }
      if (!square) continue;
      std::vector<int> verts = {i, j, common[0], common[1], common[2], common[3]};
      std::sort(verts.begin(), verts.end());
      octs.insert(verts);
    }
  for (const auto& verts : octs) {
    Unit u;
    u.type = UnitType::Octahedron;
    u.vertices = verts;
    for (int v : verts) u.center += d.positions[v];
    u.center /= 6.0;
    d.units.push_back(u);
  }
  std::sort(d.units.begin(), d.units.end(), [](const Unit& a, const Unit& b) {
    if (a.type != b.type) return a.type < b.type;
    return a.vertices < b.vertices;
  });
  for (int ui = 0; ui < static_cast<int>(d.units.size()); ++ui) {
    const auto& u = d.units[ui];
    if (u.type == UnitType::Tetrahedron) {
      d.simplices.push_back({ui, {u.vertices[0], u.vertices[1], u.vertices[2], u.vertices[3]}});
      continue;
    }
    const auto& v = u.vertices;
    for (int a = 0; a < 6; ++a)
      for (int b = a + 1; b < 6; ++b)
        for (int c = b + 1; c < 6; ++c)
          if (adjacent(v[a], v[b]) && adjacent(v[a], v[c]) && adjacent(v[b], v[c]))
            d.simplices.push_back({ui, {-1, v[a], v[b], v[c]}});
  }
  return d;
}

UnitDomain decompose_scaled_octahedron(LatticeKind kind, int s) {
  if (kind != LatticeKind::FCC)
    throw UnsupportedDomainError("scaled octahedron domains are defined for the fcc lattice only");
  if (s < 1) throw DomainError("scaled octahedron: scale must be a positive integer");
  std::vector<Vec3i> sites;
  for (std::int64_t x = 0; x <= 2 * s; ++x)
    for (std::int64_t y = -s; y <= s; ++y)
      for (std::int64_t z = -s; z <= s; ++z) {
        if (((x + y + z) % 2 + 2) % 2 != 0) continue;
        if (std::abs(x - s) + std::abs(y) + std::abs(z) <= s) sites.emplace_back(x, y, z);
      }
  return decompose_sites(kind, sites);
}

UnitDomain local_star(LatticeKind kind) {
  std::vector<Vec3i> candidates;
  for (const auto& s : generate(kind, kSqrt2)) candidates.push_back(scaled_coords(kind, s));
  UnitDomain all = decompose_sites(kind, candidates);
  const int origin = all.find(Vec3i::Zero());
  std::vector<Vec3i> keep;
  for (const auto& u : all.units)
    if (std::find(u.vertices.begin(), u.vertices.end(), origin) != u.vertices.end())
      for (int v : u.vertices) keep.push_back(all.sites[v]);
  UnitDomain star = decompose_sites(kind, keep);
  const int o2 = star.find(Vec3i::Zero());
  std::vector<Unit> units;
  for (const auto& u : star.units)
    if (std::find(u.vertices.begin(), u.vertices.end(), o2) != u.vertices.end()) units.push_back(u);
  std::vector<Simplex> simplices;
  std::vector<int> remap(star.units.size(), -1);
  for (std::size_t i = 0, k = 0; i < star.units.size(); ++i)
    if (std::find(star.units[i].vertices.begin(), star.units[i].vertices.end(), o2) != star.units[i].vertices.end())
      remap[i] = static_cast<int>(k++);
  for (auto s : star.simplices)
    if (remap[s.unit] >= 0) {
      s.unit = remap[s.unit];
      simplices.push_back(s);
    }
  star.units = units;
  star.simplices = simplices;
  return star;
}

}  // namespace xtal
