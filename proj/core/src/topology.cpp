#include "xtal/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

namespace xtal {

namespace {

bool is_bond(Real r, Real alpha) { return r >= 1.0 - alpha && r <= 1.0 + alpha; }

bool lex_positive(const Vec3& d) {
  for (int k = 0; k < 3; ++k)
    if (d[k] != 0.0) return d[k] > 0.0;
  return false;
}

using Adj12 = std::array<std::array<bool, 12>, 12>;

Adj12 matrix_of(const std::vector<std::vector<int>>& g) {
  Adj12 m{};
  for (std::size_t i = 0; i < g.size(); ++i)
    for (int j : g[i]) m[i][static_cast<std::size_t>(j)] = true;
  return m;
}

struct Template {
  std::vector<Vec3> vertices;
  std::vector<std::vector<int>> adj;
  std::vector<std::array<int, 4>> squares;
};

const Template& template_of(LatticeKind kind) {
  static const Template t[2] = {[] {
                                  Template x;
                                  x.vertices = kissing_polyhedron(LatticeKind::FCC).vertices;
                                  const auto g = contact_graph(x.vertices);
                                  x.adj = g.adj;
                                  x.squares = g.squares;
                                  return x;
                                }(),
                                [] {
                                  Template x;
                                  x.vertices = kissing_polyhedron(LatticeKind::HCP).vertices;
                                  const auto g = contact_graph(x.vertices);
                                  x.adj = g.adj;
                                  x.squares = g.squares;
                                  return x;
                                }()};
  return t[kind == LatticeKind::FCC ? 0 : 1];
}

}  // namespace

std::size_t BondGraph::bond_count() const { return edges.size(); }

BondGraph bond_graph(const Configuration& config, Real alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("bond_graph: alpha must lie in (0, 1)");
  const Real rc = (1.0 + alpha) * (1.0 + 1e-12) + 1e-12;
  const NeighborList nl = build_neighbors(config, rc);
  BondGraph g;
  g.alpha = alpha;
  g.adj.resize(config.size());
  for (std::size_t i = 0; i < config.size(); ++i) {
    for (const auto& e : nl.of[i]) {
      if (!is_bond(e.r, alpha)) continue;
      g.adj[i].push_back(e);
      const bool forward =
          static_cast<std::size_t>(e.j) > i || (static_cast<std::size_t>(e.j) == i && lex_positive(e.d));
      if (forward) g.edges.push_back({static_cast<int>(i), e.j});
    }
  }
  return g;
}

NeighborhoodEdges neighborhood_edges(const BondGraph& g, std::size_t x) {
  if (x >= g.size()) throw UnknownIdError("unknown particle id " + std::to_string(x));
  NeighborhoodEdges out;
  const auto& nb = g.adj[x];
  for (std::size_t a = 0; a < nb.size(); ++a)
    for (std::size_t b = a + 1; b < nb.size(); ++b)
      if (is_bond((nb[b].d - nb[a].d).norm(), g.alpha)) out.edges.push_back({static_cast<int>(a), static_cast<int>(b)});
  out.triangles = out.edges;
  return out;
}

std::string to_string(SiteClass c) {
  switch (c) {
    case SiteClass::CO:
      return "CO";
    case SiteClass::TCO:
      return "TCO";
    case SiteClass::Defect:
      return "DEFECT";
  }
  return "DEFECT";
}

std::vector<std::array<int, 12>> isomorphisms(const std::vector<std::vector<int>>& a,
                                              const std::vector<std::vector<int>>& b) {
  std::vector<std::array<int, 12>> out;
  if (a.size() != 12 || b.size() != 12) return out;
  const Adj12 ma = matrix_of(a), mb = matrix_of(b);
  // Vertex order: breadth-first from 0 so every later vertex has a mapped parent.
  std::vector<int> order, parent(12, -1);
  std::vector<char> seen(12, 0);
  for (int root = 0; root < 12; ++root) {
    if (seen[root]) continue;
    seen[root] = 1;
    order.push_back(root);
    for (std::size_t q = order.size() - 1; q < order.size(); ++q)
      for (int w : a[static_cast<std::size_t>(order[q])])
        if (!seen[w]) {
          seen[w] = 1;
          parent[w] = order[q];
          order.push_back(w);
        }
  }
  std::array<int, 12> map{};
  map.fill(-1);
  std::array<bool, 12> used{};
  std::function<void(std::size_t)> rec = [&](std::size_t depth) {
    if (depth == 12) {
      out.push_back(map);
      return;
    }
    const int v = order[depth];
    std::vector<int> cand;
    if (parent[v] >= 0)
      cand = b[static_cast<std::size_t>(map[parent[v]])];
    else
      for (int t = 0; t < 12; ++t) cand.push_back(t);
    std::sort(cand.begin(), cand.end());
    for (int t : cand) {
      if (used[t] || b[t].size() != a[v].size()) continue;
      bool ok = true;
      for (std::size_t k = 0; k < depth && ok; ++k) {
        const int u = order[k];
        ok = ma[v][u] == mb[t][map[u]];
      }
      if (!ok) continue;
      map[v] = t;
      used[t] = true;
      rec(depth + 1);
      used[t] = false;
      map[v] = -1;
    }
  };
  rec(0);
  return out;
}

Registration register_cloud(const std::vector<Vec3>& cloud, const std::vector<std::array<int, 2>>& edges,
                            LatticeKind kind) {
  Registration best;
  best.kind = kind;
  best.deviation = std::numeric_limits<Real>::infinity();
  if (cloud.size() != 12) return best;
  std::vector<std::vector<int>> adj(12);
  for (const auto& e : edges) {
    adj[e[0]].push_back(e[1]);
    adj[e[1]].push_back(e[0]);
  }
  for (auto& l : adj) std::sort(l.begin(), l.end());
  const Template& t = template_of(kind);
  for (const auto& iso : isomorphisms(adj, t.adj)) {
    std::vector<Vec3> p(12);
    for (int i = 0; i < 12; ++i) p[i] = t.vertices[iso[i]];
    const Mat3 r = kabsch(p, cloud);
    Real dev = 0.0;
    for (int i = 0; i < 12; ++i) dev = std::max(dev, (r * p[i] - cloud[i]).norm());
    if (dev < best.deviation) {
      best.deviation = dev;
      best.rotation = r;
      best.perm = iso;
    }
  }
  return best;
}

std::size_t SiteClassification::count(SiteClass c) const {
  return static_cast<std::size_t>(std::count(cls.begin(), cls.end(), c));
}
std::size_t SiteClassification::count_x12() const {
  return static_cast<std::size_t>(std::count(in_x12.begin(), in_x12.end(), 1));
}
std::size_t SiteClassification::count_xreg() const {
  return static_cast<std::size_t>(std::count(in_xreg.begin(), in_xreg.end(), 1));
}
std::size_t SiteClassification::count_xreg2() const {
  return static_cast<std::size_t>(std::count(in_xreg2.begin(), in_xreg2.end(), 1));
}

SiteClassification classify(const Configuration& config, const BondGraph& g, const ClassifyOptions& opts) {
  if (g.size() != config.size()) throw DomainError("classify: bond graph and configuration differ in size");
  const std::size_t n = g.size();
  SiteClassification c;
  c.alpha = g.alpha;
  c.eps_max = opts.eps_max > 0.0 ? opts.eps_max : 10.0 * g.alpha;
  c.cls.assign(n, SiteClass::Defect);
  c.in_x12.assign(n, 0);
  c.in_xreg.assign(n, 0);
  c.in_xreg2.assign(n, 0);
  c.half_edges.assign(n, 0);
  std::vector<Registration> reg(n);
  std::vector<char> tie(n, 0);
  parallel_for(n, [&](std::size_t x) {
    const auto a = neighborhood_edges(g, x);
    c.half_edges[x] = a.half_count();
    if (g.degree(x) != 12) return;
    c.in_x12[x] = 1;
    if (a.half_count() != 24) return;
    c.in_xreg[x] = 1;
    std::vector<Vec3> cloud;
    for (const auto& e : g.adj[x]) cloud.push_back(e.d);
    Registration co = register_cloud(cloud, a.edges, LatticeKind::FCC);
    Registration tco = register_cloud(cloud, a.edges, LatticeKind::HCP);
    if (std::min(co.deviation, tco.deviation) > c.eps_max)
      throw ClassificationError("site " + std::to_string(x) + " has 12 neighbors and 24 contacts but matches neither " +
                                "template within " + std::to_string(c.eps_max));
    if (std::abs(co.deviation - tco.deviation) <= 1e-12) {
      tie[x] = 1;
      co.deviation_other = tco.deviation;
      reg[x] = co;
      return;
    }
    if (co.deviation < tco.deviation) {
      co.deviation_other = tco.deviation;
      reg[x] = co;
      c.cls[x] = SiteClass::CO;
    } else {
      tco.deviation_other = co.deviation;
      reg[x] = tco;
      c.cls[x] = SiteClass::TCO;
    }
  });
  for (std::size_t x = 0; x < n; ++x) {
    if (c.in_xreg[x]) c.registration[static_cast<int>(x)] = reg[x];
    c.ties += tie[x];
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (!c.in_xreg[x]) continue;
    bool all = true;
    for (const auto& e : g.adj[x]) all = all && c.in_xreg[static_cast<std::size_t>(e.j)];
    c.in_xreg2[x] = all ? 1 : 0;
  }
  std::vector<std::vector<int>> second(n);
  parallel_for(n, [&](std::size_t x) {
    if (!c.in_xreg2[x]) return;
    const Registration& r = reg[x];
    std::array<int, 12> slot{};
    for (int i = 0; i < 12; ++i) slot[r.perm[i]] = i;
    std::set<int> acc;
    for (const auto& sq : template_of(r.kind).squares) {
      std::set<int> common;
      bool first = true;
      for (int t : sq) {
        const int p = g.adj[x][slot[t]].j;
        std::set<int> nb;
        for (const auto& e : g.adj[static_cast<std::size_t>(p)]) nb.insert(e.j);
        if (first) {
          common = nb;
          first = false;
        } else {
          std::set<int> keep;
          std::set_intersection(common.begin(), common.end(), nb.begin(), nb.end(), std::inserter(keep, keep.begin()));
          common.swap(keep);
        }
      }
      common.erase(static_cast<int>(x));
      acc.insert(common.begin(), common.end());
    }
    second[x].assign(acc.begin(), acc.end());
  });
  for (std::size_t x = 0; x < n; ++x)
    if (c.in_xreg2[x]) c.second_neighbors[static_cast<int>(x)] = std::move(second[x]);
  return c;
}

const std::vector<int>& second_neighbors(const SiteClassification& c, std::size_t x) {
  if (x >= c.cls.size()) throw UnknownIdError("unknown particle id " + std::to_string(x));
  auto it = c.second_neighbors.find(static_cast<int>(x));
  if (it == c.second_neighbors.end())
    throw PreconditionError("site " + std::to_string(x) + " is not in Xreg2 (a neighbor is not regular)");
  return it->second;
}

std::string classification_csv(const SiteClassification& c, const BondGraph& g) {
  std::ostringstream os;
  os << "id,class,degree,half_edges,rmsd\n";
  char buf[64];
  for (std::size_t i = 0; i < c.cls.size(); ++i) {
    os << i << ',' << to_string(c.cls[i]) << ',' << g.degree(i) << ',' << c.half_edges[i] << ',';
    auto it = c.registration.find(static_cast<int>(i));
    if (it != c.registration.end()) {
      std::snprintf(buf, sizeof buf, "%.17g", it->second.deviation);
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

std::string classification_xyz(const Configuration& config, const SiteClassification& c) {
  std::ostringstream os;
  os << config.size() << '\n' << "Properties=species:S:1:pos:R:3:class:S:1\n";
  char buf[160];
  for (std::size_t i = 0; i < config.size(); ++i) {
    const auto& p = config.positions[i];
    const char* sp = c.cls[i] == SiteClass::CO ? "Cu" : c.cls[i] == SiteClass::TCO ? "Mg" : "X";
    std::snprintf(buf, sizeof buf, "%s %.17g %.17g %.17g %s\n", sp, p[0], p[1], p[2], to_string(c.cls[i]).c_str());
    os << buf;
  }
  return os.str();
}

nlohmann::json to_json(const SiteClassification& c) {
  nlohmann::json classes = nlohmann::json::array();
  for (auto k : c.cls) classes.push_back(to_string(k));
  return {{"alpha", c.alpha},
          {"eps_max", c.eps_max},
          {"counts",
           {{"n", c.cls.size()},
            {"x12", c.count_x12()},
            {"xreg", c.count_xreg()},
            {"xreg2", c.count_xreg2()},
            {"co", c.count(SiteClass::CO)},
            {"tco", c.count(SiteClass::TCO)},
            {"boundary", c.boundary_count()},
            {"ties", c.ties}}},
          {"class", classes}};
}

Real point_set_deviation(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  if (a.size() < 3 || b.size() < 3) throw DomainError("point_set_deviation: need at least three points");
  // Anchor triple: the first point, the farthest from it, and the point farthest from their line.
  std::size_t i1 = 0, i2 = 0;
  for (std::size_t i = 1; i < a.size(); ++i)
    if ((a[i] - a[0]).norm() > (a[i2] - a[0]).norm()) i2 = i;
  const Vec3 axis = (a[i2] - a[0]).normalized();
  std::size_t i3 = 0;
  Real best_off = -1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Vec3 d = a[i] - a[0];
    const Real off = (d - d.dot(axis) * axis).norm();
    if (off > best_off) {
      best_off = off;
      i3 = i;
    }
  }
  if (best_off < 1e-9) throw DomainError("point_set_deviation: points are collinear");
  const std::vector<Vec3> anchor{a[i1], a[i2], a[i3]};
  auto hausdorff = [&](const Mat3& q) {
    Real h = 0.0;
    for (const auto& p : a) {
      Real m = std::numeric_limits<Real>::infinity();
      for (const auto& x : b) m = std::min(m, (q * p - x).norm());
      h = std::max(h, m);
    }
    for (const auto& x : b) {
      Real m = std::numeric_limits<Real>::infinity();
      for (const auto& p : a) m = std::min(m, (q * p - x).norm());
      h = std::max(h, m);
    }
    return h;
  };
  Real best = std::numeric_limits<Real>::infinity();
  for (std::size_t j1 = 0; j1 < b.size(); ++j1)
    for (std::size_t j2 = 0; j2 < b.size(); ++j2)
      for (std::size_t j3 = 0; j3 < b.size(); ++j3) {
        if (j1 == j2 || j1 == j3 || j2 == j3) continue;
        best = std::min(best, hausdorff(kabsch(anchor, {b[j1], b[j2], b[j3]})));
      }
  return best;
}

}  // namespace xtal
