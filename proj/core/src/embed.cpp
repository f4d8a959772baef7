#include "xtal/embed.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <random>

namespace xtal {

namespace {

std::vector<Vec3i> unit_offsets(LatticeKind kind) {
  std::vector<Vec3i> out;
  for (const auto& s : generate(kind, 1.05)) {
    const Vec3i w = scaled_coords(kind, s);
    if (w.squaredNorm() == 0) continue;
    out.push_back(w);
    if (kind == LatticeKind::HCP) out.push_back(-w);
  }
  std::sort(out.begin(), out.end(), [](const Vec3i& a, const Vec3i& b) {
    return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::vector<int>> domain_neighbors(const UnitDomain& d) {
  const auto offs = unit_offsets(d.kind);
  std::vector<std::vector<int>> nb(d.sites.size());
  for (std::size_t i = 0; i < d.sites.size(); ++i) {
    for (const auto& o : offs) {
      const int j = d.find(d.sites[i] + o);
      if (j >= 0) nb[i].push_back(j);
    }
    std::sort(nb[i].begin(), nb[i].end());
  }
  return nb;
}

Vec3 min_image(const Configuration& c, Vec3 d) {
  if (!c.periodic()) return d;
  const Mat3& cell = *c.cell;
  Vec3 s = cell.inverse() * d;
  for (int k = 0; k < 3; ++k) s[k] -= std::round(s[k]);
  return cell * s;
}

// Identity of a particle image: index plus integer cell shift.
struct ImageKey {
  int j;
  std::array<std::int64_t, 3> n;
  bool operator<(const ImageKey& o) const { return j != o.j ? j < o.j : n < o.n; }
};

ImageKey image_key(const Configuration& c, int j, const Vec3& u) {
  ImageKey k{j, {0, 0, 0}};
  if (c.periodic()) {
    const Vec3 s = c.cell->inverse() * (u - c.positions[static_cast<std::size_t>(j)]);
    for (int a = 0; a < 3; ++a) k.n[a] = static_cast<std::int64_t>(std::llround(s[a]));
  }
  return k;
}

}  // namespace

std::size_t ReferenceConfiguration::mapped_count() const {
  return static_cast<std::size_t>(std::count_if(phi.begin(), phi.end(), [](int p) { return p >= 0; }));
}

ReferenceConfiguration grow_reference(const Configuration& config, const BondGraph& g,
                                      const SiteClassification& cls, int seed, Real r, const GrowOptions& opts) {
  if (seed < 0 || static_cast<std::size_t>(seed) >= config.size())
    throw UnknownIdError("unknown seed particle " + std::to_string(seed));
  if (!(r >= 0.0)) throw DomainError("grow_reference: r must be >= 0");
  const SiteClass seed_class = cls.cls[static_cast<std::size_t>(seed)];
  if (seed_class == SiteClass::Defect) throw PreconditionError("seed particle is not a regular site");
  ReferenceConfiguration ref;
  ref.kind = seed_class == SiteClass::CO ? LatticeKind::FCC : LatticeKind::HCP;
  const Real accept = opts.accept_radius > 0.0 ? opts.accept_radius : 3.0 * g.alpha;
  Vec3i seed_w = Vec3i::Zero();
  if (ref.kind == LatticeKind::FCC) {
    ref.scale = static_cast<int>(std::ceil(2.5 * r + 3.0 - 1e-12));
    ref.domain = decompose_scaled_octahedron(LatticeKind::FCC, ref.scale);
    seed_w = Vec3i(2 * (ref.scale / 2), 0, 0);
  } else {
    ref.scale = 0;
    ref.domain = local_star(LatticeKind::HCP);
  }
  const UnitDomain& d = ref.domain;
  const std::size_t ns = d.sites.size();
  ref.seed_site = d.find(seed_w);
  ref.phi.assign(ns, -1);
  ref.u.assign(ns, Vec3::Zero());

  ref.defect_distance = std::numeric_limits<Real>::infinity();
  const Vec3 y0 = config.positions[static_cast<std::size_t>(seed)];
  for (std::size_t i = 0; i < config.size(); ++i)
    if (cls.cls[i] != SiteClass::CO)
      ref.defect_distance = std::min(ref.defect_distance, min_image(config, config.positions[i] - y0).norm());
  ref.precondition_ok = ref.defect_distance >= 2.0 * r + 3.0;

  const auto nb = domain_neighbors(d);
  std::map<ImageKey, int> used;
  std::deque<int> queue;
  auto assign = [&](int site, int particle, const Vec3& u) {
    ref.phi[site] = particle;
    ref.u[site] = u;
    used.emplace(image_key(config, particle, u), site);
    queue.push_back(site);
  };
  assign(ref.seed_site, seed, y0);
  const Registration& reg0 = cls.registration.at(seed);
  const SiteClass grow_class = seed_class;

  while (!queue.empty()) {
    const int mu = queue.front();
    queue.pop_front();
    const int x = ref.phi[mu];
    if (cls.cls[static_cast<std::size_t>(x)] != grow_class) continue;
    // Local rotation from the mapped star of mu.
    Mat3 rot = reg0.rotation;
    if (mu != ref.seed_site) {
      std::vector<Vec3> p, q;
      for (int e : nb[mu])
        if (ref.phi[e] >= 0) {
          p.push_back(d.positions[e] - d.positions[mu]);
          q.push_back(ref.u[e] - ref.u[mu]);
        }
      Mat3 cov = Mat3::Zero();
      for (const auto& a : p) cov += a * a.transpose();
      if (p.size() >= 3 && Eigen::FullPivLU<Mat3>(cov).rank() == 3) rot = kabsch(p, q);
    }
    for (int eta : nb[mu]) {
      if (ref.phi[eta] >= 0) continue;
      const Vec3 predicted = ref.u[mu] + rot * (d.positions[eta] - d.positions[mu]);
      const Neighbor* best = nullptr;
      Real best_dist = std::numeric_limits<Real>::infinity();
      for (const auto& e : g.adj[static_cast<std::size_t>(x)]) {
        const Real dist = (ref.u[mu] + e.d - predicted).norm();
        if (dist < best_dist) {
          best_dist = dist;
          best = &e;
        }
      }
      if (!best || best_dist > accept) continue;
      const Vec3 u = ref.u[mu] + best->d;
      const ImageKey key = image_key(config, best->j, u);
      auto it = used.find(key);
      if (it != used.end())
        throw EmbeddingObstruction("lattice site (" + std::to_string(d.sites[eta][0]) + "," +
                                   std::to_string(d.sites[eta][1]) + "," + std::to_string(d.sites[eta][2]) +
                                   ") is nominated particle " + std::to_string(best->j) +
                                   ", already labelling another site");
      // Every mapped lattice neighbor must be bonded to the candidate.
      for (int e : nb[eta]) {
        if (ref.phi[e] < 0) continue;
        const Real len = (ref.u[e] - u).norm();
        if (len < 1.0 - g.alpha || len > 1.0 + g.alpha)
          throw EmbeddingObstruction("lattice site (" + std::to_string(d.sites[eta][0]) + "," +
                                     std::to_string(d.sites[eta][1]) + "," + std::to_string(d.sites[eta][2]) +
                                     ") conflicts with its mapped neighbors");
      }
      assign(eta, best->j, u);
    }
  }
  for (std::size_t i = 0; i < ns; ++i)
    if (ref.phi[i] < 0) ref.unmapped.push_back(static_cast<int>(i));
  deformation_gradients(ref);
  return ref;
}

void deformation_gradients(ReferenceConfiguration& ref) {
  const UnitDomain& d = ref.domain;
  ref.center_values.assign(d.units.size(), Vec3::Zero());
  std::vector<char> center_ok(d.units.size(), 0);
  for (std::size_t k = 0; k < d.units.size(); ++k) {
    bool ok = true;
    Vec3 c = Vec3::Zero();
    for (int v : d.units[k].vertices) {
      ok = ok && ref.phi[v] >= 0;
      c += ref.u[v];
    }
    if (ok) {
      ref.center_values[k] = c / static_cast<Real>(d.units[k].vertices.size());
      center_ok[k] = 1;
    }
  }
  ref.gradients.assign(d.simplices.size(), Mat3::Zero());
  ref.gradient_valid.assign(d.simplices.size(), 0);
  for (std::size_t k = 0; k < d.simplices.size(); ++k) {
    const Simplex& s = d.simplices[k];
    if (!center_ok[s.unit]) continue;
    const auto x = d.simplex_points(s);
    std::array<Vec3, 4> y;
    for (int i = 0; i < 4; ++i) y[i] = s.v[i] < 0 ? ref.center_values[s.unit] : ref.u[s.v[i]];
    Mat3 xm, ym;
    xm << x[1] - x[0], x[2] - x[0], x[3] - x[0];
    ym << y[1] - y[0], y[2] - y[0], y[3] - y[0];
    if (std::abs(xm.determinant()) < 1e-12) throw Error("degenerate reference simplex");
    ref.gradients[k] = ym * xm.inverse();
    ref.gradient_valid[k] = 1;
  }
}

std::size_t bond_violations(const ReferenceConfiguration& ref, const BondGraph& g, const Configuration& config) {
  const UnitDomain& d = ref.domain;
  std::map<ImageKey, int> site_of;
  for (std::size_t i = 0; i < d.sites.size(); ++i)
    if (ref.phi[i] >= 0) site_of.emplace(image_key(config, ref.phi[i], ref.u[i]), static_cast<int>(i));
  const auto nb = domain_neighbors(d);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < d.sites.size(); ++i) {
    if (ref.phi[i] < 0) continue;
    // Bonds of Φ(η) landing on mapped sites must be lattice unit pairs.
    for (const auto& e : g.adj[static_cast<std::size_t>(ref.phi[i])]) {
      auto it = site_of.find(image_key(config, e.j, ref.u[i] + e.d));
      if (it == site_of.end()) continue;
      if (!std::binary_search(nb[i].begin(), nb[i].end(), it->second) && it->second > static_cast<int>(i)) ++bad;
    }
    // Lattice unit pairs must be bonds.
    for (int j : nb[i]) {
      if (j <= static_cast<int>(i) || ref.phi[j] < 0) continue;
      const Real len = (ref.u[j] - ref.u[i]).norm();
      if (len < 1.0 - g.alpha || len > 1.0 + g.alpha) ++bad;
    }
  }
  return bad;
}

Real dist_so3(const Mat3& f, MatrixNorm norm) {
  Eigen::JacobiSVD<Mat3> svd(f);
  Vec3 s = svd.singularValues();
  if (f.determinant() < 0.0) s[2] = -s[2];
  if (norm == MatrixNorm::Operator) return (s.array() - 1.0).abs().maxCoeff();
  return std::sqrt((s.array() - 1.0).square().sum());
}

Real w_tau(const std::vector<Vec3>& reference, const std::vector<Vec3>& values) {
  if (values.size() != reference.size()) throw DomainError("w_tau: a vertex value is missing");
  std::vector<Real> terms;
  for (std::size_t a = 0; a < reference.size(); ++a)
    for (std::size_t b = a + 1; b < reference.size(); ++b)
      if (std::abs((reference[b] - reference[a]).norm() - 1.0) < 1e-9) {
        const Real e = (values[b] - values[a]).norm() - 1.0;
        terms.push_back(e * e);
      }
  return pairwise_sum(terms);
}

std::vector<Vec3> unit_vertices(UnitType type) {
  if (type == UnitType::Octahedron) return octahedron_vertices();
  const auto& u = unit_vectors();
  // Origin plus three mutually adjacent unit vectors.
  for (std::size_t a = 0; a < u.size(); ++a)
    for (std::size_t b = a + 1; b < u.size(); ++b)
      if ((u[a] - u[b]).squaredNorm() == 2)
        for (std::size_t c = b + 1; c < u.size(); ++c)
          if ((u[a] - u[c]).squaredNorm() == 2 && (u[b] - u[c]).squaredNorm() == 2)
            return {Vec3::Zero(), to_position(LatticeKind::FCC, u[a]), to_position(LatticeKind::FCC, u[b]),
                    to_position(LatticeKind::FCC, u[c])};
  throw Error("no unit tetrahedron found");
}

Eigen::MatrixXd w_tau_hessian(UnitType type) {
  const auto v = unit_vertices(type);
  const int n = static_cast<int>(v.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const Vec3 e = v[b] - v[a];
      if (std::abs(e.norm() - 1.0) > 1e-9) continue;
      const Mat3 blk = 2.0 * e * e.transpose();
      h.block<3, 3>(3 * a, 3 * a) += blk;
      h.block<3, 3>(3 * b, 3 * b) += blk;
      h.block<3, 3>(3 * a, 3 * b) -= blk;
      h.block<3, 3>(3 * b, 3 * a) -= blk;
    }
  return h;
}

std::map<Real, int> w_tau_hessian_spectrum(UnitType type) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w_tau_hessian(type));
  std::map<Real, int> out;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    Real ev = std::round(es.eigenvalues()[i] * 1e8) / 1e8;
    if (ev == 0.0) ev = 0.0;  // drop the sign of -0
    ++out[ev];
  }
  return out;
}

ConstrainedRotation constrained_rotation(const Mat3& f, const Vec3& v) {
  if (v.norm() == 0.0) throw DomainError("constrained_rotation: v must be nonzero");
  const Vec3 fv = f * v;
  if (fv.norm() == 0.0) throw DomainError("constrained_rotation: F v vanishes");
  const Mat3 s = nearest_rotation(f);
  const Vec3 a = (s * v).normalized();
  const Vec3 b = fv.normalized();
  Mat3 t = Mat3::Identity();
  const Vec3 axis = a.cross(b);
  const Real sn = axis.norm(), cs = a.dot(b);
  if (sn > 1e-15) {
    t = Eigen::AngleAxisd(std::atan2(sn, cs), axis / sn).toRotationMatrix();
  } else if (cs < 0.0) {
    Vec3 perp = a.unitOrthogonal();
    t = Eigen::AngleAxisd(3.14159265358979323846, perp).toRotationMatrix();
  }
  ConstrainedRotation out;
  out.g = t * s;
  out.deviation_sq = (f - out.g).squaredNorm();
  const Real dist = dist_so3(f);
  out.dist_sq = dist * dist;
  out.ratio = out.dist_sq > 0.0 ? out.deviation_sq / out.dist_sq : 0.0;
  out.bound_ok = out.deviation_sq <= 66.0 * out.dist_sq * (1.0 + 1e-12) + 1e-24;
  return out;
}

RigidityReport rigidity_report(const ReferenceConfiguration& ref, std::uint64_t seed) {
  const UnitDomain& d = ref.domain;
  RigidityReport rep;
  std::vector<Real> w;
  std::vector<const Mat3*> fs;
  Mat3 acc = Mat3::Zero();
  for (std::size_t k = 0; k < d.simplices.size(); ++k) {
    if (!ref.gradient_valid[k]) continue;
    const Real vol = simplex_volume(d, d.simplices[k]);
    w.push_back(vol);
    fs.push_back(&ref.gradients[k]);
    acc += vol * ref.gradients[k];
    rep.max_dist_so3 = std::max(rep.max_dist_so3, dist_so3(ref.gradients[k], MatrixNorm::Operator));
  }
  if (fs.empty()) throw DomainError("rigidity_report: no fully mapped simplex");
  rep.simplices = fs.size();
  rep.volume = pairwise_sum(w);
  rep.best_rotation = nearest_rotation(acc);
  std::vector<Real> dev;
  for (std::size_t k = 0; k < fs.size(); ++k) dev.push_back(w[k] * (*fs[k] - rep.best_rotation).squaredNorm());
  rep.l2_deviation_sq = pairwise_sum(dev);

  const auto nb = domain_neighbors(d);
  std::vector<int> mapped;
  std::vector<Real> bonds;
  for (std::size_t i = 0; i < d.sites.size(); ++i) {
    if (ref.phi[i] < 0) continue;
    mapped.push_back(static_cast<int>(i));
    for (int j : nb[i])
      if (j > static_cast<int>(i) && ref.phi[j] >= 0) {
        const Real e = (ref.u[j] - ref.u[i]).norm() - 1.0;
        bonds.push_back(e * e);
      }
  }
  rep.bonds = bonds.size();
  rep.bond_distortion_sq = pairwise_sum(bonds);
  rep.ratio = rep.l2_deviation_sq / std::max(rep.bond_distortion_sq, 1e-300);

  auto distortion = [&](int a, int b) {
    const Real ref_len = (d.positions[b] - d.positions[a]).norm();
    return std::abs((ref.u[b] - ref.u[a]).norm() / ref_len - 1.0);
  };
  if (ref.scale <= 6) {
    for (std::size_t a = 0; a < mapped.size(); ++a)
      for (std::size_t b = a + 1; b < mapped.size(); ++b)
        rep.sup_distortion = std::max(rep.sup_distortion, distortion(mapped[a], mapped[b]));
  } else if (mapped.size() >= 2) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, mapped.size() - 1);
    for (int t = 0; t < 100000; ++t) {
      const std::size_t a = pick(rng), b = pick(rng);
      if (a != b) rep.sup_distortion = std::max(rep.sup_distortion, distortion(mapped[a], mapped[b]));
    }
  }
  return rep;
}

nlohmann::json to_json(const ReferenceConfiguration& ref) {
  nlohmann::json sites = nlohmann::json::array(), phi = nlohmann::json::array(), grads = nlohmann::json::array();
  for (std::size_t i = 0; i < ref.domain.sites.size(); ++i) {
    const auto& w = ref.domain.sites[i];
    sites.push_back({w[0], w[1], w[2]});
    phi.push_back(ref.phi[i]);
  }
  for (std::size_t k = 0; k < ref.gradients.size(); ++k) {
    if (!ref.gradient_valid[k]) {
      grads.push_back(nullptr);
      continue;
    }
    const Mat3& f = ref.gradients[k];
    grads.push_back({{f(0, 0), f(0, 1), f(0, 2)}, {f(1, 0), f(1, 1), f(1, 2)}, {f(2, 0), f(2, 1), f(2, 2)}});
  }
  return {{"kind", to_string(ref.kind)},
          {"scale", ref.scale},
          {"coordinate_scale", coord_scale(ref.kind)},
          {"sites", sites},
          {"phi", phi},
          {"gradients", grads},
          {"unmapped", ref.unmapped},
          {"defect_distance", ref.defect_distance},
          {"precondition_ok", ref.precondition_ok}};
}

nlohmann::json to_json(const RigidityReport& r) {
  const Mat3& q = r.best_rotation;
  return {{"best_rotation", {{q(0, 0), q(0, 1), q(0, 2)}, {q(1, 0), q(1, 1), q(1, 2)}, {q(2, 0), q(2, 1), q(2, 2)}}},
          {"l2_deviation_sq", r.l2_deviation_sq},
          {"bond_distortion_sq", r.bond_distortion_sq},
          {"ratio", r.ratio},
          {"sup_distortion", r.sup_distortion},
          {"max_dist_so3", r.max_dist_so3},
          {"simplices", r.simplices},
          {"bonds", r.bonds},
          {"volume", r.volume}};
}

}  // namespace xtal
