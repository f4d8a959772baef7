#include "xtal/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

namespace xtal {

namespace {

constexpr Real kOverlap = 1e-8;
constexpr Real kPi = 3.14159265358979323846;

// Uniform cell grid over a point cloud. For periodic inputs the cloud holds
// every image within `cutoff` of the wrapped unit cell.
class NeighborGrid {
 public:
  NeighborGrid(const Configuration& config, Real cutoff) : cutoff_(cutoff) {
    const std::size_t n = config.size();
    query_.resize(n);
    if (!config.periodic()) {
      for (std::size_t i = 0; i < n; ++i) {
        query_[i] = config.positions[i];
        cloud_.push_back(config.positions[i]);
        owner_.push_back(static_cast<int>(i));
      }
    } else {
      const Mat3& c = *config.cell;
      if (std::abs(c.determinant()) < 1e-12) throw DomainError("periodic cell vectors are linearly dependent");
      const Mat3 inv = c.inverse();
      std::array<int, 3> reach{};
      for (int k = 0; k < 3; ++k) {
        const Real height = 1.0 / inv.row(k).norm();
        reach[k] = static_cast<int>(std::ceil(cutoff / height)) + 1;
      }
      std::vector<Vec3> wrapped(n);
      for (std::size_t i = 0; i < n; ++i) {
        Vec3 s = inv * config.positions[i];
        for (int k = 0; k < 3; ++k) s[k] -= std::floor(s[k]);
        wrapped[i] = c * s;
        query_[i] = wrapped[i];
      }
      std::array<Real, 3> margin{};
      for (int k = 0; k < 3; ++k) margin[k] = cutoff * inv.row(k).norm() + 1e-9;
      for (std::size_t j = 0; j < n; ++j)
        for (int a = -reach[0]; a <= reach[0]; ++a)
          for (int b = -reach[1]; b <= reach[1]; ++b)
            for (int e = -reach[2]; e <= reach[2]; ++e) {
              const Vec3 p = wrapped[j] + c * Vec3(a, b, e);
              const Vec3 s = inv * p;
              bool keep = true;
              for (int k = 0; k < 3; ++k) keep = keep && s[k] >= -margin[k] && s[k] <= 1.0 + margin[k];
              if (keep) {
                cloud_.push_back(p);
                owner_.push_back(static_cast<int>(j));
              }
            }
    }
    for (const auto& p : cloud_)
      if (!p.allFinite()) throw DomainError("configuration contains non-finite positions");
    lo_ = Vec3::Constant(std::numeric_limits<Real>::infinity());
    Vec3 hi = -lo_;
    for (const auto& p : cloud_) {
      lo_ = lo_.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    if (cloud_.empty()) return;
    h_ = std::max(cutoff, 1e-6);
    for (int k = 0; k < 3; ++k) dims_[k] = std::max(1, static_cast<int>(std::floor((hi[k] - lo_[k]) / h_)) + 1);
    const std::size_t total = static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
    if (total > 50'000'000) throw CapacityError("neighbor grid too large");
    start_.assign(total + 1, 0);
    std::vector<std::size_t> bin(cloud_.size());
    for (std::size_t p = 0; p < cloud_.size(); ++p) {
      bin[p] = flat(cell_of(cloud_[p]));
      ++start_[bin[p] + 1];
    }
    for (std::size_t b = 0; b < total; ++b) start_[b + 1] += start_[b];
    items_.resize(cloud_.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t p = 0; p < cloud_.size(); ++p) items_[fill[bin[p]]++] = static_cast<int>(p);
  }

  /// Neighbors of particle i with 0 < r < cutoff, in grid order.
  void gather(std::size_t i, std::vector<Neighbor>& out) const {
    out.clear();
    if (cloud_.empty()) return;
    const Vec3 q = query_[i];
    const auto c = cell_of(q);
    const Real rc2 = cutoff_ * cutoff_;
    for (int a = std::max(0, c[0] - 1); a <= std::min(dims_[0] - 1, c[0] + 1); ++a)
      for (int b = std::max(0, c[1] - 1); b <= std::min(dims_[1] - 1, c[1] + 1); ++b)
        for (int e = std::max(0, c[2] - 1); e <= std::min(dims_[2] - 1, c[2] + 1); ++e) {
          const std::size_t f = flat({a, b, e});
          for (std::size_t t = start_[f]; t < start_[f + 1]; ++t) {
            const int p = items_[t];
            const Vec3 d = cloud_[p] - q;
            const Real r2 = d.squaredNorm();
            if (r2 >= rc2) continue;
            if (owner_[p] == static_cast<int>(i) && r2 == 0.0) continue;
            const Real r = std::sqrt(r2);
            if (r < kOverlap)
              throw SingularConfigurationError("particles " + std::to_string(i) + " and " +
                                               std::to_string(owner_[p]) + " overlap");
            out.push_back({owner_[p], d, r});
          }
        }
  }

 private:
  std::array<int, 3> cell_of(const Vec3& p) const {
    std::array<int, 3> c{};
    for (int k = 0; k < 3; ++k)
      c[k] = std::clamp(static_cast<int>(std::floor((p[k] - lo_[k]) / h_)), 0, dims_[k] - 1);
    return c;
  }
  std::size_t flat(const std::array<int, 3>& c) const {
    return (static_cast<std::size_t>(c[0]) * dims_[1] + c[1]) * dims_[2] + c[2];
  }

  Real cutoff_;
  std::vector<Vec3> query_;
  std::vector<Vec3> cloud_;
  std::vector<int> owner_;
  Vec3 lo_ = Vec3::Zero();
  Real h_ = 1.0;
  std::array<int, 3> dims_{1, 1, 1};
  std::vector<std::size_t> start_;
  std::vector<int> items_;
};

bool neighbor_less(const Neighbor& a, const Neighbor& b) {
  if (a.j != b.j) return a.j < b.j;
  return std::lexicographical_compare(a.d.data(), a.d.data() + 3, b.d.data(), b.d.data() + 3);
}

struct SiteTerms {
  Real pair = 0.0;
  Real e3 = 0.0;
  Vec3 force = Vec3::Zero();
  Real rmin = std::numeric_limits<Real>::infinity();
};

void site_terms(const std::vector<Neighbor>& nb, const PotentialPair& v, const PotentialTriple& psi, bool want_force,
                SiteTerms& out, std::vector<Real>& scratch, std::vector<const Neighbor*>& shortlist) {
  scratch.clear();
  shortlist.clear();
  Vec3 f = Vec3::Zero();
  for (const auto& e : nb) {
    Real val, dv;
    v.eval(e.r, val, dv);
    scratch.push_back(val);
    if (want_force) f += (2.0 * dv / e.r) * e.d;
    if (e.r < PotentialTriple::kSupport) shortlist.push_back(&e);
    out.rmin = std::min(out.rmin, e.r);
  }
  out.pair = pairwise_sum(scratch);
  scratch.clear();
  for (std::size_t a = 0; a < shortlist.size(); ++a)
    for (std::size_t b = a + 1; b < shortlist.size(); ++b) {
      const Neighbor& na = *shortlist[a];
      const Neighbor& nb2 = *shortlist[b];
      const Vec3 dab = nb2.d - na.d;
      const Real rab = dab.norm();
      if (rab >= PotentialTriple::kSupport) continue;
      if (rab < kOverlap) throw SingularConfigurationError("overlapping neighbor images");
      scratch.push_back(psi.value(na.r, nb2.r, rab));
      if (want_force) {
        const auto g = psi.gradient(na.r, nb2.r, rab);
        f += 6.0 * ((g[0] / na.r) * na.d + (g[1] / nb2.r) * nb2.d);
      }
    }
  out.e3 = 2.0 * pairwise_sum(scratch);
  out.force = f;
}

EnergyBreakdown evaluate(const Configuration& config, const PotentialPair& v, const PotentialTriple& psi,
                         std::vector<Vec3>* forces_out) {
  for (const auto& p : config.positions)
    if (!p.allFinite()) throw DomainError("configuration contains non-finite positions");
  const Real rc = std::max(v.cutoff, PotentialTriple::kSupport);
  const std::size_t n = config.size();
  NeighborGrid grid(config, rc);
  std::vector<SiteTerms> terms(n);
  parallel_for(n, [&](std::size_t i) {
    thread_local std::vector<Neighbor> nb;
    thread_local std::vector<Real> scratch;
    thread_local std::vector<const Neighbor*> shortlist;
    grid.gather(i, nb);
    site_terms(nb, v, psi, forces_out != nullptr, terms[i], scratch, shortlist);
  });
  EnergyBreakdown e;
  e.per_particle.resize(n);
  e.e3.resize(n);
  std::vector<Real> pairs(n);
  Real dmin = std::numeric_limits<Real>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    pairs[i] = terms[i].pair;
    e.e3[i] = terms[i].e3;
    e.per_particle[i] = terms[i].pair + terms[i].e3;
    dmin = std::min(dmin, terms[i].rmin);
  }
  e.pair_sum = pairwise_sum(pairs);
  e.triple_sum = pairwise_sum(e.e3);
  e.total = e.pair_sum + e.triple_sum;
  e.tail_bound = pair_tail_bound(v, n, std::min(dmin, rc), rc);
  if (forces_out) {
    forces_out->resize(n);
    for (std::size_t i = 0; i < n; ++i) (*forces_out)[i] = terms[i].force;
  }
  return e;
}

}  // namespace

NeighborList build_neighbors(const Configuration& config, Real cutoff) {
  NeighborGrid grid(config, cutoff);
  NeighborList out;
  out.cutoff = cutoff;
  out.of.resize(config.size());
  parallel_for(config.size(), [&](std::size_t i) {
    grid.gather(i, out.of[i]);
    std::sort(out.of[i].begin(), out.of[i].end(), neighbor_less);
  });
  out.min_distance = cutoff;
  for (const auto& l : out.of)
    for (const auto& e : l) out.min_distance = std::min(out.min_distance, e.r);
  return out;
}

Real min_pair_distance(const Configuration& config) {
  if (config.size() < 2 && !config.periodic()) return std::numeric_limits<Real>::infinity();
  Real rc = 2.0;
  for (int attempt = 0; attempt < 12; ++attempt, rc *= 2.0) {
    const auto nl = build_neighbors(config, rc);
    if (nl.min_distance < rc) return nl.min_distance;
  }
  return std::numeric_limits<Real>::infinity();
}

Real pair_tail_bound(const PotentialPair& v, std::size_t n, Real d_min, Real cutoff) {
  if (v.tail_amplitude == 0.0 || n == 0) return 0.0;
  if (cutoff < v.tail_start) throw DomainError("pair cutoff lies inside the polynomial region");
  const Real d = std::max(d_min, 1e-3);
  const Real t = cutoff - d;
  if (t <= 0.0) return std::numeric_limits<Real>::infinity();
  // Disjoint balls of radius d/2 around the far particles, |x| >= |y| - d/2.
  const Real integral = std::pow(t, -5.0) / 5.0 + d * std::pow(t, -6.0) / 6.0 + d * d * std::pow(t, -7.0) / 28.0;
  const Real per_site = std::abs(v.tail_amplitude) * 6.0 / (kPi * d * d * d) * 4.0 * kPi * integral;
  return static_cast<Real>(n) * per_site;
}

EnergyBreakdown energy(const Configuration& config, const PotentialPair& v, const PotentialTriple& psi) {
  return evaluate(config, v, psi, nullptr);
}

std::vector<Vec3> forces(const Configuration& config, const PotentialPair& v, const PotentialTriple& psi) {
  std::vector<Vec3> f;
  evaluate(config, v, psi, &f);
  return f;
}

EnergyBreakdown energy_and_forces(const Configuration& config, const PotentialPair& v, const PotentialTriple& psi,
                                  std::vector<Vec3>& f) {
  return evaluate(config, v, psi, &f);
}

PeriodicEnergy periodic_energy(const Configuration& z, const PotentialPair& v, const PotentialTriple& psi) {
  if (!z.periodic()) throw DomainError("periodic_energy requires a periodic configuration");
  if (z.size() == 0) throw DomainError("periodic_energy: empty motif");
  PeriodicEnergy out;
  out.cell = energy(z, v, psi);
  const Real n = static_cast<Real>(z.size());
  out.per_particle = out.cell.total / n;
  out.relative = out.per_particle - efcc(v, psi, 1.0);
  out.tail_bound = out.cell.tail_bound / n;
  return out;
}

// ---------------------------------------------------------------- stored energy

namespace {

struct StoredSites {
  std::vector<Vec3> far;    // all k != 0 with |k| <= kStoredRadius
  std::vector<Vec3> near;   // |k| <= 2
};

const std::array<StoredSites, 2>& stored_sites(LatticeKind kind) {
  static std::once_flag flags[2];
  static std::array<StoredSites, 2> data[2];
  const int idx = kind == LatticeKind::FCC ? 0 : 1;
  std::call_once(flags[idx], [&] {
    const auto sites = generate(kind, kStoredRadius + 2.0);
    const auto m = motif(kind);
    for (std::size_t s = 0; s < m.size(); ++s) {
      StoredSites& out = data[idx][s];
      for (const auto& site : sites) {
        const Vec3 k = position(kind, site) - m[s];
        const Real r = k.norm();
        if (r < 1e-9 || r > kStoredRadius + 1e-9) continue;
        out.far.push_back(k);
        if (r <= 2.0 + 1e-9) out.near.push_back(k);
      }
    }
  });
  return data[idx];
}

void check_trust(const Mat3& f) {
  if (!f.allFinite() || f.determinant() <= 0.0) throw TrustRegionError("stored energy requires det F > 0");
  Eigen::JacobiSVD<Mat3> svd(f);
  const auto s = svd.singularValues();
  if ((s.array() - 1.0).abs().maxCoeff() > kTrustRadius)
    throw TrustRegionError("stored energy: singular values of F leave [0.7, 1.3]");
}

Real site_stored(const StoredSites& s, const Mat3& f, const PotentialPair& v, const PotentialTriple& psi) {
  std::vector<Real> terms;
  terms.reserve(s.far.size());
  for (const auto& k : s.far) terms.push_back(v.value((f * k).norm()));
  std::vector<Vec3> fk;
  std::vector<Real> rk;
  for (const auto& k : s.near) {
    const Vec3 y = f * k;
    const Real r = y.norm();
    if (r < PotentialTriple::kSupport) {
      fk.push_back(y);
      rk.push_back(r);
    }
  }
  std::vector<Real> tri;
  for (std::size_t a = 0; a < fk.size(); ++a)
    for (std::size_t b = a + 1; b < fk.size(); ++b) {
      const Real rab = (fk[b] - fk[a]).norm();
      if (rab < PotentialTriple::kSupport) tri.push_back(psi.value(rk[a], rk[b], rab));
    }
  return pairwise_sum(terms) + 2.0 * pairwise_sum(tri);
}

Real site_radial(const StoredSites& s, Real r, const PotentialPair& v, const PotentialTriple& psi) {
  std::vector<Real> terms;
  for (const auto& k : s.far) {
    const Real l = k.norm();
    terms.push_back(l * v.d1(r * l));
  }
  std::vector<Real> tri;
  for (std::size_t a = 0; a < s.near.size(); ++a)
    for (std::size_t b = a + 1; b < s.near.size(); ++b) {
      const Real la = s.near[a].norm(), lb = s.near[b].norm(), lab = (s.near[b] - s.near[a]).norm();
      if (r * std::max({la, lb, lab}) >= PotentialTriple::kSupport) continue;
      const auto g = psi.gradient(r * la, r * lb, r * lab);
      tri.push_back(g[0] * la + g[1] * lb + g[2] * lab);
    }
  return pairwise_sum(terms) + 2.0 * pairwise_sum(tri);
}

}  // namespace

Real stored_energy(LatticeKind kind, const Mat3& f, const PotentialPair& v, const PotentialTriple& psi) {
  check_trust(f);
  const auto& sites = stored_sites(kind);
  if (kind == LatticeKind::FCC) return site_stored(sites[0], f, v, psi);
  return 0.5 * (site_stored(sites[0], f, v, psi) + site_stored(sites[1], f, v, psi));
}

Real stored_energy_radial_derivative(LatticeKind kind, Real r, const PotentialPair& v, const PotentialTriple& psi) {
  if (std::abs(r - 1.0) > kTrustRadius) throw TrustRegionError("radial derivative outside the trust region");
  const auto& sites = stored_sites(kind);
  if (kind == LatticeKind::FCC) return site_radial(sites[0], r, v, psi);
  return 0.5 * (site_radial(sites[0], r, v, psi) + site_radial(sites[1], r, v, psi));
}

Real radial_minimizer(LatticeKind kind, const PotentialPair& v, const PotentialTriple& psi) {
  Real lo = 1.0 - v.alpha / 2.0, hi = 1.0 + v.alpha;
  const Real flo = stored_energy_radial_derivative(kind, lo, v, psi);
  const Real fhi = stored_energy_radial_derivative(kind, hi, v, psi);
  if (!(flo < 0.0 && fhi > 0.0)) throw InfeasibleError("radial_minimizer: no sign change near r = 1");
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const Real mid = 0.5 * (lo + hi);
    const Real fm = stored_energy_radial_derivative(kind, mid, v, psi);
    if (fm == 0.0) return mid;
    (fm < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Mat3 piola(LatticeKind kind, const Mat3& f, const PotentialPair& v, const PotentialTriple& psi) {
  check_trust(f);
  const Real h = 1e-6;
  Mat3 s;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      auto diff = [&](Real step) {
        Mat3 p = f, m = f;
        p(i, j) += step;
        m(i, j) -= step;
        return (stored_energy(kind, p, v, psi) - stored_energy(kind, m, v, psi)) / (2.0 * step);
      };
      const Real d1 = diff(h), d2 = diff(h / 2.0);
      s(i, j) = (4.0 * d2 - d1) / 3.0;
    }
  return s;
}

Configuration periodic_crystal(LatticeKind kind, int n1, int n2, int n3) {
  if (n1 < 1 || n2 < 1 || n3 < 1) throw DomainError("periodic_crystal: replication counts must be positive");
  Configuration z;
  Mat3 cell;
  std::vector<Vec3> base;
  if (kind == LatticeKind::FCC) {
    cell = kSqrt2 * Mat3::Identity();
    base = {Vec3::Zero(), Vec3(0, 1, 1) / kSqrt2, Vec3(1, 0, 1) / kSqrt2, Vec3(1, 1, 0) / kSqrt2};
  } else {
    cell = basis(LatticeKind::HCP);
    base = motif(LatticeKind::HCP);
  }
  for (int a = 0; a < n1; ++a)
    for (int b = 0; b < n2; ++b)
      for (int c = 0; c < n3; ++c)
        for (const auto& p : base) z.positions.push_back(p + cell * Vec3(a, b, c));
  Mat3 big = cell;
  big.col(0) *= n1;
  big.col(1) *= n2;
  big.col(2) *= n3;
  z.cell = big;
  return z;
}

Configuration lattice_ball(LatticeKind kind, Real radius) {
  Configuration c;
  for (const auto& s : generate(kind, radius)) c.positions.push_back(position(kind, s));
  return c;
}

nlohmann::json to_json(const EnergyBreakdown& e) {
  return {{"total", e.total},
          {"pair_sum", e.pair_sum},
          {"triple_sum", e.triple_sum},
          {"tail_bound", e.tail_bound},
          {"per_particle", e.per_particle}};
}

}  // namespace xtal
