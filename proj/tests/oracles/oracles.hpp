#pragma once

// Brute-force reference implementations. They share no code with the library
// beyond the Configuration type and the potential objects being evaluated.

#include "xtal/common.hpp"
#include "xtal/potential.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <vector>

namespace oracle {

using xtal::Real;
using xtal::Vec3;

// fcc with nearest-neighbour distance 1: integer points with even coordinate sum, scaled by 1/sqrt(2).
inline std::map<long, long> fcc_shell_counts(long max_sq2) {
  std::map<long, long> out;  // key: 2*r^2 (integer), value: count
  const int m = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(max_sq2)))) + 1;
  for (int a = -m; a <= m; ++a)
    for (int b = -m; b <= m; ++b)
      for (int c = -m; c <= m; ++c) {
        if (((a + b + c) % 2 + 2) % 2 != 0) continue;
        const long q = static_cast<long>(a) * a + static_cast<long>(b) * b + static_cast<long>(c) * c;
        if (q == 0 || q > max_sq2) continue;
        ++out[q];
      }
  return out;
}

// hcp as ABAB stacking of triangular layers, built directly from coordinates.
inline std::vector<Vec3> hcp_points(int m) {
  std::vector<Vec3> pts;
  const Real h = std::sqrt(2.0 / 3.0);
  const Vec3 a1(1, 0, 0), a2(0.5, std::sqrt(3.0) / 2, 0);
  const Vec3 shift_b = (a1 + a2) / 3.0;
  for (int k = -m; k <= m; ++k)
    for (int i = -m; i <= m; ++i)
      for (int j = -m; j <= m; ++j) {
        Vec3 p = i * a1 + j * a2 + Vec3(0, 0, k * h);
        if (((k % 2) + 2) % 2 == 1) p += shift_b;
        pts.push_back(p);
      }
  return pts;
}

inline std::vector<std::pair<Real, long>> shells_about_origin(const std::vector<Vec3>& pts, Real rmax) {
  std::vector<Real> d;
  for (const auto& p : pts) {
    const Real r = p.norm();
    if (r > 1e-9 && r <= rmax + 1e-9) d.push_back(r);
  }
  std::sort(d.begin(), d.end());
  std::vector<std::pair<Real, long>> out;
  for (Real r : d) {
    if (out.empty() || r - out.back().first > 1e-7)
      out.emplace_back(r, 1);
    else
      ++out.back().second;
  }
  return out;
}

// Direct O(N^3) energy of a finite configuration: ordered pairs plus ordered triples.
inline Real energy(const std::vector<Vec3>& x, const xtal::PotentialPair& v, const xtal::PotentialTriple& psi) {
  const std::size_t n = x.size();
  Real e = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const Real rij = (x[i] - x[j]).norm();
      if (rij < v.cutoff) e += v.value(rij);
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        e += psi.value(rij, (x[j] - x[k]).norm(), (x[k] - x[i]).norm());
      }
    }
  return e;
}

// Central differences of an arbitrary energy functional; returns -grad.
inline std::vector<Vec3> fd_forces(const std::vector<Vec3>& x, const std::function<Real(const std::vector<Vec3>&)>& e,
                                   Real h = 1e-6) {
  std::vector<Vec3> f(x.size(), Vec3::Zero());
  auto y = x;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (int c = 0; c < 3; ++c) {
      y[i][c] = x[i][c] + h;
      const Real ep = e(y);
      y[i][c] = x[i][c] - h;
      const Real em = e(y);
      y[i][c] = x[i][c];
      f[i][c] = -(ep - em) / (2 * h);
    }
  return f;
}

// The 12 nearest-neighbour directions of fcc in integer coordinates (|w|^2 = 2).
inline std::vector<std::array<int, 3>> unit_vectors() {
  std::vector<std::array<int, 3>> out;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int c = -1; c <= 1; ++c)
        if (a * a + b * b + c * c == 2) out.push_back({a, b, c});
  return out;
}

inline long det3(const std::array<int, 3>& a, const std::array<int, 3>& b, const std::array<int, 3>& c) {
  return static_cast<long>(a[0]) * (b[1] * c[2] - b[2] * c[1]) - static_cast<long>(a[1]) * (b[0] * c[2] - b[2] * c[0]) +
         static_cast<long>(a[2]) * (b[0] * c[1] - b[1] * c[0]);
}

struct TripleCounts {
  long ordered_noncollinear = 0;
  long nonsingular = 0;
};

inline TripleCounts count_triples() {
  const auto u = unit_vectors();
  TripleCounts t;
  auto parallel = [](const std::array<int, 3>& a, const std::array<int, 3>& b) {
    return a[1] * b[2] - a[2] * b[1] == 0 && a[2] * b[0] - a[0] * b[2] == 0 && a[0] * b[1] - a[1] * b[0] == 0;
  };
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < u.size(); ++j)
      for (std::size_t k = 0; k < u.size(); ++k) {
        if (i == j || j == k || i == k) continue;
        if (parallel(u[i], u[j]) || parallel(u[j], u[k]) || parallel(u[i], u[k])) continue;
        ++t.ordered_noncollinear;
        if (det3(u[i], u[j], u[k]) != 0) ++t.nonsingular;
      }
  return t;
}

inline xtal::Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<Real> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

}  // namespace oracle
