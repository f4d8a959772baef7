#include "oracles.hpp"
#include "xtal/lattice.hpp"
#include "xtal/paths.hpp"

#include <doctest.h>
#include <set>

using namespace xtal;

TEST_CASE("normalization over generic endpoints") {
  int generic = 0;
  // |k| <= 4 in units of the nearest-neighbour distance: |w|^2 <= 32 in scaled coordinates
  for (int a = -5; a <= 5; ++a)
    for (int b = -5; b <= 5; ++b)
      for (int c = -5; c <= 5; ++c) {
        if ((a + b + c) % 2 != 0 || a * a + b * b + c * c == 0 || a * a + b * b + c * c > 32) continue;
        const Vec3i k(a, b, c);
        if (!is_generic(k)) continue;
        ++generic;
        CHECK(normalization_check(k).sum == doctest::Approx(1.0).epsilon(1e-13));
      }
  CHECK(generic == 104);
}

TEST_CASE("path weights equal basis count over 96") {
  for (const auto& p : enumerate_paths(Vec3i(2, 2, 2))) {
    CHECK(p.basis_count == basis_count(p.sites));
    CHECK(p.weight == doctest::Approx(p.basis_count / 96.0));
    CHECK(p.sites.front() == Vec3i::Zero());
    CHECK(p.sites.back() == Vec3i(2, 2, 2));
    for (std::size_t i = 1; i < p.sites.size(); ++i) CHECK((p.sites[i] - p.sites[i - 1]).squaredNorm() == 2);
  }
}

TEST_CASE("paths are distinct and lie on the lattice") {
  const auto ps = enumerate_paths(std::sqrt(3.0));
  CHECK(!ps.empty());
  std::set<std::vector<std::array<long, 3>>> seen;
  for (const auto& p : ps) {
    std::vector<std::array<long, 3>> key;
    for (const auto& s : p.sites) {
      CHECK((s.sum() % 2 + 2) % 2 == 0);
      key.push_back({s[0], s[1], s[2]});
    }
    CHECK(seen.insert(key).second);
    CHECK(p.sites.back().squaredNorm() == 6);
  }
}

TEST_CASE("reflection of a path is an involution and preserves length") {
  const auto ps = enumerate_paths(Vec3i(2, 2, 0));
  for (const auto& p : ps)
    for (const auto& v : unit_vectors()) {
      const Path q = reflect(p, v);
      CHECK(q.sites.size() == p.sites.size());
      CHECK(q.length() == doctest::Approx(p.length()));
      const Path back = reflect(q, v);
      CHECK(back.sites == p.sites);
    }
}

TEST_CASE("center of a two-step path is its circumcenter") {
  int checked = 0;
  std::vector<Path> ps = enumerate_paths(Vec3i(2, 1, 1));
  for (const auto& p : enumerate_paths(Vec3i(2, 0, 0))) ps.push_back(p);
  for (const auto& p : ps) {
    if (p.sites.size() != 3) continue;
    ++checked;
    const auto [c, r] = path_center(p.sites);
    const Vec3 normal = (p.positions()[1] - p.positions()[0]).cross(p.positions()[2] - p.positions()[0]);
    CHECK(std::abs(normal.dot(c - p.positions()[0])) < 1e-12);
    for (const auto& s : p.sites) {
      const Vec3 x = s.cast<Real>() / std::sqrt(2.0);
      CHECK((x - c).norm() == doctest::Approx(r).epsilon(1e-9));
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("lambda identity holds for every basis column") {
  for (Real lambda : {std::sqrt(2.0), std::sqrt(3.0), 2.0}) {
    const auto& bases = enumerate_bases();
    for (std::size_t b = 0; b < bases.size(); b += 37)
      for (int col = 0; col < 3; ++col) {
        const auto r = lemma_lambda_check(lambda, bases[b], col);
        CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-12));
      }
  }
}

TEST_CASE("lambda keys") {
  CHECK(lambda_key(1.0) == 6);
  CHECK(lambda_key(std::sqrt(2.0)) == 12);
  CHECK(lambda_key(std::sqrt(8.0 / 3.0)) == 16);
  CHECK(key_lambda(18) == doctest::Approx(std::sqrt(3.0)));
}
