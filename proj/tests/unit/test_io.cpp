#include "fixtures.hpp"
#include "xtal/io.hpp"

#include <doctest.h>
#include <limits>
#include <sstream>

using namespace xtal;

TEST_CASE("xyz round-trip preserves every bit") {
  auto c = fx::jitter(periodic_crystal(LatticeKind::HCP, 2, 2, 2), 0.1, 1);
  std::istringstream in(xyz_string(c, "test"));
  const auto back = read_xyz(in);
  REQUIRE(back.size() == c.size());
  REQUIRE(back.periodic());
  CHECK(*back.cell == *c.cell);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(back.positions[i] == c.positions[i]);
}

TEST_CASE("malformed xyz is rejected") {
  std::istringstream in("3\ncomment\nX 0 0 0\n");
  CHECK_THROWS(read_xyz(in));
}

TEST_CASE("real formatting and JSON") {
  CHECK(std::stod(format_real(0.1)) == 0.1);
  nlohmann::json j = {{"a", std::numeric_limits<Real>::quiet_NaN()}, {"b", 1.5}};
  const auto s = dump_json(j);
  CHECK(s.find("null") != std::string::npos);
  CHECK(nlohmann::json::parse(s)["b"] == 1.5);
}

TEST_CASE("fnv1a reference vectors") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}
