#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include "polyroad/grid_map.hpp"
#include "test_util.hpp"

using namespace polyroad;

namespace {

GridMap random_map(uint64_t seed, Dims dims, double fill) {
  GridMap m(Vec3(-1, 2, 0.5), 0.1, dims);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution occ(fill);
  for (size_t i = 0; i < m.cell_count(); ++i) m.set_occupied(m.unravel(i), occ(rng));
  return m;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("grid save/load round trip") {
  const GridMap m = random_map(1, {10, 10, 10}, 0.3);
  const std::string path = temp_path("polyroad_roundtrip.grid");
  m.save(path);
  CHECK(GridMap::load(path) == m);
  CHECK(GridMap::load(path).fingerprint() == m.fingerprint());
  std::filesystem::remove(path);
}

TEST_CASE("grid header of a 50x50x5 m map at 0.2 m is accepted") {
  const auto m = GridMap::parse(
      "polyroad-grid 1\nresolution 0.2\ndims 250 250 25\norigin 0 0 0\nruns 1\n0 1562500\n");
  CHECK(m.cell_count() == 1562500);
  CHECK(m.bounds().max.isApprox(Vec3(50, 50, 5)));
}

TEST_CASE("grid parse errors") {
  const std::string full = random_map(2, {4, 4, 4}, 0.5).serialize();
  CHECK_THROWS_AS(GridMap::parse(full.substr(0, full.size() / 2)), GridMapError);
  CHECK_THROWS_AS(GridMap::parse("bogus 1\n"), GridMapError);
  CHECK_THROWS_AS(
      GridMap::parse("polyroad-grid 1\nresolution 0.2\ndims 2 2 2\norigin 0 0 0\nruns 1\n0 7\n"),
      GridMapError);
  CHECK_THROWS_AS(
      GridMap::parse("polyroad-grid 1\nresolution 0.2\ndims 2 2 2\norigin 0 0 0\nruns 1\n0 9\n"),
      GridMapError);
  CHECK_THROWS_AS(
      GridMap::parse("polyroad-grid 1\nresolution -1\ndims 2 2 2\norigin 0 0 0\nruns 1\n0 8\n"),
      GridMapError);
  CHECK_THROWS_AS(GridMap::load("/nonexistent/map.grid"), GridMapError);
}

TEST_CASE("cell/world conversion is a bijection on in-bounds cells") {
  const GridMap m = random_map(3, {7, 5, 3}, 0.0);
  for (size_t i = 0; i < m.cell_count(); ++i) {
    const Cell c = m.unravel(i);
    CHECK(m.linear(c) == i);
    const auto back = m.cell_of(m.cell_center(c));
    REQUIRE(back.has_value());
    CHECK(*back == c);
  }
  CHECK_FALSE(m.cell_of(m.origin() - Vec3::Constant(0.01)).has_value());
}

TEST_CASE("sample_uncovered_free is uniform") {
  GridMap m(Vec3::Zero(), 1.0, {2, 2, 2});
  CoverageTracker t(m);
  Rng rng(99);
  std::array<int, 8> counts{};
  constexpr int kDraws = 100'000;
  for (int i = 0; i < kDraws; ++i) {
    const auto p = t.sample_uncovered_free(m, rng);
    REQUIRE(p.has_value());
    ++counts[m.linear(*m.cell_of(*p))];
  }
  double chi2 = 0;
  const double expected = kDraws / 8.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 18.475);  // chi-square, 7 dof, alpha = 0.01
}

TEST_CASE("sampling saturation and determinism") {
  GridMap m(Vec3::Zero(), 1.0, {2, 2, 2});
  CoverageTracker t(m);
  Rng a(5), b(5);
  for (int i = 0; i < 20; ++i) CHECK(*t.sample_uncovered_free(m, a) == *t.sample_uncovered_free(m, b));
  t.update_ratio(m, m.bounds_polyhedron());
  CHECK_FALSE(t.sample_uncovered_free(m, a).has_value());
}

TEST_CASE("update_ratio") {
  GridMap m(Vec3::Zero(), 0.1, {10, 10, 10});
  CoverageTracker t(m);
  CHECK(t.update_ratio(m, HPolyhedron::empty_set()) == 0.0);
  const auto half = HPolyhedron::box(Vec3::Zero(), Vec3(0.53, 1, 1));
  CHECK(t.update_ratio(m, half) == doctest::Approx(0.5));
  CHECK(t.update_ratio(m, HPolyhedron::box(Vec3::Zero(), Vec3(0.2, 1, 1))) == doctest::Approx(0.5));
  CHECK(t.update_ratio(m, m.bounds_polyhedron()) == 1.0);

  // Occupied cells are never covered; rho is monotone.
  GridMap occ = random_map(4, {10, 10, 10}, 0.4);
  CoverageTracker t2(occ);
  std::mt19937_64 rng(4);
  double last = 0;
  for (int i = 0; i < 30; ++i) {
    const Vec3 c = testing::uniform_in(rng, occ.bounds());
    const auto p = testing::random_polytope(rng, c, 8, 0.05, 0.3, 0.3);
    const double r = t2.update_ratio(occ, p);
    CHECK(r >= last);
    last = r;
  }
  for (size_t i = 0; i < occ.cell_count(); ++i) {
    if (occ.occupied(i)) CHECK_FALSE(t2.covered(i));
  }
  CHECK(t2.rho() == doctest::Approx(static_cast<double>(t2.covered_count()) / occ.free_count()));
}
