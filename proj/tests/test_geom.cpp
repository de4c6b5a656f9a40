#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "polyroad/geom.hpp"
#include "polyroad/lp.hpp"
#include "test_util.hpp"

using namespace polyroad;
using polyroad::testing::brute_force_vertices;
using polyroad::testing::unit_cube;

TEST_CASE("lp maximize small programs") {
  // max x + y s.t. x <= 1, y <= 2, x + y <= 2.5, -x <= 0, -y <= 0
  Eigen::MatrixXd a(5, 2);
  a << 1, 0, 0, 1, 1, 1, -1, 0, 0, -1;
  Eigen::VectorXd b(5);
  b << 1, 2, 2.5, 0, 0;
  const auto res = lp::maximize(a, b, Eigen::Vector2d(1, 1), Eigen::Vector2d(0, 0));
  REQUIRE(res.optimal());
  CHECK(res.value == doctest::Approx(2.5));

  // Unbounded in -x.
  Eigen::MatrixXd a2(1, 2);
  a2 << 1, 0;
  Eigen::VectorXd b2(1);
  b2 << 1;
  CHECK(lp::maximize(a2, b2, Eigen::Vector2d(-1, 0), Eigen::Vector2d(0, 0)).status ==
        lp::Status::kUnbounded);
}

TEST_CASE("contains_point") {
  const auto c = unit_cube();
  CHECK(contains_point(c, Vec3(0.5, 0.5, 0.5), 0.0));
  CHECK_FALSE(contains_point(c, Vec3(1.1, 0.5, 0.5), 0.0));
  CHECK(contains_point(c, Vec3(1.0005, 0.5, 0.5), 1e-3));
  CHECK_FALSE(contains_point(HPolyhedron::empty_set(), Vec3::Zero(), 1.0));
}

TEST_CASE("chebyshev") {
  const auto c = chebyshev(unit_cube());
  CHECK(c.radius == doctest::Approx(0.5));
  CHECK((c.center - Vec3::Constant(0.5)).norm() < 1e-9);

  std::vector<Hyperplane> rows = unit_cube().halfspaces();
  rows.push_back({-Vec3::UnitX(), -2.0});
  CHECK(chebyshev(HPolyhedron(rows, true)).radius <= 0.0);

  const auto slab = HPolyhedron::box(Vec3::Zero(), Vec3(0.2, 1, 1));
  CHECK(chebyshev(slab).radius == doctest::Approx(0.1));

  const HPolyhedron half({{Vec3::UnitX(), 1.0}});
  CHECK(chebyshev(half).unbounded);
  CHECK_FALSE(half.bounded());
  CHECK(HPolyhedron(unit_cube().halfspaces()).bounded());
}

TEST_CASE("intersect") {
  const auto c = unit_cube();
  const auto p = intersect(c, testing::cube(Vec3::Constant(0.5), 1.0));
  REQUIRE_FALSE(p.is_empty());
  CHECK(p.same_set(HPolyhedron::box(Vec3::Constant(0.5), Vec3::Ones())));

  CHECK(intersect(c, testing::cube(Vec3(2, 0, 0), 1.0)).is_empty());

  const HPolyhedron halfspace({{-Vec3::UnitX(), -0.6}});
  const auto slab = intersect(c, halfspace);
  CHECK(slab.size() == 6);
  CHECK(enumerate_vertices(slab).vertices.size() == 8);
  CHECK(volume_centroid(slab).volume == doctest::Approx(0.4));
}

TEST_CASE("contains_polyhedron") {
  const auto c = unit_cube();
  CHECK(contains_polyhedron(c, HPolyhedron::box(Vec3::Constant(0.2), Vec3::Constant(0.8))));
  CHECK(contains_polyhedron(c, c));
  const auto s4 = HPolyhedron::box(Vec3::Zero(), Vec3(0.4, 1, 1));
  const auto s6 = HPolyhedron::box(Vec3::Zero(), Vec3(0.6, 1, 1));
  CHECK(contains_polyhedron(s6, s4));
  CHECK_FALSE(contains_polyhedron(s4, s6));
}

TEST_CASE("enumerate_vertices matches brute force") {
  CHECK(enumerate_vertices(unit_cube()).vertices.size() == 8);

  const HPolyhedron tet({{-Vec3::UnitX(), 0},
                         {-Vec3::UnitY(), 0},
                         {-Vec3::UnitZ(), 0},
                         Hyperplane::from(Vec3::Ones(), 1.0)});
  const auto tv = enumerate_vertices(tet).vertices;
  CHECK(tv.size() == 4);
  bool has_origin = false;
  for (const auto& v : tv) has_origin = has_origin || v.norm() < 1e-12;
  CHECK(has_origin);

  std::vector<Hyperplane> rows = unit_cube().halfspaces();
  rows.push_back(Hyperplane::from(Vec3(1, 1, 0), 1.5));
  const HPolyhedron cut(rows, true);
  CHECK(brute_force_vertices(cut).size() == 10);
  CHECK(enumerate_vertices(cut).vertices.size() == 10);

  // Flat region has no interior.
  CHECK_THROWS_AS(enumerate_vertices(HPolyhedron::box(Vec3::Zero(), Vec3(0, 1, 1))),
                  GeometryError);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = testing::random_polytope(rng, Vec3::Zero(), 12, 0.2, 1.0, 1.0);
    if (p.is_empty()) continue;
    const auto fast = enumerate_vertices(p).vertices;
    const auto slow = brute_force_vertices(p);
    REQUIRE(fast.size() == slow.size());
    for (const auto& v : fast) {
      for (const auto& h : p.halfspaces()) CHECK(h.signed_distance(v) <= 1e-7);
      double best = 1e9;
      for (const auto& w : slow) best = std::min(best, (v - w).norm());
      CHECK(best < 1e-7);
    }
  }
}

TEST_CASE("volume_centroid") {
  auto vc = volume_centroid(unit_cube());
  CHECK(vc.volume == doctest::Approx(1.0));
  CHECK((vc.centroid - Vec3::Constant(0.5)).norm() < 1e-12);

  const HPolyhedron tet({{-Vec3::UnitX(), 0},
                         {-Vec3::UnitY(), 0},
                         {-Vec3::UnitZ(), 0},
                         Hyperplane::from(Vec3::Ones(), 1.0)});
  vc = volume_centroid(tet);
  CHECK(vc.volume == doctest::Approx(1.0 / 6.0));
  CHECK((vc.centroid - Vec3::Constant(0.25)).norm() < 1e-12);

  std::vector<Hyperplane> rows = unit_cube().halfspaces();
  rows.push_back(Hyperplane::from(Vec3::Ones(), 2.5));
  vc = volume_centroid(HPolyhedron(rows, true));
  CHECK(vc.volume == doctest::Approx(1.0 - 0.125 / 6.0).epsilon(1e-12));
}

TEST_CASE("volume_centroid agrees with Monte Carlo") {
  std::mt19937_64 rng(11);
  int checked = 0;
  while (checked < 5) {
    const auto p = testing::random_polytope(rng, Vec3(1, 2, 3), 10, 0.3, 1.2, 1.0);
    if (p.is_empty()) continue;
    const auto vs = enumerate_vertices(p);
    const auto vc = volume_centroid(p, vs);
    if (vc.volume <= 0.01) continue;
    const AABB box = bounding_box(vs);
    const double box_vol = (box.max - box.min).prod();
    constexpr int kSamples = 1'000'000;
    int hits = 0;
    Vec3 sum = Vec3::Zero();
    for (int i = 0; i < kSamples; ++i) {
      const Vec3 x = testing::uniform_in(rng, box);
      if (contains_point(p, x)) {
        ++hits;
        sum += x;
      }
    }
    const double mc = box_vol * hits / kSamples;
    CHECK(std::abs(mc - vc.volume) / vc.volume < 0.01);
    CHECK((sum / hits - vc.centroid).norm() < 0.01);
    ++checked;
  }
}

TEST_CASE("canonicalize drops redundant rows and is idempotent") {
  std::vector<Hyperplane> rows = unit_cube().halfspaces();
  rows.push_back({Vec3::UnitX(), 2.0});                     // redundant
  rows.push_back({Vec3::UnitX(), 1.0});                     // duplicate
  rows.push_back(Hyperplane::from(Vec3(1, 1, 1), 3.0));     // touches a corner only
  const auto c = canonicalize(HPolyhedron(rows, true));
  CHECK(c.same_set(unit_cube()));

  // Unbounded path uses LP redundancy.
  const auto u = canonicalize(HPolyhedron({{Vec3::UnitX(), 1.0}, {Vec3::UnitX(), 2.0}}));
  CHECK(u.size() == 1);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Hyperplane> r;
    const auto base = testing::random_polytope(rng, Vec3::Zero(), 15, 0.2, 1.0, 1.0);
    const auto once = canonicalize(base);
    const auto twice = canonicalize(once);
    CHECK(once == twice);
  }
}

TEST_CASE("containment agrees with rejection sampling") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int true_cases = 0, false_cases = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto inner = testing::random_polytope(rng, Vec3::Zero(), 8, 0.3, 0.8, 1.0);
    if (inner.is_empty()) continue;
    HPolyhedron outer;
    const double mode = u01(rng);
    if (mode < 0.4) {
      std::vector<Hyperplane> rows = inner.halfspaces();
      for (auto& h : rows) h.offset += 0.2 * u01(rng);
      outer = HPolyhedron(rows, true);
    } else {
      const Vec3 shift = testing::random_unit(rng) * (0.02 + 0.2 * u01(rng));
      outer = testing::random_polytope(rng, shift, 8, 0.3, 0.8, 1.0);
      if (outer.is_empty()) continue;
    }
    const bool contained = contains_polyhedron(outer, inner);

    double margin = 0.0;
    const auto iv = enumerate_vertices(inner).vertices;
    for (const auto& h : outer.halfspaces())
      for (const auto& v : iv) margin = std::max(margin, h.signed_distance(v));
    CHECK(contained == (margin <= 1e-9));

    const AABB box = bounding_box({iv});
    bool witness = false;
    for (int s = 0; s < 100'000 && !witness; ++s) {
      const Vec3 x = testing::uniform_in(rng, box);
      if (contains_point(inner, x) && !contains_point(outer, x)) witness = true;
    }
    if (contained) {
      ++true_cases;
      CHECK_FALSE(witness);
    } else {
      ++false_cases;
      if (margin > 1e-3) CHECK(witness);
    }
  }
  CHECK(true_cases > 100);
  CHECK(false_cases > 100);
}

TEST_CASE("obb halfspaces and inflation") {
  OBB o;
  const auto h = obb_halfspaces(o);
  REQUIRE(h.size() == 6);
  for (const auto& row : h.halfspaces()) CHECK(row.offset == doctest::Approx(1.0));
  const auto hi = obb_halfspaces(inflate_obb(o, 0.3));
  for (const auto& row : hi.halfspaces()) CHECK(row.offset == doctest::Approx(1.3));

  // Yawed 45 degrees, half-extents (1,2,1). A point whose box-frame
  // coordinates are (1.06, 1.06, 0) is outside the raw box (1.06 > 1) and
  // inside after inflating by 0.3.
  const OBB yawed = OBB::from_yaw(Vec3::Zero(), std::numbers::pi / 4, Vec3(1, 2, 1));
  const Vec3 p = yawed.rotation * Vec3(1.06, 1.06, 0);
  CHECK_FALSE(contains_point(obb_halfspaces(yawed), p));
  CHECK(contains_point(obb_halfspaces(inflate_obb(yawed, 0.3)), p));
  CHECK(yawed.contains(p, 0.3));
  // The world point (1.06, 1.06, 0) sits 1.499 m along the box x axis.
  CHECK_FALSE(contains_point(obb_halfspaces(inflate_obb(yawed, 0.3)), Vec3(1.06, 1.06, 0)));

  CHECK_THROWS_AS(inflate_obb(o, -0.1), GeometryError);
  const Mat3 rtr = yawed.rotation.transpose() * yawed.rotation;
  CHECK((rtr - Mat3::Identity()).norm() < 1e-9);
}
