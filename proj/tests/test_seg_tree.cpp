#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "polyroad/seg_tree.hpp"
#include "test_util.hpp"

using namespace polyroad;

namespace {

std::vector<IndexedBox> random_boxes(std::mt19937_64& rng, size_t n, double world, double max_size) {
  std::uniform_real_distribution<double> pos(0, world), size(0, max_size);
  std::vector<IndexedBox> out;
  for (size_t i = 0; i < n; ++i) {
    const Vec3 lo(pos(rng), pos(rng), pos(rng));
    out.push_back({static_cast<uint32_t>(i * 3 + 1), {lo, lo + Vec3(size(rng), size(rng), size(rng))}});
  }
  return out;
}

std::vector<uint32_t> scan_stab(const std::vector<IndexedBox>& boxes, const Vec3& p) {
  std::vector<uint32_t> out;
  for (const auto& b : boxes)
    if (b.box.contains(p)) out.push_back(b.id);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<uint32_t> scan_overlap(const std::vector<IndexedBox>& boxes, const AABB& q) {
  std::vector<uint32_t> out;
  for (const auto& b : boxes)
    if (b.box.intersects(q)) out.push_back(b.id);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("stab examples") {
  const SegTree3D empty;
  CHECK(empty.stab(Vec3::Zero()).empty());
  CHECK(SegTree3D(std::vector<IndexedBox>{}).stab(Vec3::Ones()).empty());

  const SegTree3D t({{7, {Vec3::Zero(), Vec3::Constant(2)}}, {9, {Vec3::Ones(), Vec3::Constant(3)}}});
  CHECK(t.stab(Vec3::Constant(1.5)) == std::vector<uint32_t>{7, 9});
  CHECK(t.stab(Vec3::Constant(2.5)) == std::vector<uint32_t>{9});
  CHECK(t.stab(Vec3::Constant(5)).empty());
  // Closed faces.
  CHECK(t.stab(Vec3::Constant(2)) == std::vector<uint32_t>{7, 9});
  CHECK(t.stab(Vec3(0, 0, 0)) == std::vector<uint32_t>{7});

  const SegTree3D twins({{1, {Vec3::Zero(), Vec3::Ones()}}, {2, {Vec3::Zero(), Vec3::Ones()}}});
  CHECK(twins.stab(Vec3::Constant(0.5)) == std::vector<uint32_t>{1, 2});

  CHECK_THROWS_AS(SegTree3D({{1, {Vec3::Zero(), Vec3::Ones()}}, {1, {Vec3::Zero(), Vec3::Ones()}}}),
                  IndexError);
}

TEST_CASE("every box is retrievable by stabbing its center") {
  std::mt19937_64 rng(1);
  const auto boxes = random_boxes(rng, 1000, 100, 10);
  const SegTree3D t(boxes);
  std::vector<uint32_t> ids;
  for (const auto& b : boxes) {
    const auto hits = t.stab(b.box.center());
    CHECK(std::binary_search(hits.begin(), hits.end(), b.id));
    ids.push_back(b.id);
  }
  std::sort(ids.begin(), ids.end());
  CHECK(t.stored_ids() == ids);
}

TEST_CASE("candidates_for_box examples") {
  const SegTree3D t({{7, {Vec3::Zero(), Vec3::Constant(2)}}, {9, {Vec3::Ones(), Vec3::Constant(3)}}});
  CHECK(t.candidates_for_box({Vec3::Constant(10), Vec3::Constant(11)}).empty());
  CHECK(t.candidates_for_box({Vec3::Zero(), Vec3::Constant(2)}) == std::vector<uint32_t>{7, 9});
  CHECK(t.candidates_for_box({Vec3::Constant(-5), Vec3::Constant(-0.5)}).empty());
  CHECK(t.candidates_for_box({Vec3::Constant(2.5), Vec3::Constant(9)}) == std::vector<uint32_t>{9});
  CHECK(t.candidates_for_box({Vec3::Constant(-9), Vec3::Constant(9)}) == std::vector<uint32_t>{7, 9});

  std::mt19937_64 rng(2);
  const auto boxes = random_boxes(rng, 500, 100, 15);
  const SegTree3D big(boxes);
  const auto queries = random_boxes(rng, 100, 100, 20);
  for (const auto& q : queries) CHECK(big.candidates_for_box(q.box) == scan_overlap(boxes, q.box));
}

TEST_CASE("stab and box queries match a linear scan") {
  std::mt19937_64 rng(3);
  // Coarse integer coordinates exercise shared endpoints and face contacts.
  std::uniform_int_distribution<int> pos(0, 20), size(0, 5);
  std::vector<IndexedBox> boxes;
  for (uint32_t i = 0; i < 300; ++i) {
    const Vec3 lo(pos(rng), pos(rng), pos(rng));
    boxes.push_back({i, {lo, lo + Vec3(size(rng), size(rng), size(rng))}});
  }
  const SegTree3D t(boxes);
  std::uniform_real_distribution<double> any(-1, 26);
  for (int i = 0; i < 10000; ++i) {
    const Vec3 p = (i % 2) ? Vec3(any(rng), any(rng), any(rng))
                           : Vec3(pos(rng), pos(rng), pos(rng)) * 1.0;
    CHECK(t.stab(p) == scan_stab(boxes, p));
    const Vec3 lo(pos(rng), pos(rng), pos(rng));
    const AABB q{lo, lo + Vec3(size(rng), size(rng), size(rng))};
    CHECK(t.candidates_for_box(q) == scan_overlap(boxes, q));
  }
}

TEST_CASE("stab visits grow polylogarithmically") {
  // Box size shrinks as n^-1/3 so the mean output size k stays fixed; the
  // visit count then isolates the log^3 n term from the +k term.
  auto mean_visits = [](size_t n) {
    std::mt19937_64 rng(n);
    const auto boxes = random_boxes(rng, n, 1.0, 0.1 * std::cbrt(1024.0 / static_cast<double>(n)));
    const SegTree3D t(boxes);
    std::uniform_real_distribution<double> u(0, 1);
    double total = 0;
    constexpr int kQueries = 2000;
    for (int i = 0; i < kQueries; ++i) {
      SegTree3D::QueryStats s;
      t.stab(Vec3(u(rng), u(rng), u(rng)), &s);
      total += static_cast<double>(s.visited_nodes);
    }
    return total / kQueries;
  };
  const double small = mean_visits(1 << 10);
  const double large = mean_visits(1 << 14);
  MESSAGE("mean visited nodes: n=1024 -> " << small << ", n=16384 -> " << large);
  CHECK(large / small <= 2.5);
}
