// Regenerates the bundled maps under data/. Scenario files are hand-written
// and live next to them.

#include <cstdio>
#include <random>
#include <string>

#include "polyroad/grid_map.hpp"

using namespace polyroad;

namespace {

// 10 x 10 x 2 m, wall at x = 5 with a 1.6 m wide doorway.
GridMap two_chamber() {
  GridMap m(Vec3::Zero(), 0.2, {50, 50, 10});
  m.fill_box(Vec3(4.8, 0, 0), Vec3(5.2, 4.2, 2));
  m.fill_box(Vec3(4.8, 5.8, 0), Vec3(5.2, 10, 2));
  return m;
}

// 20 x 20 x 4 m with a handful of pillars.
GridMap sparse() {
  GridMap m(Vec3::Zero(), 0.2, {100, 100, 20});
  const double pillars[][2] = {{5, 5}, {15, 5}, {10, 10}, {5, 15}, {15, 15}};
  for (const auto& p : pillars) m.fill_box(Vec3(p[0] - 0.6, p[1] - 0.6, 0), Vec3(p[0] + 0.6, p[1] + 0.6, 4));
  return m;
}

// 25 x 25 x 5 m: random pillars and floating blocks, kept off the
// start and goal corners.
GridMap cluster(uint64_t seed) {
  GridMap m(Vec3::Zero(), 0.2, {125, 125, 25});
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(1.5, 23.5), width(0.6, 1.4), zlo(1.5, 3.0), thick(0.4, 1.0);
  int placed = 0;
  while (placed < 28) {
    const double x = pos(rng), y = pos(rng), w = width(rng);
    if ((x < 4 && y < 4) || (x > 21 && y > 21)) continue;
    if (placed % 4 == 3) {
      const double z = zlo(rng);
      m.fill_box(Vec3(x - w, y - w, z), Vec3(x + w, y + w, z + thick(rng)));
    } else {
      m.fill_box(Vec3(x - w / 2, y - w / 2, 0), Vec3(x + w / 2, y + w / 2, 5));
    }
    ++placed;
  }
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "data";
  two_chamber().save(dir + "/two_chamber.grid");
  sparse().save(dir + "/sparse.grid");
  cluster(2024).save(dir + "/cluster.grid");
  std::printf("wrote maps to %s\n", dir.c_str());
  return 0;
}
