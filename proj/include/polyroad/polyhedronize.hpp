#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "polyroad/grid_map.hpp"
#include "polyroad/region_gen.hpp"
#include "polyroad/roadmap.hpp"

namespace polyroad {

struct BuildConfig {
  double rho_e = 0.85;       // target coverage of free cells
  int max_samples = 5000;    // seeds drawn before giving up
  uint64_t rng_seed = 1;
  double robot_radius = 0.2;
  /// Defaults: robot radius, and 8 cells worth of volume.
  std::optional<double> min_radius;
  std::optional<double> min_volume;
  InflationConfig inflation;

  GoodPolyThresholds thresholds(const GridMap& map) const;
  void validate() const;
};

struct BuildResult {
  std::vector<HPolyhedron> roots;
  double rho = 0.0;
  int samples = 0;
  int rejected = 0;  // seeds whose region failed the good-poly test
  GoodPolyThresholds thresholds;

  RoadmapStore make_store(double robot_radius) const { return RoadmapStore(roots, robot_radius, thresholds); }
};

/// Covers the free space of `map` with convex regions grown from random
/// uncovered seeds until coverage reaches rho_e or the sample budget runs out.
BuildResult polyhedronize(const GridMap& map, const BuildConfig& cfg);

}  // namespace polyroad
