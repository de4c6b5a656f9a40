#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "polyroad/geom.hpp"
#include "polyroad/grid_map.hpp"

namespace polyroad {

class RegionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InflationConfig {
  int max_iterations = 5;
  double volume_growth_tol = 0.02;
  double bbox_halfwidth = 4.0;

  void validate() const;
};

/// One occupied grid cell (clipped to the inflation box) as a convex obstacle.
struct ObstacleCell {
  AABB box;

  std::array<Vec3, 8> corners() const;
};

/// IRIS hyperplane step. Obstacles are visited by increasing ellipsoid-metric
/// distance; each one not already excluded contributes the plane tangent to
/// the grown ellipsoid at its closest point. Throws RegionError when an
/// obstacle contains the ellipsoid center.
std::vector<Hyperplane> separating_hyperplanes(const Ellipsoid& e,
                                               std::span<const ObstacleCell> obstacles);

/// Closest point of a box to `center` under the metric |shape^-1 (x - center)|.
Vec3 closest_point_in_metric(const Mat3& shape_inv, const Vec3& center, const AABB& box);

/// Large inscribed ellipsoid (log-barrier Newton on the log-det program).
/// Never smaller than the Chebyshev ball.
Ellipsoid mvie(const HPolyhedron& p);

/// Surface cells of a map (occupied with a free 6-neighbour). Interior
/// occupied cells cannot be reached by a convex region that excludes every
/// surface cell, so only these are handed to the hyperplane step.
class ObstacleField {
 public:
  explicit ObstacleField(const GridMap& map);

  std::vector<ObstacleCell> in_box(const AABB& box) const;
  const GridMap& map() const { return *map_; }

 private:
  const GridMap* map_;
  std::vector<uint8_t> surface_;
};

struct InflationTrace {
  std::vector<double> ellipsoid_volumes;
  int iterations = 0;
  bool rolled_back = false;
};

/// Grows one obstacle-free convex region around `seed`, confined to the
/// cube of half-width cfg.bbox_halfwidth around the seed and the map bounds.
HPolyhedron inflate_region(const Vec3& seed, const ObstacleField& field, const InflationConfig& cfg,
                           InflationTrace* trace = nullptr);
HPolyhedron inflate_region(const Vec3& seed, const GridMap& map, const InflationConfig& cfg,
                           InflationTrace* trace = nullptr);

}  // namespace polyroad
