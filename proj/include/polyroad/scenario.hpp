#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polyroad/geom.hpp"
#include "polyroad/grid_map.hpp"
#include "polyroad/roadmap.hpp"

namespace polyroad {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ObstacleWaypoint {
  double t = 0.0;  // s
  Vec3 center = Vec3::Zero();
  double yaw = 0.0;  // rad
};

struct ObstacleScript {
  ObstacleId id = 0;
  Vec3 half_extents = Vec3::Ones();
  std::vector<ObstacleWaypoint> waypoints;  // strictly increasing t

  /// Held at the first/last waypoint outside the scripted interval; center
  /// lerped and yaw along the shorter arc in between.
  OBB pose_at(double t) const;
};

/// Obstacles drawn at load time from the run seed.
struct RandomObstacles {
  int count = 0;
  Vec3 half_extents = Vec3(0.4, 0.4, 1.0);
  double speed = 1.0;  // m/s
  int legs = 4;        // waypoints after the first
  double z = 1.0;      // center height
};

struct Scenario {
  std::string map_path;  // resolved against the scenario file's directory
  std::optional<double> robot_radius;
  Vec3 start = Vec3::Zero();
  Vec3 goal = Vec3::Zero();
  double dt = 0.1;
  double replan_window = 0.2;
  double max_velocity = 1.0;  // metadata only
  double robot_speed = 1.0;
  double duration = 60.0;
  std::vector<ObstacleScript> obstacles;
  std::optional<RandomObstacles> random;

  void validate() const;
  /// Appends `random` obstacles inside the map bounds (ids after the scripted ones).
  void expand_random(const GridMap& map, uint64_t seed);

  static Scenario parse(const std::string& json_text, const std::string& base_dir = ".");
  static Scenario load(const std::string& path);
  std::string to_json() const;
};

}  // namespace polyroad
