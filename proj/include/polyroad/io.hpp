#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polyroad/nav_graph.hpp"
#include "polyroad/polyhedronize.hpp"

namespace polyroad {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Output of `build`: the roots plus everything needed to check the map
/// and rebuild the store.
struct RoadmapFile {
  std::string map_path;
  uint64_t map_fingerprint = 0;
  BuildConfig config;
  GoodPolyThresholds thresholds;
  double rho = 0.0;
  int samples = 0;
  int rejected = 0;
  std::vector<HPolyhedron> roots;

  RoadmapStore make_store(std::optional<double> robot_radius = std::nullopt) const;

  std::string to_json() const;
  static RoadmapFile parse(const std::string& text);
  static RoadmapFile load(const std::string& path);
  void save(const std::string& path) const;
};

struct SnapshotView {
  const RoadmapStore* store = nullptr;
  const NavGraph* graph = nullptr;  // optional
  const PathResult* path = nullptr;  // optional
  std::optional<Vec3> robot;
  int tick = 0;
  double time = 0.0;
};

/// Structured text document (JSON, "schema": 1) for plotting and diffing.
std::string export_snapshot(const SnapshotView& v);
void write_snapshot(const std::string& path, const SnapshotView& v);

/// What a snapshot reader gets back; H-reps are reproduced exactly.
struct ImportedSnapshot {
  int tick = 0;
  std::map<NodeId, HPolyhedron> active;
  std::map<NodeId, std::vector<Vec3>> vertices;
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<NodeId> path_rooms;
  std::vector<Vec3> path_waypoints;
  std::map<ObstacleId, OBB> obstacles;
};

ImportedSnapshot import_snapshot(const std::string& text);

std::string read_text(const std::string& path);
std::string fingerprint_hex(uint64_t fp);

}  // namespace polyroad
