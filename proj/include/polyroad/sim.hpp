#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polyroad/io.hpp"
#include "polyroad/nav_graph.hpp"
#include "polyroad/scenario.hpp"

namespace polyroad {

enum class EventKind { kDecomposition, kRestoration, kGraphUpdate, kReplan };

const char* event_name(EventKind k);

struct MetricRecord {
  int tick = 0;
  EventKind kind = EventKind::kDecomposition;
  size_t node_count = 0;
  double duration_us = 0.0;
};

struct MetricSummary {
  size_t times = 0;
  double total_ms = 0.0;
  double average_ms = 0.0;
};

class MetricsLog {
 public:
  void add(int tick, EventKind kind, size_t node_count, double duration_us) {
    records_.push_back({tick, kind, node_count, duration_us});
  }
  const std::vector<MetricRecord>& records() const { return records_; }
  MetricSummary summary(EventKind kind) const;

  /// `tick,event,node_count,duration_us`; durations blank when excluded.
  std::string csv(bool with_durations = true) const;
  /// Times / Total / Average per timed stage.
  std::string summary_table() const;

 private:
  std::vector<MetricRecord> records_;
};

struct TickRecord {
  int tick = 0;
  double time = 0.0;
  Vec3 robot = Vec3::Zero();
  bool safe = true;          // inside an active region, outside every inflated box
  bool replanned = false;
  bool path_hit = false;     // a room on the path changed inside the replan window
  bool had_path = false;     // path held at the start of the tick
  double since_replan = 0.0; // seconds since the previous replan, at decision time
};

struct SimOptions {
  uint64_t seed = 0;
  std::optional<std::string> snapshot_dir;
  std::vector<int> snapshot_ticks;
};

struct SimResult {
  MetricsLog metrics;
  std::vector<TickRecord> ticks;
  bool reached_goal = false;
  Vec3 final_robot = Vec3::Zero();
  int violations = 0;
  int replans = 0;
  std::vector<std::string> snapshots_written;
};

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Loads the map, checks it against the roadmap and runs `build`.
RoadmapFile run_build(const std::string& map_path, const BuildConfig& cfg);

/// Replays a scenario tick by tick against a roadmap.
SimResult run_sim(const RoadmapFile& roadmap, Scenario scenario, const SimOptions& opt);

enum class PlanStatus { kOk, kUnreachable, kStartBlocked, kStartUncovered, kGoalBlocked, kGoalUncovered };

struct PlanOutcome {
  PlanStatus status = PlanStatus::kUnreachable;
  std::optional<PathResult> path;
  std::string message() const;
};

/// Locates both points, runs A*, and says why when it cannot. Obstacles
/// from `scenario` (if any) are placed at time `at`.
PlanOutcome run_plan(const RoadmapFile& roadmap, const Vec3& start, const Vec3& goal,
                     const std::optional<Scenario>& scenario = std::nullopt, double at = 0.0);

}  // namespace polyroad
