#include "polyroad/sim.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <sstream>

namespace polyroad {

namespace {

double since_us(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
}

bool inside_any_box(const RoadmapStore& s, const Vec3& p) {
  for (const auto& [id, o] : s.obstacles()) {
    if (o.inflated.interior_contains(p, 1e-9)) return true;
  }
  return false;
}

GridMap load_scenario_map(const Scenario& sc, const RoadmapFile& rm) {
  GridMap map = [&] {
    try {
      return GridMap::load(sc.map_path);
    } catch (const GridMapError& e) {
      throw SimError("scenario references unknown map: " + sc.map_path + " (" + e.what() + ")");
    }
  }();
  if (map.fingerprint() != rm.map_fingerprint) {
    throw SimError("scenario map " + sc.map_path + " does not match the roadmap's map (" + rm.map_path + ")");
  }
  return map;
}

}  // namespace

const char* event_name(EventKind k) {
  switch (k) {
    case EventKind::kDecomposition: return "decomposition";
    case EventKind::kRestoration: return "restoration";
    case EventKind::kGraphUpdate: return "graph_update";
    case EventKind::kReplan: return "replan";
  }
  return "?";
}

MetricSummary MetricsLog::summary(EventKind kind) const {
  MetricSummary s;
  for (const auto& r : records_) {
    if (r.kind != kind) continue;
    ++s.times;
    s.total_ms += r.duration_us / 1000.0;
  }
  s.average_ms = s.times ? s.total_ms / static_cast<double>(s.times) : 0.0;
  return s;
}

std::string MetricsLog::csv(bool with_durations) const {
  std::ostringstream out;
  out << "tick,event,node_count,duration_us\n";
  char buf[32];
  for (const auto& r : records_) {
    out << r.tick << ',' << event_name(r.kind) << ',' << r.node_count << ',';
    if (with_durations) {
      std::snprintf(buf, sizeof(buf), "%.3f", r.duration_us);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

std::string MetricsLog::summary_table() const {
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-8s %8s %12s %12s\n", "stage", "Times", "Total(ms)", "Average(ms)");
  out << buf;
  const std::pair<const char*, EventKind> rows[] = {{"t_d", EventKind::kDecomposition},
                                                    {"t_r", EventKind::kRestoration},
                                                    {"t_g", EventKind::kGraphUpdate}};
  for (const auto& [name, kind] : rows) {
    const MetricSummary s = summary(kind);
    std::snprintf(buf, sizeof(buf), "%-8s %8zu %12.3f %12.3f\n", name, s.times, s.total_ms, s.average_ms);
    out << buf;
  }
  return out.str();
}

RoadmapFile run_build(const std::string& map_path, const BuildConfig& cfg) {
  const GridMap map = GridMap::load(map_path);
  if (map.free_count() == 0) throw SimError("map has no free space: " + map_path);
  const BuildResult b = polyhedronize(map, cfg);
  RoadmapFile f;
  f.map_path = map_path;
  f.map_fingerprint = map.fingerprint();
  f.config = cfg;
  f.thresholds = b.thresholds;
  f.rho = b.rho;
  f.samples = b.samples;
  f.rejected = b.rejected;
  f.roots = b.roots;
  return f;
}

SimResult run_sim(const RoadmapFile& roadmap, Scenario sc, const SimOptions& opt) {
  const GridMap map = load_scenario_map(sc, roadmap);
  if (sc.robot_radius && std::abs(*sc.robot_radius - roadmap.config.robot_radius) > 1e-12) {
    throw SimError("scenario robot_radius differs from the roadmap's");
  }
  sc.expand_random(map, opt.seed);
  sc.validate();
  if (opt.snapshot_dir) std::filesystem::create_directories(*opt.snapshot_dir);

  const double r = roadmap.config.robot_radius;
  RoadmapStore store = roadmap.make_store(r);
  NavGraph graph = NavGraph::build(store, r);
  store.take_events();

  SimResult res;
  Vec3 robot = sc.start;
  std::optional<PathResult> path;
  size_t seg = 0;  // robot lies on waypoint segment [seg, seg+1]
  double last_replan = -std::numeric_limits<double>::infinity();
  std::map<NodeId, double> changed_at;
  std::map<ObstacleId, OBB> last_pose;
  const double eps = 1e-9;

  const int last_tick = static_cast<int>(std::floor(sc.duration / sc.dt + eps));
  for (int k = 0; k <= last_tick; ++k) {
    const double t = k * sc.dt;
    TickRecord rec;
    rec.tick = k;
    rec.time = t;

    for (const ObstacleScript& o : sc.obstacles) {
      const OBB pose = o.pose_at(t);
      const auto prev = last_pose.find(o.id);
      if (prev != last_pose.end() && prev->second == pose) continue;
      const bool moved = prev != last_pose.end();
      const MotionResult m = store.apply_obstacle_motion(o.id, pose);
      last_pose[o.id] = pose;
      if (moved) res.metrics.add(k, EventKind::kRestoration, m.restored.size(), m.t_restore_ms * 1000.0);
      res.metrics.add(k, EventKind::kDecomposition, m.decomposed.size(), m.t_decompose_ms * 1000.0);
      const GraphUpdate g = graph.apply(store, m.events);
      size_t touched = 0;
      for (const StoreEvent& ev : m.events) {
        touched += 1 + ev.nodes.size();
        changed_at[ev.node] = t;
        for (NodeId n : ev.nodes) changed_at[n] = t;
      }
      res.metrics.add(k, EventKind::kGraphUpdate, touched, g.t_ms * 1000.0);
      store.take_events();
    }

    rec.safe = store.locate(robot).has_value() && !inside_any_box(store, robot);
    if (!rec.safe) ++res.violations;

    rec.had_path = path.has_value();
    if (path) {
      for (NodeId room : path->rooms) {
        const auto it = changed_at.find(room);
        if (it != changed_at.end() && it->second >= t - sc.replan_window - eps) rec.path_hit = true;
      }
    }
    rec.since_replan = t - last_replan;
    if ((!path || rec.path_hit) && rec.since_replan >= sc.dt - eps) {
      const auto t0 = std::chrono::steady_clock::now();
      path.reset();
      seg = 0;
      const auto from = store.locate(robot);
      const auto to = store.locate(sc.goal);
      if (from && to) path = astar(graph, *from, *to, robot, sc.goal);
      last_replan = t;
      rec.replanned = true;
      ++res.replans;
      res.metrics.add(k, EventKind::kReplan, path ? path->rooms.size() : 0, since_us(t0));
    }

    if (path) {
      double step = sc.robot_speed * sc.dt;
      const auto& w = path->waypoints;
      while (step > 0 && seg + 1 < w.size()) {
        const double d = (w[seg + 1] - robot).norm();
        if (d <= step) {
          robot = w[seg + 1];
          step -= d;
          ++seg;
        } else {
          robot += step * (w[seg + 1] - robot) / d;
          step = 0;
        }
      }
      if (seg + 1 == w.size()) res.reached_goal = true;
    }
    rec.robot = robot;
    res.ticks.push_back(rec);

    const bool want_snapshot =
        opt.snapshot_dir && (std::find(opt.snapshot_ticks.begin(), opt.snapshot_ticks.end(), k) !=
                                 opt.snapshot_ticks.end() ||
                             (res.reached_goal && std::find(opt.snapshot_ticks.begin(), opt.snapshot_ticks.end(),
                                                            -1) != opt.snapshot_ticks.end()));
    if (want_snapshot) {
      char name[40];
      std::snprintf(name, sizeof(name), "snapshot_%06d.json", k);
      const std::string file = (std::filesystem::path(*opt.snapshot_dir) / name).string();
      write_snapshot(file, {&store, &graph, path ? &*path : nullptr, robot, k, t});
      res.snapshots_written.push_back(file);
    }
    if (res.reached_goal) break;
  }
  res.final_robot = robot;
  return res;
}

std::string PlanOutcome::message() const {
  switch (status) {
    case PlanStatus::kOk: return "ok";
    case PlanStatus::kUnreachable: return "unreachable";
    case PlanStatus::kStartBlocked: return "start blocked by an obstacle";
    case PlanStatus::kStartUncovered: return "start uncovered by the roadmap";
    case PlanStatus::kGoalBlocked: return "goal blocked by an obstacle";
    case PlanStatus::kGoalUncovered: return "goal uncovered by the roadmap";
  }
  return "?";
}

PlanOutcome run_plan(const RoadmapFile& roadmap, const Vec3& start, const Vec3& goal,
                     const std::optional<Scenario>& scenario, double at) {
  RoadmapStore store = roadmap.make_store();
  if (scenario) {
    for (const ObstacleScript& o : scenario->obstacles) store.apply_obstacle_motion(o.id, o.pose_at(at));
  }
  PlanOutcome out;
  const auto s = store.locate(start);
  const auto g = store.locate(goal);
  if (!s) {
    out.status = store.locate_root(start) ? PlanStatus::kStartBlocked : PlanStatus::kStartUncovered;
    return out;
  }
  if (!g) {
    out.status = store.locate_root(goal) ? PlanStatus::kGoalBlocked : PlanStatus::kGoalUncovered;
    return out;
  }
  const NavGraph graph = NavGraph::build(store, roadmap.config.robot_radius);
  out.path = astar(graph, *s, *g, start, goal);
  out.status = out.path ? PlanStatus::kOk : PlanStatus::kUnreachable;
  return out;
}

}  // namespace polyroad
