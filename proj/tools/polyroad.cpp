// polyroad: build a convex-region roadmap from an occupancy grid, replay
// dynamic-obstacle scenarios against it, and plan single queries.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "polyroad/sim.hpp"

using namespace polyroad;

namespace {

Vec3 to_vec(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

std::vector<int> parse_ticks(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(item == "final" ? -1 : std::stoi(item));
  }
  return out;
}

void print_path(const PathResult& p) {
  std::printf("path %zu rooms, cost %.6f\n", p.rooms.size(), p.cost);
  // one record per waypoint: the room its outgoing segment runs through
  for (size_t i = 0; i < p.waypoints.size(); ++i) {
    const size_t room = std::min((i + 1) / 2, p.rooms.size() - 1);
    const Vec3& w = p.waypoints[i];
    std::printf("  %u %.6f %.6f %.6f\n", p.rooms[room], w.x(), w.y(), w.z());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polyroad: convex polyhedron roadmaps with dynamic obstacles"};
  app.require_subcommand(1);

  BuildConfig bcfg;
  std::string map_path, out_path;
  auto* build = app.add_subcommand("build", "Cover a grid map's free space with convex regions");
  build->add_option("--map", map_path, "Occupancy grid file")->required();
  build->add_option("--rho", bcfg.rho_e, "Target coverage ratio")->capture_default_str();
  build->add_option("--max-samples", bcfg.max_samples, "Seed budget")->capture_default_str();
  build->add_option("--seed", bcfg.rng_seed, "RNG seed")->capture_default_str();
  build->add_option("--radius", bcfg.robot_radius, "Robot radius (m)")->capture_default_str();
  build->add_option("--out", out_path, "Roadmap output (JSON)")->required();

  std::string roadmap_path, scenario_path, metrics_path, snapshot_dir, snapshot_ticks = "final";
  uint64_t sim_seed = 0;
  auto* sim = app.add_subcommand("sim", "Replay a dynamic-obstacle scenario");
  sim->add_option("--roadmap", roadmap_path, "Roadmap from `build`")->required();
  sim->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  sim->add_option("--metrics", metrics_path, "Metrics CSV output");
  sim->add_option("--snapshots", snapshot_dir, "Directory for snapshot JSON files");
  sim->add_option("--snapshot-ticks", snapshot_ticks, "Comma list of ticks; `final` for the last")
      ->capture_default_str();
  sim->add_option("--seed", sim_seed, "Seed for random obstacles")->capture_default_str();

  std::vector<double> start, goal;
  std::string obstacles_path;
  double at = 0.0;
  auto* plan = app.add_subcommand("plan", "Plan one query on a roadmap");
  plan->add_option("--roadmap", roadmap_path, "Roadmap from `build`")->required();
  plan->add_option("--start", start, "Start x y z")->expected(3)->required();
  plan->add_option("--goal", goal, "Goal x y z")->expected(3)->required();
  plan->add_option("--obstacles", obstacles_path, "Scenario whose obstacles are placed first");
  plan->add_option("--time", at, "Scenario time for obstacle poses (s)")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build) {
      const RoadmapFile f = run_build(map_path, bcfg);
      f.save(out_path);
      std::printf("roots %zu  rho %.4f  samples %d  rejected %d\n", f.roots.size(), f.rho, f.samples,
                  f.rejected);
      if (f.rho < bcfg.rho_e) std::printf("stopped by max-samples before reaching rho %.4f\n", bcfg.rho_e);
      return 0;
    }
    if (*sim) {
      const RoadmapFile rm = RoadmapFile::load(roadmap_path);
      SimOptions opt;
      opt.seed = sim_seed;
      if (!snapshot_dir.empty()) {
        opt.snapshot_dir = snapshot_dir;
        opt.snapshot_ticks = parse_ticks(snapshot_ticks);
      }
      const SimResult r = run_sim(rm, Scenario::load(scenario_path), opt);
      if (!metrics_path.empty()) {
        std::ofstream f(metrics_path);
        if (!f) throw IoError("cannot write " + metrics_path);
        f << r.metrics.csv();
      }
      std::printf("ticks %zu  replans %d  violations %d  reached_goal %s\n", r.ticks.size(), r.replans,
                  r.violations, r.reached_goal ? "yes" : "no");
      std::printf("robot %.6f %.6f %.6f\n", r.final_robot.x(), r.final_robot.y(), r.final_robot.z());
      std::fputs(r.metrics.summary_table().c_str(), stdout);
      return r.violations == 0 ? 0 : 3;
    }
    if (*plan) {
      const RoadmapFile rm = RoadmapFile::load(roadmap_path);
      std::optional<Scenario> sc;
      if (!obstacles_path.empty()) sc = Scenario::load(obstacles_path);
      const PlanOutcome o = run_plan(rm, to_vec(start), to_vec(goal), sc, at);
      if (o.status == PlanStatus::kOk) {
        print_path(*o.path);
        return 0;
      }
      std::printf("%s\n", o.message().c_str());
      return 2;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
