#include <doctest.h>

#include <filesystem>
#include <numbers>

#include "polyroad/sim.hpp"
#include "test_util.hpp"

using namespace polyroad;
namespace fs = std::filesystem;

namespace {

const std::string kData = POLYROAD_DATA_DIR;

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("polyroad_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const char* kMinimal = R"({"schema": 1, "map": "m.grid", "start": [0,0,0], "goal": [1,1,1]})";

BuildConfig two_chamber_cfg() {
  BuildConfig cfg;
  cfg.rng_seed = 42;
  cfg.robot_radius = 0.2;
  return cfg;
}

}  // namespace

TEST_CASE("scenario defaults and validation") {
  const Scenario s = Scenario::parse(kMinimal, "/base");
  CHECK(s.dt == 0.1);
  CHECK(s.replan_window == 0.2);
  CHECK(s.map_path == "/base/m.grid");
  CHECK(s.obstacles.empty());

  CHECK_THROWS_AS(Scenario::parse(R"({"schema": 2, "map": "m", "start": [0,0,0], "goal": [0,0,0]})"),
                  ScenarioError);
  CHECK_THROWS_AS(Scenario::parse(R"({"schema": 1, "map": "m", "start": [0,0], "goal": [0,0,0]})"),
                  ScenarioError);
  CHECK_THROWS_AS(
      Scenario::parse(R"({"schema": 1, "map": "m", "start": [0,0,0], "goal": [0,0,0], "dt": 0})"),
      ScenarioError);
  CHECK_THROWS_AS(Scenario::parse(R"({"schema": 1, "map": "m", "start": [0,0,0], "goal": [0,0,0],
      "obstacles": [{"id": 0, "half_extents": [1,1,1],
                     "waypoints": [{"t": 1, "center": [0,0,0]}, {"t": 1, "center": [1,0,0]}]}]})"),
                  ScenarioError);
  CHECK_THROWS_AS(Scenario::parse("{not json"), ScenarioError);
}

TEST_CASE("obstacle pose interpolation") {
  ObstacleScript o;
  o.half_extents = Vec3(1, 2, 3);
  o.waypoints = {{1.0, Vec3(0, 0, 0), 3.0}, {3.0, Vec3(2, 4, 0), -3.0}};
  CHECK(o.pose_at(0.0).center == Vec3(0, 0, 0));  // held before the script
  CHECK(o.pose_at(9.0).center == Vec3(2, 4, 0));  // and after it
  const OBB mid = o.pose_at(2.0);
  CHECK((mid.center - Vec3(1, 2, 0)).norm() < 1e-12);
  // 3.0 -> -3.0 goes the short way, through pi
  const double yaw = std::atan2(mid.rotation(1, 0), mid.rotation(0, 0));
  CHECK(std::abs(std::abs(yaw) - std::numbers::pi) < 1e-9);
  CHECK(mid.half_extents == Vec3(1, 2, 3));
}

TEST_CASE("random obstacles follow the seed") {
  const GridMap map = GridMap::load(kData + "/cluster.grid");
  Scenario base = Scenario::parse(
      R"({"schema": 1, "map": "m", "start": [0,0,0], "goal": [0,0,0],
          "obstacles": [{"id": 3, "half_extents": [1,1,1], "waypoints": [{"t": 0, "center": [5,5,1]}]}],
          "random_obstacles": {"count": 4, "speed": 1.0, "legs": 3}})");
  Scenario a = base, b = base, c = base;
  a.expand_random(map, 5);
  b.expand_random(map, 5);
  c.expand_random(map, 6);
  REQUIRE(a.obstacles.size() == 5);
  CHECK(a.obstacles[1].id == 4);
  CHECK(a.to_json() == b.to_json());
  CHECK(a.to_json() != c.to_json());
  CHECK_NOTHROW(a.validate());
}

TEST_CASE("roadmap file round trip is exact") {
  const RoadmapFile f = run_build(kData + "/two_chamber.grid", two_chamber_cfg());
  const RoadmapFile g = RoadmapFile::parse(f.to_json());
  REQUIRE(g.roots.size() == f.roots.size());
  for (size_t i = 0; i < f.roots.size(); ++i) CHECK(g.roots[i] == f.roots[i]);
  CHECK(g.map_fingerprint == f.map_fingerprint);
  CHECK(g.rho == f.rho);
  CHECK(g.to_json() == f.to_json());
  CHECK_THROWS_AS(RoadmapFile::parse("{}"), IoError);
}

TEST_CASE("build command") {
  SUBCASE("deterministic for a seed") {
    const auto a = run_build(kData + "/two_chamber.grid", two_chamber_cfg()).to_json();
    const auto b = run_build(kData + "/two_chamber.grid", two_chamber_cfg()).to_json();
    CHECK(a == b);
  }
  SUBCASE("rho 1.0 stops at the sample budget") {
    BuildConfig cfg;
    cfg.rho_e = 1.0;
    cfg.max_samples = 40;
    const RoadmapFile f = run_build(kData + "/cluster.grid", cfg);
    CHECK(f.samples == 40);
    CHECK(f.rho < 1.0);
  }
  SUBCASE("50 x 50 x 5 m map at 0.2 m") {
    const fs::path dir = scratch_dir("bigmap");
    GridMap big(Vec3::Zero(), 0.2, {250, 250, 25});
    big.fill_box(Vec3(20, 20, 0), Vec3(22, 22, 5));
    big.save((dir / "big.grid").string());
    BuildConfig cfg;
    cfg.max_samples = 3;
    const RoadmapFile f = run_build((dir / "big.grid").string(), cfg);
    CHECK(f.roots.size() >= 1);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(run_build(kData + "/missing.grid", BuildConfig{}), GridMapError);
    const fs::path dir = scratch_dir("full");
    GridMap full(Vec3::Zero(), 1.0, {2, 2, 2});
    full.fill_box(Vec3::Zero(), Vec3::Constant(2));
    full.save((dir / "full.grid").string());
    CHECK_THROWS_AS(run_build((dir / "full.grid").string(), BuildConfig{}), SimError);
  }
}

TEST_CASE("snapshot export and import") {
  SUBCASE("empty store") {
    const RoadmapStore s;
    const ImportedSnapshot i = import_snapshot(export_snapshot({&s, nullptr, nullptr, std::nullopt, 0, 0.0}));
    CHECK(i.active.empty());
    CHECK(i.edges.empty());
    CHECK(i.path_rooms.empty());
  }
  SUBCASE("one cube") {
    const RoadmapStore s({testing::unit_cube()}, 0.1, {});
    const ImportedSnapshot i = import_snapshot(export_snapshot({&s, nullptr, nullptr, std::nullopt, 3, 0.3}));
    REQUIRE(i.active.size() == 1);
    CHECK(i.tick == 3);
    CHECK(i.active.at(0).size() == 6);
    CHECK(i.vertices.at(0).size() == 8);
  }
  SUBCASE("round trip reproduces H-reps") {
    const RoadmapFile f = run_build(kData + "/two_chamber.grid", two_chamber_cfg());
    RoadmapStore s = f.make_store();
    s.apply_obstacle_motion(0, OBB::from_yaw(Vec3(3, 5, 1), 0.4, Vec3(0.4, 0.4, 1)));
    const NavGraph g = NavGraph::build(s, 0.2);
    const auto p = astar(g, *s.locate(Vec3(1, 1, 1)), *s.locate(Vec3(9, 9, 1)), Vec3(1, 1, 1), Vec3(9, 9, 1));
    REQUIRE(p);
    const ImportedSnapshot i = import_snapshot(export_snapshot({&s, &g, &*p, Vec3(1, 1, 1), 0, 0.0}));
    REQUIRE(i.active.size() == s.active().size());
    for (const auto& [id, shape] : i.active) CHECK(shape == s.node(id).shape());
    CHECK(i.edges.size() == g.edges().size());
    CHECK(i.path_rooms == p->rooms);
    CHECK(i.obstacles.at(0).center == Vec3(3, 5, 1));
  }
  SUBCASE("unwritable path") {
    const RoadmapStore s;
    CHECK_THROWS_AS(write_snapshot("/nonexistent-dir/x/snap.json", {&s, nullptr, nullptr, std::nullopt, 0, 0}),
                    IoError);
  }
}

TEST_CASE("metrics log") {
  MetricsLog m;
  m.add(0, EventKind::kDecomposition, 2, 1500.0);
  m.add(1, EventKind::kDecomposition, 1, 500.0);
  m.add(1, EventKind::kRestoration, 1, 100.0);
  m.add(1, EventKind::kReplan, 3, 10.0);
  const auto s = m.summary(EventKind::kDecomposition);
  CHECK(s.times == 2);
  CHECK(s.total_ms == doctest::Approx(2.0));
  CHECK(s.average_ms == doctest::Approx(1.0));
  CHECK(m.summary(EventKind::kGraphUpdate).times == 0);
  CHECK(m.csv() ==
        "tick,event,node_count,duration_us\n0,decomposition,2,1500.000\n1,decomposition,1,500.000\n"
        "1,restoration,1,100.000\n1,replan,3,10.000\n");
  CHECK(m.csv(false).find("1,replan,3,\n") != std::string::npos);
  CHECK(m.summary_table().find("Average(ms)") != std::string::npos);
}

TEST_CASE("sim command") {
  const RoadmapFile rm = run_build(kData + "/two_chamber.grid", two_chamber_cfg());
  const Scenario sc = Scenario::load(kData + "/two_chamber_scenario.json");

  SUBCASE("no obstacles") {
    Scenario empty = sc;
    empty.obstacles.clear();
    const SimResult r = run_sim(rm, empty, {});
    CHECK(r.metrics.summary(EventKind::kDecomposition).times == 0);
    CHECK(r.replans == 1);
    CHECK(r.reached_goal);
  }
  SUBCASE("obstacle crossing the corridor") {
    const fs::path dir = scratch_dir("snaps");
    SimOptions opt;
    opt.snapshot_dir = dir.string();
    opt.snapshot_ticks = {0, 5, -1};
    const SimResult r = run_sim(rm, sc, opt);
    CHECK(r.metrics.summary(EventKind::kDecomposition).times >= 1);
    CHECK(r.replans >= 2);
    CHECK(r.reached_goal);
    CHECK((r.final_robot - sc.goal).norm() < 1e-6);
    CHECK(r.violations == 0);
    CHECK(r.snapshots_written.size() == 3);
    for (const auto& t : r.ticks) {
      CHECK(t.safe);
      const bool expect = (!t.had_path || t.path_hit) && t.since_replan >= sc.dt - 1e-9;
      CHECK(t.replanned == expect);
    }
  }
  SUBCASE("map errors") {
    Scenario bad = sc;
    bad.map_path = kData + "/missing.grid";
    CHECK_THROWS_AS(run_sim(rm, bad, {}), SimError);
    bad.map_path = kData + "/sparse.grid";
    CHECK_THROWS_AS(run_sim(rm, bad, {}), SimError);
    Scenario wrong_r = sc;
    wrong_r.robot_radius = 0.5;
    CHECK_THROWS_AS(run_sim(rm, wrong_r, {}), SimError);
  }
}

TEST_CASE("plan command") {
  const RoadmapFile rm = run_build(kData + "/two_chamber.grid", two_chamber_cfg());
  SUBCASE("start equals goal") {
    const auto o = run_plan(rm, Vec3(2, 5, 1), Vec3(2, 5, 1));
    REQUIRE(o.status == PlanStatus::kOk);
    CHECK(o.path->rooms.size() == 1);
    CHECK(o.path->waypoints.size() == 2);
  }
  SUBCASE("across the doorway") {
    const auto o = run_plan(rm, Vec3(1, 1, 1), Vec3(9, 9, 1));
    REQUIRE(o.status == PlanStatus::kOk);
    CHECK(o.path->rooms.size() >= 2);
    CHECK(o.path->waypoints.front() == Vec3(1, 1, 1));
    CHECK(o.path->waypoints.back() == Vec3(9, 9, 1));
  }
  SUBCASE("blocked and uncovered") {
    const Scenario sc = Scenario::load(kData + "/two_chamber_scenario.json");
    CHECK(run_plan(rm, Vec3(2, 5, 1), Vec3(6.6, 5, 1), sc, 5.0).status == PlanStatus::kGoalBlocked);
    CHECK(run_plan(rm, Vec3(2, 5, 1), Vec3(50, 5, 1)).status == PlanStatus::kGoalUncovered);
    CHECK(run_plan(rm, Vec3(5, 1, 1), Vec3(2, 5, 1)).status == PlanStatus::kStartUncovered);  // inside the wall
  }
}
