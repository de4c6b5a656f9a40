#include "polyroad/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

namespace polyroad {

using nlohmann::json;

namespace {

Vec3 vec(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw ScenarioError(std::string(what) + " must be a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json arr(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

double wrap_angle(double a) {
  a = std::fmod(a + std::numbers::pi, 2 * std::numbers::pi);
  if (a < 0) a += 2 * std::numbers::pi;
  return a - std::numbers::pi;
}

}  // namespace

OBB ObstacleScript::pose_at(double t) const {
  const auto& w = waypoints;
  if (t <= w.front().t) return OBB::from_yaw(w.front().center, w.front().yaw, half_extents);
  if (t >= w.back().t) return OBB::from_yaw(w.back().center, w.back().yaw, half_extents);
  size_t i = 0;
  while (w[i + 1].t < t) ++i;
  const double s = (t - w[i].t) / (w[i + 1].t - w[i].t);
  const Vec3 c = w[i].center + s * (w[i + 1].center - w[i].center);
  const double yaw = w[i].yaw + s * wrap_angle(w[i + 1].yaw - w[i].yaw);
  return OBB::from_yaw(c, yaw, half_extents);
}

void Scenario::validate() const {
  if (!(dt > 0)) throw ScenarioError("dt must be > 0");
  if (!(replan_window >= 0)) throw ScenarioError("replan_window must be >= 0");
  if (!(robot_speed > 0)) throw ScenarioError("robot_speed must be > 0");
  if (!(duration >= 0)) throw ScenarioError("duration must be >= 0");
  if (robot_radius && *robot_radius < 0) throw ScenarioError("robot_radius must be >= 0");
  std::vector<ObstacleId> ids;
  for (const auto& o : obstacles) {
    if (o.waypoints.empty()) throw ScenarioError("obstacle " + std::to_string(o.id) + " has no waypoints");
    if ((o.half_extents.array() <= 0).any()) throw ScenarioError("obstacle half_extents must be > 0");
    for (size_t i = 1; i < o.waypoints.size(); ++i) {
      if (!(o.waypoints[i].t > o.waypoints[i - 1].t))
        throw ScenarioError("obstacle " + std::to_string(o.id) + ": waypoint times must increase");
    }
    if (std::find(ids.begin(), ids.end(), o.id) != ids.end())
      throw ScenarioError("duplicate obstacle id " + std::to_string(o.id));
    ids.push_back(o.id);
  }
  if (random && (random->count < 0 || random->legs < 1 || !(random->speed > 0)))
    throw ScenarioError("random_obstacles: count >= 0, legs >= 1, speed > 0");
}

void Scenario::expand_random(const GridMap& map, uint64_t seed) {
  if (!random || random->count == 0) return;
  Rng rng(seed);
  const AABB b = map.bounds();
  const Vec3 margin = random->half_extents;
  std::uniform_real_distribution<double> ux(b.min.x() + margin.x(), b.max.x() - margin.x());
  std::uniform_real_distribution<double> uy(b.min.y() + margin.y(), b.max.y() - margin.y());
  std::uniform_real_distribution<double> yaw(-std::numbers::pi, std::numbers::pi);
  ObstacleId next = 0;
  for (const auto& o : obstacles) next = std::max(next, o.id + 1);
  for (int k = 0; k < random->count; ++k) {
    ObstacleScript o;
    o.id = next++;
    o.half_extents = random->half_extents;
    double t = 0.0;
    Vec3 c(ux(rng), uy(rng), random->z);
    o.waypoints.push_back({t, c, yaw(rng)});
    for (int leg = 0; leg < random->legs; ++leg) {
      const Vec3 n(ux(rng), uy(rng), random->z);
      t += std::max((n - c).norm() / random->speed, 1e-3);
      o.waypoints.push_back({t, n, yaw(rng)});
      c = n;
    }
    obstacles.push_back(std::move(o));
  }
  random.reset();
}

Scenario Scenario::parse(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("schema", 0) != 1) throw ScenarioError("unsupported scenario schema (expected 1)");
    Scenario s;
    const std::filesystem::path map = j.at("map").get<std::string>();
    s.map_path = map.is_absolute() ? map.string() : (std::filesystem::path(base_dir) / map).lexically_normal().string();
    if (j.contains("robot_radius")) s.robot_radius = j["robot_radius"].get<double>();
    s.start = vec(j.at("start"), "start");
    s.goal = vec(j.at("goal"), "goal");
    s.dt = j.value("dt", 0.1);
    s.replan_window = j.value("replan_window", 0.2);
    s.max_velocity = j.value("max_velocity", 1.0);
    s.robot_speed = j.value("robot_speed", s.max_velocity);
    s.duration = j.value("duration", 60.0);
    for (const auto& jo : j.value("obstacles", json::array())) {
      ObstacleScript o;
      o.id = jo.at("id").get<ObstacleId>();
      o.half_extents = vec(jo.at("half_extents"), "half_extents");
      for (const auto& jw : jo.at("waypoints")) {
        o.waypoints.push_back({jw.at("t").get<double>(), vec(jw.at("center"), "center"), jw.value("yaw", 0.0)});
      }
      s.obstacles.push_back(std::move(o));
    }
    if (j.contains("random_obstacles")) {
      const auto& jr = j["random_obstacles"];
      RandomObstacles r;
      r.count = jr.value("count", 0);
      if (jr.contains("half_extents")) r.half_extents = vec(jr["half_extents"], "half_extents");
      r.speed = jr.value("speed", 1.0);
      r.legs = jr.value("legs", 4);
      r.z = jr.value("z", 1.0);
      s.random = r;
    }
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("malformed scenario: ") + e.what());
  }
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ScenarioError("cannot read scenario: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string Scenario::to_json() const {
  json j{{"schema", 1},           {"map", map_path},         {"start", arr(start)},
         {"goal", arr(goal)},     {"dt", dt},                {"replan_window", replan_window},
         {"max_velocity", max_velocity}, {"robot_speed", robot_speed}, {"duration", duration}};
  if (robot_radius) j["robot_radius"] = *robot_radius;
  json obs = json::array();
  for (const auto& o : obstacles) {
    json w = json::array();
    for (const auto& p : o.waypoints) w.push_back({{"t", p.t}, {"center", arr(p.center)}, {"yaw", p.yaw}});
    obs.push_back({{"id", o.id}, {"half_extents", arr(o.half_extents)}, {"waypoints", w}});
  }
  j["obstacles"] = obs;
  if (random) {
    j["random_obstacles"] = {{"count", random->count}, {"half_extents", arr(random->half_extents)},
                             {"speed", random->speed}, {"legs", random->legs}, {"z", random->z}};
  }
  return j.dump(2) + "\n";
}

}  // namespace polyroad
