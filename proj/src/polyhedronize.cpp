#include "polyroad/polyhedronize.hpp"

namespace polyroad {

GoodPolyThresholds BuildConfig::thresholds(const GridMap& map) const {
  const double res = map.resolution();
  return {min_radius.value_or(robot_radius), min_volume.value_or(8.0 * res * res * res)};
}

void BuildConfig::validate() const {
  if (!(rho_e > 0.0 && rho_e <= 1.0)) throw RegionError("rho_e must be in (0, 1]");
  if (max_samples < 0) throw RegionError("max_samples must be >= 0");
  if (robot_radius < 0) throw RegionError("robot radius must be >= 0");
  inflation.validate();
}

BuildResult polyhedronize(const GridMap& map, const BuildConfig& cfg) {
  cfg.validate();
  BuildResult out;
  out.thresholds = cfg.thresholds(map);
  const ObstacleField field(map);
  CoverageTracker coverage(map);
  Rng rng(cfg.rng_seed);

  while (coverage.rho() < cfg.rho_e && out.samples < cfg.max_samples) {
    const auto seed = coverage.sample_uncovered_free(map, rng);
    if (!seed) break;
    ++out.samples;
    HPolyhedron p = inflate_region(*seed, field, cfg.inflation);
    if (!is_good_poly(p, out.thresholds)) {
      ++out.rejected;
      continue;
    }
    coverage.update_ratio(map, p);
    out.roots.push_back(std::move(p));
  }
  out.rho = coverage.rho();
  return out;
}

}  // namespace polyroad
