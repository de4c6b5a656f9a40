#include "polyroad/grid_map.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace polyroad {

namespace {

constexpr const char* kMagic = "polyroad-grid";
constexpr int kFormatVersion = 1;

std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void expect_key(std::istream& in, const std::string& key) {
  std::string got;
  if (!(in >> got)) throw GridMapError("truncated grid header: missing '" + key + "'");
  if (got != key) throw GridMapError("malformed grid header: expected '" + key + "', got '" + got + "'");
}

}  // namespace

GridMap::GridMap(const Vec3& origin, double resolution, const Dims& dims)
    : origin_(origin), resolution_(resolution), dims_(dims) {
  if (!(resolution > 0)) throw GridMapError("resolution must be positive");
  for (int d : dims) {
    if (d <= 0) throw GridMapError("dims must be positive");
  }
  occupancy_.assign(static_cast<size_t>(dims[0]) * dims[1] * dims[2], 0);
}

size_t GridMap::free_count() const {
  size_t n = 0;
  for (uint8_t o : occupancy_) n += (o == 0);
  return n;
}

Cell GridMap::unravel(size_t idx) const {
  const size_t nx = dims_[0], ny = dims_[1];
  return {static_cast<int>(idx % nx), static_cast<int>((idx / nx) % ny),
          static_cast<int>(idx / (nx * ny))};
}

bool GridMap::in_bounds(const Cell& c) const {
  for (int k = 0; k < 3; ++k) {
    if (c[k] < 0 || c[k] >= dims_[k]) return false;
  }
  return true;
}

void GridMap::fill_box(const Vec3& lo, const Vec3& hi, bool occ) {
  Cell a{}, b{};
  for (int k = 0; k < 3; ++k) {
    a[k] = std::max(0, static_cast<int>(std::ceil((lo(k) - origin_(k)) / resolution_ - 0.5)));
    b[k] = std::min(dims_[k] - 1,
                    static_cast<int>(std::floor((hi(k) - origin_(k)) / resolution_ - 0.5)));
  }
  for (int z = a[2]; z <= b[2]; ++z)
    for (int y = a[1]; y <= b[1]; ++y)
      for (int x = a[0]; x <= b[0]; ++x) set_occupied({x, y, z}, occ);
}

Vec3 GridMap::cell_center(const Cell& c) const {
  return origin_ + resolution_ * Vec3(c[0] + 0.5, c[1] + 0.5, c[2] + 0.5);
}

AABB GridMap::cell_box(const Cell& c) const {
  const Vec3 lo = origin_ + resolution_ * Vec3(c[0], c[1], c[2]);
  return {lo, lo + Vec3::Constant(resolution_)};
}

std::optional<Cell> GridMap::cell_of(const Vec3& p) const {
  Cell c{};
  for (int k = 0; k < 3; ++k) {
    const double f = std::floor((p(k) - origin_(k)) / resolution_);
    if (!(f >= 0 && f < dims_[k])) return std::nullopt;
    c[k] = static_cast<int>(f);
  }
  return c;
}

AABB GridMap::bounds() const {
  return {origin_, origin_ + resolution_ * Vec3(dims_[0], dims_[1], dims_[2])};
}

HPolyhedron GridMap::bounds_polyhedron() const {
  const AABB b = bounds();
  return HPolyhedron::box(b.min, b.max);
}

bool GridMap::is_surface(const Cell& c) const {
  if (!occupied(c)) return false;
  for (int k = 0; k < 3; ++k) {
    for (int s : {-1, 1}) {
      Cell n = c;
      n[k] += s;
      if (in_bounds(n) && !occupied(n)) return true;
    }
  }
  return false;
}

uint64_t GridMap::fingerprint() const {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  mix(origin_.data(), sizeof(double) * 3);
  mix(&resolution_, sizeof(double));
  mix(dims_.data(), sizeof(int) * 3);
  mix(occupancy_.data(), occupancy_.size());
  return h;
}

std::string GridMap::serialize() const {
  std::ostringstream out;
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "resolution " << fmt_double(resolution_) << '\n';
  out << "dims " << dims_[0] << ' ' << dims_[1] << ' ' << dims_[2] << '\n';
  out << "origin " << fmt_double(origin_.x()) << ' ' << fmt_double(origin_.y()) << ' '
      << fmt_double(origin_.z()) << '\n';
  std::vector<std::pair<int, size_t>> runs;
  for (uint8_t o : occupancy_) {
    if (!runs.empty() && runs.back().first == o) {
      ++runs.back().second;
    } else {
      runs.emplace_back(o, 1);
    }
  }
  out << "runs " << runs.size() << '\n';
  for (const auto& [v, n] : runs) out << v << ' ' << n << '\n';
  return out.str();
}

GridMap GridMap::parse(const std::string& text) {
  std::istringstream in(text);
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic) throw GridMapError("not a polyroad grid file");
  if (version != kFormatVersion) throw GridMapError("unsupported grid version " + std::to_string(version));
  double res = 0;
  Dims dims{};
  Vec3 origin;
  expect_key(in, "resolution");
  if (!(in >> res)) throw GridMapError("malformed resolution");
  expect_key(in, "dims");
  if (!(in >> dims[0] >> dims[1] >> dims[2])) throw GridMapError("malformed dims");
  expect_key(in, "origin");
  if (!(in >> origin.x() >> origin.y() >> origin.z())) throw GridMapError("malformed origin");
  GridMap map(origin, res, dims);
  size_t nruns = 0;
  expect_key(in, "runs");
  if (!(in >> nruns)) throw GridMapError("malformed run count");
  size_t pos = 0;
  for (size_t r = 0; r < nruns; ++r) {
    int v = 0;
    size_t n = 0;
    if (!(in >> v >> n)) throw GridMapError("truncated occupancy runs");
    if (v != 0 && v != 1) throw GridMapError("occupancy values must be 0 or 1");
    if (pos + n > map.occupancy_.size()) throw GridMapError("occupancy longer than dims");
    std::fill_n(map.occupancy_.begin() + static_cast<std::ptrdiff_t>(pos), n, static_cast<uint8_t>(v));
    pos += n;
  }
  if (pos != map.occupancy_.size()) throw GridMapError("occupancy shorter than dims");
  return map;
}

GridMap GridMap::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw GridMapError("cannot read grid file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

void GridMap::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw GridMapError("cannot write grid file: " + path);
  f << serialize();
}

CoverageTracker::CoverageTracker(const GridMap& map)
    : covered_(map.cell_count(), 0), slot_(map.cell_count(), -1) {
  for (size_t i = 0; i < map.cell_count(); ++i) {
    if (map.occupied(i)) continue;
    slot_[i] = static_cast<int64_t>(uncovered_.size());
    uncovered_.push_back(static_cast<uint32_t>(i));
  }
  free_count_ = uncovered_.size();
}

double CoverageTracker::rho() const {
  return free_count_ == 0 ? 0.0 : static_cast<double>(covered_count_) / static_cast<double>(free_count_);
}

std::optional<Vec3> CoverageTracker::sample_uncovered_free(const GridMap& map, Rng& rng) const {
  if (uncovered_.empty()) return std::nullopt;
  std::uniform_int_distribution<size_t> pick(0, uncovered_.size() - 1);
  return map.cell_center(map.unravel(uncovered_[pick(rng)]));
}

void CoverageTracker::mark(size_t idx) {
  if (covered_[idx] || slot_[idx] < 0) return;
  covered_[idx] = 1;
  ++covered_count_;
  const auto s = static_cast<size_t>(slot_[idx]);
  const uint32_t last = uncovered_.back();
  uncovered_[s] = last;
  slot_[last] = static_cast<int64_t>(s);
  uncovered_.pop_back();
  slot_[idx] = -1;
}

double CoverageTracker::update_ratio(const GridMap& map, const HPolyhedron& p) {
  if (p.is_empty()) return rho();
  AABB box;
  try {
    box = bounding_box(enumerate_vertices(p));
  } catch (const GeometryError&) {
    return rho();
  }
  const double res = map.resolution();
  Cell lo{}, hi{};
  for (int k = 0; k < 3; ++k) {
    lo[k] = std::max(0, static_cast<int>(std::floor((box.min(k) - map.origin()(k)) / res - 0.5)));
    hi[k] = std::min(map.dims()[k] - 1,
                     static_cast<int>(std::ceil((box.max(k) - map.origin()(k)) / res - 0.5)));
  }
  for (int z = lo[2]; z <= hi[2]; ++z)
    for (int y = lo[1]; y <= hi[1]; ++y)
      for (int x = lo[0]; x <= hi[0]; ++x) {
        const Cell c{x, y, z};
        const size_t idx = map.linear(c);
        if (map.occupied(idx) || covered_[idx]) continue;
        if (contains_point(p, map.cell_center(c), 1e-9)) mark(idx);
      }
  return rho();
}

}  // namespace polyroad
