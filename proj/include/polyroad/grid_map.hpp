#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "polyroad/geom.hpp"

namespace polyroad {

class GridMapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Dims = std::array<int, 3>;
using Cell = std::array<int, 3>;
using Rng = std::mt19937_64;

/// Static occupancy grid. Cell (i,j,k) spans origin + [i,i+1)*resolution on
/// each axis; linear index is x fastest, then y, then z.
class GridMap {
 public:
  GridMap() = default;
  GridMap(const Vec3& origin, double resolution, const Dims& dims);

  const Vec3& origin() const { return origin_; }
  double resolution() const { return resolution_; }
  const Dims& dims() const { return dims_; }
  size_t cell_count() const { return occupancy_.size(); }
  size_t free_count() const;

  size_t linear(const Cell& c) const {
    return static_cast<size_t>(c[0]) +
           static_cast<size_t>(dims_[0]) * (static_cast<size_t>(c[1]) +
                                            static_cast<size_t>(dims_[1]) * c[2]);
  }
  Cell unravel(size_t idx) const;
  bool in_bounds(const Cell& c) const;

  bool occupied(size_t idx) const { return occupancy_[idx] != 0; }
  bool occupied(const Cell& c) const { return occupied(linear(c)); }
  void set_occupied(const Cell& c, bool occ) { occupancy_[linear(c)] = occ ? 1 : 0; }
  /// Marks every cell whose center lies in [lo, hi].
  void fill_box(const Vec3& lo, const Vec3& hi, bool occ = true);

  Vec3 cell_center(const Cell& c) const;
  AABB cell_box(const Cell& c) const;
  std::optional<Cell> cell_of(const Vec3& p) const;
  AABB bounds() const;
  HPolyhedron bounds_polyhedron() const;

  /// Occupied cell with at least one free 6-neighbour inside the map.
  bool is_surface(const Cell& c) const;

  /// FNV-1a over header values and occupancy; identifies a map in roadmap files.
  uint64_t fingerprint() const;

  static GridMap load(const std::string& path);
  void save(const std::string& path) const;
  static GridMap parse(const std::string& text);
  std::string serialize() const;

  friend bool operator==(const GridMap&, const GridMap&) = default;

 private:
  Vec3 origin_ = Vec3::Zero();
  double resolution_ = 1.0;
  Dims dims_{0, 0, 0};
  std::vector<uint8_t> occupancy_;
};

/// Covered set over the free cells and the ratio rho = covered / free.
class CoverageTracker {
 public:
  explicit CoverageTracker(const GridMap& map);

  double rho() const;
  size_t covered_count() const { return covered_count_; }
  size_t free_count() const { return free_count_; }
  bool covered(size_t idx) const { return covered_[idx] != 0; }
  size_t uncovered_count() const { return uncovered_.size(); }

  /// Center of a uniformly drawn uncovered free cell; nullopt once saturated.
  std::optional<Vec3> sample_uncovered_free(const GridMap& map, Rng& rng) const;

  /// Marks free cells whose centers lie in p; returns the new rho.
  double update_ratio(const GridMap& map, const HPolyhedron& p);

 private:
  void mark(size_t idx);

  std::vector<uint8_t> covered_;
  std::vector<uint32_t> uncovered_;   // free, not yet covered
  std::vector<int64_t> slot_;         // position in uncovered_, -1 if absent
  size_t covered_count_ = 0;
  size_t free_count_ = 0;
};

}  // namespace polyroad
