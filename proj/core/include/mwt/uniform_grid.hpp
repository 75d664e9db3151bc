#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "mwt/geometry.hpp"

namespace mwt {

/// Bucketed point set over a regular grid, updated in place as points move.
class UniformGrid {
 public:
  explicit UniformGrid(double cell_size = 0.05);

  double cell_size() const { return cell_; }
  std::size_t size() const { return count_; }

  void insert(std::int32_t id, Point p);
  void remove(std::int32_t id);
  void move(std::int32_t id, Point p);
  bool contains(std::int32_t id) const;
  Point position(std::int32_t id) const { return pos_[static_cast<std::size_t>(id)]; }

  /// Ids within distance <= radius of center (boundary inclusive). Order is unspecified.
  void query(Point center, double radius, std::vector<std::int32_t>& out) const;
  std::vector<std::int32_t> query(Point center, double radius) const;

  /// Re-buckets everything with a new cell size.
  void rebuild(double cell_size);

  /// Rebuilds when the wanted cell size differs from the current one by more than 2x.
  bool maybe_rebuild(double wanted_cell_size);

  /// Every stored id sits in the bucket of its position, exactly once.
  bool check_consistency() const;

 private:
  using Key = std::uint64_t;
  Key key_of(Point p) const;
  static Key pack(std::int64_t ix, std::int64_t iy);

  double cell_;
  std::size_t count_ = 0;
  std::unordered_map<Key, std::vector<std::int32_t>> buckets_;
  std::vector<Point> pos_;
  std::vector<std::uint8_t> present_;
};

}  // namespace mwt
