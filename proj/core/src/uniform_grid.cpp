#include "mwt/uniform_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mwt {

UniformGrid::UniformGrid(double cell_size) : cell_(cell_size) {
  if (!(cell_size > 0.0)) throw std::invalid_argument("grid cell size must be positive");
}

UniformGrid::Key UniformGrid::pack(std::int64_t ix, std::int64_t iy) {
  return (static_cast<Key>(static_cast<std::uint32_t>(ix)) << 32) | static_cast<std::uint32_t>(iy);
}

UniformGrid::Key UniformGrid::key_of(Point p) const {
  return pack(static_cast<std::int64_t>(std::floor(p.x / cell_)), static_cast<std::int64_t>(std::floor(p.y / cell_)));
}

bool UniformGrid::contains(std::int32_t id) const {
  return id >= 0 && static_cast<std::size_t>(id) < present_.size() && present_[static_cast<std::size_t>(id)];
}

void UniformGrid::insert(std::int32_t id, Point p) {
  if (id < 0) throw std::invalid_argument("negative grid id");
  const auto i = static_cast<std::size_t>(id);
  if (i >= pos_.size()) {
    pos_.resize(i + 1);
    present_.resize(i + 1, 0);
  }
  if (present_[i]) {
    move(id, p);
    return;
  }
  pos_[i] = p;
  present_[i] = 1;
  buckets_[key_of(p)].push_back(id);
  ++count_;
}

void UniformGrid::remove(std::int32_t id) {
  if (!contains(id)) return;
  const auto i = static_cast<std::size_t>(id);
  auto it = buckets_.find(key_of(pos_[i]));
  auto& b = it->second;
  auto pos = std::find(b.begin(), b.end(), id);
  *pos = b.back();
  b.pop_back();
  if (b.empty()) buckets_.erase(it);
  present_[i] = 0;
  --count_;
}

void UniformGrid::move(std::int32_t id, Point p) {
  if (!contains(id)) {
    insert(id, p);
    return;
  }
  const auto i = static_cast<std::size_t>(id);
  const Key from = key_of(pos_[i]);
  const Key to = key_of(p);
  pos_[i] = p;
  if (from == to) return;
  auto it = buckets_.find(from);
  auto& b = it->second;
  auto pos = std::find(b.begin(), b.end(), id);
  *pos = b.back();
  b.pop_back();
  if (b.empty()) buckets_.erase(it);
  buckets_[to].push_back(id);
}

void UniformGrid::query(Point center, double radius, std::vector<std::int32_t>& out) const {
  out.clear();
  if (radius < 0.0 || count_ == 0) return;
  const auto x0 = static_cast<std::int64_t>(std::floor((center.x - radius) / cell_));
  const auto x1 = static_cast<std::int64_t>(std::floor((center.x + radius) / cell_));
  const auto y0 = static_cast<std::int64_t>(std::floor((center.y - radius) / cell_));
  const auto y1 = static_cast<std::int64_t>(std::floor((center.y + radius) / cell_));
  const double r2 = radius * radius;
  for (std::int64_t ix = x0; ix <= x1; ++ix) {
    for (std::int64_t iy = y0; iy <= y1; ++iy) {
      auto it = buckets_.find(pack(ix, iy));
      if (it == buckets_.end()) continue;
      for (std::int32_t id : it->second) {
        if (dist2(pos_[static_cast<std::size_t>(id)], center) <= r2) out.push_back(id);
      }
    }
  }
}

std::vector<std::int32_t> UniformGrid::query(Point center, double radius) const {
  std::vector<std::int32_t> out;
  query(center, radius, out);
  return out;
}

void UniformGrid::rebuild(double cell_size) {
  if (!(cell_size > 0.0)) throw std::invalid_argument("grid cell size must be positive");
  cell_ = cell_size;
  buckets_.clear();
  for (std::size_t i = 0; i < pos_.size(); ++i) {
    if (present_[i]) buckets_[key_of(pos_[i])].push_back(static_cast<std::int32_t>(i));
  }
}

bool UniformGrid::maybe_rebuild(double wanted_cell_size) {
  if (wanted_cell_size > 2.0 * cell_ || wanted_cell_size < 0.5 * cell_) {
    rebuild(wanted_cell_size);
    return true;
  }
  return false;
}

bool UniformGrid::check_consistency() const {
  std::size_t seen = 0;
  std::vector<std::uint8_t> hit(pos_.size(), 0);
  for (const auto& [key, ids] : buckets_) {
    for (std::int32_t id : ids) {
      if (!contains(id)) return false;
      const auto i = static_cast<std::size_t>(id);
      if (hit[i]) return false;
      hit[i] = 1;
      if (key_of(pos_[i]) != key) return false;
      ++seen;
    }
  }
  return seen == count_;
}

}  // namespace mwt
