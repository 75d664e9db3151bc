#include "mwt/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace mwt {

double sah_split_cost(double c_t, double p_parent, double p_left, int n_left, double p_right, int n_right) {
  return c_t + (p_left * n_left + p_right * n_right) / p_parent;
}

namespace {

/// Segment bounds padded by a relative hair so that grazing hits at endpoints are not lost to rounding.
Box seg_box(const Segment& s) {
  Box b = Box::of(s.a, s.b);
  const double pad = 1e-12 * std::max({1.0, std::fabs(b.lo.x), std::fabs(b.lo.y), std::fabs(b.hi.x), std::fabs(b.hi.y)});
  b.lo = b.lo - Point{pad, pad};
  b.hi = b.hi + Point{pad, pad};
  return b;
}

double centroid(const Segment& s, int axis) { return axis == 0 ? 0.5 * (s.a.x + s.b.x) : 0.5 * (s.a.y + s.b.y); }

}  // namespace

Bvh Bvh::build(const Scene& scene, double c_t) {
  Bvh b;
  b.c_t_ = c_t;
  std::vector<int> ids;
  for (std::size_t i = 0; i < scene.segments.size(); ++i) {
    if (scene.segments[i].kind == SegKind::Geometry) ids.push_back(static_cast<int>(i));
  }
  b.num_geometry_ = ids.size();
  b.nodes_.reserve(2 * ids.size() + 1);
  b.build_node(scene, ids, 0, static_cast<int>(ids.size()));
  b.prims_ = std::move(ids);
  return b;
}

int Bvh::build_node(const Scene& scene, std::vector<int>& ids, int first, int count) {
  const int me = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Box box;
  for (int i = first; i < first + count; ++i) box.expand(seg_box(scene.segments[static_cast<std::size_t>(ids[static_cast<std::size_t>(i)])]));
  nodes_[static_cast<std::size_t>(me)].box = box;
  nodes_[static_cast<std::size_t>(me)].first = first;
  nodes_[static_cast<std::size_t>(me)].count = count;
  if (count <= 1) return me;

  const double p_parent = box.perimeter();
  auto begin = ids.begin() + first;
  auto end = begin + count;
  auto sort_axis = [&](int axis) {
    std::sort(begin, end, [&](int a, int b) {
      const double ca = centroid(scene.segments[static_cast<std::size_t>(a)], axis);
      const double cb = centroid(scene.segments[static_cast<std::size_t>(b)], axis);
      return ca != cb ? ca < cb : a < b;
    });
  };
  double best_cost = std::numeric_limits<double>::infinity();
  int best_axis = -1, best_k = -1;
  std::vector<double> suffix(static_cast<std::size_t>(count) + 1);
  for (int axis = 0; axis < 2; ++axis) {
    sort_axis(axis);
    Box acc;
    suffix[static_cast<std::size_t>(count)] = 0.0;
    for (int k = count - 1; k >= 0; --k) {
      acc.expand(seg_box(scene.segments[static_cast<std::size_t>(*(begin + k))]));
      suffix[static_cast<std::size_t>(k)] = acc.perimeter();
    }
    Box left;
    for (int k = 1; k < count; ++k) {
      left.expand(seg_box(scene.segments[static_cast<std::size_t>(*(begin + k - 1))]));
      const double c = p_parent > 0.0
                           ? sah_split_cost(c_t_, p_parent, left.perimeter(), k, suffix[static_cast<std::size_t>(k)], count - k)
                           : std::numeric_limits<double>::infinity();
      if (c < best_cost) {
        best_cost = c;
        best_axis = axis;
        best_k = k;
      }
    }
  }
  if (best_axis < 0 || best_cost >= static_cast<double>(count)) return me;
  sort_axis(best_axis);
  const int l = build_node(scene, ids, first, best_k);
  const int r = build_node(scene, ids, first + best_k, count - best_k);
  auto& n = nodes_[static_cast<std::size_t>(me)];
  n.left = l;
  n.right = r;
  n.axis = best_axis;
  return me;
}

std::optional<Hit> Bvh::intersect(const Scene& scene, const Ray& r, TraversalStats* stats) const {
  std::optional<Hit> best;
  if (nodes_.empty()) return best;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int ni = stack.back();
    stack.pop_back();
    const Node& n = nodes_[static_cast<std::size_t>(ni)];
    if (stats) ++stats->bvh_node_tests;
    const double tmax = best ? best->t : std::numeric_limits<double>::infinity();
    if (!ray_box_entry(r, n.box, 0.0, tmax)) continue;
    if (n.leaf()) {
      for (int i = n.first; i < n.first + n.count; ++i) {
        if (stats) ++stats->bvh_prim_tests;
        keep_closest(best, intersect_segment(scene, prims_[static_cast<std::size_t>(i)], r));
      }
      continue;
    }
    const double d = n.axis == 0 ? r.dir.x : r.dir.y;
    stack.push_back(d >= 0.0 ? n.right : n.left);
    stack.push_back(d >= 0.0 ? n.left : n.right);
  }
  return best;
}

std::size_t Bvh::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.leaf(); }));
}

bool Bvh::check() const {
  std::vector<int> seen;
  for (const auto& n : nodes_) {
    if (n.leaf()) {
      for (int i = n.first; i < n.first + n.count; ++i) seen.push_back(prims_[static_cast<std::size_t>(i)]);
    } else {
      if (!n.box.contains(nodes_[static_cast<std::size_t>(n.left)].box)) return false;
      if (!n.box.contains(nodes_[static_cast<std::size_t>(n.right)].box)) return false;
    }
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) return false;
  return seen.size() == num_geometry_;
}

void Bvh::dump(std::ostream& os) const {
  os << "bvh nodes " << nodes_.size() << " c_t " << c_t_ << '\n';
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    os << i << " box " << n.box.lo.x << ' ' << n.box.lo.y << ' ' << n.box.hi.x << ' ' << n.box.hi.y;
    if (n.leaf()) {
      os << " leaf";
      for (int k = n.first; k < n.first + n.count; ++k) os << ' ' << prims_[static_cast<std::size_t>(k)];
    } else {
      os << " children " << n.left << ' ' << n.right;
    }
    os << '\n';
  }
}

}  // namespace mwt
