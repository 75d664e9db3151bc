#include "mwt/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>
#include <unordered_set>

namespace mwt {

int rope_cost(int n) {
  if (n <= 2) return 1;
  return static_cast<int>(std::ceil(std::log2(static_cast<double>(n))));
}

namespace {

constexpr double kPlaneTol = 1e-12;

double coord(Point p, int axis) { return axis == 0 ? p.x : p.y; }

int side_axis(int s) { return s / 2; }
bool side_is_max(int s) { return s % 2 == 1; }

/// Extent of a segment clipped to the cell along one axis.
std::pair<double, double> clipped_extent(const Segment& s, const Box& cell, int axis) {
  const auto c = clip_segment(s.a, s.b, cell);
  if (!c) {
    // touches within tolerance only; fall back to the clamped endpoints
    const double a = std::clamp(coord(s.a, axis), axis == 0 ? cell.lo.x : cell.lo.y, axis == 0 ? cell.hi.x : cell.hi.y);
    const double b = std::clamp(coord(s.b, axis), axis == 0 ? cell.lo.x : cell.lo.y, axis == 0 ? cell.hi.x : cell.hi.y);
    return {std::min(a, b), std::max(a, b)};
  }
  const double a = coord(lerp(s.a, s.b, c->first), axis);
  const double b = coord(lerp(s.a, s.b, c->second), axis);
  return {std::min(a, b), std::max(a, b)};
}

Box child_cell(const Box& cell, int axis, double split, bool right) {
  Box b = cell;
  if (axis == 0) {
    (right ? b.lo.x : b.hi.x) = split;
  } else {
    (right ? b.lo.y : b.hi.y) = split;
  }
  return b;
}

}  // namespace

RopedKdTree RopedKdTree::build(const Scene& scene, double c_t, int max_depth) {
  RopedKdTree kd;
  kd.c_t_ = c_t;
  std::vector<int> ids;
  for (std::size_t i = 0; i < scene.segments.size(); ++i) {
    if (scene.segments[i].kind == SegKind::Geometry) ids.push_back(static_cast<int>(i));
  }
  kd.build_node(scene, scene.box, std::move(ids), 0, max_depth);
  kd.attach_ropes(0, {-1, -1, -1, -1});
  return kd;
}

int RopedKdTree::build_node(const Scene& scene, const Box& cell, std::vector<int> ids, int depth, int max_depth) {
  const int me = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  nodes_[static_cast<std::size_t>(me)].cell = cell;
  const int n = static_cast<int>(ids.size());
  auto make_leaf = [&] {
    auto& nd = nodes_[static_cast<std::size_t>(me)];
    nd.first = static_cast<int>(prims_.size());
    nd.count = n;
    prims_.insert(prims_.end(), ids.begin(), ids.end());
    return me;
  };
  if (n == 0 || depth >= max_depth) return make_leaf();

  const double p_parent = cell.perimeter();
  double best_cost = std::numeric_limits<double>::infinity();
  int best_axis = -1;
  double best_split = 0.0;
  for (int axis = 0; axis < 2; ++axis) {
    const double lo = axis == 0 ? cell.lo.x : cell.lo.y;
    const double hi = axis == 0 ? cell.hi.x : cell.hi.y;
    std::vector<double> mins, maxs, cand;
    mins.reserve(ids.size());
    maxs.reserve(ids.size());
    for (int id : ids) {
      const Segment& s = scene.segments[static_cast<std::size_t>(id)];
      const auto [mn, mx] = clipped_extent(s, cell, axis);
      mins.push_back(mn);
      maxs.push_back(mx);
      for (Point q : {s.a, s.b}) {
        const double v = coord(q, axis);
        if (v > lo && v < hi) cand.push_back(v);
      }
    }
    std::sort(mins.begin(), mins.end());
    std::sort(maxs.begin(), maxs.end());
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    for (double c : cand) {
      const int nl = static_cast<int>(std::upper_bound(mins.begin(), mins.end(), c + kPlaneTol) - mins.begin());
      const int nr = static_cast<int>(maxs.end() - std::lower_bound(maxs.begin(), maxs.end(), c - kPlaneTol));
      const double pl = child_cell(cell, axis, c, false).perimeter();
      const double pr = child_cell(cell, axis, c, true).perimeter();
      const double cost = c_t_ + (pl * nl + pr * nr) / p_parent;
      if (cost < best_cost) {
        best_cost = cost;
        best_axis = axis;
        best_split = c;
      }
    }
  }
  if (best_axis < 0 || best_cost >= static_cast<double>(n)) return make_leaf();

  std::vector<int> left_ids, right_ids;
  for (int id : ids) {
    const auto [mn, mx] = clipped_extent(scene.segments[static_cast<std::size_t>(id)], cell, best_axis);
    if (mn <= best_split + kPlaneTol) left_ids.push_back(id);
    if (mx >= best_split - kPlaneTol) right_ids.push_back(id);
  }
  const Box lc = child_cell(cell, best_axis, best_split, false);
  const Box rc = child_cell(cell, best_axis, best_split, true);
  ids.clear();
  ids.shrink_to_fit();
  const int l = build_node(scene, lc, std::move(left_ids), depth + 1, max_depth);
  const int r = build_node(scene, rc, std::move(right_ids), depth + 1, max_depth);
  auto& nd = nodes_[static_cast<std::size_t>(me)];
  nd.left = l;
  nd.right = r;
  nd.axis = best_axis;
  nd.split = best_split;
  return me;
}

void RopedKdTree::attach_ropes(int node, std::array<int, 4> ropes) {
  Node& nd = nodes_[static_cast<std::size_t>(node)];
  if (!nd.leaf()) {
    const int l = nd.left, r = nd.right, a = nd.axis;
    auto lr = ropes, rr = ropes;
    lr[static_cast<std::size_t>(2 * a + 1)] = r;
    rr[static_cast<std::size_t>(2 * a)] = l;
    attach_ropes(l, lr);
    attach_ropes(r, rr);
    return;
  }
  const Box cell = nd.cell;
  for (int s = 0; s < 4; ++s) {
    int t = ropes[static_cast<std::size_t>(s)];
    if (t < 0) {
      nd.rope[static_cast<std::size_t>(s)] = -1;
      nd.rope_cost[static_cast<std::size_t>(s)] = 0;
      continue;
    }
    const int fa = side_axis(s);
    const bool mx = side_is_max(s);
    const double face = fa == 0 ? (mx ? cell.hi.x : cell.lo.x) : (mx ? cell.hi.y : cell.lo.y);
    const double lo = fa == 0 ? cell.lo.y : cell.lo.x;
    const double hi = fa == 0 ? cell.hi.y : cell.hi.x;
    // shrink to the smallest subtree that still covers the whole face
    for (;;) {
      const Node& tn = nodes_[static_cast<std::size_t>(t)];
      if (tn.leaf()) break;
      if (tn.axis == fa) {
        t = mx ? tn.left : tn.right;
      } else if (tn.split >= hi) {
        t = tn.left;
      } else if (tn.split <= lo) {
        t = tn.right;
      } else {
        break;
      }
    }
    // leaves behind the rope that share a stretch of the face
    int n = 0;
    std::vector<int> stack{t};
    while (!stack.empty()) {
      const Node& q = nodes_[static_cast<std::size_t>(stack.back())];
      stack.pop_back();
      if (!q.leaf()) {
        stack.push_back(q.left);
        stack.push_back(q.right);
        continue;
      }
      const double qf = fa == 0 ? (mx ? q.cell.lo.x : q.cell.hi.x) : (mx ? q.cell.lo.y : q.cell.hi.y);
      const double qlo = fa == 0 ? q.cell.lo.y : q.cell.lo.x;
      const double qhi = fa == 0 ? q.cell.hi.y : q.cell.hi.x;
      if (qf == face && std::min(hi, qhi) > std::max(lo, qlo)) ++n;
    }
    nd.rope[static_cast<std::size_t>(s)] = t;
    nd.rope_cost[static_cast<std::size_t>(s)] = rope_cost(std::max(1, n));
  }
}

int RopedKdTree::descend(int node, Point p, Point dir, TraversalStats* stats) const {
  while (!nodes_[static_cast<std::size_t>(node)].leaf()) {
    const Node& nd = nodes_[static_cast<std::size_t>(node)];
    if (stats) ++stats->kd_nodes_visited;
    const double v = coord(p, nd.axis);
    if (v < nd.split) {
      node = nd.left;
    } else if (v > nd.split) {
      node = nd.right;
    } else {
      node = coord(dir, nd.axis) > 0.0 ? nd.right : nd.left;
    }
  }
  return node;
}

int RopedKdTree::leaf_at(Point p, Point dir) const { return descend(0, p, dir, nullptr); }

std::optional<Hit> RopedKdTree::intersect(const Scene& scene, const Ray& r, TraversalStats* stats) const {
  std::optional<Hit> best;
  if (nodes_.empty()) return best;
  int leaf = leaf_at(r.origin, r.dir);
  if (stats) ++stats->kd_nodes_visited;
  std::unordered_set<int> tested;
  const std::size_t guard = 4 * nodes_.size() + 8;
  for (std::size_t step = 0; step < guard; ++step) {
    const Node& nd = nodes_[static_cast<std::size_t>(leaf)];
    for (int i = nd.first; i < nd.first + nd.count; ++i) {
      const int id = prims_[static_cast<std::size_t>(i)];
      if (!tested.insert(id).second) continue;
      if (stats) ++stats->kd_prim_tests;
      keep_closest(best, intersect_segment(scene, id, r));
    }
    double tx = std::numeric_limits<double>::infinity(), ty = tx;
    int sx = -1, sy = -1;
    if (r.dir.x > 0.0) {
      tx = (nd.cell.hi.x - r.origin.x) / r.dir.x;
      sx = static_cast<int>(Side::XMax);
    } else if (r.dir.x < 0.0) {
      tx = (nd.cell.lo.x - r.origin.x) / r.dir.x;
      sx = static_cast<int>(Side::XMin);
    }
    if (r.dir.y > 0.0) {
      ty = (nd.cell.hi.y - r.origin.y) / r.dir.y;
      sy = static_cast<int>(Side::YMax);
    } else if (r.dir.y < 0.0) {
      ty = (nd.cell.lo.y - r.origin.y) / r.dir.y;
      sy = static_cast<int>(Side::YMin);
    }
    const double t_exit = std::min(tx, ty);
    const int side = tx <= ty ? sx : sy;
    if (best && best->t <= t_exit) return best;
    const int target = nd.rope[static_cast<std::size_t>(side)];
    if (target < 0) return best;
    if (stats) stats->kd_rope_steps += static_cast<std::uint64_t>(nd.rope_cost[static_cast<std::size_t>(side)]);
    Point p = r.at(t_exit);
    // pin the exit coordinate onto the face so rounding cannot send the descent backwards
    if (side_axis(side) == 0) {
      p.x = side_is_max(side) ? nd.cell.hi.x : nd.cell.lo.x;
    } else {
      p.y = side_is_max(side) ? nd.cell.hi.y : nd.cell.lo.y;
    }
    leaf = descend(target, p, r.dir, stats);
    if (stats) ++stats->kd_nodes_visited;
  }
  throw TraversalError("kd-tree walk did not terminate");
}

std::size_t RopedKdTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.leaf(); }));
}

bool RopedKdTree::check(const Scene& scene) const {
  if (nodes_.empty()) return false;
  std::set<double> xs, ys;
  for (const auto& s : scene.segments) {
    if (s.kind != SegKind::Geometry) continue;
    xs.insert(s.a.x);
    xs.insert(s.b.x);
    ys.insert(s.a.y);
    ys.insert(s.b.y);
  }
  const Box& root = nodes_[0].cell;
  double area = 0.0;
  for (const auto& n : nodes_) {
    if (!root.contains(n.cell)) return false;
    if (n.leaf()) {
      area += n.cell.width() * n.cell.height();
      std::unordered_set<int> listed(prims_.begin() + n.first, prims_.begin() + n.first + n.count);
      for (std::size_t i = 0; i < scene.segments.size(); ++i) {
        const auto& s = scene.segments[i];
        if (s.kind != SegKind::Geometry) continue;
        const auto c = clip_segment(s.a, s.b, n.cell);
        if (c && !listed.count(static_cast<int>(i))) return false;
      }
      continue;
    }
    if (!(n.axis == 0 ? xs.count(n.split) : ys.count(n.split))) return false;
    const Box& l = nodes_[static_cast<std::size_t>(n.left)].cell;
    const Box& r = nodes_[static_cast<std::size_t>(n.right)].cell;
    if (!n.cell.contains(l) || !n.cell.contains(r)) return false;
  }
  const double total = root.width() * root.height();
  return std::fabs(area - total) <= 1e-12 * std::max(1.0, total);
}

void RopedKdTree::dump(std::ostream& os) const {
  os << "kdtree nodes " << nodes_.size() << " c_t " << c_t_ << '\n';
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    os << i << " box " << n.cell.lo.x << ' ' << n.cell.lo.y << ' ' << n.cell.hi.x << ' ' << n.cell.hi.y;
    if (n.leaf()) {
      os << " leaf";
      for (int k = n.first; k < n.first + n.count; ++k) os << ' ' << prims_[static_cast<std::size_t>(k)];
      os << " ropes";
      for (int s = 0; s < 4; ++s) os << ' ' << n.rope[static_cast<std::size_t>(s)] << ':' << n.rope_cost[static_cast<std::size_t>(s)];
    } else {
      os << " split " << (n.axis == 0 ? 'x' : 'y') << ' ' << n.split << " children " << n.left << ' ' << n.right;
    }
    os << '\n';
  }
}

}  // namespace mwt
