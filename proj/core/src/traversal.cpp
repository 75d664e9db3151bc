#include "mwt/traversal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mwt {

TraversalStats& TraversalStats::operator+=(const TraversalStats& o) {
  tri_steps += o.tri_steps;
  bvh_node_tests += o.bvh_node_tests;
  bvh_prim_tests += o.bvh_prim_tests;
  kd_nodes_visited += o.kd_nodes_visited;
  kd_rope_steps += o.kd_rope_steps;
  kd_prim_tests += o.kd_prim_tests;
  return *this;
}

std::optional<Hit> intersect_segment(const Scene& scene, int seg, const Ray& r) {
  const auto h = ray_segment_intersect(r, scene.segments[static_cast<std::size_t>(seg)]);
  if (!h) return std::nullopt;
  return Hit{seg, h->t, r.at(h->t)};
}

std::optional<Hit> brute_force_closest(const Scene& scene, const Ray& r) {
  std::optional<Hit> best;
  for (std::size_t i = 0; i < scene.segments.size(); ++i) {
    if (scene.segments[i].kind != SegKind::Geometry) continue;
    keep_closest(best, intersect_segment(scene, static_cast<int>(i), r));
  }
  return best;
}

namespace {

/// Corner whose opposite edge the ray leaves through: its CCW start vertex is right of the ray, its end left.
int exit_corner(const Triangulation& t, const Triangle& T, const Ray& r, int entry) {
  bool left[3];
  for (int k = 0; k < 3; ++k) left[k] = cross(r.dir, t.pos(T.v[static_cast<std::size_t>(k)]) - r.origin) >= 0.0;
  for (int i = 0; i < 3; ++i) {
    if (i == entry) continue;
    if (!left[next3(i)] && left[prev3(i)]) return i;
  }
  return -1;
}

}  // namespace

std::optional<Hit> traverse_triangulation(const Triangulation& t, const Scene& scene, const Ray& r, TId start_tri,
                                          TraversalStats* stats) {
  const auto& info = t.info();
  TId cur = start_tri;
  int entry = -1;
  const std::size_t guard = 3 * t.triangle_capacity() + 8;
  for (std::size_t step = 0; step < guard; ++step) {
    if (stats) ++stats->tri_steps;
    const Triangle& T = t.tri(cur);
    const int i = exit_corner(t, T, r, entry);
    if (i < 0) throw TraversalError("no exit edge from triangle " + std::to_string(cur));
    const int seg = T.seg[static_cast<std::size_t>(i)];
    if (seg != kNone) {
      if (!scene.is_geometry(seg)) return std::nullopt;
      std::optional<Hit> best = intersect_segment(scene, seg, r);
      // segments sharing an endpoint with this edge can tie at the same t
      for (int k : {next3(i), prev3(i)}) {
        const Vertex& v = t.vertex(T.v[static_cast<std::size_t>(k)]);
        if (v.dof != Dof::Fixed || v.host == kNone) continue;
        for (int s : info.point_segments[static_cast<std::size_t>(v.host)]) {
          if (s != seg && scene.is_geometry(s)) keep_closest(best, intersect_segment(scene, s, r));
        }
      }
      if (best) return best;
      // numerical graze past the end of the segment: keep walking
    }
    const auto tw = t.twin(EdgeRef{cur, i});
    if (!tw) return std::nullopt;
    cur = tw->t;
    entry = tw->i;
  }
  throw TraversalError("traversal did not terminate (cycle guard)");
}

// ---------------------------------------------------------------------------

bool triangle_contains(const Triangulation& t, TId tri, Point p) {
  const auto& T = t.tri(tri);
  for (int k = 0; k < 3; ++k) {
    if (orient2d_value(t.pos(T.v[static_cast<std::size_t>(k)]), t.pos(T.v[static_cast<std::size_t>(next3(k))]), p) < 0.0)
      return false;
  }
  return true;
}

namespace {

double point_triangle_distance(const Triangulation& t, TId tri, Point p) {
  if (triangle_contains(t, tri, p)) return 0.0;
  const auto& T = t.tri(tri);
  double d = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    d = std::min(d, point_segment_distance(p, t.pos(T.v[static_cast<std::size_t>(k)]), t.pos(T.v[static_cast<std::size_t>(next3(k))])));
  }
  return d;
}

/// Straight walk from q (inside `start`) toward p. kNone if the walk leaves the mesh.
TId walk(const Triangulation& t, TId start, Point q, Point p) {
  if (triangle_contains(t, start, p)) return start;
  const Ray r{q, (p - q) * (1.0 / norm(p - q))};
  TId cur = start;
  int entry = -1;
  const std::size_t guard = 3 * t.triangle_capacity() + 8;
  for (std::size_t step = 0; step < guard; ++step) {
    if (triangle_contains(t, cur, p)) return cur;
    const int i = exit_corner(t, t.tri(cur), r, entry);
    if (i < 0) return kNone;
    const auto tw = t.twin(EdgeRef{cur, i});
    if (!tw) return kNone;
    cur = tw->t;
    entry = tw->i;
  }
  return kNone;
}

}  // namespace

TriangleLocator::TriangleLocator(const Triangulation& t, int grid) : t_(t) {
  box_ = t.info().box;
  n_ = grid > 0 ? grid : std::max(1, static_cast<int>(std::sqrt(static_cast<double>(t.num_triangles())) / 2.0));
  anchors_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), kNone);
  TId prev = kNone;
  Point prev_pt;
  for (int j = 0; j < n_; ++j) {
    for (int i = 0; i < n_; ++i) {
      const int ii = (j % 2 == 0) ? i : n_ - 1 - i;  // serpentine keeps consecutive anchors close
      const Point c{box_.lo.x + (ii + 0.5) * box_.width() / n_, box_.lo.y + (j + 0.5) * box_.height() / n_};
      TId tri = prev != kNone ? walk(t_, prev, prev_pt, c) : kNone;
      if (tri == kNone) tri = brute(c).tri;
      anchors_[static_cast<std::size_t>(j * n_ + ii)] = tri;
      prev = tri;
      prev_pt = c;
    }
  }
}

LocateResult TriangleLocator::brute(Point p) const {
  for (std::size_t i = 0; i < t_.triangle_capacity(); ++i) {
    if (t_.tri(static_cast<TId>(i)).alive && triangle_contains(t_, static_cast<TId>(i), p)) return {static_cast<TId>(i), true};
  }
  LocateResult res;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t_.triangle_capacity(); ++i) {
    if (!t_.tri(static_cast<TId>(i)).alive) continue;
    const double d = point_triangle_distance(t_, static_cast<TId>(i), p);
    if (d < best) {
      best = d;
      res.tri = static_cast<TId>(i);
    }
  }
  return res;
}

TId TriangleLocator::lowest_containing(TId tri, Point p) const {
  TId best = tri;
  const auto& T = t_.tri(tri);
  std::vector<TId> st;
  for (int k = 0; k < 3; ++k) {
    const TId nb = T.nbr[static_cast<std::size_t>(k)];
    if (nb != kNone && nb < best && triangle_contains(t_, nb, p)) best = nb;
    const VId v = T.v[static_cast<std::size_t>(k)];
    if (t_.pos(v) == p) {
      t_.star(v, st);
      for (TId s : st) best = std::min(best, s);
    }
  }
  return best;
}

LocateResult TriangleLocator::locate(Point p, LocateMethod m) const {
  if (m == LocateMethod::BruteForce) return brute(p);
  int i = static_cast<int>((p.x - box_.lo.x) / box_.width() * n_);
  int j = static_cast<int>((p.y - box_.lo.y) / box_.height() * n_);
  i = std::clamp(i, 0, n_ - 1);
  j = std::clamp(j, 0, n_ - 1);
  const Point c{box_.lo.x + (i + 0.5) * box_.width() / n_, box_.lo.y + (j + 0.5) * box_.height() / n_};
  const TId a = anchors_[static_cast<std::size_t>(j * n_ + i)];
  const TId tri = (a != kNone && triangle_contains(t_, a, c)) ? walk(t_, a, c, p) : kNone;
  if (tri == kNone) return brute(p);
  return {lowest_containing(tri, p), true};
}

LocateResult locate_triangle(const Triangulation& t, Point p, LocateMethod m) {
  if (m == LocateMethod::BruteForce) {
    TriangleLocator loc(t, 1);
    return loc.locate(p, m);
  }
  TriangleLocator loc(t);
  return loc.locate(p, m);
}

}  // namespace mwt
