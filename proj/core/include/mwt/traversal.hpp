#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mwt/geometry.hpp"
#include "mwt/scene.hpp"
#include "mwt/triangulation.hpp"

namespace mwt {

struct Hit {
  int segment = -1;
  double t = 0.0;
  Point point;
};

/// Operation counters of one or more ray queries.
struct TraversalStats {
  std::uint64_t tri_steps = 0;
  std::uint64_t bvh_node_tests = 0;
  std::uint64_t bvh_prim_tests = 0;
  std::uint64_t kd_nodes_visited = 0;
  std::uint64_t kd_rope_steps = 0;
  std::uint64_t kd_prim_tests = 0;

  std::uint64_t tri_total() const { return tri_steps; }
  std::uint64_t bvh_total() const { return bvh_node_tests + bvh_prim_tests; }
  std::uint64_t kd_total() const { return kd_nodes_visited + kd_rope_steps + kd_prim_tests; }

  TraversalStats& operator+=(const TraversalStats& o);
};

class TraversalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closest hit of a ray with one scene segment, if any.
std::optional<Hit> intersect_segment(const Scene& scene, int seg, const Ray& r);

/// Keeps the smaller (t, segment id) pair.
inline void keep_closest(std::optional<Hit>& best, const std::optional<Hit>& h) {
  if (!h) return;
  if (!best || h->t < best->t || (h->t == best->t && h->segment < best->segment)) best = h;
}

/// Linear scan over the geometry segments; ties at equal t go to the lowest id.
std::optional<Hit> brute_force_closest(const Scene& scene, const Ray& r);

/// Walks the triangulation from start_tri until a geometry edge or the boundary is crossed.
/// A vertex exactly on the ray line counts as lying to its left, which makes the exit edge unique.
std::optional<Hit> traverse_triangulation(const Triangulation& t, const Scene& scene, const Ray& r, TId start_tri,
                                          TraversalStats* stats = nullptr);

enum class LocateMethod { BruteForce, AnchorGridWalk };

struct LocateResult {
  TId tri = kNone;
  bool inside = false;  ///< false when the nearest-triangle fallback was used
};

/// Point location with an optional coarse grid of anchor points. Ties on edges and vertices resolve
/// to the lowest triangle id.
class TriangleLocator {
 public:
  explicit TriangleLocator(const Triangulation& t, int grid = 0);
  LocateResult locate(Point p, LocateMethod m = LocateMethod::AnchorGridWalk) const;

 private:
  LocateResult brute(Point p) const;
  TId lowest_containing(TId tri, Point p) const;
  const Triangulation& t_;
  int n_ = 0;
  Box box_;
  std::vector<TId> anchors_;
};

LocateResult locate_triangle(const Triangulation& t, Point p, LocateMethod m = LocateMethod::BruteForce);

/// p inside or on the boundary of the triangle.
bool triangle_contains(const Triangulation& t, TId tri, Point p);

}  // namespace mwt
