#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include "mwt/scene.hpp"
#include "mwt/traversal.hpp"

namespace mwt {

/// Cell sides in rope order.
enum class Side { XMin = 0, XMax = 1, YMin = 2, YMax = 3 };

/// kd-tree over the geometry segments with split planes on segment endpoints and per-side ropes
/// for stackless leaf-to-leaf traversal. Rope selection is charged ceil(log2 n), at least 1, where n
/// is the number of leaves behind the rope that touch the side.
class RopedKdTree {
 public:
  struct Node {
    Box cell;
    int left = -1;  ///< -1 for leaves
    int right = -1;
    int axis = 0;
    double split = 0.0;
    int first = 0;  ///< leaf primitive range in prims()
    int count = 0;
    std::array<int, 4> rope{-1, -1, -1, -1};       ///< target node per Side; -1 on the scene boundary
    std::array<int, 4> rope_cost{0, 0, 0, 0};
    bool leaf() const { return left < 0; }
  };

  static RopedKdTree build(const Scene& scene, double c_t, int max_depth = 48);

  /// Walk starts in the leaf containing the ray origin; finding it is not counted.
  std::optional<Hit> intersect(const Scene& scene, const Ray& r, TraversalStats* stats = nullptr) const;

  int leaf_at(Point p, Point dir) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<int>& prims() const { return prims_; }
  double c_t() const { return c_t_; }
  std::size_t leaf_count() const;
  bool single_leaf() const { return nodes_.size() == 1; }

  /// Leaves tile the root cell, children split their parent at a geometry vertex coordinate, and
  /// every primitive overlapping a leaf is listed there.
  bool check(const Scene& scene) const;
  void dump(std::ostream& os) const;

 private:
  int build_node(const Scene& scene, const Box& cell, std::vector<int> ids, int depth, int max_depth);
  void attach_ropes(int node, std::array<int, 4> ropes);
  int descend(int node, Point p, Point dir, TraversalStats* stats) const;
  std::vector<Node> nodes_;
  std::vector<int> prims_;
  double c_t_ = 1.0;
};

/// Rope selection cost for n candidate leaves: max(1, ceil(log2 n)).
int rope_cost(int n);

}  // namespace mwt
