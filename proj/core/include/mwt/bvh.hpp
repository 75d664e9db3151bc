#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "mwt/scene.hpp"
#include "mwt/traversal.hpp"

namespace mwt {

/// SAH bounding volume hierarchy over the geometry segments, with perimeter as the 2D measure.
class Bvh {
 public:
  struct Node {
    Box box;
    int left = -1;   ///< child indices; -1 for leaves
    int right = -1;
    int first = 0;   ///< leaf primitive range in prims()
    int count = 0;
    int axis = 0;    ///< split axis of inner nodes
    bool leaf() const { return left < 0; }
  };

  static Bvh build(const Scene& scene, double c_t);

  std::optional<Hit> intersect(const Scene& scene, const Ray& r, TraversalStats* stats = nullptr) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<int>& prims() const { return prims_; }
  double c_t() const { return c_t_; }
  std::size_t leaf_count() const;

  /// Child boxes inside parents and every primitive in exactly one leaf.
  bool check() const;
  void dump(std::ostream& os) const;

 private:
  int build_node(const Scene& scene, std::vector<int>& ids, int first, int count);
  std::vector<Node> nodes_;
  std::vector<int> prims_;
  double c_t_ = 1.0;
  std::size_t num_geometry_ = 0;
};

/// SAH cost of one split candidate: C_t + (P(L) n_L + P(R) n_R) / P(N).
double sah_split_cost(double c_t, double p_parent, double p_left, int n_left, double p_right, int n_right);

}  // namespace mwt
