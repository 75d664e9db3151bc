#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mwt/geometry.hpp"
#include "mwt/scene.hpp"

namespace mwt {

using VId = std::int32_t;
using TId = std::int32_t;
inline constexpr std::int32_t kNone = -1;

/// Degrees of freedom of a vertex. The numeric order is the snap order: lower wins.
enum class Dof : std::uint8_t { Fixed = 0, OnSegment = 1, Free = 2 };

/// Scene data shared by every triangulation built from the same scene.
struct SceneInfo {
  std::vector<Segment> segments;
  std::vector<int> line;                        ///< collinear group of each segment
  std::vector<Point> points;                    ///< unique segment endpoints
  std::vector<std::vector<int>> point_segments; ///< segments incident to each point
  std::vector<std::array<int, 2>> seg_points;   ///< endpoint point ids of each segment
  Box box;
  std::string name;

  static std::shared_ptr<const SceneInfo> from_scene(const Scene& scene, double kappa = kCollinearityKappa);
  bool is_geometry(int seg) const { return segments[static_cast<std::size_t>(seg)].kind == SegKind::Geometry; }
};

/// For Fixed vertices `host` is a SceneInfo point id, for OnSegment vertices a segment id.
struct Vertex {
  Point pos;
  Dof dof = Dof::Free;
  std::int32_t host = kNone;
  TId tri = kNone;
  bool alive = true;
};

/// Counterclockwise triangle. nbr[i] and seg[i] describe the edge opposite v[i].
struct Triangle {
  std::array<VId, 3> v{kNone, kNone, kNone};
  std::array<TId, 3> nbr{kNone, kNone, kNone};
  std::array<std::int32_t, 3> seg{kNone, kNone, kNone};
  bool alive = true;
};

/// The edge opposite corner i of triangle t.
struct EdgeRef {
  TId t = kNone;
  int i = 0;
};

using EdgeKey = std::uint64_t;
inline EdgeKey edge_key(VId a, VId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<EdgeKey>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}
inline VId key_first(EdgeKey k) { return static_cast<VId>(k >> 32); }
inline VId key_second(EdgeKey k) { return static_cast<VId>(k & 0xffffffffu); }

enum class FlipResult { Flipped, RejectedNotConvex, RejectedConstrained };

enum class ContractStatus { Contracted, BothFixed, DifferentSegments, Topology };

struct ContractResult {
  ContractStatus status = ContractStatus::Topology;
  VId survivor = kNone;
  bool ok() const { return status == ContractStatus::Contracted; }
};

const char* to_string(FlipResult r);
const char* to_string(ContractStatus s);

class Triangulation {
 public:
  Triangulation() = default;
  explicit Triangulation(std::shared_ptr<const SceneInfo> info) : info_(std::move(info)) {}

  /// Builds adjacency from raw triangles. `constrained` maps edge keys to segment ids.
  static Triangulation from_triangles(std::shared_ptr<const SceneInfo> info, std::vector<Vertex> vertices,
                                      const std::vector<std::array<VId, 3>>& tris,
                                      const std::unordered_map<EdgeKey, int>& constrained);

  const SceneInfo& info() const { return *info_; }
  const std::shared_ptr<const SceneInfo>& info_ptr() const { return info_; }

  const std::vector<Vertex>& vertices() const { return verts_; }
  const std::vector<Triangle>& triangles() const { return tris_; }
  const Vertex& vertex(VId v) const { return verts_[static_cast<std::size_t>(v)]; }
  const Triangle& tri(TId t) const { return tris_[static_cast<std::size_t>(t)]; }
  Vertex& vertex_mut(VId v) { return verts_[static_cast<std::size_t>(v)]; }
  Triangle& tri_mut(TId t) { return tris_[static_cast<std::size_t>(t)]; }
  Point pos(VId v) const { return verts_[static_cast<std::size_t>(v)].pos; }

  std::size_t vertex_capacity() const { return verts_.size(); }
  std::size_t triangle_capacity() const { return tris_.size(); }
  std::size_t num_vertices() const { return live_verts_; }
  std::size_t num_triangles() const { return live_tris_; }
  std::size_t num_edges() const;

  VId add_vertex(Point p, Dof dof, std::int32_t host);
  TId add_triangle(VId a, VId b, VId c);
  void kill_triangle(TId t);
  void kill_vertex(VId v);

  // edge helpers
  std::pair<VId, VId> edge_vertices(EdgeRef e) const;
  EdgeKey key(EdgeRef e) const;
  bool is_constrained(EdgeRef e) const { return tri(e.t).seg[static_cast<std::size_t>(e.i)] != kNone; }
  int edge_segment(EdgeRef e) const { return tri(e.t).seg[static_cast<std::size_t>(e.i)]; }
  double edge_length(EdgeRef e) const;
  /// The same edge seen from the neighboring triangle, if any.
  std::optional<EdgeRef> twin(EdgeRef e) const;
  std::optional<EdgeRef> find_edge(VId a, VId b) const;
  int index_in(TId t, VId v) const;

  /// Calls f(EdgeRef) once per unique edge.
  void for_each_edge(const std::function<void(EdgeRef)>& f) const;
  std::vector<EdgeRef> edges() const;

  /// Triangles around v in counterclockwise order.
  void star(VId v, std::vector<TId>& out) const;
  /// Neighboring vertices of v in counterclockwise order.
  void neighbors(VId v, std::vector<VId>& out) const;
  std::vector<VId> neighbors(VId v) const;
  bool on_hull(VId v) const;
  /// Sum of areas of the triangles around v.
  double star_area(VId v) const;
  /// All triangles around v are positively oriented.
  bool star_positive(VId v) const;

  /// Neighbors of v along constrained edges of segment `seg` (at most two).
  std::vector<VId> chain_neighbors(VId v, int seg) const;
  /// Whether the vertex lies on the given segment (by topology, not position).
  bool vertex_on_segment(VId v, int seg) const;
  /// Whether the vertex lies on any segment of the collinear group.
  bool vertex_on_line(VId v, int line) const;
  /// Line groups through the vertex.
  std::vector<int> vertex_lines(VId v) const;

  void set_position(VId v, Point p) { verts_[static_cast<std::size_t>(v)].pos = p; }
  /// Projects p onto the host segment for OnSegment vertices; Fixed vertices keep their position.
  Point constrain(VId v, Point p) const;

  FlipResult can_flip(EdgeRef e) const;
  FlipResult flip(EdgeRef e);

  ContractResult contract(EdgeRef e);

  Triangulation subdivided() const;

  double total_edge_length() const;

  /// Every violated invariant, one message each.
  std::vector<std::string> validate() const;

  /// Drops dead slots and renumbers.
  void compact();

  std::uint64_t topology_version() const { return topo_version_; }

 private:
  void replace_nbr(TId t, TId old_nbr, TId new_nbr, std::int32_t seg);
  bool is_fixed_on_segment(VId v, int seg) const;

  std::shared_ptr<const SceneInfo> info_;
  std::vector<Vertex> verts_;
  std::vector<Triangle> tris_;
  std::vector<VId> free_verts_;
  std::vector<TId> free_tris_;
  std::size_t live_verts_ = 0;
  std::size_t live_tris_ = 0;
  std::uint64_t topo_version_ = 0;
};

inline int next3(int i) { return i == 2 ? 0 : i + 1; }
inline int prev3(int i) { return i == 0 ? 2 : i - 1; }

}  // namespace mwt
