#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mwt/geometry.hpp"

namespace mwt {

/// A set of line segments inside a bounding rectangle.
///
/// Geometry segments come first; the rectangle sides follow as Boundary segments,
/// split wherever a geometry endpoint touches a side.
struct Scene {
  std::vector<Segment> segments;
  Box box;
  std::string name;
  std::string provenance;

  std::size_t geometry_count() const;
  std::vector<Segment> geometry() const;
  bool is_geometry(int id) const { return segments[static_cast<std::size_t>(id)].kind == SegKind::Geometry; }
};

class SceneError : public std::runtime_error {
 public:
  SceneError(const std::string& what, int first = -1, int second = -1)
      : std::runtime_error(what), first_(first), second_(second) {}
  int first() const { return first_; }
  int second() const { return second_; }

 private:
  int first_;
  int second_;
};

/// Validates the geometry and appends the boundary pieces. Throws SceneError.
Scene make_scene(const std::vector<std::pair<Point, Point>>& geometry, const Box& box, std::string name = {},
                 std::string provenance = {});

/// Throws SceneError naming the first offending segment pair.
void validate_scene(const Scene& scene);

/// All pairs of geometry segments that cross, overlap or form a T-junction.
std::vector<std::pair<int, int>> find_crossings(const std::vector<Segment>& segs, std::size_t limit = 16);

/// Uniform scale and translation so that the larger box side spans [0, 1].
Scene normalize_scene(const Scene& scene);

void write_scene(std::ostream& os, const Scene& scene);
Scene read_scene(std::istream& is);
void save_scene(const std::string& path, const Scene& scene);
Scene load_scene(const std::string& path);

inline constexpr Box kUnitBox{{0.0, 0.0}, {1.0, 1.0}};

}  // namespace mwt
