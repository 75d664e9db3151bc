#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "mwt/scene.hpp"
#include "mwt/triangulation.hpp"

namespace mwt {

class MeshFormatError : public std::runtime_error {
 public:
  MeshFormatError(const std::string& what, int line = 0) : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Scene rebuilt from the data a triangulation carries.
Scene scene_of(const Triangulation& t);

/// Native format: the scene block followed by vertex and triangle tables.
///
///   mwt-mesh 1
///   <scene block>
///   vertices N          x y dof host        (dof: fixed | segment | free)
///   triangles M         v0 v1 v2 n0 n1 n2 s0 s1 s2
void write_mesh(std::ostream& os, const Triangulation& t);
Triangulation read_mesh(std::istream& is);
void save_mesh(const std::string& path, const Triangulation& t);
Triangulation load_mesh(const std::string& path);

/// Triangle-style .node/.ele/.poly text. Node markers are 1 for vertices on geometry or the
/// boundary and 0 otherwise; segment markers are the scene segment id plus 2.
void write_node(std::ostream& os, const Triangulation& t);
void write_ele(std::ostream& os, const Triangulation& t);
void write_poly(std::ostream& os, const Triangulation& t);
void write_triangle_files(const std::string& base, const Triangulation& t);

/// Rebuilds a triangulation over `scene`. Constrained edges come from the .poly segments when
/// given; segment markers of 2 or more name the scene segment directly, other markers are
/// resolved geometrically. Without a .poly, edges lying on scene segments are constrained.
Triangulation read_triangle(const Scene& scene, std::istream& node, std::istream& ele, std::istream* poly);
Triangulation read_triangle_files(const std::string& base, const Scene& scene);

}  // namespace mwt
