#pragma once

#include <string>
#include <vector>

#include "mwt/bvh.hpp"
#include "mwt/kdtree.hpp"
#include "mwt/scene.hpp"
#include "mwt/triangulation.hpp"

namespace mwt {

struct RenderOptions {
  double size = 800.0;  ///< pixels along the longer box side
  double margin = 10.0;
};

/// SVG with geometry in black, the structure in blue and the rays in red. Each ray is drawn up to its
/// closest hit or the scene box. One polygon per triangle, one rect per BVH or kd leaf.
std::string render_svg(const Scene& scene, const std::vector<Ray>& rays = {}, const RenderOptions& opt = {});
std::string render_svg(const Scene& scene, const Triangulation& t, const std::vector<Ray>& rays = {},
                       const RenderOptions& opt = {});
std::string render_svg(const Scene& scene, const Bvh& bvh, const std::vector<Ray>& rays = {},
                       const RenderOptions& opt = {});
std::string render_svg(const Scene& scene, const RopedKdTree& kd, const std::vector<Ray>& rays = {},
                       const RenderOptions& opt = {});

}  // namespace mwt
