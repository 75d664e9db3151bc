#pragma once

#include <limits>
#include <vector>

#include "mwt/scene.hpp"
#include "mwt/triangulation.hpp"

namespace mwt {

/// Constrained Delaunay triangulation of the scene endpoints with every segment present as a
/// constrained edge. All vertices are Fixed; no Steiner vertices.
Triangulation build_cdt(const Scene& scene);

struct RefineResult {
  Triangulation tri;
  std::size_t inserted = 0;
  bool partial = false;  ///< vertex guard hit before the quality bounds were met
};

/// Ruppert-style refinement. Angles are in degrees; min_angle must not exceed 33.
RefineResult refine_cdt(const Triangulation& t, double min_angle,
                        double max_area = std::numeric_limits<double>::infinity());

struct RefineCell {
  double min_angle = 0.0;
  double max_area = 0.0;
  double length = 0.0;
  bool ok = false;
};

struct OptimalRefined {
  Triangulation tri;
  double min_angle = 0.0;
  double max_area = 0.0;
  double length = 0.0;
  std::vector<RefineCell> cells;
};

std::vector<double> default_angle_grid();
std::vector<double> default_area_grid();

/// Refines over the grid and keeps the result with the smallest total edge length.
/// Cells that hit the vertex guard count as failed. The first minimal cell wins ties.
OptimalRefined optimal_refined_cdt(const Scene& scene, const std::vector<double>& angle_grid = default_angle_grid(),
                                   const std::vector<double>& area_grid = default_area_grid());

/// Minimum interior angle of a triangle, in degrees.
double min_angle_deg(Point a, Point b, Point c);

/// True when the angle at corner i of t is enclosed by two constrained edges.
bool angle_forced(const Triangulation& t, TId tri, int corner);

}  // namespace mwt
