#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mwt/scene.hpp"

namespace mwt {

class SvgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SvgImportOptions {
  double flatten_tolerance = 1e-3;  ///< max chord deviation of flattened curves, SVG user units
  double merge_tolerance = 1e-6;    ///< endpoints closer than this become one vertex, SVG user units
  double margin = 0.01;             ///< box margin around the geometry, fraction of its larger side
};

/// Reads path, line, polyline and polygon elements (with transforms on them and on enclosing
/// groups), flattens Bezier segments, merges nearby vertices and normalizes to the unit square.
/// Other elements are skipped and arc commands become straight lines, each with a warning. Throws SvgError
/// listing crossing pairs.
Scene import_svg_string(const std::string& svg, const SvgImportOptions& opt = {},
                        std::vector<std::string>* warnings = nullptr);
Scene import_svg(const std::string& path, const SvgImportOptions& opt = {}, std::vector<std::string>* warnings = nullptr);

/// Flattens a cubic Bezier into points after p0 until no control point is farther than tol from its chord.
void flatten_cubic(Point p0, Point p1, Point p2, Point p3, double tol, std::vector<Point>& out);

}  // namespace mwt
