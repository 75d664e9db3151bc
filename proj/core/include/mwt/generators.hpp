#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "mwt/scene.hpp"

namespace mwt {

class GeneratorError : public std::runtime_error {
 public:
  GeneratorError(const std::string& what, int achieved) : std::runtime_error(what), achieved_(achieved) {}
  int achieved() const { return achieved_; }

 private:
  int achieved_;
};

enum class LineOrientation { Vertical, Uniform, Diagonal };

const char* to_string(LineOrientation o);
LineOrientation line_orientation_from_string(const std::string& s);

/// Base length of a lines-scene segment: 0.95 / sqrt(n) * length_factor, at most 0.95.
double line_length(int n, double length_factor);

/// n random non-crossing segments placed wholly inside the unit square. Vertical and Diagonal get
/// +-10 degree jitter.
Scene gen_lines(int n, LineOrientation orientation, double length_factor, std::uint64_t seed);

/// n polyline leaves rooted along the bottom, each a mostly vertical chain with joints jittered
/// sideways by U[-0.2, 0.2] * segment length. Box is the bounding box plus a 5% margin, normalized.
Scene gen_grass(int n, int segments_per_leaf, std::uint64_t seed);

inline constexpr Point kHairCenter{0.5, 0.5};
inline constexpr double kHairEmptyRadius = 0.15;

/// n_per_side strands hanging from each vertical side of the unit square, each a circular arc
/// bending inward and down. The disk of kHairEmptyRadius around kHairCenter stays empty.
Scene gen_hair(int n_per_side, int segments_per_strand, std::uint64_t seed);

/// Curved chain of curve_segments near the bottom plus one or two long horizontal lines near the
/// top, `gap` apart.
Scene gen_curve_lines(int top_lines, int curve_segments = 64, double gap = 0.02);

}  // namespace mwt
