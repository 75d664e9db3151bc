#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

namespace mwt {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(Point a, double s) { return {a.x * s, a.y * s}; }
  friend Point operator*(double s, Point a) { return {a.x * s, a.y * s}; }
  friend bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double norm2(Point a) { return a.x * a.x + a.y * a.y; }
inline double dist(Point a, Point b) { return norm(a - b); }
inline double dist2(Point a, Point b) { return norm2(a - b); }
inline Point lerp(Point a, Point b, double t) { return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t}; }
inline bool is_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

enum class SegKind : std::uint8_t { Geometry, Boundary };

struct Segment {
  Point a;
  Point b;
  SegKind kind = SegKind::Geometry;

  double length() const { return dist(a, b); }
};

/// Ray with unit direction.
struct Ray {
  Point origin;
  Point dir;

  Point at(double t) const { return origin + dir * t; }
};

Ray make_ray(Point origin, Point direction);

enum class Orientation { Positive, Negative, Degenerate };

/// Absolute tolerance on twice the signed area below which a triple is degenerate.
inline constexpr double kOrientTolerance = 1e-18;

/// Critical value for collinearity_quality.
inline constexpr double kCollinearityKappa = 1e-4;

/// Twice the signed area of abc.
inline double orient2d_value(Point a, Point b, Point c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

Orientation orient2d(Point a, Point b, Point c);

/// area(abc) / (perimeter(abc)/4)^2. Zero for coincident input.
double collinearity_quality(Point a, Point b, Point c);

inline bool near_collinear(Point a, Point b, Point c, double kappa = kCollinearityKappa) {
  return collinearity_quality(a, b, c) < kappa;
}

/// Positive when d lies strictly inside the circumcircle of the counterclockwise triangle abc.
/// Results whose magnitude falls under a static error bound are reported as 0.
double in_circle(Point a, Point b, Point c, Point d);

Point circumcenter(Point a, Point b, Point c);

struct RaySegmentHit {
  double t;
  double u;
};

std::optional<RaySegmentHit> ray_segment_intersect(const Ray& r, Point a, Point b);
inline std::optional<RaySegmentHit> ray_segment_intersect(const Ray& r, const Segment& s) {
  return ray_segment_intersect(r, s.a, s.b);
}

/// Distance from p to the closed segment ab.
double point_segment_distance(Point p, Point a, Point b);

/// Parameter of the orthogonal projection of p onto the line ab, clamped to [0,1].
double project_param(Point p, Point a, Point b);

enum class SegmentRelation {
  Disjoint,
  SharedEndpoint,  ///< touch only at one common endpoint
  Crossing,        ///< proper crossing or a T-junction
  Overlapping,     ///< collinear with a common stretch of positive length
};

SegmentRelation classify_segments(Point a, Point b, Point c, Point d);

struct Box {
  Point lo{INFINITY, INFINITY};
  Point hi{-INFINITY, -INFINITY};

  static Box of(Point a, Point b) {
    Box bx;
    bx.expand(a);
    bx.expand(b);
    return bx;
  }
  bool empty() const { return lo.x > hi.x || lo.y > hi.y; }
  void expand(Point p) {
    lo.x = std::fmin(lo.x, p.x);
    lo.y = std::fmin(lo.y, p.y);
    hi.x = std::fmax(hi.x, p.x);
    hi.y = std::fmax(hi.y, p.y);
  }
  void expand(const Box& b) {
    if (b.empty()) return;
    expand(b.lo);
    expand(b.hi);
  }
  double width() const { return hi.x - lo.x; }
  double height() const { return hi.y - lo.y; }
  double perimeter() const { return empty() ? 0.0 : 2.0 * (width() + height()); }
  Point center() const { return {(lo.x + hi.x) * 0.5, (lo.y + hi.y) * 0.5}; }
  bool contains(Point p) const { return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y; }
  bool contains(const Box& b) const { return b.empty() || (contains(b.lo) && contains(b.hi)); }
};

/// Slab test clipped to [tmin, tmax]; returns the entry parameter on hit.
std::optional<double> ray_box_entry(const Ray& r, const Box& b, double tmin, double tmax);

/// Parameter interval of the ray inside the closed box, if any.
std::optional<std::pair<double, double>> ray_box_interval(const Ray& r, const Box& b);

/// Clips segment ab to the closed box; returns the parameters of the surviving piece.
std::optional<std::pair<double, double>> clip_segment(Point a, Point b, const Box& box);

}  // namespace mwt
