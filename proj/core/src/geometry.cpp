#include "mwt/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace mwt {

Ray make_ray(Point origin, Point direction) {
  const double n = norm(direction);
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("ray direction must be nonzero and finite");
  return Ray{origin, direction * (1.0 / n)};
}

Orientation orient2d(Point a, Point b, Point c) {
  const double v = orient2d_value(a, b, c);
  if (std::fabs(v) < kOrientTolerance) return Orientation::Degenerate;
  return v > 0.0 ? Orientation::Positive : Orientation::Negative;
}

double collinearity_quality(Point a, Point b, Point c) {
  const double per = dist(a, b) + dist(b, c) + dist(c, a);
  if (!(per > 0.0)) return 0.0;
  const double area = 0.5 * std::fabs(orient2d_value(a, b, c));
  const double side = per * 0.25;
  return area / (side * side);
}

double in_circle(Point a, Point b, Point c, Point d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;

  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double alift = adx * adx + ady * ady;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double blift = bdx * bdx + bdy * bdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double clift = cdx * cdx + cdy * cdy;

  const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
  const double permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * alift +
                           (std::fabs(cdxady) + std::fabs(adxcdy)) * blift +
                           (std::fabs(adxbdy) + std::fabs(bdxady)) * clift;
  constexpr double eps = std::numeric_limits<double>::epsilon() * 0.5;
  constexpr double errbound = (10.0 + 96.0 * eps) * eps;
  if (std::fabs(det) <= errbound * permanent) return 0.0;
  return det;
}

Point circumcenter(Point a, Point b, Point c) {
  const Point ba = b - a, ca = c - a;
  const double d = 2.0 * cross(ba, ca);
  const double bl = norm2(ba), cl = norm2(ca);
  return {a.x + (ca.y * bl - ba.y * cl) / d, a.y + (ba.x * cl - ca.x * bl) / d};
}

std::optional<RaySegmentHit> ray_segment_intersect(const Ray& r, Point a, Point b) {
  const Point e = b - a;
  const Point ao = a - r.origin;
  const double denom = cross(r.dir, e);
  const double elen = norm(e);
  if (std::fabs(denom) <= 1e-15 * elen) {
    // parallel: only a collinear overlap can hit
    const double off = std::fabs(cross(ao, r.dir));
    if (off > 1e-15 * std::max(1.0, norm(ao))) return std::nullopt;
    const double ta = dot(a - r.origin, r.dir);
    const double tb = dot(b - r.origin, r.dir);
    std::optional<RaySegmentHit> best;
    if (ta >= 0.0) best = RaySegmentHit{ta, 0.0};
    if (tb >= 0.0 && (!best || tb < best->t)) best = RaySegmentHit{tb, 1.0};
    return best;
  }
  const double t = cross(ao, e) / denom;
  const double u = cross(ao, r.dir) / denom;
  if (t < 0.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return RaySegmentHit{t, u};
}

double project_param(Point p, Point a, Point b) {
  const Point e = b - a;
  const double l2 = norm2(e);
  if (!(l2 > 0.0)) return 0.0;
  return std::clamp(dot(p - a, e) / l2, 0.0, 1.0);
}

double point_segment_distance(Point p, Point a, Point b) {
  return dist(p, lerp(a, b, project_param(p, a, b)));
}

namespace {

int sign_with_tol(double v, double scale) {
  const double tol = 1e-14 * scale;
  if (v > tol) return 1;
  if (v < -tol) return -1;
  return 0;
}

// p collinear with ab: is it strictly inside the open segment?
bool strictly_between(Point p, Point a, Point b) {
  if (p == a || p == b) return false;
  const double t = dot(p - a, b - a) / norm2(b - a);
  return t > 0.0 && t < 1.0;
}

}  // namespace

SegmentRelation classify_segments(Point a, Point b, Point c, Point d) {
  const double s1 = norm(b - a), s2 = norm(d - c);
  const int o1 = sign_with_tol(orient2d_value(a, b, c), s1 * std::max(s1, s2));
  const int o2 = sign_with_tol(orient2d_value(a, b, d), s1 * std::max(s1, s2));
  const int o3 = sign_with_tol(orient2d_value(c, d, a), s2 * std::max(s1, s2));
  const int o4 = sign_with_tol(orient2d_value(c, d, b), s2 * std::max(s1, s2));

  if (o1 == 0 && o2 == 0) {
    // collinear
    const Point e = b - a;
    const double l2 = norm2(e);
    double tc = dot(c - a, e) / l2, td = dot(d - a, e) / l2;
    if (tc > td) std::swap(tc, td);
    const double lo = std::max(0.0, tc), hi = std::min(1.0, td);
    if (hi - lo > 1e-14) return SegmentRelation::Overlapping;
    if (hi - lo >= -1e-14) {
      const bool shared = a == c || a == d || b == c || b == d;
      return shared ? SegmentRelation::SharedEndpoint : SegmentRelation::Crossing;
    }
    return SegmentRelation::Disjoint;
  }

  const bool shared = a == c || a == d || b == c || b == d;
  if (shared) {
    // the other endpoints must not lie on the opposite segment
    if (o1 == 0 && strictly_between(c, a, b)) return SegmentRelation::Crossing;
    if (o2 == 0 && strictly_between(d, a, b)) return SegmentRelation::Crossing;
    if (o3 == 0 && strictly_between(a, c, d)) return SegmentRelation::Crossing;
    if (o4 == 0 && strictly_between(b, c, d)) return SegmentRelation::Crossing;
    return SegmentRelation::SharedEndpoint;
  }

  if (o1 * o2 < 0 && o3 * o4 < 0) return SegmentRelation::Crossing;
  if (o1 == 0 && strictly_between(c, a, b)) return SegmentRelation::Crossing;
  if (o2 == 0 && strictly_between(d, a, b)) return SegmentRelation::Crossing;
  if (o3 == 0 && strictly_between(a, c, d)) return SegmentRelation::Crossing;
  if (o4 == 0 && strictly_between(b, c, d)) return SegmentRelation::Crossing;
  return SegmentRelation::Disjoint;
}

std::optional<std::pair<double, double>> ray_box_interval(const Ray& r, const Box& b) {
  if (b.empty()) return std::nullopt;
  double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
  const double o[2] = {r.origin.x, r.origin.y};
  const double d[2] = {r.dir.x, r.dir.y};
  const double lo[2] = {b.lo.x, b.lo.y};
  const double hi[2] = {b.hi.x, b.hi.y};
  for (int k = 0; k < 2; ++k) {
    if (d[k] == 0.0) {
      if (o[k] < lo[k] || o[k] > hi[k]) return std::nullopt;
      continue;
    }
    const double inv = 1.0 / d[k];
    double ta = (lo[k] - o[k]) * inv;
    double tb = (hi[k] - o[k]) * inv;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  return std::make_pair(t0, t1);
}

std::optional<double> ray_box_entry(const Ray& r, const Box& b, double tmin, double tmax) {
  auto iv = ray_box_interval(r, b);
  if (!iv) return std::nullopt;
  const double lo = std::max(iv->first, tmin);
  const double hi = std::min(iv->second, tmax);
  if (lo > hi) return std::nullopt;
  return lo;
}

std::optional<std::pair<double, double>> clip_segment(Point a, Point b, const Box& box) {
  double t0 = 0.0, t1 = 1.0;
  const Point d = b - a;
  const double p[4] = {-d.x, d.x, -d.y, d.y};
  const double q[4] = {a.x - box.lo.x, box.hi.x - a.x, a.y - box.lo.y, box.hi.y - a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return std::nullopt;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return std::nullopt;
  }
  return std::make_pair(t0, t1);
}

}  // namespace mwt
