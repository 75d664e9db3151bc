#include "mwt/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace mwt {

const char* to_string(LineOrientation o) {
  switch (o) {
    case LineOrientation::Vertical: return "vertical";
    case LineOrientation::Uniform: return "uniform";
    case LineOrientation::Diagonal: return "diagonal";
  }
  return "?";
}

LineOrientation line_orientation_from_string(const std::string& s) {
  if (s == "vertical") return LineOrientation::Vertical;
  if (s == "uniform") return LineOrientation::Uniform;
  if (s == "diagonal") return LineOrientation::Diagonal;
  throw std::invalid_argument("unknown orientation '" + s + "'");
}

double line_length(int n, double length_factor) {
  return std::min(0.95, 0.95 / std::sqrt(static_cast<double>(n)) * length_factor);
}

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

constexpr double kDeg = std::numbers::pi / 180.0;
/// Minimum gap between unconnected segments; keeps generated scenes away from numerical ties.
constexpr double kClearance = 1e-7;

/// Accepted segments with a brute-force clearance test.
class Placed {
 public:
  /// `linked` is the index of a segment allowed to share the endpoint a.
  bool fits(Point a, Point b, int linked = -1) const {
    const Box nb = Box::of(a, b);
    for (std::size_t i = 0; i < segs_.size(); ++i) {
      const Segment& s = segs_[i];
      const Box sb = Box::of(s.a, s.b);
      if (sb.lo.x > nb.hi.x + kClearance || nb.lo.x > sb.hi.x + kClearance || sb.lo.y > nb.hi.y + kClearance ||
          nb.lo.y > sb.hi.y + kClearance)
        continue;
      const auto rel = classify_segments(a, b, s.a, s.b);
      if (static_cast<int>(i) == linked) {
        if (rel != SegmentRelation::SharedEndpoint) return false;
        continue;
      }
      if (rel != SegmentRelation::Disjoint) return false;
      const double d = std::min({point_segment_distance(a, s.a, s.b), point_segment_distance(b, s.a, s.b),
                                 point_segment_distance(s.a, a, b), point_segment_distance(s.b, a, b)});
      if (d < kClearance) return false;
    }
    return true;
  }
  int add(Point a, Point b) {
    segs_.push_back({a, b, SegKind::Geometry});
    return static_cast<int>(segs_.size()) - 1;
  }
  void truncate(std::size_t n) { segs_.resize(n); }
  std::size_t size() const { return segs_.size(); }
  std::vector<std::pair<Point, Point>> pairs() const {
    std::vector<std::pair<Point, Point>> out;
    out.reserve(segs_.size());
    for (const auto& s : segs_) out.emplace_back(s.a, s.b);
    return out;
  }

 private:
  std::vector<Segment> segs_;
};

Point clamp_unit(Point p) { return {std::clamp(p.x, 0.0, 1.0), std::clamp(p.y, 0.0, 1.0)}; }

Box with_margin(const std::vector<std::pair<Point, Point>>& segs, double frac) {
  Box b;
  for (const auto& [p, q] : segs) {
    b.expand(p);
    b.expand(q);
  }
  const double m = frac * std::max(b.width(), b.height());
  b.lo = b.lo - Point{m, m};
  b.hi = b.hi + Point{m, m};
  return b;
}

}  // namespace

Scene gen_lines(int n, LineOrientation orientation, double length_factor, std::uint64_t seed) {
  if (n < 1 || !(length_factor > 0.0)) throw std::invalid_argument("gen_lines: need n >= 1 and length_factor > 0");
  Rng rng(seed);
  const double len = line_length(n, length_factor);
  const long budget = 2000L * n + 10000;
  Placed placed;
  long tries = 0;
  while (static_cast<int>(placed.size()) < n) {
    if (++tries > budget) {
      throw GeneratorError("gen_lines: rejection budget exceeded after " + std::to_string(placed.size()) + " of " +
                               std::to_string(n) + " segments",
                           static_cast<int>(placed.size()));
    }
    double ang = 0.0;
    switch (orientation) {
      case LineOrientation::Vertical: ang = (90.0 + uniform(rng, -10.0, 10.0)) * kDeg; break;
      case LineOrientation::Uniform: ang = uniform(rng, 0.0, 180.0) * kDeg; break;
      case LineOrientation::Diagonal: ang = (45.0 + uniform(rng, -10.0, 10.0)) * kDeg; break;
    }
    const Point h{0.5 * len * std::cos(ang), 0.5 * len * std::sin(ang)};
    // center drawn so the whole segment fits in the square
    const double hx = std::fabs(h.x), hy = std::fabs(h.y);
    const Point c{uniform(rng, hx, 1.0 - hx), uniform(rng, hy, 1.0 - hy)};
    const Point a = clamp_unit(c - h), b = clamp_unit(c + h);
    if (!placed.fits(a, b)) continue;
    placed.add(a, b);
  }
  return make_scene(placed.pairs(), kUnitBox, "lines",
                    std::string("lines n=") + std::to_string(n) + " orientation=" + to_string(orientation) +
                        " length_factor=" + std::to_string(length_factor) + " seed=" + std::to_string(seed));
}

Scene gen_grass(int n, int segments_per_leaf, std::uint64_t seed) {
  if (n < 1 || segments_per_leaf < 1) throw std::invalid_argument("gen_grass: need n >= 1 and segments_per_leaf >= 1");
  Rng rng(seed);
  Placed placed;
  const int joint_tries = 200;
  const int leaf_tries = 2000;
  for (int leaf = 0; leaf < n; ++leaf) {
    bool done = false;
    for (int attempt = 0; attempt < leaf_tries && !done; ++attempt) {
      const std::size_t mark = placed.size();
      const double root = uniform(rng, 0.0, 1.0);
      const double height = uniform(rng, 0.6, 1.0);
      const double sl = height / segments_per_leaf;
      Point prev{root, 0.0};
      int linked = -1;
      bool ok = true;
      for (int k = 1; k <= segments_per_leaf && ok; ++k) {
        bool placed_joint = false;
        for (int jt = 0; jt < joint_tries; ++jt) {
          const Point next{root + uniform(rng, -0.2, 0.2) * sl, k * sl};
          if (!placed.fits(prev, next, linked)) continue;
          linked = placed.add(prev, next);
          prev = next;
          placed_joint = true;
          break;
        }
        ok = placed_joint;
      }
      if (ok) {
        done = true;
      } else {
        placed.truncate(mark);
      }
    }
    if (!done) {
      throw GeneratorError("gen_grass: rejection budget exceeded after " + std::to_string(leaf) + " of " +
                               std::to_string(n) + " leaves",
                           leaf);
    }
  }
  const auto segs = placed.pairs();
  Scene raw = make_scene(segs, with_margin(segs, 0.05), "grass",
                         "grass n=" + std::to_string(n) + " segments_per_leaf=" + std::to_string(segments_per_leaf) +
                             " seed=" + std::to_string(seed));
  return normalize_scene(raw);
}

Scene gen_hair(int n_per_side, int segments_per_strand, std::uint64_t seed) {
  if (n_per_side < 1 || segments_per_strand < 1) throw std::invalid_argument("gen_hair: need n_per_side >= 1 and segments_per_strand >= 1");
  Rng rng(seed);
  Placed placed;
  const int strand_tries = 5000;
  for (int side = 0; side < 2; ++side) {
    const double sx = side == 0 ? 1.0 : -1.0;  // inward direction
    for (int s = 0; s < n_per_side; ++s) {
      bool done = false;
      for (int attempt = 0; attempt < strand_tries && !done; ++attempt) {
        const std::size_t mark = placed.size();
        const double y0 = uniform(rng, 0.3, 0.97);
        const double length = 0.35 * uniform(rng, 0.9, 1.1);
        const double turn = 75.0 * kDeg * uniform(rng, 0.9, 1.1);
        Point prev{side == 0 ? 0.0 : 1.0, y0};
        int linked = -1;
        bool ok = true;
        for (int k = 1; k <= segments_per_strand && ok; ++k) {
          // exact point on the arc that starts horizontal and turns down by `turn`
          const double th = turn * k / segments_per_strand;
          const double r = length / turn;
          const Point next = clamp_unit({(side == 0 ? 0.0 : 1.0) + sx * r * std::sin(th), y0 - r * (1.0 - std::cos(th))});
          if (point_segment_distance(kHairCenter, prev, next) <= kHairEmptyRadius || !placed.fits(prev, next, linked)) {
            ok = false;
            break;
          }
          linked = placed.add(prev, next);
          prev = next;
        }
        if (ok) {
          done = true;
        } else {
          placed.truncate(mark);
        }
      }
      if (!done) {
        throw GeneratorError("gen_hair: rejection budget exceeded after " + std::to_string(placed.size()) + " segments",
                             side * n_per_side + s);
      }
    }
  }
  return make_scene(placed.pairs(), kUnitBox, "hair",
                    "hair n_per_side=" + std::to_string(n_per_side) +
                        " segments_per_strand=" + std::to_string(segments_per_strand) + " seed=" + std::to_string(seed));
}

Scene gen_curve_lines(int top_lines, int curve_segments, double gap) {
  if (top_lines < 1 || top_lines > 2 || curve_segments < 1) throw std::invalid_argument("gen_curve_lines: bad parameters");
  std::vector<std::pair<Point, Point>> segs;
  auto curve = [](double u) { return Point{0.1 + 0.8 * u, 0.15 + 0.2 * std::sin(std::numbers::pi * u)}; };
  for (int i = 0; i < curve_segments; ++i) {
    segs.emplace_back(curve(static_cast<double>(i) / curve_segments), curve(static_cast<double>(i + 1) / curve_segments));
  }
  segs.emplace_back(Point{0.1, 0.8}, Point{0.9, 0.8});
  if (top_lines == 2) segs.emplace_back(Point{0.1, 0.8 - gap}, Point{0.9, 0.8 - gap});
  return make_scene(segs, kUnitBox, top_lines == 1 ? "single-top-line" : "two-top-lines",
                    "curve-lines top_lines=" + std::to_string(top_lines) + " curve_segments=" + std::to_string(curve_segments));
}

}  // namespace mwt
