#include "mwt/scene.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mwt {

std::size_t Scene::geometry_count() const {
  return static_cast<std::size_t>(
      std::count_if(segments.begin(), segments.end(), [](const Segment& s) { return s.kind == SegKind::Geometry; }));
}

std::vector<Segment> Scene::geometry() const {
  std::vector<Segment> out;
  for (const auto& s : segments) {
    if (s.kind == SegKind::Geometry) out.push_back(s);
  }
  return out;
}

std::vector<std::pair<int, int>> find_crossings(const std::vector<Segment>& segs, std::size_t limit) {
  std::vector<int> order(segs.size());
  for (std::size_t i = 0; i < segs.size(); ++i) order[i] = static_cast<int>(i);
  auto lox = [&](int i) { return std::min(segs[static_cast<std::size_t>(i)].a.x, segs[static_cast<std::size_t>(i)].b.x); };
  auto hix = [&](int i) { return std::max(segs[static_cast<std::size_t>(i)].a.x, segs[static_cast<std::size_t>(i)].b.x); };
  std::sort(order.begin(), order.end(), [&](int p, int q) { return lox(p) < lox(q); });

  std::vector<std::pair<int, int>> out;
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const int i = order[oi];
    const Segment& s = segs[static_cast<std::size_t>(i)];
    const double ylo = std::min(s.a.y, s.b.y), yhi = std::max(s.a.y, s.b.y);
    for (std::size_t oj = oi + 1; oj < order.size() && lox(order[oj]) <= hix(i); ++oj) {
      const int j = order[oj];
      const Segment& t = segs[static_cast<std::size_t>(j)];
      if (std::max(t.a.y, t.b.y) < ylo || std::min(t.a.y, t.b.y) > yhi) continue;
      const auto rel = classify_segments(s.a, s.b, t.a, t.b);
      if (rel == SegmentRelation::Crossing || rel == SegmentRelation::Overlapping) {
        out.emplace_back(std::min(i, j), std::max(i, j));
        if (out.size() >= limit) return out;
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::vector<Segment> boundary_pieces(const std::vector<Segment>& geometry, const Box& box) {
  const Point c[4] = {box.lo, {box.hi.x, box.lo.y}, box.hi, {box.lo.x, box.hi.y}};
  std::vector<Segment> out;
  for (int side = 0; side < 4; ++side) {
    const Point a = c[side], b = c[(side + 1) % 4];
    std::vector<std::pair<double, Point>> cuts;
    auto consider = [&](Point p) {
      const bool on = (side == 0 && p.y == box.lo.y) || (side == 1 && p.x == box.hi.x) ||
                      (side == 2 && p.y == box.hi.y) || (side == 3 && p.x == box.lo.x);
      if (!on) return;
      const double t = (side % 2 == 0) ? (p.x - a.x) / (b.x - a.x) : (p.y - a.y) / (b.y - a.y);
      if (t > 0.0 && t < 1.0) cuts.emplace_back(t, p);
    };
    for (const auto& g : geometry) {
      consider(g.a);
      consider(g.b);
    }
    std::sort(cuts.begin(), cuts.end(), [](const auto& p, const auto& q) { return p.first < q.first; });
    Point prev = a;
    for (const auto& [t, p] : cuts) {
      if (p == prev) continue;
      out.push_back({prev, p, SegKind::Boundary});
      prev = p;
    }
    out.push_back({prev, b, SegKind::Boundary});
  }
  return out;
}

}  // namespace

void validate_scene(const Scene& scene) {
  if (scene.box.empty() || !(scene.box.width() > 0.0) || !(scene.box.height() > 0.0))
    throw SceneError("scene box is degenerate");
  for (std::size_t i = 0; i < scene.segments.size(); ++i) {
    const auto& s = scene.segments[i];
    if (!is_finite(s.a) || !is_finite(s.b)) throw SceneError("non-finite coordinate", static_cast<int>(i));
    if (s.a == s.b) throw SceneError("zero-length segment", static_cast<int>(i));
    if (!scene.box.contains(s.a) || !scene.box.contains(s.b))
      throw SceneError("segment outside the scene box", static_cast<int>(i));
  }
  const auto bad = find_crossings(scene.segments, 1);
  if (!bad.empty()) {
    const auto [i, j] = bad.front();
    const auto rel = classify_segments(scene.segments[static_cast<std::size_t>(i)].a,
                                       scene.segments[static_cast<std::size_t>(i)].b,
                                       scene.segments[static_cast<std::size_t>(j)].a,
                                       scene.segments[static_cast<std::size_t>(j)].b);
    const char* kind = rel == SegmentRelation::Overlapping ? "overlapping or duplicate" : "crossing";
    throw SceneError(std::string(kind) + " segments " + std::to_string(i) + " and " + std::to_string(j), i, j);
  }
}

Scene make_scene(const std::vector<std::pair<Point, Point>>& geometry, const Box& box, std::string name,
                 std::string provenance) {
  Scene sc;
  sc.box = box;
  sc.name = std::move(name);
  sc.provenance = std::move(provenance);
  for (const auto& [a, b] : geometry) sc.segments.push_back({a, b, SegKind::Geometry});
  auto sides = boundary_pieces(sc.segments, box);
  sc.segments.insert(sc.segments.end(), sides.begin(), sides.end());
  validate_scene(sc);
  return sc;
}

Scene normalize_scene(const Scene& scene) {
  const double s = std::max(scene.box.width(), scene.box.height());
  if (!(s > 0.0) || !std::isfinite(s)) throw SceneError("cannot normalize a degenerate scene");
  const Point lo = scene.box.lo;
  auto map = [&](Point p) { return Point{(p.x - lo.x) / s, (p.y - lo.y) / s}; };
  Box box{{0.0, 0.0}, map(scene.box.hi)};
  std::vector<std::pair<Point, Point>> geo;
  for (const auto& seg : scene.segments) {
    if (seg.kind == SegKind::Geometry) geo.emplace_back(map(seg.a), map(seg.b));
  }
  return make_scene(geo, box, scene.name, scene.provenance);
}

void write_scene(std::ostream& os, const Scene& scene) {
  char buf[256];
  os << "mwt-scene 1\n";
  os << "name " << (scene.name.empty() ? "-" : scene.name) << "\n";
  os << "provenance " << (scene.provenance.empty() ? "-" : scene.provenance) << "\n";
  const auto geo = scene.geometry();
  os << "segments " << geo.size() + 4 << "\n";
  for (const auto& s : geo) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g g\n", s.a.x, s.a.y, s.b.x, s.b.y);
    os << buf;
  }
  const Box& b = scene.box;
  const Point c[4] = {b.lo, {b.hi.x, b.lo.y}, b.hi, {b.lo.x, b.hi.y}};
  for (int i = 0; i < 4; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g b\n", c[i].x, c[i].y, c[(i + 1) % 4].x,
                  c[(i + 1) % 4].y);
    os << buf;
  }
}

Scene read_scene(std::istream& is) {
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) { throw SceneError("scene line " + std::to_string(lineno) + ": " + msg); };
  auto next = [&]() -> bool {
    while (std::getline(is, line)) {
      ++lineno;
      if (!line.empty() && line[0] != '#') return true;
    }
    return false;
  };
  if (!next()) fail("empty input");
  {
    std::istringstream ss(line);
    std::string magic;
    int version = 0;
    ss >> magic >> version;
    if (magic != "mwt-scene" || version != 1) fail("bad header");
  }
  std::string name, prov;
  std::size_t count = 0;
  while (next()) {
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "name") {
      std::getline(ss >> std::ws, name);
    } else if (key == "provenance") {
      std::getline(ss >> std::ws, prov);
    } else if (key == "segments") {
      if (!(ss >> count)) fail("bad segment count");
      break;
    } else {
      fail("unexpected key '" + key + "'");
    }
  }
  std::vector<std::pair<Point, Point>> geo;
  Box box;
  for (std::size_t i = 0; i < count; ++i) {
    if (!next()) fail("missing segment lines");
    std::istringstream ss(line);
    Point a, b;
    std::string kind;
    if (!(ss >> a.x >> a.y >> b.x >> b.y >> kind)) fail("bad segment");
    if (kind == "g") {
      geo.emplace_back(a, b);
    } else if (kind == "b") {
      box.expand(a);
      box.expand(b);
    } else {
      fail("unknown segment kind '" + kind + "'");
    }
  }
  if (box.empty()) fail("no boundary segments");
  if (name == "-") name.clear();
  if (prov == "-") prov.clear();
  return make_scene(geo, box, name, prov);
}

void save_scene(const std::string& path, const Scene& scene) {
  std::ofstream os(path);
  if (!os) throw SceneError("cannot write " + path);
  write_scene(os, scene);
}

Scene load_scene(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw SceneError("cannot read " + path);
  return read_scene(is);
}

}  // namespace mwt
