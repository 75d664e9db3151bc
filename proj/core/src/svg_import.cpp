#include "mwt/svg_import.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <regex>
#include <sstream>

namespace mwt {

namespace {

/// Affine map x' = a x + c y + e, y' = b x + d y + f.
struct Affine {
  double a = 1, b = 0, c = 0, d = 1, e = 0, f = 0;
  Point operator()(Point p) const { return {a * p.x + c * p.y + e, b * p.x + d * p.y + f}; }
  Affine operator*(const Affine& o) const {
    return {a * o.a + c * o.b, b * o.a + d * o.b, a * o.c + c * o.d, b * o.c + d * o.d, a * o.e + c * o.f + e,
            b * o.e + d * o.f + f};
  }
};

/// Pulls floats out of SVG number lists ("1.5.5" is two numbers, "1e-3" one).
class Numbers {
 public:
  explicit Numbers(const std::string& s, std::size_t pos = 0) : s_(s), i_(pos) {}
  bool next(double& v) {
    skip();
    if (i_ >= s_.size()) return false;
    const char* begin = s_.c_str() + i_;
    char* end = nullptr;
    v = std::strtod(begin, &end);
    if (end == begin) return false;
    i_ += static_cast<std::size_t>(end - begin);
    return true;
  }
  bool peek_number() {
    skip();
    if (i_ >= s_.size()) return false;
    const char c = s_[i_];
    return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.';
  }
  bool peek_command(char& cmd) {
    skip();
    if (i_ >= s_.size() || !std::isalpha(static_cast<unsigned char>(s_[i_]))) return false;
    cmd = s_[i_++];
    return true;
  }
  bool done() {
    skip();
    return i_ >= s_.size();
  }

 private:
  void skip() {
    while (i_ < s_.size() && (std::isspace(static_cast<unsigned char>(s_[i_])) || s_[i_] == ',')) ++i_;
  }
  const std::string& s_;
  std::size_t i_;
};

Affine parse_transform(const std::string& s, std::vector<std::string>* warnings) {
  Affine m;
  static const std::regex fn(R"(([A-Za-z]+)\s*\(([^)]*)\))");
  for (auto it = std::sregex_iterator(s.begin(), s.end(), fn); it != std::sregex_iterator(); ++it) {
    const std::string name = (*it)[1];
    const std::string args = (*it)[2];
    std::vector<double> v;
    Numbers nums(args);
    for (double x; nums.next(x);) v.push_back(x);
    Affine t;
    if (name == "matrix" && v.size() == 6) {
      t = {v[0], v[1], v[2], v[3], v[4], v[5]};
    } else if (name == "translate" && !v.empty()) {
      t.e = v[0];
      t.f = v.size() > 1 ? v[1] : 0.0;
    } else if (name == "scale" && !v.empty()) {
      t.a = v[0];
      t.d = v.size() > 1 ? v[1] : v[0];
    } else if (name == "rotate" && !v.empty()) {
      const double r = v[0] * std::numbers::pi / 180.0;
      Affine rot{std::cos(r), std::sin(r), -std::sin(r), std::cos(r), 0, 0};
      if (v.size() == 3) {
        t = Affine{1, 0, 0, 1, v[1], v[2]} * rot * Affine{1, 0, 0, 1, -v[1], -v[2]};
      } else {
        t = rot;
      }
    } else if (name == "skewX" && !v.empty()) {
      t.c = std::tan(v[0] * std::numbers::pi / 180.0);
    } else if (name == "skewY" && !v.empty()) {
      t.b = std::tan(v[0] * std::numbers::pi / 180.0);
    } else {
      if (warnings) warnings->push_back("unsupported transform '" + name + "' ignored");
      continue;
    }
    m = m * t;
  }
  return m;
}

std::map<std::string, std::string> attributes(const std::string& tag) {
  static const std::regex attr(R"re(([A-Za-z_:][-A-Za-z0-9_:.]*)\s*=\s*("([^"]*)"|'([^']*)'))re");
  std::map<std::string, std::string> out;
  for (auto it = std::sregex_iterator(tag.begin(), tag.end(), attr); it != std::sregex_iterator(); ++it) {
    out[(*it)[1]] = (*it)[3].matched ? (*it)[3].str() : (*it)[4].str();
  }
  return out;
}

double attr_num(const std::map<std::string, std::string>& a, const char* key) {
  const auto it = a.find(key);
  return it == a.end() ? 0.0 : std::strtod(it->second.c_str(), nullptr);
}

using Polyline = std::vector<Point>;

void flatten_quadratic(Point p0, Point p1, Point p2, double tol, std::vector<Point>& out) {
  flatten_cubic(p0, p0 + (p1 - p0) * (2.0 / 3.0), p2 + (p1 - p2) * (2.0 / 3.0), p2, tol, out);
}

/// Path data to polylines in user units, before the element transform.
std::vector<Polyline> parse_path(const std::string& d, double tol, std::vector<std::string>* warnings) {
  std::vector<Polyline> out;
  Polyline cur;
  Point pos{0, 0}, start{0, 0}, last_ctrl{0, 0};
  char prev_cmd = 0;
  Numbers in(d);
  auto flush = [&] {
    if (cur.size() >= 2) out.push_back(cur);
    cur.clear();
  };
  auto line_to = [&](Point p) {
    if (cur.empty()) cur.push_back(pos);
    cur.push_back(p);
    pos = p;
  };
  char cmd = 0;
  bool warned_arc = false;
  while (!in.done()) {
    char c;
    if (in.peek_command(c)) {
      cmd = c;
    } else if (!cmd || !in.peek_number()) {
      if (warnings) warnings->push_back("malformed path data skipped");
      break;
    }
    const bool rel = std::islower(static_cast<unsigned char>(cmd));
    const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(cmd)));
    auto pt = [&](Point& p) {
      double x, y;
      if (!in.next(x) || !in.next(y)) return false;
      p = rel ? Point{pos.x + x, pos.y + y} : Point{x, y};
      return true;
    };
    bool ok = true;
    switch (up) {
      case 'M': {
        Point p;
        if (!(ok = pt(p))) break;
        flush();
        pos = start = p;
        cur.push_back(p);
        cmd = rel ? 'l' : 'L';  // further pairs are implicit line-tos
        break;
      }
      case 'L': {
        Point p;
        if ((ok = pt(p))) line_to(p);
        break;
      }
      case 'H': {
        double x;
        if ((ok = in.next(x))) line_to({rel ? pos.x + x : x, pos.y});
        break;
      }
      case 'V': {
        double y;
        if ((ok = in.next(y))) line_to({pos.x, rel ? pos.y + y : y});
        break;
      }
      case 'C':
      case 'S': {
        Point p1, p2, p3;
        if (up == 'C') {
          ok = pt(p1) && pt(p2) && pt(p3);
        } else {
          const char pu = static_cast<char>(std::toupper(static_cast<unsigned char>(prev_cmd)));
          p1 = (pu == 'C' || pu == 'S') ? pos + (pos - last_ctrl) : pos;
          ok = pt(p2) && pt(p3);
        }
        if (!ok) break;
        if (cur.empty()) cur.push_back(pos);
        flatten_cubic(pos, p1, p2, p3, tol, cur);
        last_ctrl = p2;
        pos = p3;
        break;
      }
      case 'Q':
      case 'T': {
        Point p1, p2;
        if (up == 'Q') {
          ok = pt(p1) && pt(p2);
        } else {
          const char pu = static_cast<char>(std::toupper(static_cast<unsigned char>(prev_cmd)));
          p1 = (pu == 'Q' || pu == 'T') ? pos + (pos - last_ctrl) : pos;
          ok = pt(p2);
        }
        if (!ok) break;
        if (cur.empty()) cur.push_back(pos);
        flatten_quadratic(pos, p1, p2, tol, cur);
        last_ctrl = p1;
        pos = p2;
        break;
      }
      case 'A': {
        double v[5];
        Point p;
        for (double& x : v) ok = ok && in.next(x);
        ok = ok && pt(p);
        if (!ok) break;
        if (!warned_arc && warnings) warnings->push_back("arc commands approximated by straight lines");
        warned_arc = true;
        line_to(p);
        break;
      }
      case 'Z':
        if (!cur.empty() && !(cur.back() == start)) cur.push_back(start);
        pos = start;
        flush();
        cmd = 0;  // numbers right after Z are malformed
        break;
      default:
        if (warnings) warnings->push_back(std::string("unknown path command '") + cmd + "' skipped");
        ok = false;
    }
    if (!ok) break;
    prev_cmd = cmd;
  }
  flush();
  return out;
}

Polyline parse_points(const std::string& s) {
  Polyline p;
  Numbers in(s);
  for (double x, y; in.next(x) && in.next(y);) p.push_back({x, y});
  return p;
}

/// Snaps vertices within tol to one representative, splits segments at vertices within tol of
/// their interior, and drops degenerate or duplicate pieces.
std::vector<std::pair<Point, Point>> clean(const std::vector<Polyline>& lines, double tol) {
  std::vector<Point> reps;
  std::map<std::pair<long long, long long>, std::vector<int>> cells;
  const double cs = std::max(tol, 1e-300);
  auto snap = [&](Point p) {
    const long long cx = static_cast<long long>(std::floor(p.x / cs)), cy = static_cast<long long>(std::floor(p.y / cs));
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        const auto it = cells.find({cx + dx, cy + dy});
        if (it == cells.end()) continue;
        for (int r : it->second) {
          if (dist(reps[static_cast<std::size_t>(r)], p) <= tol) return reps[static_cast<std::size_t>(r)];
        }
      }
    }
    cells[{cx, cy}].push_back(static_cast<int>(reps.size()));
    reps.push_back(p);
    return p;
  };
  std::vector<std::pair<Point, Point>> segs;
  for (const auto& l : lines) {
    for (std::size_t i = 0; i + 1 < l.size(); ++i) {
      const Point a = snap(l[i]), b = snap(l[i + 1]);
      if (!(a == b)) segs.emplace_back(a, b);
    }
  }
  // T-junctions: split at vertices lying on another segment's interior
  std::vector<Point> verts = reps;
  std::sort(verts.begin(), verts.end(), [](Point p, Point q) { return p.x != q.x ? p.x < q.x : p.y < q.y; });
  std::vector<std::pair<Point, Point>> split;
  for (const auto& [a, b] : segs) {
    const double lo = std::min(a.x, b.x) - tol, hi = std::max(a.x, b.x) + tol;
    const double ylo = std::min(a.y, b.y) - tol, yhi = std::max(a.y, b.y) + tol;
    std::vector<std::pair<double, Point>> cuts;
    auto it = std::lower_bound(verts.begin(), verts.end(), lo, [](Point p, double x) { return p.x < x; });
    for (; it != verts.end() && it->x <= hi; ++it) {
      const Point v = *it;
      if (v.y < ylo || v.y > yhi || v == a || v == b) continue;
      if (point_segment_distance(v, a, b) > tol) continue;
      const double t = project_param(v, a, b);
      if (t > 0.0 && t < 1.0) cuts.emplace_back(t, v);
    }
    std::sort(cuts.begin(), cuts.end(), [](const auto& p, const auto& q) { return p.first < q.first; });
    Point prev = a;
    for (const auto& [t, v] : cuts) {
      if (!(v == prev)) split.emplace_back(prev, v);
      prev = v;
    }
    if (!(prev == b)) split.emplace_back(prev, b);
  }
  // duplicates in either direction
  for (auto& [a, b] : split) {
    if (b.x < a.x || (b.x == a.x && b.y < a.y)) std::swap(a, b);
  }
  auto less = [](const std::pair<Point, Point>& p, const std::pair<Point, Point>& q) {
    const std::array<double, 4> x{p.first.x, p.first.y, p.second.x, p.second.y};
    const std::array<double, 4> y{q.first.x, q.first.y, q.second.x, q.second.y};
    return x < y;
  };
  std::sort(split.begin(), split.end(), less);
  split.erase(std::unique(split.begin(), split.end(),
                          [](const auto& p, const auto& q) { return p.first == q.first && p.second == q.second; }),
              split.end());
  return split;
}

}  // namespace

void flatten_cubic(Point p0, Point p1, Point p2, Point p3, double tol, std::vector<Point>& out) {
  struct Piece {
    Point a, b, c, d;
    int depth;
  };
  std::vector<Piece> stack{{p0, p1, p2, p3, 0}};
  while (!stack.empty()) {
    const Piece s = stack.back();
    stack.pop_back();
    // the curve stays within the hull of its control points
    const double dev = std::max(point_segment_distance(s.b, s.a, s.d), point_segment_distance(s.c, s.a, s.d));
    if (dev < tol || s.depth >= 24) {
      out.push_back(s.d);
      continue;
    }
    const Point ab = lerp(s.a, s.b, 0.5), bc = lerp(s.b, s.c, 0.5), cd = lerp(s.c, s.d, 0.5);
    const Point abc = lerp(ab, bc, 0.5), bcd = lerp(bc, cd, 0.5), m = lerp(abc, bcd, 0.5);
    stack.push_back({m, bcd, cd, s.d, s.depth + 1});
    stack.push_back({s.a, ab, abc, m, s.depth + 1});
  }
}

Scene import_svg_string(const std::string& svg, const SvgImportOptions& opt, std::vector<std::string>* warnings) {
  static const std::regex tag_re(R"(<\s*(/?)\s*([A-Za-z][-A-Za-z0-9_:]*)([^>]*?)(/?)\s*>)");
  std::vector<Affine> stack{Affine{}};
  std::vector<Polyline> lines;
  std::map<std::string, int> skipped;
  static const std::vector<std::string> ignored{"svg", "title", "desc", "defs", "metadata", "style", "sodipodi:namedview"};
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), tag_re); it != std::sregex_iterator(); ++it) {
    const bool closing = (*it)[1].length() > 0;
    const std::string name = (*it)[2];
    const std::string body = (*it)[3];
    const bool self_closing = (*it)[4].length() > 0;
    if (name == "g") {
      if (closing) {
        if (stack.size() > 1) stack.pop_back();
      } else if (!self_closing) {
        const auto a = attributes(body);
        const auto t = a.count("transform") ? parse_transform(a.at("transform"), warnings) : Affine{};
        stack.push_back(stack.back() * t);
      }
      continue;
    }
    if (closing) continue;
    const auto a = attributes(body);
    const Affine m = stack.back() * (a.count("transform") ? parse_transform(a.at("transform"), warnings) : Affine{});
    std::vector<Polyline> found;
    if (name == "path") {
      if (a.count("d")) found = parse_path(a.at("d"), opt.flatten_tolerance, warnings);
    } else if (name == "line") {
      found.push_back({{attr_num(a, "x1"), attr_num(a, "y1")}, {attr_num(a, "x2"), attr_num(a, "y2")}});
    } else if (name == "polyline" || name == "polygon") {
      if (a.count("points")) {
        Polyline p = parse_points(a.at("points"));
        if (name == "polygon" && p.size() >= 3) p.push_back(p.front());
        found.push_back(std::move(p));
      }
    } else {
      if (std::find(ignored.begin(), ignored.end(), name) == ignored.end() && name.rfind("?", 0) != 0 &&
          name.rfind("!", 0) != 0)
        ++skipped[name];
      continue;
    }
    for (auto& pl : found) {
      // svg y points down
      for (auto& p : pl) {
        p = m(p);
        p.y = -p.y;
      }
      lines.push_back(std::move(pl));
    }
  }
  if (warnings) {
    for (const auto& [name, n] : skipped) warnings->push_back("skipped " + std::to_string(n) + " unsupported <" + name + "> element(s)");
  }
  auto segs = clean(lines, opt.merge_tolerance);
  if (segs.empty()) throw SvgError("no line geometry found");

  std::vector<Segment> check;
  check.reserve(segs.size());
  for (const auto& [p, q] : segs) check.push_back({p, q, SegKind::Geometry});
  const auto bad = find_crossings(check, 16);
  if (!bad.empty()) {
    std::ostringstream os;
    os << "input has " << (bad.size() >= 16 ? "at least " : "") << bad.size() << " crossing pair(s):";
    for (const auto& [i, j] : bad) {
      const auto& s = check[static_cast<std::size_t>(i)];
      const auto& t = check[static_cast<std::size_t>(j)];
      os << " [(" << s.a.x << ',' << s.a.y << ")-(" << s.b.x << ',' << s.b.y << ") x (" << t.a.x << ',' << t.a.y
         << ")-(" << t.b.x << ',' << t.b.y << ")]";
    }
    throw SvgError(os.str());
  }
  Box box;
  for (const auto& [p, q] : segs) {
    box.expand(p);
    box.expand(q);
  }
  const double mg = opt.margin * std::max(box.width(), box.height());
  box.lo = box.lo - Point{mg, mg};
  box.hi = box.hi + Point{mg, mg};
  return normalize_scene(make_scene(segs, box, "svg", "svg import"));
}

Scene import_svg(const std::string& path, const SvgImportOptions& opt, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw SvgError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Scene sc = import_svg_string(ss.str(), opt, warnings);
  sc.name = path.substr(path.find_last_of("/\\") + 1);
  sc.provenance = "svg " + path;
  return sc;
}

}  // namespace mwt
