#include "mwt/render.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <sstream>

#include "mwt/traversal.hpp"

namespace mwt {

namespace {

class Canvas {
 public:
  Canvas(const Box& box, const RenderOptions& opt) : box_(box), opt_(opt) {
    const double s = std::max(box.width(), box.height());
    scale_ = opt.size / s;
    w_ = box.width() * scale_ + 2 * opt.margin;
    h_ = box.height() * scale_ + 2 * opt.margin;
  }
  std::pair<double, double> px(Point p) const {
    return {opt_.margin + (p.x - box_.lo.x) * scale_, opt_.margin + (box_.hi.y - p.y) * scale_};
  }
  std::string xy(Point p) const {
    const auto [x, y] = px(p);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f,%.3f", x, y);
    return buf;
  }
  void line(std::ostringstream& os, Point a, Point b) const {
    const auto [x1, y1] = px(a);
    const auto [x2, y2] = px(b);
    char buf[160];
    std::snprintf(buf, sizeof buf, "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\"/>\n", x1, y1, x2, y2);
    os << buf;
  }
  void rect(std::ostringstream& os, const Box& b) const {
    os << "<polygon points=\"" << xy(b.lo) << ' ' << xy({b.hi.x, b.lo.y}) << ' ' << xy(b.hi) << ' '
       << xy({b.lo.x, b.hi.y}) << "\"/>\n";
  }
  double width() const { return w_; }
  double height() const { return h_; }

 private:
  Box box_;
  RenderOptions opt_;
  double scale_ = 1.0, w_ = 0.0, h_ = 0.0;
};

std::string document(const Scene& scene, const std::vector<Ray>& rays, const RenderOptions& opt,
                     const std::function<void(const Canvas&, std::ostringstream&)>& overlay) {
  const Canvas cv(scene.box, opt);
  std::ostringstream os;
  char head[256];
  std::snprintf(head, sizeof head,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%.0f\" height=\"%.0f\">\n",
                cv.width(), cv.height());
  os << head;
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (overlay) {
    os << "<g id=\"structure\" stroke=\"blue\" stroke-width=\"0.5\" fill=\"none\">\n";
    overlay(cv, os);
    os << "</g>\n";
  }
  os << "<g id=\"boundary\" stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
  cv.rect(os, scene.box);
  os << "</g>\n<g id=\"geometry\" stroke=\"black\" stroke-width=\"1.5\">\n";
  for (const auto& s : scene.segments) {
    if (s.kind == SegKind::Geometry) cv.line(os, s.a, s.b);
  }
  os << "</g>\n";
  if (!rays.empty()) {
    os << "<g id=\"rays\" stroke=\"red\" stroke-width=\"0.75\">\n";
    for (const Ray& r : rays) {
      Point end;
      if (const auto h = brute_force_closest(scene, r)) {
        end = h->point;
      } else {
        const auto iv = ray_box_interval(r, scene.box);
        end = r.at(iv ? iv->second : 0.0);
      }
      cv.line(os, r.origin, end);
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace

std::string render_svg(const Scene& scene, const std::vector<Ray>& rays, const RenderOptions& opt) {
  return document(scene, rays, opt, nullptr);
}

std::string render_svg(const Scene& scene, const Triangulation& t, const std::vector<Ray>& rays, const RenderOptions& opt) {
  return document(scene, rays, opt, [&](const Canvas& cv, std::ostringstream& os) {
    for (std::size_t i = 0; i < t.triangle_capacity(); ++i) {
      const auto& T = t.tri(static_cast<TId>(i));
      if (!T.alive) continue;
      os << "<polygon class=\"tri\" points=\"" << cv.xy(t.pos(T.v[0])) << ' ' << cv.xy(t.pos(T.v[1])) << ' '
         << cv.xy(t.pos(T.v[2])) << "\"/>\n";
    }
  });
}

std::string render_svg(const Scene& scene, const Bvh& bvh, const std::vector<Ray>& rays, const RenderOptions& opt) {
  return document(scene, rays, opt, [&](const Canvas& cv, std::ostringstream& os) {
    for (const auto& n : bvh.nodes()) {
      if (n.leaf()) cv.rect(os, n.box);
    }
  });
}

std::string render_svg(const Scene& scene, const RopedKdTree& kd, const std::vector<Ray>& rays, const RenderOptions& opt) {
  return document(scene, rays, opt, [&](const Canvas& cv, std::ostringstream& os) {
    for (const auto& n : kd.nodes()) {
      if (n.leaf()) cv.rect(os, n.cell);
    }
  });
}

}  // namespace mwt
