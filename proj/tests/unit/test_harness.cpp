#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "mwt/cdt.hpp"
#include "mwt/experiment.hpp"
#include "mwt/generators.hpp"
#include "mwt/render.hpp"
#include "mwt/svg_import.hpp"
#include "test_support.hpp"

using namespace mwt;

namespace {

bool same_geometry(const Scene& a, const Scene& b) {
  if (a.segments.size() != b.segments.size()) return false;
  for (std::size_t i = 0; i < a.segments.size(); ++i) {
    if (!(a.segments[i].a == b.segments[i].a) || !(a.segments[i].b == b.segments[i].b)) return false;
  }
  return true;
}

std::size_t count_of(const std::string& s, const std::string& what) {
  std::size_t n = 0;
  for (auto p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(Generators, Deterministic) {
  EXPECT_TRUE(same_geometry(gen_lines(64, LineOrientation::Uniform, 1.0, 5), gen_lines(64, LineOrientation::Uniform, 1.0, 5)));
  EXPECT_FALSE(same_geometry(gen_lines(64, LineOrientation::Uniform, 1.0, 5), gen_lines(64, LineOrientation::Uniform, 1.0, 6)));
  EXPECT_TRUE(same_geometry(gen_grass(16, 5, 2), gen_grass(16, 5, 2)));
  EXPECT_TRUE(same_geometry(gen_hair(4, 6, 2), gen_hair(4, 6, 2)));
}

TEST(Generators, SingleLineLength) {
  EXPECT_DOUBLE_EQ(line_length(1, 1.0), 0.95);
  EXPECT_DOUBLE_EQ(line_length(1, 3.0), 0.95);
  EXPECT_DOUBLE_EQ(line_length(100, 1.0), 0.095);
  for (auto o : {LineOrientation::Vertical, LineOrientation::Uniform, LineOrientation::Diagonal}) {
    for (double lf : {1.0, 3.0}) {
      const Scene sc = gen_lines(1, o, lf, 3);
      ASSERT_EQ(sc.geometry_count(), 1u);
      EXPECT_NEAR(sc.segments[0].length(), 0.95, 1e-12);
      EXPECT_TRUE(kUnitBox.contains(sc.segments[0].a) && kUnitBox.contains(sc.segments[0].b));
    }
  }
}

TEST(Generators, LinesAreValidScenes) {
  for (auto o : {LineOrientation::Vertical, LineOrientation::Uniform, LineOrientation::Diagonal}) {
    for (double lf : {0.1, 1.0, 3.0}) {
      const Scene sc = gen_lines(100, o, lf, 11);
      EXPECT_EQ(sc.geometry_count(), 100u);
      EXPECT_TRUE(find_crossings(sc.geometry()).empty());
      for (const auto& s : sc.geometry()) EXPECT_TRUE(kUnitBox.contains(s.a) && kUnitBox.contains(s.b));
    }
  }
}

TEST(Generators, VerticalJitterWithinTenDegrees) {
  const Scene sc = gen_lines(50, LineOrientation::Vertical, 1.0, 12);
  for (const auto& s : sc.geometry()) {
    const double ang = std::atan2(std::abs(s.b.x - s.a.x), std::abs(s.b.y - s.a.y));
    EXPECT_LE(ang, 10.0 * std::numbers::pi / 180.0 + 1e-12);
  }
}

TEST(Generators, GrassHasNoCrossings) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Scene sc = gen_grass(32, 10, seed);
    EXPECT_EQ(sc.geometry_count(), 320u);
    EXPECT_TRUE(find_crossings(sc.geometry()).empty());
    EXPECT_NO_THROW(validate_scene(sc));
    EXPECT_NEAR(std::max(sc.box.width(), sc.box.height()), 1.0, 1e-12);
  }
}

TEST(Generators, HairKeepsTheCentreEmpty) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Scene sc = gen_hair(16, 12, seed);
    EXPECT_TRUE(find_crossings(sc.geometry()).empty());
    for (const auto& s : sc.geometry()) EXPECT_GE(point_segment_distance(kHairCenter, s.a, s.b), kHairEmptyRadius);
  }
}

TEST(Generators, HairOnePerSideIsTwoStrands) {
  const Scene sc = gen_hair(1, 7, 4);
  EXPECT_EQ(sc.geometry_count(), 14u);
  int left = 0, right = 0;
  for (const auto& s : sc.geometry()) {
    if (s.a.x == 0.0 || s.b.x == 0.0) ++left;
    if (s.a.x == 1.0 || s.b.x == 1.0) ++right;
  }
  EXPECT_EQ(left, 1);
  EXPECT_EQ(right, 1);
}

TEST(Generators, CurveLinesLayout) {
  const Scene one = gen_curve_lines(1);
  const Scene two = gen_curve_lines(2);
  EXPECT_EQ(one.geometry_count(), 65u);
  ASSERT_EQ(two.geometry_count(), 66u);
  EXPECT_NEAR(two.segments[64].a.y - two.segments[65].a.y, 0.02, 1e-12);
  EXPECT_TRUE(find_crossings(two.geometry()).empty());
}

TEST(Generators, OrientationNames) {
  for (auto o : {LineOrientation::Vertical, LineOrientation::Uniform, LineOrientation::Diagonal}) {
    EXPECT_EQ(line_orientation_from_string(to_string(o)), o);
  }
  EXPECT_THROW(line_orientation_from_string("sideways"), std::invalid_argument);
}

TEST(Scene, BoundarySplitAtTouchingEndpoints) {
  const Scene sc = make_scene({{{0.0, 0.5}, {0.5, 0.5}}}, kUnitBox);
  EXPECT_EQ(sc.geometry_count(), 1u);
  EXPECT_EQ(sc.segments.size(), 1u + 5u);
  double perimeter = 0.0;
  for (std::size_t i = 1; i < sc.segments.size(); ++i) perimeter += sc.segments[i].length();
  EXPECT_NEAR(perimeter, 4.0, 1e-15);
}

TEST(Scene, RoundTrip) {
  const Scene sc = gen_grass(4, 3, 9);
  std::stringstream ss;
  write_scene(ss, sc);
  const Scene back = read_scene(ss);
  EXPECT_TRUE(same_geometry(sc, back));
  EXPECT_EQ(sc.box.lo, back.box.lo);
  EXPECT_EQ(sc.box.hi, back.box.hi);
}

TEST(Normalize, IdentityScaleAndRatios) {
  const Scene unit = gen_lines(10, LineOrientation::Uniform, 1.0, 3);
  EXPECT_TRUE(same_geometry(normalize_scene(unit), unit));

  std::vector<std::pair<Point, Point>> big;
  for (const auto& s : unit.geometry()) big.push_back({s.a * 40.0 + Point{3, -7}, s.b * 40.0 + Point{3, -7}});
  const Scene scaled = normalize_scene(make_scene(big, Box{{3, -7}, {43, 33}}));
  for (std::size_t i = 0; i < unit.geometry_count(); ++i) {
    EXPECT_NEAR(scaled.segments[i].a.x, unit.segments[i].a.x, 1e-12);
    EXPECT_NEAR(scaled.segments[i].b.y, unit.segments[i].b.y, 1e-12);
  }

  const Scene wide = normalize_scene(make_scene({{{1, 1}, {3, 2}}}, Box{{0, 0}, {4, 2}}));
  EXPECT_DOUBLE_EQ(wide.box.width(), 1.0);
  EXPECT_DOUBLE_EQ(wide.box.height(), 0.5);
  EXPECT_NEAR(wide.segments[0].length(), std::sqrt(5.0) / 4.0, 1e-15);
}

TEST(SvgImport, SingleLine) {
  const Scene sc = import_svg_string(R"(<svg xmlns="http://www.w3.org/2000/svg"><line x1="10" y1="10" x2="110" y2="10"/></svg>)");
  ASSERT_EQ(sc.geometry_count(), 1u);
  EXPECT_NEAR(sc.segments[0].length(), 1.0 / 1.02, 1e-12);
  EXPECT_NEAR(std::max(sc.box.width(), sc.box.height()), 1.0, 1e-12);
}

TEST(SvgImport, MergesNearbyEndpoints) {
  const Scene sc = import_svg_string(
      R"(<svg><path d="M 0 0 L 10 0"/><path d="M 10.0000001 0 L 10 10"/></svg>)");
  ASSERT_EQ(sc.geometry_count(), 2u);
  std::vector<Point> ends;
  for (const auto& s : sc.geometry()) {
    for (Point q : {s.a, s.b}) {
      if (std::find(ends.begin(), ends.end(), q) == ends.end()) ends.push_back(q);
    }
  }
  EXPECT_EQ(ends.size(), 3u);
}

TEST(SvgImport, CircleOfFourBeziers) {
  const double k = 0.5522847498 * 50.0;
  std::ostringstream d;
  d << "M 100 50 C 100 " << 50 + k << " " << 50 + k << " 100 50 100 "
    << "C " << 50 - k << " 100 0 " << 50 + k << " 0 50 "
    << "C 0 " << 50 - k << " " << 50 - k << " 0 50 0 "
    << "C " << 50 + k << " 0 100 " << 50 - k << " 100 50 Z";
  const Scene sc = import_svg_string("<svg><path d=\"" + d.str() + "\"/></svg>");
  ASSERT_GT(sc.geometry_count(), 8u);
  // back in SVG units the chain stays within the cubic's own deviation from the circle plus the tolerance
  const double s = 100.0 * 1.02;
  const Point c{0.5, 0.5};
  for (const auto& seg : sc.geometry()) {
    for (Point p : {seg.a, seg.b, (seg.a + seg.b) * 0.5}) {
      EXPECT_NEAR(dist(p, c) * s, 50.0, 1e-3 + 0.03) << p.x << ' ' << p.y;
    }
  }
  double total = 0.0;
  for (const auto& seg : sc.geometry()) total += seg.length() * s;
  EXPECT_NEAR(total, 100.0 * std::numbers::pi, 0.05);
}

TEST(SvgImport, FlattenTolerance) {
  std::vector<Point> out;
  const Point p0{0, 0}, p1{0, 10}, p2{10, 10}, p3{10, 0};
  flatten_cubic(p0, p1, p2, p3, 1e-3, out);
  ASSERT_FALSE(out.empty());
  EXPECT_EQ(out.back(), p3);
  auto bez = [&](double t) {
    const double u = 1 - t;
    return p0 * (u * u * u) + p1 * (3 * u * u * t) + p2 * (3 * u * t * t) + p3 * (t * t * t);
  };
  std::vector<Point> poly{p0};
  poly.insert(poly.end(), out.begin(), out.end());
  for (int i = 0; i <= 1000; ++i) {
    const Point q = bez(i / 1000.0);
    double best = 1e9;
    for (std::size_t j = 1; j < poly.size(); ++j) best = std::min(best, point_segment_distance(q, poly[j - 1], poly[j]));
    EXPECT_LT(best, 1e-3);
  }
}

TEST(SvgImport, CrossingIsAnError) {
  EXPECT_THROW(import_svg_string(R"(<svg><line x1="0" y1="0" x2="10" y2="10"/><line x1="0" y1="10" x2="10" y2="0"/></svg>)"),
               SvgError);
}

TEST(SvgImport, SkipsUnknownElementsWithWarning) {
  std::vector<std::string> warnings;
  const Scene sc = import_svg_string(R"(<svg><rect x="0" y="0" width="5" height="5"/><line x1="0" y1="0" x2="10" y2="0"/></svg>)",
                                     {}, &warnings);
  EXPECT_EQ(sc.geometry_count(), 1u);
  EXPECT_FALSE(warnings.empty());
}

TEST(SampleRays, DeterministicAndOffGeometry) {
  const Scene sc = gen_lines(50, LineOrientation::Uniform, 1.0, 2);
  const auto a = sample_rays(sc, 2000, 7), b = sample_rays(sc, 2000, 7);
  ASSERT_EQ(a.size(), 2000u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].origin, b[i].origin);
    EXPECT_EQ(a[i].dir, b[i].dir);
    EXPECT_TRUE(sc.box.contains(a[i].origin));
    EXPECT_NEAR(std::hypot(a[i].dir.x, a[i].dir.y), 1.0, 1e-12);
    for (const auto& s : sc.segments) EXPECT_GE(point_segment_distance(a[i].origin, s.a, s.b), 1e-9);
  }
}

TEST(SampleRays, AnglesAreUniform) {
  const auto rays = sample_rays(mwt::testing::empty_square(), 100000, 3);
  const int bins = 36;
  std::vector<int> h(bins, 0);
  for (const auto& r : rays) {
    double a = std::atan2(r.dir.y, r.dir.x);
    if (a < 0) a += 2 * std::numbers::pi;
    ++h[std::min(bins - 1, static_cast<int>(a / (2 * std::numbers::pi) * bins))];
  }
  const double e = 100000.0 / bins;
  double chi2 = 0.0;
  for (int c : h) chi2 += (c - e) * (c - e) / e;
  // 35 degrees of freedom, p = 0.001 critical value
  EXPECT_LT(chi2, 66.62);
}

TEST(SampleRays, StartTrianglesContainOrigins) {
  const Scene sc = gen_grass(8, 5, 1);
  const auto t = refine_cdt(build_cdt(sc), 20.0, 1e-2).tri;
  const auto rays = sample_rays(sc, 3000, 4);
  const auto starts = locate_starts(t, rays);
  for (std::size_t i = 0; i < rays.size(); ++i) EXPECT_TRUE(triangle_contains(t, starts[i], rays[i].origin));
}

TEST(Experiment, MeansAreTotalsOverRays) {
  const Scene sc = gen_lines(30, LineOrientation::Uniform, 1.0, 8);
  const auto rays = sample_rays(sc, 1000, 9);
  std::vector<NamedTriangulation> ts;
  ts.push_back({"cdt", build_cdt(sc)});
  ExperimentOptions opt;
  opt.threads = 2;
  const auto rep = run_experiment(sc, ts, rays, 9, opt);
  ASSERT_EQ(rep.methods.size(), 3u);
  for (const auto& m : rep.methods) {
    EXPECT_DOUBLE_EQ(m.mean_ops, static_cast<double>(m.total_ops) / 1000.0) << m.label;
    EXPECT_GT(m.cells, 0u);
  }
  const auto* cdt = rep.find("cdt");
  ASSERT_NE(cdt, nullptr);
  EXPECT_EQ(cdt->total_ops, cdt->totals.tri_steps);
  EXPECT_DOUBLE_EQ(rep.mean(*cdt, &TraversalStats::tri_steps), cdt->mean_ops);
  EXPECT_NEAR(cdt->edge_length, ts[0].tri.total_edge_length(), 1e-12);
  // thread count does not change the counts
  opt.threads = 1;
  const auto serial = run_experiment(sc, ts, rays, 9, opt);
  for (std::size_t i = 0; i < rep.methods.size(); ++i) EXPECT_EQ(rep.methods[i].total_ops, serial.methods[i].total_ops);
}

TEST(Experiment, EmptySquare) {
  const Scene sc = mwt::testing::empty_square();
  const auto rays = sample_rays(sc, 200, 1);
  std::vector<NamedTriangulation> ts;
  ts.push_back({"cdt", build_cdt(sc)});
  const auto rep = run_experiment(sc, ts, rays, 1);
  const auto* cdt = rep.find("cdt");
  ASSERT_NE(cdt, nullptr);
  EXPECT_LE(cdt->mean_ops, 2.0);
  EXPECT_EQ(cdt->cells, 2u);
}

TEST(Experiment, JsonAndCsv) {
  const Scene sc = gen_lines(10, LineOrientation::Uniform, 1.0, 8);
  std::vector<NamedTriangulation> ts;
  ts.push_back({"cdt", build_cdt(sc)});
  const auto rep = run_experiment(sc, ts, sample_rays(sc, 100, 2), 2);
  std::ostringstream js, csv;
  write_json(js, {rep}, {{"rays", "100"}});
  const auto j = nlohmann::json::parse(js.str());
  EXPECT_EQ(j["config"]["rays"], "100");
  ASSERT_EQ(j["reports"].size(), 1u);
  EXPECT_EQ(j["reports"][0]["methods"].size(), 3u);
  write_csv(csv, {rep});
  const std::string rows = csv.str();
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 4);
}

TEST(Render, OnePolygonPerTriangle) {
  const Scene sc = gen_lines(6, LineOrientation::Uniform, 1.0, 2);
  const auto t = build_cdt(sc);
  const std::string svg = render_svg(sc, t, sample_rays(sc, 3, 1));
  EXPECT_EQ(count_of(svg, "<polygon class=\"tri\""), t.num_triangles());
  EXPECT_NE(svg.find("<svg"), std::string::npos);
}

TEST(Render, EmptySceneOutline) {
  const std::string svg = render_svg(mwt::testing::empty_square());
  EXPECT_EQ(count_of(svg, "class=\"tri\""), 0u);
  EXPECT_EQ(count_of(svg, "<polygon"), 1u);
}
