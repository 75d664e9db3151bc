#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "mwt/cdt.hpp"
#include "mwt/generators.hpp"
#include "mwt/mesh_io.hpp"
#include "test_support.hpp"

using namespace mwt;
using mwt::testing::covered_area;
using mwt::testing::mesh_from;

namespace {

/// Horizontal segment L-R with an OnSegment midpoint M, a free vertex T above and B below.
struct ChainFixture {
  Scene scene = make_scene({{{0.25, 0.5}, {0.75, 0.5}}}, kUnitBox);
  Triangulation tri;
  VId L = 4, R = 5, M = 6, T = 7, B = 8;
  ChainFixture() {
    const std::vector<Point> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.25, 0.5}, {0.75, 0.5}, {0.5, 0.5}, {0.5, 0.75}, {0.5, 0.25}};
    tri = mesh_from(scene, pts,
                    {{L, M, T}, {M, R, T}, {R, 2, T}, {T, 2, 3}, {L, T, 3}, {0, L, 3}, {R, 1, 2}, {M, L, B}, {R, M, B},
                     {L, 0, B}, {0, 1, B}, {B, 1, R}});
  }
};

/// Free vertex V3 of degree three inside the triangle V1 V2 H; V1-V2 is the edge of interest.
struct OneHopFixture {
  Triangulation tri;
  VId V1 = 4, V2 = 5, H = 6, V3 = 7;
  explicit OneHopFixture(Point v3 = {0.5, 0.55}) {
    const std::vector<Point> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.3, 0.4}, {0.7, 0.4}, {0.5, 0.8}, v3};
    tri = mesh_from(mwt::testing::empty_square(), pts,
                    {{V1, V2, V3}, {V2, H, V3}, {H, V1, V3}, {0, 1, V2}, {0, V2, V1}, {1, 2, V2}, {V2, 2, H}, {2, 3, H},
                     {3, V1, H}, {3, 0, V1}});
  }
};

Scene random_scene(int n, std::uint64_t seed) { return gen_lines(n, LineOrientation::Uniform, 1.0, seed); }

std::set<EdgeKey> edge_set(const Triangulation& t) {
  std::set<EdgeKey> s;
  t.for_each_edge([&](EdgeRef e) { s.insert(t.key(e)); });
  return s;
}

/// Every geometry segment is covered by an endpoint-sorted chain of its constrained edges.
bool covers_segments(const Triangulation& t) {
  const auto& info = t.info();
  for (std::size_t s = 0; s < info.segments.size(); ++s) {
    const auto& sg = info.segments[s];
    std::vector<std::pair<double, double>> pieces;
    t.for_each_edge([&](EdgeRef e) {
      if (t.edge_segment(e) != static_cast<int>(s)) return;
      const auto [a, b] = t.edge_vertices(e);
      double u = project_param(t.pos(a), sg.a, sg.b), v = project_param(t.pos(b), sg.a, sg.b);
      if (u > v) std::swap(u, v);
      pieces.push_back({u, v});
    });
    std::sort(pieces.begin(), pieces.end());
    double at = 0.0;
    for (const auto& [u, v] : pieces) {
      if (std::fabs(u - at) > 1e-12) return false;
      at = v;
    }
    if (std::fabs(at - 1.0) > 1e-12) return false;
  }
  return true;
}

}  // namespace

TEST(BuildCdt, EmptySquare) {
  const auto t = build_cdt(mwt::testing::empty_square());
  EXPECT_EQ(t.num_triangles(), 2u);
  EXPECT_EQ(t.num_edges(), 5u);
  EXPECT_NEAR(t.total_edge_length(), 4.0 + std::sqrt(2.0), 1e-15);
  EXPECT_TRUE(t.validate().empty());
}

TEST(BuildCdt, DiagonalSegmentIsConstrained) {
  const auto t = build_cdt(make_scene({{{0.2, 0.2}, {0.8, 0.8}}}, kUnitBox));
  EXPECT_TRUE(t.validate().empty());
  int constrained = 0;
  t.for_each_edge([&](EdgeRef e) { constrained += t.edge_segment(e) == 0; });
  EXPECT_EQ(constrained, 1);
  EXPECT_TRUE(covers_segments(t));
}

TEST(BuildCdt, EmptyCircumcircleOnUnconstrainedEdges) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto t = build_cdt(random_scene(20, seed));
    ASSERT_TRUE(t.validate().empty());
    EXPECT_EQ(t.num_vertices(), t.info().points.size());
    t.for_each_edge([&](EdgeRef e) {
      if (t.is_constrained(e)) return;
      const auto tw = t.twin(e);
      ASSERT_TRUE(tw);
      const auto& tr = t.tri(e.t);
      const Point d = t.pos(t.tri(tw->t).v[static_cast<std::size_t>(tw->i)]);
      EXPECT_LE(in_circle(t.pos(tr.v[0]), t.pos(tr.v[1]), t.pos(tr.v[2]), d), 0.0);
    });
  }
}

TEST(BuildCdt, RejectsCrossingAndDuplicateSegments) {
  try {
    make_scene({{{0.1, 0.1}, {0.9, 0.9}}, {{0.1, 0.9}, {0.9, 0.1}}}, kUnitBox);
    FAIL() << "crossing accepted";
  } catch (const SceneError& e) {
    EXPECT_EQ(e.first(), 0);
    EXPECT_EQ(e.second(), 1);
  }
  EXPECT_THROW(make_scene({{{0.1, 0.1}, {0.9, 0.9}}, {{0.9, 0.9}, {0.1, 0.1}}}, kUnitBox), SceneError);
  Scene raw = mwt::testing::empty_square();
  raw.segments.insert(raw.segments.begin(), {Segment{{0.1, 0.1}, {0.9, 0.9}}, Segment{{0.1, 0.9}, {0.9, 0.1}}});
  EXPECT_THROW(build_cdt(raw), SceneError);
}

TEST(RefineCdt, ConformingInputUnchanged) {
  const auto t = build_cdt(mwt::testing::empty_square());
  const auto r = refine_cdt(t, 20.0, 10.0);
  EXPECT_EQ(r.inserted, 0u);
  EXPECT_EQ(r.tri.num_triangles(), 2u);
  EXPECT_FALSE(r.partial);
}

TEST(RefineCdt, ThinTriangleBetweenParallelLinesIsSplit) {
  const auto t = build_cdt(gen_curve_lines(2));
  const auto r = refine_cdt(t, 20.0);
  EXPECT_GT(r.inserted, 0u);
  EXPECT_TRUE(r.tri.validate().empty());
  // Steiner vertices land on the two top lines
  const int top0 = 64, top1 = 65;
  int on_top = 0;
  for (const auto& v : r.tri.vertices()) on_top += v.alive && v.dof == Dof::OnSegment && (v.host == top0 || v.host == top1);
  EXPECT_GT(on_top, 0);
}

TEST(RefineCdt, MinimumAngleOnSimplePolygon) {
  std::vector<std::pair<Point, Point>> poly;
  const int k = 7;
  std::vector<Point> corner;
  for (int i = 0; i < k; ++i) {
    const double a = 2 * std::numbers::pi * i / k;
    corner.push_back({0.5 + 0.3 * std::cos(a), 0.5 + 0.3 * std::sin(a)});
  }
  for (int i = 0; i < k; ++i) poly.push_back({corner[static_cast<std::size_t>(i)], corner[static_cast<std::size_t>((i + 1) % k)]});
  const auto r = refine_cdt(build_cdt(make_scene(poly, kUnitBox)), 25.0, 1e-2);
  ASSERT_FALSE(r.partial);
  EXPECT_TRUE(r.tri.validate().empty());
  const auto& t = r.tri;
  for (std::size_t i = 0; i < t.triangle_capacity(); ++i) {
    const auto& tr = t.triangles()[i];
    if (!tr.alive) continue;
    for (int c = 0; c < 3; ++c) {
      const Point p = t.pos(tr.v[static_cast<std::size_t>(c)]);
      const Point a = t.pos(tr.v[static_cast<std::size_t>(next3(c))]), b = t.pos(tr.v[static_cast<std::size_t>(prev3(c))]);
      const double ang = std::acos(std::clamp(dot(a - p, b - p) / (norm(a - p) * norm(b - p)), -1.0, 1.0)) * 180 / std::numbers::pi;
      if (!angle_forced(t, static_cast<TId>(i), c)) EXPECT_GE(ang, 25.0 - 1e-9) << "triangle " << i;
    }
    EXPECT_LE(0.5 * orient2d_value(t.pos(tr.v[0]), t.pos(tr.v[1]), t.pos(tr.v[2])), 1e-2 + 1e-15);
  }
}

TEST(RefineCdt, RejectsAnglesAboveThirtyThree) {
  EXPECT_THROW(refine_cdt(build_cdt(mwt::testing::empty_square()), 34.0), std::invalid_argument);
}

TEST(OptimalRefinedCdt, NoRefinementGridEqualsCdt) {
  const Scene sc = random_scene(12, 3);
  const auto r = optimal_refined_cdt(sc, {0.0}, {std::numeric_limits<double>::infinity()});
  const auto c = build_cdt(sc);
  EXPECT_EQ(r.tri.num_triangles(), c.num_triangles());
  EXPECT_EQ(edge_set(r.tri), edge_set(c));
  EXPECT_DOUBLE_EQ(r.length, c.total_edge_length());
}

TEST(OptimalRefinedCdt, ImprovesTheCurveScene) {
  const Scene sc = gen_curve_lines(1);
  EXPECT_LT(optimal_refined_cdt(sc).length, build_cdt(sc).total_edge_length());
}

TEST(OptimalRefinedCdt, ReturnsTheMinimumOverTheGrid) {
  const Scene sc = gen_grass(6, 5, 4);
  const std::vector<double> angles{0.0, 15.0, 25.0};
  const std::vector<double> areas{std::numeric_limits<double>::infinity(), 1e-2, 1e-3};
  const auto r = optimal_refined_cdt(sc, angles, areas);
  const auto cdt = build_cdt(sc);
  double best = std::numeric_limits<double>::infinity();
  for (double a : angles) {
    for (double m : areas) {
      const auto cell = refine_cdt(cdt, a, m);
      if (!cell.partial) best = std::min(best, cell.tri.total_edge_length());
    }
  }
  EXPECT_EQ(r.cells.size(), 9u);
  EXPECT_DOUBLE_EQ(r.length, best);
  EXPECT_DOUBLE_EQ(r.tri.total_edge_length(), best);
}

TEST(FlipEdge, SquareDiagonalIsAnInvolution) {
  auto t = build_cdt(mwt::testing::empty_square());
  const auto before = edge_set(t);
  std::optional<EdgeRef> diag;
  t.for_each_edge([&](EdgeRef e) {
    if (!t.is_constrained(e)) diag = e;
  });
  ASSERT_TRUE(diag);
  const auto [a, b] = t.edge_vertices(*diag);
  ASSERT_EQ(t.flip(*diag), FlipResult::Flipped);
  EXPECT_FALSE(t.find_edge(a, b));
  EXPECT_NE(edge_set(t), before);
  EXPECT_TRUE(t.validate().empty());
  std::optional<EdgeRef> other;
  t.for_each_edge([&](EdgeRef e) {
    if (!t.is_constrained(e)) other = e;
  });
  ASSERT_EQ(t.flip(*other), FlipResult::Flipped);
  EXPECT_EQ(edge_set(t), before);
}

TEST(FlipEdge, CornerOnStraightConstrainedChainIsNotStrictlyConvex) {
  ChainFixture f;
  ASSERT_TRUE(f.tri.validate().empty());
  ASSERT_NEAR(covered_area(f.tri), 1.0, 1e-15);
  EXPECT_EQ(f.tri.vertex(f.M).dof, Dof::OnSegment);
  auto e = f.tri.find_edge(f.M, f.T);
  ASSERT_TRUE(e);
  EXPECT_EQ(f.tri.flip(*e), FlipResult::RejectedNotConvex);
  e = f.tri.find_edge(f.L, f.M);
  ASSERT_TRUE(e);
  EXPECT_EQ(f.tri.flip(*e), FlipResult::RejectedConstrained);
}

TEST(FlipEdge, RandomFlipsKeepTopology) {
  auto t = refine_cdt(build_cdt(random_scene(20, 9)), 20.0, 1e-2).tri;
  std::mt19937_64 rng(9);
  const auto nv = t.num_vertices(), nt = t.num_triangles();
  int flipped = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto es = t.edges();
    const EdgeRef e = es[std::uniform_int_distribution<std::size_t>(0, es.size() - 1)(rng)];
    if (t.flip(e) != FlipResult::Flipped) continue;
    ++flipped;
    ASSERT_TRUE(t.validate().empty()) << "after flip " << flipped;
    ASSERT_EQ(t.num_vertices(), nv);
    ASSERT_EQ(t.num_triangles(), nt);
    ASSERT_TRUE(covers_segments(t));
  }
  EXPECT_GT(flipped, 100);
}

TEST(Subdivide, SquareCounts) {
  const auto t = build_cdt(mwt::testing::empty_square());
  const auto s = t.subdivided();
  EXPECT_EQ(s.num_triangles(), 8u);
  EXPECT_EQ(s.num_vertices(), 9u);
  EXPECT_TRUE(s.validate().empty());
}

TEST(Subdivide, ConstrainedMidpointsKeepTheirHost) {
  const auto t = build_cdt(random_scene(10, 2));
  const auto s = t.subdivided();
  int onseg = 0;
  t.for_each_edge([&](EdgeRef e) {
    const auto [a, b] = t.edge_vertices(e);
    const Point mid = lerp(t.pos(a), t.pos(b), 0.5);
    for (std::size_t v = 0; v < s.vertex_capacity(); ++v) {
      const auto& vx = s.vertices()[v];
      if (!vx.alive || vx.pos != mid) continue;
      if (t.is_constrained(e)) {
        EXPECT_EQ(vx.dof, Dof::OnSegment);
        EXPECT_EQ(vx.host, t.edge_segment(e));
        ++onseg;
      } else {
        EXPECT_EQ(vx.dof, Dof::Free);
      }
    }
  });
  EXPECT_GT(onseg, 10);
}

TEST(Subdivide, CountsAndLengthIdentity) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto t = refine_cdt(build_cdt(random_scene(15, seed)), 15.0, 5e-2).tri;
    const auto s = t.subdivided();
    EXPECT_EQ(s.num_triangles(), 4 * t.num_triangles());
    EXPECT_EQ(s.num_vertices(), t.num_vertices() + t.num_edges());
    // halves keep the old length; each triangle adds half its perimeter
    double hull = 0.0;
    t.for_each_edge([&](EdgeRef e) {
      if (!t.twin(e)) hull += t.edge_length(e);
    });
    EXPECT_NEAR(s.total_edge_length(), 2.0 * t.total_edge_length() - 0.5 * hull, 1e-12 * t.total_edge_length());
    EXPECT_TRUE(s.validate().empty());
    EXPECT_TRUE(covers_segments(s));
  }
}

TEST(ContractEdge, FreeFreeInteriorEdge) {
  auto t = build_cdt(mwt::testing::empty_square()).subdivided().subdivided();
  bool done = false;
  for (const EdgeRef e : t.edges()) {
    const auto [a, b] = t.edge_vertices(e);
    if (t.vertex(a).dof != Dof::Free || t.vertex(b).dof != Dof::Free || !t.twin(e)) continue;
    const Point mid = lerp(t.pos(a), t.pos(b), 0.5);
    const auto nv = t.num_vertices(), nt = t.num_triangles();
    const auto r = t.contract(e);
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(t.num_vertices(), nv - 1);
    EXPECT_EQ(t.num_triangles(), nt - 2);
    EXPECT_EQ(t.pos(r.survivor), mid);
    EXPECT_TRUE(t.validate().empty());
    done = true;
    break;
  }
  EXPECT_TRUE(done);
}

TEST(ContractEdge, FixedEndpointSurvives) {
  ChainFixture f;
  // pulling T onto L would flatten M R T, so that edge is a topology reject
  ASSERT_EQ(f.tri.contract(*f.tri.find_edge(f.L, f.T)).status, ContractStatus::Topology);
  const Point corner = f.tri.pos(3);
  const auto e = f.tri.find_edge(3, f.T);
  ASSERT_TRUE(e);
  const auto r = f.tri.contract(*e);
  ASSERT_TRUE(r.ok()) << to_string(r.status);
  EXPECT_EQ(r.survivor, 3);
  EXPECT_EQ(f.tri.pos(r.survivor), corner);
  EXPECT_TRUE(f.tri.validate().empty());
}

TEST(ContractEdge, BothFixedAndDifferentSegments) {
  ChainFixture f;
  auto e = f.tri.find_edge(0, 1);
  ASSERT_TRUE(e);
  EXPECT_EQ(f.tri.contract(*e).status, ContractStatus::BothFixed);
  // the triangle inside the V has one constrained side on each segment
  auto s = build_cdt(make_scene({{{0.2, 0.3}, {0.5, 0.7}}, {{0.5, 0.7}, {0.8, 0.3}}}, kUnitBox)).subdivided();
  for (const EdgeRef x : s.edges()) {
    const auto [a, b] = s.edge_vertices(x);
    const auto &va = s.vertex(a), &vb = s.vertex(b);
    if (va.dof == Dof::OnSegment && vb.dof == Dof::OnSegment && va.host != vb.host) {
      EXPECT_EQ(s.contract(x).status, ContractStatus::DifferentSegments);
      return;
    }
  }
  FAIL() << "no edge between different host segments";
}

TEST(ContractEdge, OneHopConfigurationIsRejected) {
  OneHopFixture f;
  ASSERT_TRUE(f.tri.validate().empty());
  ASSERT_NEAR(covered_area(f.tri), 1.0, 1e-15);
  const auto e = f.tri.find_edge(f.V1, f.V2);
  ASSERT_TRUE(e);
  const auto nv = f.tri.num_vertices();
  EXPECT_EQ(f.tri.contract(*e).status, ContractStatus::Topology);
  EXPECT_EQ(f.tri.num_vertices(), nv);
  EXPECT_TRUE(f.tri.validate().empty());
}

TEST(ContractEdge, OnSegmentAbsorbsFreeAndCountsDrop) {
  ChainFixture f;
  const auto e = f.tri.find_edge(f.M, f.B);
  ASSERT_TRUE(e);
  const auto nv = f.tri.num_vertices(), nt = f.tri.num_triangles();
  const auto r = f.tri.contract(*e);
  ASSERT_TRUE(r.ok()) << to_string(r.status);
  EXPECT_EQ(r.survivor, f.M);
  EXPECT_EQ(f.tri.vertex(f.M).dof, Dof::OnSegment);
  EXPECT_NEAR(f.tri.pos(f.M).y, 0.5, 1e-12);
  EXPECT_EQ(f.tri.num_vertices(), nv - 1);
  EXPECT_EQ(f.tri.num_triangles(), nt - 2);
  EXPECT_TRUE(f.tri.validate().empty());
}

TEST(Validate, BrokenNeighborLinkIsReported) {
  auto t = build_cdt(random_scene(8, 4));
  ASSERT_TRUE(t.validate().empty());
  for (std::size_t i = 0; i < t.triangle_capacity(); ++i) {
    auto& tr = t.tri_mut(static_cast<TId>(i));
    for (int k = 0; k < 3; ++k) {
      if (tr.nbr[static_cast<std::size_t>(k)] == kNone) continue;
      const TId other = tr.nbr[static_cast<std::size_t>(k)];
      // point at a third triangle instead
      for (std::size_t j = 0; j < t.triangle_capacity(); ++j) {
        if (static_cast<TId>(j) != other && j != i) {
          tr.nbr[static_cast<std::size_t>(k)] = static_cast<TId>(j);
          break;
        }
      }
      const auto errs = t.validate();
      ASSERT_FALSE(errs.empty());
      int sym = 0;
      for (const auto& m : errs) sym += m.find("symmetr") != std::string::npos;
      EXPECT_GE(sym, 1);
      return;
    }
  }
}

TEST(Validate, RandomEditSequencesStayValid) {
  auto t = refine_cdt(build_cdt(random_scene(12, 5)), 20.0, 1e-2).tri.subdivided();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> jitter(-0.02, 0.02);
  int edits = 0;
  for (int i = 0; i < 3000; ++i) {
    const auto es = t.edges();
    const EdgeRef e = es[std::uniform_int_distribution<std::size_t>(0, es.size() - 1)(rng)];
    bool changed = false;
    switch (i % 3) {
      case 0: changed = t.flip(e) == FlipResult::Flipped; break;
      case 1: changed = t.edge_length(e) < 0.03 && t.contract(e).ok(); break;
      default: {
        const VId v = t.edge_vertices(e).first;
        const Point old = t.pos(v);
        t.set_position(v, t.constrain(v, old + Point{jitter(rng), jitter(rng)}));
        if (!t.star_positive(v)) t.set_position(v, old);
        changed = true;
      }
    }
    if (!changed) continue;
    ++edits;
    ASSERT_TRUE(t.validate().empty()) << "edit " << i;
    ASSERT_TRUE(covers_segments(t)) << "edit " << i;
  }
  EXPECT_GT(edits, 1000);
}

TEST(MeshIo, NativeRoundTrip) {
  const auto t = build_cdt(random_scene(20, 6)).subdivided();
  std::stringstream ss;
  write_mesh(ss, t);
  const auto r = read_mesh(ss);
  EXPECT_EQ(edge_set(r), edge_set(t));
  ASSERT_EQ(r.vertex_capacity(), t.vertex_capacity());
  for (std::size_t i = 0; i < t.vertex_capacity(); ++i) {
    EXPECT_EQ(r.vertices()[i].pos, t.vertices()[i].pos);
    EXPECT_EQ(r.vertices()[i].dof, t.vertices()[i].dof);
    EXPECT_EQ(r.vertices()[i].host, t.vertices()[i].host);
  }
  EXPECT_TRUE(r.validate().empty());
}

TEST(MeshIo, TriangleFormatRoundTrip) {
  const auto t = build_cdt(random_scene(20, 7));
  std::stringstream node, ele, poly;
  write_node(node, t);
  write_ele(ele, t);
  write_poly(poly, t);
  const auto r = read_triangle(scene_of(t), node, ele, &poly);
  EXPECT_EQ(edge_set(r), edge_set(t));
  int cons_t = 0, cons_r = 0;
  t.for_each_edge([&](EdgeRef e) { cons_t += t.is_constrained(e); });
  r.for_each_edge([&](EdgeRef e) { cons_r += r.is_constrained(e); });
  EXPECT_EQ(cons_r, cons_t);
  EXPECT_TRUE(r.validate().empty());
}

TEST(MeshIo, MissingEleSectionIsNamed) {
  const auto dir = std::filesystem::temp_directory_path() / "mwt_io_test";
  std::filesystem::create_directories(dir);
  const auto base = (dir / "only_node").string();
  const auto t = build_cdt(mwt::testing::empty_square());
  {
    std::ofstream node(base + ".node");
    write_node(node, t);
  }
  std::filesystem::remove(base + ".ele");
  try {
    read_triangle_files(base, scene_of(t));
    FAIL() << "no error";
  } catch (const MeshFormatError& e) {
    EXPECT_NE(std::string(e.what()).find(".ele"), std::string::npos);
  }
}

TEST(MeshIo, MalformedLineIsReported) {
  std::istringstream node("4 2 0 0\n0 0 0\n1 1 0\n2 oops 1\n3 0 1\n"), ele("2 3 0\n0 0 1 2\n1 0 2 3\n");
  try {
    read_triangle(mwt::testing::empty_square(), node, ele, nullptr);
    FAIL() << "no error";
  } catch (const MeshFormatError& e) {
    EXPECT_EQ(e.line(), 4);
  }
}

TEST(MeshIo, ExternalFixtureWithMarkers) {
  // a square with one interior segment from (0.25, 0.5) to (0.75, 0.5), written by hand in Triangle style
  const Scene sc = make_scene({{{0.25, 0.5}, {0.75, 0.5}}}, kUnitBox);
  std::istringstream node(
      "# hand-built\n6 2 0 1\n1 0 0 1\n2 1 0 1\n3 1 1 1\n4 0 1 1\n5 0.25 0.5 1\n6 0.75 0.5 1\n");
  std::istringstream ele("6 3 0\n1 1 2 5\n2 2 6 5\n3 2 3 6\n4 3 4 6\n5 4 5 6\n6 4 1 5\n");
  std::istringstream poly("0 2 0 1\n5 1\n1 1 2 1\n2 2 3 1\n3 3 4 1\n4 4 1 1\n5 5 6 1\n0\n");
  const auto t = read_triangle(sc, node, ele, &poly);
  EXPECT_TRUE(t.validate().empty());
  const auto e = t.find_edge(4, 5);
  ASSERT_TRUE(e);
  EXPECT_EQ(t.edge_segment(*e), 0);
  int cons = 0;
  t.for_each_edge([&](EdgeRef x) { cons += t.is_constrained(x); });
  EXPECT_EQ(cons, 5);
}

TEST(TotalEdgeLength, EachSharedEdgeCountedOnce) {
  const auto t = build_cdt(random_scene(10, 8));
  double sum = 0.0;
  for (const auto& tr : t.triangles()) {
    if (!tr.alive) continue;
    for (int i = 0; i < 3; ++i) {
      const double l = dist(t.pos(tr.v[static_cast<std::size_t>(next3(i))]), t.pos(tr.v[static_cast<std::size_t>(prev3(i))]));
      sum += tr.nbr[static_cast<std::size_t>(i)] == kNone ? l : 0.5 * l;
    }
  }
  EXPECT_NEAR(t.total_edge_length(), sum, 1e-12);
}
