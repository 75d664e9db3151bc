#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mwt/cdt.hpp"
#include "mwt/generators.hpp"
#include "mwt/objective.hpp"
#include "test_support.hpp"

using namespace mwt;
using mwt::testing::mesh_from;

namespace {

const double kDeg = std::numbers::pi / 180.0;

/// Straight constrained chain C0 C1 C2 CN on y = 0.5 with a free vertex F close to C0 above it.
struct TrapFixture {
  Triangulation tri;
  VId C0 = 4, CN = 5, C1 = 6, C2 = 7, F = 8;
  TrapFixture(double c1, double c2) {
    const Scene sc = make_scene({{{0.2, 0.5}, {0.8, 0.5}}}, kUnitBox);
    const std::vector<Point> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.2, 0.5}, {0.8, 0.5}, {c1, 0.5}, {c2, 0.5}, {0.21, 0.53}};
    tri = mesh_from(sc, pts,
                    {{C0, C1, F}, {C1, C2, F}, {C2, CN, F}, {CN, 2, F}, {F, 2, 3}, {C0, F, 3}, {0, C0, 3}, {CN, 1, 2},
                     {0, C1, C0}, {0, C2, C1}, {0, 1, C2}, {1, CN, C2}});
  }
};

/// Sliver L M R whose corner at M is 179.5 degrees. With `constrained`, L-M and M-R are geometry.
Triangulation sliver(bool constrained) {
  const Point L{0.2, 0.5}, M{0.5, 0.5}, R{0.8, 0.5 + 0.3 * std::tan(0.5 * kDeg)};
  const Scene sc = constrained ? make_scene({{L, M}, {M, R}}, kUnitBox) : mwt::testing::empty_square();
  return mesh_from(sc, {{0, 0}, {1, 0}, {1, 1}, {0, 1}, L, M, R},
                   {{4, 5, 6}, {4, 6, 2}, {4, 2, 3}, {0, 4, 3}, {4, 0, 5}, {0, 1, 5}, {5, 1, 6}, {6, 1, 2}});
}

Triangulation random_mesh(std::uint64_t seed, int n = 15) {
  return refine_cdt(build_cdt(gen_lines(n, LineOrientation::Uniform, 1.0, seed)), 20.0, 1e-2).tri.subdivided();
}

/// Straight evaluation of w_c edge by edge, without any of the library's caching or helpers.
double reference_wc(const Triangulation& t, const ObjectiveParams& p) {
  auto c_of = [&](EdgeRef e) {
    const double len = t.edge_length(e);
    if (len >= p.eps) return 1.0;
    const bool yes = is_contractible(t, e, p) == Contractibility::Yes;
    return yes ? 0.5 + 0.5 * len / p.eps : 1.0;
  };
  double sum = 0.0;
  t.for_each_edge([&](EdgeRef e) {
    double prod = 1.0;
    for (const auto& side : {std::optional<EdgeRef>(e), t.twin(e)}) {
      if (!side) continue;
      prod *= c_of({side->t, next3(side->i)}) * c_of({side->t, prev3(side->i)});
    }
    const double m = prod < 0.25 ? 0.0 : prod > 0.5 ? 1.0 : 4.0 * prod - 1.0;
    sum += prod * m * t.edge_length(e);
  });
  return sum;
}

}  // namespace

TEST(ContractionFactor, RampValues) {
  const double eps = 0.05;
  EXPECT_EQ(contraction_factor(0.0, eps, true), 0.5);
  EXPECT_EQ(contraction_factor(eps, eps, true), 1.0);
  EXPECT_EQ(contraction_factor(3 * eps, eps, true), 1.0);
  EXPECT_EQ(contraction_factor(eps / 2, eps, true), 0.75);
  EXPECT_EQ(contraction_factor(0.0, eps, false), 1.0);
}

TEST(MultiMerge, Values) {
  EXPECT_EQ(m_ge2(0.25), 0.0);
  EXPECT_EQ(m_ge2(0.375), 0.5);
  EXPECT_EQ(m_ge2(0.5), 1.0);
  EXPECT_EQ(m_ge2(0.0), 0.0);
  EXPECT_EQ(m_ge2(1.0), 1.0);
}

TEST(MultiMerge, ContinuousAndMonotone) {
  double prev = m_ge2(0.0);
  for (int i = 1; i <= 100000; ++i) {
    const double x = i / 100000.0;
    const double v = m_ge2(x);
    EXPECT_GE(v, prev);
    EXPECT_LE(v - prev, 4.0 / 100000.0 + 1e-15);
    prev = v;
  }
}

TEST(EdgeWeight, UncontractedNeighborsGiveOne) {
  const auto t = build_cdt(gen_lines(12, LineOrientation::Uniform, 1.0, 3));
  ObjectiveParams p;
  p.eps = 1e-6;
  t.for_each_edge([&](EdgeRef e) { EXPECT_EQ(edge_weight(t, e, p), 1.0); });
  EXPECT_NEAR(contractible_weight(t, p), t.total_edge_length(), 1e-12);
}

TEST(EdgeWeight, Fig4SingleContractedEdge) {
  const auto f = mwt::testing::fig4_single(1e-14);
  ASSERT_TRUE(f.tri.validate().empty());
  ObjectiveParams p;
  p.eps = 0.05;
  EXPECT_NEAR(mwt::testing::weight_of(f.tri, f.chain[0], f.S, p), 0.5, 1e-12);
  EXPECT_NEAR(mwt::testing::weight_of(f.tri, f.chain[1], f.S, p), 0.5, 1e-12);
  EXPECT_NEAR(mwt::testing::weight_of(f.tri, f.chain[0], f.N, p), 0.5, 1e-12);
  // w_c is the length of the drawing with A and B merged into one point
  const double merged = 4.0 + 2 * 0.5 + 4 * std::sqrt(0.5);
  EXPECT_NEAR(contractible_weight(f.tri, p), merged, 1e-12);
}

TEST(EdgeWeight, Fig4TwoContractedNeighborsGiveZero) {
  const auto f = mwt::testing::fig4_double(1e-14);
  ASSERT_TRUE(f.tri.validate().empty());
  ObjectiveParams p;
  p.eps = 0.05;
  EXPECT_NEAR(mwt::testing::weight_of(f.tri, f.chain[0], f.S, p), 0.5, 1e-12);
  EXPECT_NEAR(mwt::testing::weight_of(f.tri, f.chain[2], f.S, p), 0.5, 1e-12);
  EXPECT_NEAR(mwt::testing::weight_of(f.tri, f.chain[1], f.S, p), 0.0, 1e-12);
  EXPECT_NEAR(mwt::testing::weight_of(f.tri, f.chain[1], f.N, p), 0.0, 1e-12);
}

TEST(EdgeWeight, FuzzyDisabledForcesOne) {
  const auto f = mwt::testing::fig4_double(1e-14);
  ObjectiveParams p;
  p.eps = 0.05;
  p.fuzzy_enabled = false;
  EXPECT_EQ(mwt::testing::weight_of(f.tri, f.chain[1], f.S, p), 1.0);
}

TEST(ContractibleWeight, MatchesReferenceEvaluator) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto t = random_mesh(seed);
    ObjectiveParams p;
    p.eps = 0.01 * static_cast<double>(seed);
    const double got = contractible_weight(t, p);
    EXPECT_NEAR(got, reference_wc(t, p), 1e-12 * got) << "seed " << seed;
    EXPECT_LE(got, t.total_edge_length() + 1e-12);
  }
}

TEST(ContractibleWeight, FactorAndWeightBounds) {
  const auto t = random_mesh(11);
  for (double eps : {0.005, 0.02, 0.08}) {
    ObjectiveParams p;
    p.eps = eps;
    t.for_each_edge([&](EdgeRef e) {
      const double c = edge_contraction(t, e, p);
      EXPECT_GE(c, 0.5);
      EXPECT_LE(c, 1.0);
      const double w = edge_weight(t, e, p);
      EXPECT_GE(w, 0.0);
      EXPECT_LE(w, 1.0);
    });
  }
}

TEST(IsContractible, FreeFreeInGenericPosition) {
  const auto t = build_cdt(mwt::testing::empty_square()).subdivided().subdivided();
  ObjectiveParams p;
  p.eps = 0.5;
  int checked = 0;
  t.for_each_edge([&](EdgeRef e) {
    const auto [a, b] = t.edge_vertices(e);
    if (t.vertex(a).dof == Dof::Free && t.vertex(b).dof == Dof::Free && !t.on_hull(a) && !t.on_hull(b)) {
      EXPECT_EQ(is_contractible(t, e, p), Contractibility::Yes);
      ++checked;
    }
  });
  EXPECT_GT(checked, 0);
}

TEST(IsContractible, BothFixedAndDifferentSegments) {
  ObjectiveParams p;
  p.eps = 0.5;
  // the CDT joins segment endpoints and corners directly
  const auto c = build_cdt(make_scene({{{0.2, 0.3}, {0.8, 0.3}}, {{0.2, 0.6}, {0.8, 0.6}}}, kUnitBox));
  int fixed = 0;
  c.for_each_edge([&](EdgeRef e) {
    const auto [a, b] = c.edge_vertices(e);
    if (c.vertex(a).dof == Dof::Fixed && c.vertex(b).dof == Dof::Fixed) {
      EXPECT_EQ(is_contractible(c, e, p), Contractibility::BothFixed);
      ++fixed;
    }
  });
  EXPECT_GT(fixed, 0);
  // inside the V one triangle has a constrained side on each segment
  const auto t = build_cdt(make_scene({{{0.2, 0.3}, {0.5, 0.7}}, {{0.5, 0.7}, {0.8, 0.3}}}, kUnitBox)).subdivided();
  int different = 0;
  t.for_each_edge([&](EdgeRef e) {
    const auto [a, b] = t.edge_vertices(e);
    const auto &va = t.vertex(a), &vb = t.vertex(b);
    if (va.dof == Dof::OnSegment && vb.dof == Dof::OnSegment && va.host != vb.host) {
      EXPECT_EQ(is_contractible(t, e, p), Contractibility::DifferentSegments);
      ++different;
    }
  });
  EXPECT_GT(different, 0);
}

TEST(IsContractible, TrappedVerticesOnAStraightChain) {
  ObjectiveParams p;
  p.eps = 0.05;
  TrapFixture many(0.5, 0.6);  // sub-edges 0.3, 0.1, 0.2: three longer than eps
  ASSERT_TRUE(many.tri.validate().empty());
  ASSERT_EQ(many.tri.vertex(many.C1).dof, Dof::OnSegment);
  EXPECT_EQ(is_contractible(many.tri, *many.tri.find_edge(many.F, many.C0), p), Contractibility::TrappedVertices);
  TrapFixture one(0.23, 0.26);  // sub-edges 0.03, 0.03, 0.54: only the last is long
  ASSERT_TRUE(one.tri.validate().empty());
  EXPECT_EQ(is_contractible(one.tri, *one.tri.find_edge(one.F, one.C0), p), Contractibility::Yes);
}

TEST(IsContractible, OneHopNeedsTheApexNearH) {
  // V1 V2 H with a free vertex V3 inside; H is a common neighbour of V1 and V2 but no apex of V1-V2
  const auto build = [](Point v3) {
    return mesh_from(mwt::testing::empty_square(), {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.45, 0.4}, {0.55, 0.4}, {0.5, 0.8}, v3},
                     {{4, 5, 7}, {5, 6, 7}, {6, 4, 7}, {0, 1, 5}, {0, 5, 4}, {1, 2, 5}, {5, 2, 6}, {2, 3, 6}, {3, 4, 6}, {3, 0, 4}});
  };
  ObjectiveParams p;
  p.eps = 0.2;
  const auto far = build({0.5, 0.5});
  ASSERT_TRUE(far.validate().empty());
  EXPECT_EQ(is_contractible(far, *far.find_edge(4, 5), p), Contractibility::OneHop);
  const auto near = build({0.5, 0.7});
  ASSERT_TRUE(near.validate().empty());
  EXPECT_EQ(is_contractible(near, *near.find_edge(4, 5), p), Contractibility::Yes);
}

TEST(IsContractible, InvariantUnderRigidMotions) {
  const Scene sc = gen_lines(10, LineOrientation::Uniform, 1.0, 21);
  const auto t = refine_cdt(build_cdt(sc), 20.0, 2e-2).tri.subdivided();
  std::vector<Point> pts;
  std::vector<std::array<int, 3>> tris;
  std::vector<VId> id(t.vertex_capacity(), kNone);
  for (std::size_t v = 0; v < t.vertex_capacity(); ++v) {
    if (!t.vertices()[v].alive) continue;
    id[v] = static_cast<VId>(pts.size());
    pts.push_back(t.vertices()[v].pos);
  }
  for (const auto& tr : t.triangles()) {
    if (tr.alive) tris.push_back({id[static_cast<std::size_t>(tr.v[0])], id[static_cast<std::size_t>(tr.v[1])], id[static_cast<std::size_t>(tr.v[2])]});
  }
  const auto base = mesh_from(sc, pts, tris);
  ASSERT_TRUE(base.validate().empty());
  ObjectiveParams p;
  p.eps = 0.06;

  using Motion = Point (*)(Point);
  const Motion motions[] = {
      [](Point q) { return Point{1.0 - q.y, q.x}; },        // quarter turn about the centre
      [](Point q) { return Point{1.0 - q.x, q.y}; },        // mirror
      [](Point q) { return Point{q.x + 0.25, q.y - 0.5}; },  // shift
  };
  for (const Motion m : motions) {
    std::vector<std::pair<Point, Point>> segs;
    for (const auto& s : sc.geometry()) segs.push_back({m(s.a), m(s.b)});
    Box box;
    box.expand(m(sc.box.lo));
    box.expand(m(sc.box.hi));
    const Scene msc = make_scene(segs, box);
    std::vector<Point> mp;
    for (Point q : pts) mp.push_back(m(q));
    const auto moved = mesh_from(msc, mp, tris);
    ASSERT_TRUE(moved.validate().empty());
    int differ = 0, yes = 0;
    base.for_each_edge([&](EdgeRef e) {
      const auto [a, b] = base.edge_vertices(e);
      const auto me = moved.find_edge(a, b);
      ASSERT_TRUE(me);
      const auto c0 = is_contractible(base, e, p), c1 = is_contractible(moved, *me, p);
      differ += c0 != c1;
      yes += c0 == Contractibility::Yes;
    });
    EXPECT_EQ(differ, 0);
    EXPECT_GT(yes, 0);
  }
}

TEST(AnglePenalty, NoNearStraightAngles) {
  const auto t = build_cdt(mwt::testing::empty_square()).subdivided().subdivided();
  ObjectiveParams p;
  EXPECT_EQ(angle_penalty(t, p), 0.0);
}

TEST(AnglePenalty, RampValues) {
  ObjectiveParams p;
  EXPECT_NEAR(p.delta, std::cos(179 * kDeg) + 1.0, 0.0);
  EXPECT_NEAR(p.delta, 1.5e-4, 1e-5);
  EXPECT_NEAR(pi_delta(-1.0, p.delta), 1.0, 1e-12);
  const double v = pi_delta(std::cos(179.5 * kDeg), p.delta);
  EXPECT_NEAR(v, (std::cos(179 * kDeg) - std::cos(179.5 * kDeg)) / p.delta, 1e-12);
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, 1.0);
  EXPECT_EQ(pi_delta(std::cos(178 * kDeg), p.delta), 0.0);
  EXPECT_NEAR(pi_delta_sharp(1.0, p.delta), 1.0, 1e-12);
  EXPECT_EQ(pi_delta_sharp(std::cos(2 * kDeg), p.delta), 0.0);
}

TEST(AnglePenalty, GeometryCornersAreExcluded) {
  ObjectiveParams p;
  const auto free_sliver = sliver(false);
  const auto geom_sliver = sliver(true);
  ASSERT_TRUE(free_sliver.validate().empty());
  ASSERT_TRUE(geom_sliver.validate().empty());
  const double want = pi_delta(std::cos(179.5 * kDeg), p.delta);
  EXPECT_NEAR(angle_penalty(free_sliver, p), want, 1e-6);
  EXPECT_EQ(angle_penalty(geom_sliver, p), 0.0);
}

TEST(AnglePenalty, PolishModeAddsSharpRamp) {
  ObjectiveParams p;
  const auto t = sliver(false);
  const double plain = angle_penalty(t, p);
  p.polish_mode = true;
  // the two corners of 0.25 degrees are sharp
  EXPECT_GT(angle_penalty(t, p), plain + 1.0);
}

TEST(MinlenPenalty, Values) {
  ObjectiveParams p;
  p.eps0 = std::ldexp(1.0, -34);
  EXPECT_EQ(minlen_penalty(build_cdt(mwt::testing::empty_square()), p), 0.0);
  EXPECT_EQ(minlen_penalty(mwt::testing::fig4_single(0.0).tri, p), 1.0);
  EXPECT_EQ(minlen_penalty(mwt::testing::fig4_single(std::ldexp(1.0, -35)).tri, p), 0.5);
}

TEST(Evaluate, SumOfParts) {
  const auto f = mwt::testing::fig4_single(1e-14);
  ObjectiveParams p;
  p.eps = 0.05;
  const auto b = evaluate(f.tri, p);
  EXPECT_EQ(b.w_contractible, contractible_weight(f.tri, p));
  EXPECT_EQ(b.angle_penalty, angle_penalty(f.tri, p));
  EXPECT_EQ(b.minlen_penalty, minlen_penalty(f.tri, p));
  EXPECT_NEAR(b.f_total, b.w_contractible + p.mu_angle * b.angle_penalty + p.mu_minlen * b.minlen_penalty, 1e-12 * b.f_total);
  p.mu_angle = p.mu_minlen = 0.0;
  EXPECT_EQ(evaluate(f.tri, p).f_total, contractible_weight(f.tri, p));
}

TEST(Evaluate, FuzzyOffPenaltyFreeIsTotalLength) {
  const auto t = build_cdt(mwt::testing::empty_square()).subdivided();
  ObjectiveParams p;
  p.fuzzy_enabled = false;
  EXPECT_NEAR(evaluate(t, p).f_total, t.total_edge_length(), 1e-12);
}

TEST(Params, Validation) {
  ObjectiveParams p;
  EXPECT_NO_THROW(p.validate());
  p.eps0 = p.eps / 10;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.delta = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.mu_angle = -1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Delta, NullEditIsZero) {
  auto t = random_mesh(2);
  ObjectiveParams p;
  p.eps = 0.03;
  for (std::size_t v = 0; v < t.vertex_capacity(); ++v) {
    if (t.vertices()[v].alive && t.vertices()[v].dof == Dof::Free) {
      EXPECT_EQ(delta_move(t, {{static_cast<VId>(v), t.vertices()[v].pos}}, p), 0.0);
      break;
    }
  }
  EXPECT_EQ(delta_move(t, {}, p), 0.0);
}

TEST(Delta, MovesAndFlipsMatchRecomputation) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> step(0.0, 0.01);
  int moves = 0, flips = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto t = random_mesh(seed, 20);
    ObjectiveParams p;
    p.eps = 0.02 + 0.01 * static_cast<double>(seed);
    p.polish_mode = seed == 2;
    std::uniform_int_distribution<std::size_t> pick(0, t.vertex_capacity() - 1);
    for (int i = 0; i < 1500; ++i) {
      const double f0 = evaluate(t, p).f_total;
      if (i % 3 == 0) {
        const auto es = t.edges();
        const EdgeRef e = es[std::uniform_int_distribution<std::size_t>(0, es.size() - 1)(rng)];
        const auto [a, b] = t.edge_vertices(e);
        const double d = delta_flip(t, e, p);
        if (std::isnan(d)) continue;
        auto e2 = t.find_edge(a, b);
        ASSERT_TRUE(e2);
        ASSERT_EQ(t.flip(*e2), FlipResult::Flipped);
        EXPECT_NEAR(d, evaluate(t, p).f_total - f0, 1e-9);
        ++flips;
      } else {
        const VId v = static_cast<VId>(pick(rng));
        if (!t.vertex(v).alive || t.vertex(v).dof == Dof::Fixed) continue;
        const Point old = t.pos(v);
        const Point q = t.constrain(v, old + Point{step(rng), step(rng)});
        const double d = delta_move(t, {{v, q}}, p);
        t.set_position(v, q);
        if (!t.star_positive(v)) {
          t.set_position(v, old);
          continue;
        }
        EXPECT_NEAR(d, evaluate(t, p).f_total - f0, 1e-9);
        ++moves;
      }
    }
  }
  EXPECT_GT(moves, 1000);
  EXPECT_GT(flips, 300);
}
