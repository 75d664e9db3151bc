#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "mwt/anneal.hpp"
#include "mwt/cdt.hpp"
#include "mwt/generators.hpp"
#include "test_support.hpp"

using namespace mwt;

namespace {

Triangulation busy_mesh(std::uint64_t seed) {
  return refine_cdt(build_cdt(gen_lines(12, LineOrientation::Uniform, 1.0, seed)), 20.0, 2e-2).tri.subdivided();
}

AnnealConfig small_config(std::uint64_t seed, int levels = 20, std::int64_t steps = 500) {
  AnnealConfig c;
  c.schedule.levels = levels;
  c.schedule.steps_per_level = steps;
  c.seed = seed;
  return c;
}

Triangulation one_free_vertex(Point v) {
  return mwt::testing::mesh_from(mwt::testing::empty_square(), {{0, 0}, {1, 0}, {1, 1}, {0, 1}, v},
                                 {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}});
}

}  // namespace

TEST(Metropolis, DownhillAlwaysAccepted) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_TRUE(metropolis_accept(-1e-3, 1e-2, rng));
    EXPECT_TRUE(metropolis_accept(0.0, 1e-2, rng));
  }
}

TEST(Metropolis, UphillRateIsBoltzmann) {
  Rng rng(2);
  const int n = 100000;
  for (double ratio : {0.5, 1.0, 3.0}) {
    int acc = 0;
    for (int i = 0; i < n; ++i) acc += metropolis_accept(ratio * 0.01, 0.01, rng);
    const double p = std::exp(-ratio);
    EXPECT_NEAR(acc / double(n), p, 4.0 * std::sqrt(p * (1 - p) / n)) << "df/T = " << ratio;
  }
}

TEST(AdaptLambda, TargetRateKeepsLambda) {
  StrategyState s;
  s.lambda = 0.3;
  s.window_attempts = 100;
  s.window_accepts = 23;
  adapt_lambda(s, LambdaControl{});
  EXPECT_NEAR(s.lambda, 0.3, 1e-15);
  EXPECT_EQ(s.window_attempts, 0);
  EXPECT_EQ(s.window_accepts, 0);
}

TEST(AdaptLambda, DoubleRateScalesBySqrtTwo) {
  StrategyState s;
  s.lambda = 0.3;
  s.window_attempts = 100;
  s.window_accepts = 46;
  adapt_lambda(s, LambdaControl{});
  EXPECT_NEAR(s.lambda, 0.3 * std::numbers::sqrt2, 1e-15);
}

TEST(AdaptLambda, ShortWindowIsNoOp) {
  StrategyState s;
  s.lambda = 0.3;
  s.window_attempts = 99;
  s.window_accepts = 0;
  adapt_lambda(s, LambdaControl{});
  EXPECT_EQ(s.lambda, 0.3);
  EXPECT_EQ(s.window_attempts, 99);
}

TEST(AdaptLambda, Clamps) {
  StrategyState s;
  s.lambda = 2e-6;
  s.window_attempts = 100;
  adapt_lambda(s, LambdaControl{});
  EXPECT_EQ(s.lambda, LambdaControl{}.scale_min);
  StrategyState c;
  c.id = Strategy::FlipEdges;
  c.lambda = 1.5;
  c.window_attempts = 100;
  adapt_lambda(c, LambdaControl{});
  EXPECT_EQ(c.lambda, 1.0);
}

TEST(Schedule, GeometricEnds) {
  Schedule s;
  s.levels = 5;
  EXPECT_DOUBLE_EQ(s.temperature(0), s.T_init);
  EXPECT_DOUBLE_EQ(s.temperature(4), s.T_final);
  EXPECT_DOUBLE_EQ(s.eps(4), s.eps_final);
  EXPECT_NEAR(s.temperature(2), std::sqrt(s.T_init * s.T_final), 1e-15);
  s.T_final = 0.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(Strategy, NamesRoundTrip) {
  for (int i = 0; i < kNumStrategies; ++i) {
    const auto s = static_cast<Strategy>(i);
    EXPECT_EQ(strategy_from_string(to_string(s)), s);
  }
  EXPECT_FALSE(strategy_from_string("Teleport"));
}

TEST(Proposal, OnSegmentMovesStayOnHost) {
  const auto t = busy_mesh(3);
  Annealer an(t, small_config(5));
  const auto segs = t.info().segments;
  int on_segment = 0;
  for (int rep = 0; rep < 200; ++rep) {
    for (int i = 0; i < kNumStrategies; ++i) {
      const auto pr = an.propose(static_cast<Strategy>(i));
      bool outside = false;
      for (const auto& [v, q] : pr.moves) outside |= !t.info().box.contains(q);
      // free moves are not clipped; leaving the box must fail the topology check instead
      if (outside) EXPECT_FALSE(an.delta(pr));
      for (const auto& [v, q] : pr.moves) {
        const auto& vx = an.tri().vertex(v);
        ASSERT_NE(vx.dof, Dof::Fixed);
        if (vx.dof == Dof::OnSegment) {
          const auto& s = segs[static_cast<std::size_t>(vx.host)];
          EXPECT_LT(point_segment_distance(q, s.a, s.b), 1e-12);
          ++on_segment;
        }
      }
    }
  }
  EXPECT_GT(on_segment, 0);
}

TEST(Proposal, FixedOnlyMeshHasNoMoves) {
  const auto t = build_cdt(gen_lines(6, LineOrientation::Uniform, 1.0, 8));
  for (std::size_t v = 0; v < t.vertex_capacity(); ++v) {
    if (t.vertices()[v].alive) ASSERT_EQ(t.vertices()[v].dof, Dof::Fixed);
  }
  Annealer an(t, small_config(1));
  for (int rep = 0; rep < 50; ++rep) {
    for (int i = 0; i < kNumStrategies; ++i) EXPECT_TRUE(an.propose(static_cast<Strategy>(i)).moves.empty());
  }
}

TEST(Annealer, DeltaMatchesApply) {
  const auto t = busy_mesh(4);
  auto cfg = small_config(9);
  Annealer an(t, cfg);
  int checked = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const auto pr = an.propose(static_cast<Strategy>(rep % kNumStrategies));
    if (pr.empty()) continue;
    const auto d = an.delta(pr);
    if (!d) continue;
    const double f0 = evaluate(an.tri(), an.config().objective).f_total;
    an.apply(pr);
    ASSERT_TRUE(an.tri().validate().empty());
    EXPECT_NEAR(*d, evaluate(an.tri(), an.config().objective).f_total - f0, 1e-9);
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(Annealer, FreeVertexSettlesAtTheCentre) {
  auto cfg = small_config(3, 40, 1000);
  cfg.objective.fuzzy_enabled = false;
  cfg.enabled.fill(false);
  cfg.enabled[static_cast<std::size_t>(Strategy::DirectSingle)] = true;
  const auto res = run_annealing(one_free_vertex({0.2, 0.7}), cfg);
  EXPECT_NEAR(res.best_f, 4.0 + 2.0 * std::numbers::sqrt2, 1e-3);
  const Point c = res.best.pos(4);
  EXPECT_NEAR(c.x, 0.5, 0.05);
  EXPECT_NEAR(c.y, 0.5, 0.05);
}

TEST(RunAnnealing, BestTraceMonotoneAndDeterministic) {
  const auto t = busy_mesh(6);
  const auto cfg = small_config(11, 15, 400);
  const auto a = run_annealing(t, cfg);
  const auto b = run_annealing(t, cfg);
  EXPECT_EQ(a.best_f, b.best_f);
  EXPECT_EQ(a.final_f, b.final_f);
  ASSERT_EQ(a.stats.best_trace.size(), 15u);
  for (std::size_t i = 1; i < a.stats.best_trace.size(); ++i) EXPECT_LE(a.stats.best_trace[i], a.stats.best_trace[i - 1]);
  EXPECT_TRUE(a.best.validate().empty());
  EXPECT_TRUE(a.final_state.validate().empty());
  EXPECT_GT(a.stats.accepted, 0);
}

TEST(ContractShortEdges, LeavesOnlyIncontractibleShortEdges) {
  auto t = busy_mesh(7);
  ObjectiveParams p;
  p.eps = 0.03;
  const auto left = contract_short_edges(t, p, nullptr, true);
  EXPECT_TRUE(t.validate().empty());
  std::size_t short_edges = 0;
  t.for_each_edge([&](EdgeRef e) {
    if (t.edge_length(e) < p.eps) {
      ++short_edges;
      EXPECT_NE(is_contractible(t, e, p), Contractibility::Yes);
    }
  });
  EXPECT_EQ(left.size(), short_edges);
}

TEST(GreedyFlip, NoImprovingFlipLeft) {
  auto t = busy_mesh(8);
  const double before = t.total_edge_length();
  greedy_flip(t, true);
  EXPECT_LE(t.total_edge_length(), before);
  t.for_each_edge([&](EdgeRef e) {
    const auto tw = t.twin(e);
    if (!tw || t.is_constrained(e) || t.can_flip(e) != FlipResult::Flipped) return;
    const Point a = t.pos(t.tri(e.t).v[static_cast<std::size_t>(e.i)]);
    const Point b = t.pos(t.tri(tw->t).v[static_cast<std::size_t>(tw->i)]);
    EXPECT_GE(dist(a, b), t.edge_length(e) - 1e-15);
  });
}

TEST(Pipeline, EmptySquare) {
  PipelineConfig cfg;
  cfg.anneal = small_config(1, 10, 200);
  const auto r = full_pipeline(mwt::testing::empty_square(), cfg);
  EXPECT_NEAR(r.cdt_length, 4.0 + std::numbers::sqrt2, 1e-12);
  EXPECT_LE(r.length, r.refined_length + 1e-12);
  EXPECT_LE(r.refined_length, r.cdt_length + 1e-12);
  EXPECT_NEAR(r.length, 4.0 + std::numbers::sqrt2, 1e-9);
  EXPECT_TRUE(r.tri.validate().empty());
}

TEST(Pipeline, ModesRespectOrdering) {
  const Scene sc = gen_lines(8, LineOrientation::Uniform, 1.0, 31);
  for (auto mode : {PipelineMode::Full, PipelineMode::FlipPolish, PipelineMode::FixedPolish}) {
    PipelineConfig cfg;
    cfg.anneal = small_config(2, 10, 200);
    cfg.mode = mode;
    cfg.angles = {0.0, 20.0};
    cfg.areas = {std::numeric_limits<double>::infinity(), 1e-2};
    const auto r = full_pipeline(sc, cfg);
    EXPECT_LE(r.length, r.refined_length + 1e-12) << to_string(mode);
    EXPECT_LE(r.refined_length, r.cdt_length + 1e-12) << to_string(mode);
    EXPECT_TRUE(r.tri.validate().empty());
  }
}

TEST(Config, ParsesKeysAndComments) {
  std::istringstream in(
      "# schedule\n"
      "levels = 7\n"
      "T_init = 0.5   # hot\n"
      "\n"
      "strategy.FlipEdges = off\n"
      "balance = time\n"
      "iterations = 2\n");
  PipelineConfig cfg;
  read_config(in, cfg);
  EXPECT_EQ(cfg.anneal.schedule.levels, 7);
  EXPECT_EQ(cfg.anneal.schedule.T_init, 0.5);
  EXPECT_FALSE(cfg.anneal.enabled[static_cast<std::size_t>(Strategy::FlipEdges)]);
  EXPECT_EQ(cfg.anneal.balance, Balance::Time);
  EXPECT_EQ(cfg.iterations, 2);
}

TEST(Config, RejectsUnknownKeys) {
  PipelineConfig cfg;
  EXPECT_THROW(apply_config_line(cfg, "temperature", "1"), std::invalid_argument);
  EXPECT_THROW(apply_config_line(cfg, "strategy.Teleport", "on"), std::invalid_argument);
  EXPECT_THROW(apply_config_line(cfg, "balance", "fair"), std::invalid_argument);
  std::istringstream bad("levels 3\n");
  EXPECT_THROW(read_config(bad, cfg), std::invalid_argument);
}
