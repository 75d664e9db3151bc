#include <benchmark/benchmark.h>

#include <random>

#include "mwt/bvh.hpp"
#include "mwt/cdt.hpp"
#include "mwt/experiment.hpp"
#include "mwt/generators.hpp"
#include "mwt/kdtree.hpp"
#include "mwt/objective.hpp"
#include "mwt/traversal.hpp"

using namespace mwt;

namespace {

Scene lines_scene(benchmark::State& state) {
  return gen_lines(static_cast<int>(state.range(0)), LineOrientation::Uniform, 1.0, 42);
}

}  // namespace

static void BM_TraceTriangulation(benchmark::State& state) {
  const Scene sc = lines_scene(state);
  const auto t = refine_cdt(build_cdt(sc), 20.0, 1e-2).tri;
  const auto rays = sample_rays(sc, 4096, 1);
  const auto starts = locate_starts(t, rays);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(traverse_triangulation(t, sc, rays[i], starts[i]));
    i = (i + 1) % rays.size();
  }
}
BENCHMARK(BM_TraceTriangulation)->Arg(100)->Arg(1000);

static void BM_TraceBvh(benchmark::State& state) {
  const Scene sc = lines_scene(state);
  const auto b = Bvh::build(sc, 1.0);
  const auto rays = sample_rays(sc, 4096, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(b.intersect(sc, rays[i]));
    i = (i + 1) % rays.size();
  }
}
BENCHMARK(BM_TraceBvh)->Arg(100)->Arg(1000);

static void BM_TraceKdTree(benchmark::State& state) {
  const Scene sc = lines_scene(state);
  const auto kd = RopedKdTree::build(sc, 1.0);
  const auto rays = sample_rays(sc, 4096, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kd.intersect(sc, rays[i]));
    i = (i + 1) % rays.size();
  }
}
BENCHMARK(BM_TraceKdTree)->Arg(100)->Arg(1000);

static void BM_BuildBvh(benchmark::State& state) {
  const Scene sc = lines_scene(state);
  for (auto _ : state) benchmark::DoNotOptimize(Bvh::build(sc, 1.0));
}
BENCHMARK(BM_BuildBvh)->Arg(100)->Arg(1000);

static void BM_BuildKdTree(benchmark::State& state) {
  const Scene sc = lines_scene(state);
  for (auto _ : state) benchmark::DoNotOptimize(RopedKdTree::build(sc, 1.0));
}
BENCHMARK(BM_BuildKdTree)->Arg(100)->Arg(1000);

static void BM_RefineCdt(benchmark::State& state) {
  const auto t = build_cdt(lines_scene(state));
  for (auto _ : state) benchmark::DoNotOptimize(refine_cdt(t, 20.0, 1e-2));
}
BENCHMARK(BM_RefineCdt)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_DeltaMove(benchmark::State& state) {
  auto t = refine_cdt(build_cdt(lines_scene(state)), 20.0, 1e-2).tri.subdivided();
  ObjectiveParams p;
  p.eps = 0.02;
  std::vector<VId> free;
  for (std::size_t v = 0; v < t.vertex_capacity(); ++v) {
    if (t.vertices()[v].alive && t.vertices()[v].dof == Dof::Free) free.push_back(static_cast<VId>(v));
  }
  std::mt19937_64 rng(3);
  std::normal_distribution<double> step(0.0, 1e-3);
  for (auto _ : state) {
    const VId v = free[rng() % free.size()];
    benchmark::DoNotOptimize(delta_move(t, {{v, t.pos(v) + Point{step(rng), step(rng)}}}, p));
  }
}
BENCHMARK(BM_DeltaMove)->Arg(100);
BENCHMARK_MAIN();
