#include "mwt/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>

#include "json.hpp"

namespace mwt {

std::vector<Ray> sample_rays(const Scene& scene, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Box& b = scene.box;
  std::vector<Ray> rays;
  rays.reserve(count);
  while (rays.size() < count) {
    const Point o{b.lo.x + u(rng) * b.width(), b.lo.y + u(rng) * b.height()};
    const double a = 2.0 * std::numbers::pi * u(rng);
    const bool near = std::any_of(scene.segments.begin(), scene.segments.end(),
                                  [&](const Segment& s) { return point_segment_distance(o, s.a, s.b) < 1e-9; });
    if (near || !b.contains(o)) continue;
    rays.push_back(make_ray(o, {std::cos(a), std::sin(a)}));
  }
  return rays;
}

std::vector<TId> locate_starts(const Triangulation& t, const std::vector<Ray>& rays, LocateMethod m) {
  TriangleLocator loc(t);
  std::vector<TId> out;
  out.reserve(rays.size());
  for (const Ray& r : rays) out.push_back(loc.locate(r.origin, m).tri);
  return out;
}

const char* to_string(Method m) {
  switch (m) {
    case Method::Triangulation: return "triangulation";
    case Method::Bvh: return "bvh";
    case Method::KdTree: return "kdtree";
  }
  return "?";
}

const MethodReport* ExperimentReport::find(const std::string& label) const {
  for (const auto& m : methods) {
    if (m.label == label) return &m;
  }
  return nullptr;
}

double ExperimentReport::mean(const MethodReport& m, std::uint64_t TraversalStats::*counter) const {
  return rays ? static_cast<double>(m.totals.*counter) / static_cast<double>(rays) : 0.0;
}

bool same_hit(const std::optional<Hit>& a, const std::optional<Hit>& b, double tol) {
  if (!a || !b) return !a && !b;
  return a->segment == b->segment && std::fabs(a->t - b->t) <= tol * std::max(a->t, b->t);
}

namespace {

std::string describe(const Ray& r, const std::optional<Hit>& want, const std::optional<Hit>& got) {
  char buf[320];
  std::snprintf(buf, sizeof buf, "origin (%.17g, %.17g) dir (%.17g, %.17g): oracle %d t=%.17g, got %d t=%.17g",
                r.origin.x, r.origin.y, r.dir.x, r.dir.y, want ? want->segment : -1, want ? want->t : -1.0,
                got ? got->segment : -1, got ? got->t : -1.0);
  return buf;
}

/// Runs fn(i, stats) over [0, n) in contiguous chunks and sums the stats.
template <class Fn>
TraversalStats parallel_trace(std::size_t n, unsigned threads, Fn fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, n / 256))));
  std::vector<TraversalStats> part(threads);
  std::vector<std::exception_ptr> err(threads);
  auto work = [&](unsigned k) {
    try {
      const std::size_t lo = n * k / threads, hi = n * (k + 1) / threads;
      for (std::size_t i = lo; i < hi; ++i) fn(i, part[k]);
    } catch (...) {
      err[k] = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(work, k);
  work(0);
  for (auto& th : pool) th.join();
  for (auto& e : err) {
    if (e) std::rethrow_exception(e);
  }
  TraversalStats sum;
  for (const auto& p : part) sum += p;
  return sum;
}

void finish(MethodReport& m, std::size_t rays) {
  switch (m.method) {
    case Method::Triangulation: m.total_ops = m.totals.tri_total(); break;
    case Method::Bvh: m.total_ops = m.totals.bvh_total(); break;
    case Method::KdTree: m.total_ops = m.totals.kd_total(); break;
  }
  m.mean_ops = rays ? static_cast<double>(m.total_ops) / static_cast<double>(rays) : 0.0;
}

}  // namespace

ExperimentReport run_experiment(const Scene& scene, const std::vector<NamedTriangulation>& triangulations,
                                const std::vector<Ray>& rays, std::uint64_t seed, const ExperimentOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.scene = scene.name;
  rep.provenance = scene.provenance;
  rep.segments = scene.geometry_count();
  rep.rays = rays.size();
  rep.seed = seed;
  const unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());

  std::vector<std::optional<Hit>> oracle(rays.size());
  if (opt.check_oracle) {
    parallel_trace(rays.size(), threads, [&](std::size_t i, TraversalStats&) { oracle[i] = brute_force_closest(scene, rays[i]); });
  }
  auto check = [&](std::size_t i, const std::optional<Hit>& h, const std::string& who) {
    if (opt.check_oracle && !same_hit(oracle[i], h)) {
      throw ExperimentError(who + " disagrees with the oracle on ray " + std::to_string(i) + ": " +
                                describe(rays[i], oracle[i], h),
                            i);
    }
  };

  for (const auto& nt : triangulations) {
    MethodReport m;
    m.method = Method::Triangulation;
    m.label = nt.label;
    m.cells = nt.tri.num_triangles();
    m.edge_length = nt.tri.total_edge_length();
    const auto starts = locate_starts(nt.tri, rays);
    m.totals = parallel_trace(rays.size(), threads, [&](std::size_t i, TraversalStats& st) {
      check(i, traverse_triangulation(nt.tri, scene, rays[i], starts[i], &st), "triangulation '" + nt.label + "'");
    });
    finish(m, rays.size());
    rep.methods.push_back(std::move(m));
  }
  if (opt.bvh && rep.segments > 0) {
    auto sw = sweep_bvh(scene, rays, opt.ct_grid);
    MethodReport m;
    m.method = Method::Bvh;
    m.label = "bvh";
    m.c_t = sw.c_t;
    m.cells = sw.structure.leaf_count();
    m.sweep = sw.totals;
    m.totals = parallel_trace(rays.size(), threads, [&](std::size_t i, TraversalStats& st) {
      check(i, sw.structure.intersect(scene, rays[i], &st), "bvh");
    });
    finish(m, rays.size());
    rep.methods.push_back(std::move(m));
  }
  if (opt.kdtree && rep.segments > 0) {
    auto sw = sweep_kdtree(scene, rays, opt.ct_grid);
    MethodReport m;
    m.method = Method::KdTree;
    m.label = "kdtree";
    m.c_t = sw.c_t;
    m.cells = sw.structure.leaf_count();
    m.sweep = sw.totals;
    m.totals = parallel_trace(rays.size(), threads, [&](std::size_t i, TraversalStats& st) {
      check(i, sw.structure.intersect(scene, rays[i], &st), "kdtree");
    });
    finish(m, rays.size());
    rep.methods.push_back(std::move(m));
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

namespace {

nlohmann::json counters(const MethodReport& m, std::size_t rays) {
  auto mean = [&](std::uint64_t v) { return rays ? static_cast<double>(v) / static_cast<double>(rays) : 0.0; };
  nlohmann::json j;
  const auto& s = m.totals;
  switch (m.method) {
    case Method::Triangulation:
      j["tri_steps"] = {{"total", s.tri_steps}, {"mean", mean(s.tri_steps)}};
      break;
    case Method::Bvh:
      j["bvh_node_tests"] = {{"total", s.bvh_node_tests}, {"mean", mean(s.bvh_node_tests)}};
      j["bvh_prim_tests"] = {{"total", s.bvh_prim_tests}, {"mean", mean(s.bvh_prim_tests)}};
      break;
    case Method::KdTree:
      j["kd_nodes_visited"] = {{"total", s.kd_nodes_visited}, {"mean", mean(s.kd_nodes_visited)}};
      j["kd_rope_steps"] = {{"total", s.kd_rope_steps}, {"mean", mean(s.kd_rope_steps)}};
      j["kd_prim_tests"] = {{"total", s.kd_prim_tests}, {"mean", mean(s.kd_prim_tests)}};
      break;
  }
  return j;
}

}  // namespace

void write_json(std::ostream& os, const std::vector<ExperimentReport>& reports,
                const std::vector<std::pair<std::string, std::string>>& config) {
  nlohmann::json root;
  nlohmann::json cfg = nlohmann::json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  root["config"] = cfg;
  root["rope_cost_rule"] = "max(1, ceil(log2 n))";
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json jr;
    jr["scene"] = r.scene;
    jr["provenance"] = r.provenance;
    jr["segments"] = r.segments;
    jr["rays"] = r.rays;
    jr["seed"] = r.seed;
    jr["seconds"] = r.seconds;
    nlohmann::json ms = nlohmann::json::array();
    for (const auto& m : r.methods) {
      nlohmann::json jm;
      jm["method"] = to_string(m.method);
      jm["label"] = m.label;
      jm["total_ops"] = m.total_ops;
      jm["mean_ops"] = m.mean_ops;
      jm["cells"] = m.cells;
      jm["counters"] = counters(m, r.rays);
      if (m.method == Method::Triangulation) {
        jm["edge_length"] = m.edge_length;
      } else {
        jm["c_t"] = m.c_t;
        nlohmann::json sw = nlohmann::json::array();
        for (const auto& [c, t] : m.sweep) sw.push_back({{"c_t", c}, {"total_ops", t}});
        jm["sweep"] = sw;
      }
      ms.push_back(jm);
    }
    jr["methods"] = ms;
    arr.push_back(jr);
  }
  root["reports"] = arr;
  os << root.dump(2) << '\n';
}

void write_csv(std::ostream& os, const std::vector<ExperimentReport>& reports) {
  os << "scene,segments,rays,method,label,c_t,cells,edge_length,mean_ops,tri_steps,bvh_node_tests,bvh_prim_tests,"
        "kd_nodes_visited,kd_rope_steps,kd_prim_tests\n";
  for (const auto& r : reports) {
    for (const auto& m : r.methods) {
      const auto& s = m.totals;
      const double n = r.rays ? static_cast<double>(r.rays) : 1.0;
      char buf[512];
      std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%s,%s,%g,%zu,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                    r.scene.c_str(), r.segments, r.rays, to_string(m.method), m.label.c_str(), m.c_t, m.cells,
                    m.edge_length, m.mean_ops, static_cast<double>(s.tri_steps) / n,
                    static_cast<double>(s.bvh_node_tests) / n, static_cast<double>(s.bvh_prim_tests) / n,
                    static_cast<double>(s.kd_nodes_visited) / n, static_cast<double>(s.kd_rope_steps) / n,
                    static_cast<double>(s.kd_prim_tests) / n);
      os << buf;
    }
  }
}

}  // namespace mwt
