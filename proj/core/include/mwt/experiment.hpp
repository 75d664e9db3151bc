#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "mwt/scene.hpp"
#include "mwt/sweep.hpp"
#include "mwt/traversal.hpp"
#include "mwt/triangulation.hpp"

namespace mwt {

/// Origins uniform in the scene box at least 1e-9 away from every segment, directions uniform in [0, 2pi).
std::vector<Ray> sample_rays(const Scene& scene, std::size_t count, std::uint64_t seed);

/// Start triangle of every ray origin.
std::vector<TId> locate_starts(const Triangulation& t, const std::vector<Ray>& rays,
                               LocateMethod m = LocateMethod::AnchorGridWalk);

class ExperimentError : public std::runtime_error {
 public:
  ExperimentError(const std::string& what, std::size_t ray) : std::runtime_error(what), ray_(ray) {}
  std::size_t ray() const { return ray_; }

 private:
  std::size_t ray_;
};

struct NamedTriangulation {
  std::string label;
  Triangulation tri;
};

enum class Method { Triangulation, Bvh, KdTree };
const char* to_string(Method m);

struct MethodReport {
  Method method = Method::Triangulation;
  std::string label;  ///< triangulation label, or "bvh" / "kdtree"
  TraversalStats totals;
  std::uint64_t total_ops = 0;
  double mean_ops = 0.0;
  double c_t = 0.0;          ///< swept build parameter (bvh, kd-tree)
  std::size_t cells = 0;     ///< triangles or leaves
  double edge_length = 0.0;  ///< triangulations only
  std::vector<std::pair<double, std::uint64_t>> sweep;  ///< C_t totals
};

struct ExperimentReport {
  std::string scene;
  std::string provenance;
  std::size_t segments = 0;
  std::size_t rays = 0;
  std::uint64_t seed = 0;
  double seconds = 0.0;
  std::vector<MethodReport> methods;

  const MethodReport* find(const std::string& label) const;
  /// Mean of one counter over the ray set.
  double mean(const MethodReport& m, std::uint64_t TraversalStats::*counter) const;
};

struct ExperimentOptions {
  std::vector<double> ct_grid = kDefaultCtGrid;
  bool bvh = true;
  bool kdtree = true;
  bool check_oracle = true;
  unsigned threads = 0;  ///< 0: hardware concurrency
};

/// Sweeps and builds the BVH and kd-tree on this ray set, traces every ray through all structures,
/// and throws ExperimentError on the first hit that differs from the brute-force oracle.
ExperimentReport run_experiment(const Scene& scene, const std::vector<NamedTriangulation>& triangulations,
                                const std::vector<Ray>& rays, std::uint64_t seed = 0,
                                const ExperimentOptions& opt = {});

/// Both empty, or the same segment id with |dt| <= tol * t.
bool same_hit(const std::optional<Hit>& a, const std::optional<Hit>& b, double tol = 1e-9);

/// Report plus the key/value config it was run with.
void write_json(std::ostream& os, const std::vector<ExperimentReport>& reports,
                const std::vector<std::pair<std::string, std::string>>& config = {});
/// One row per method per scene.
void write_csv(std::ostream& os, const std::vector<ExperimentReport>& reports);

}  // namespace mwt
