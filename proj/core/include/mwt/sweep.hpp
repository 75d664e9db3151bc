#pragma once

#include <cstdint>
#include <vector>

#include "mwt/bvh.hpp"
#include "mwt/kdtree.hpp"

namespace mwt {

inline const std::vector<double> kDefaultCtGrid{0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};

template <class S>
struct SweepResult {
  S structure;
  double c_t = 0.0;
  std::uint64_t total = 0;  ///< unweighted ops of the chosen structure over the ray set
  std::vector<std::pair<double, std::uint64_t>> totals;  ///< per grid value
};

/// Builds one structure per C_t and keeps the cheapest over `rays`. Ties go to the earlier grid value.
SweepResult<Bvh> sweep_bvh(const Scene& scene, const std::vector<Ray>& rays,
                           const std::vector<double>& grid = kDefaultCtGrid);
SweepResult<RopedKdTree> sweep_kdtree(const Scene& scene, const std::vector<Ray>& rays,
                                      const std::vector<double>& grid = kDefaultCtGrid);

}  // namespace mwt
