#include "mwt/sweep.hpp"

#include <stdexcept>

namespace mwt {

namespace {

template <class S, class Build, class Cost>
SweepResult<S> sweep(const std::vector<double>& grid, Build build, Cost cost) {
  if (grid.empty()) throw std::invalid_argument("empty C_t grid");
  SweepResult<S> res;
  bool have = false;
  for (double c : grid) {
    S s = build(c);
    const std::uint64_t total = cost(s);
    res.totals.emplace_back(c, total);
    if (!have || total < res.total) {
      res.structure = std::move(s);
      res.c_t = c;
      res.total = total;
      have = true;
    }
  }
  return res;
}

}  // namespace

SweepResult<Bvh> sweep_bvh(const Scene& scene, const std::vector<Ray>& rays, const std::vector<double>& grid) {
  return sweep<Bvh>(
      grid, [&](double c) { return Bvh::build(scene, c); },
      [&](const Bvh& b) {
        TraversalStats st;
        for (const Ray& r : rays) b.intersect(scene, r, &st);
        return st.bvh_total();
      });
}

SweepResult<RopedKdTree> sweep_kdtree(const Scene& scene, const std::vector<Ray>& rays, const std::vector<double>& grid) {
  return sweep<RopedKdTree>(
      grid, [&](double c) { return RopedKdTree::build(scene, c); },
      [&](const RopedKdTree& k) {
        TraversalStats st;
        for (const Ray& r : rays) k.intersect(scene, r, &st);
        return st.kd_total();
      });
}

}  // namespace mwt
