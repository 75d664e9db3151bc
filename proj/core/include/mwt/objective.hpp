#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mwt/triangulation.hpp"

namespace mwt {

struct ObjectiveParams {
  double eps = 1e-2;
  double eps0 = 1e-10;
  double delta = std::cos(179.0 * std::numbers::pi / 180.0) + 1.0;
  double mu_angle = 1.0;
  double mu_minlen = 10.0;
  double kappa = kCollinearityKappa;
  bool polish_mode = false;
  bool fuzzy_enabled = true;

  /// Throws std::invalid_argument when the parameter invariants do not hold.
  void validate() const;
};

struct ObjectiveBreakdown {
  double w_contractible = 0.0;
  double angle_penalty = 0.0;
  double minlen_penalty = 0.0;
  double f_total = 0.0;
};

enum class Contractibility { Yes, BothFixed, DifferentSegments, Conditioning, TrappedVertices, OneHop };
const char* to_string(Contractibility c);

inline double contraction_factor(double len, double eps, bool contractible) {
  if (!contractible) return 1.0;
  return 0.5 + std::min(1.0, len / eps) * 0.5;
}

inline double m_ge2(double x) {
  if (x < 0.25) return 0.0;
  if (x > 0.5) return 1.0;
  return 4.0 * x - 1.0;
}

/// Ramp for angles close to 180 degrees.
inline double pi_delta(double cosine, double delta) { return std::max(0.0, -1.0 + delta - cosine) / delta; }

/// Polish-mode ramp for angles close to 0 degrees.
inline double pi_delta_sharp(double cosine, double delta) { return std::max(0.0, cosine - (1.0 - delta)) / delta; }

/// Rules (1)-(2) only: endpoint degrees of freedom and host segments.
Contractibility basic_contractibility(const Triangulation& t, VId a, VId b);

/// The full ordered rule chain for an edge.
Contractibility is_contractible(const Triangulation& t, EdgeRef e, const ObjectiveParams& p);

/// c_eps of one edge. Contractibility is only consulted for edges shorter than eps.
double edge_contraction(const Triangulation& t, EdgeRef e, const ObjectiveParams& p);

/// w_eps of one edge: P * m_ge2(P) with P the product of c_eps over the neighboring edges.
/// Forced to 1 when fuzzy contraction is disabled.
double edge_weight(const Triangulation& t, EdgeRef e, const ObjectiveParams& p);

double contractible_weight(const Triangulation& t, const ObjectiveParams& p);
double angle_penalty(const Triangulation& t, const ObjectiveParams& p);
double minlen_penalty(const Triangulation& t, const ObjectiveParams& p);
ObjectiveBreakdown evaluate(const Triangulation& t, const ObjectiveParams& p);

/// Penalty of the three corners of one triangle. Corners enclosed by two constrained edges are skipped.
double triangle_angle_penalty(const Triangulation& t, TId tri, const ObjectiveParams& p);

/// Local part of f around a set of seed vertices, used for incremental deltas.
class LocalObjective {
 public:
  explicit LocalObjective(const ObjectiveParams& p) : p_(p) {}

  /// Collects the vertices whose incident edges may change weight when the seeds change.
  /// Call once per state (before and after an edit) so that the union covers both.
  void gather(const Triangulation& t, std::span<const VId> seeds, std::span<const VId> moved_on_segment);
  void clear();

  /// Sum of the terms of f supported by the gathered region in the current state of t.
  double sum(const Triangulation& t, std::span<const VId> seeds) const;

  const std::vector<VId>& region() const { return region_; }
  /// Number of terms evaluated by sum() so far.
  std::size_t work() const { return work_; }

 private:
  const ObjectiveParams& p_;
  std::vector<VId> region_;
  std::vector<char> in_region_;
  mutable std::size_t work_ = 0;
};

/// f(after) - f(before) for moving the listed vertices; t is restored before returning.
double delta_move(Triangulation& t, const std::vector<std::pair<VId, Point>>& moves, const ObjectiveParams& p);

/// f(after) - f(before) for flipping e. t is flipped back, so EdgeRefs into the quad may be renumbered.
/// NaN if the flip is not allowed.
double delta_flip(Triangulation& t, EdgeRef e, const ObjectiveParams& p);

}  // namespace mwt
