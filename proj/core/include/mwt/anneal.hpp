#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mwt/cdt.hpp"
#include "mwt/objective.hpp"
#include "mwt/triangulation.hpp"
#include "mwt/uniform_grid.hpp"

namespace mwt {

using Rng = std::mt19937_64;

enum class Strategy : int {
  DirectSingle,
  DirectGroup,
  ClusterSingle,
  ClusterGroup,
  ResampleSmall,
  ResampleLarge,
  SwapContracted,
  ContractToNeighbor,
  FlipEdges,
};
inline constexpr int kNumStrategies = 9;
const char* to_string(Strategy s);
std::optional<Strategy> strategy_from_string(std::string_view name);

/// Strategies that rely on fuzzy contraction; disabled while polishing.
bool is_contraction_strategy(Strategy s);
/// Strategies whose lambda is a count (vertices or edges per proposal) rather than a scale.
bool is_count_strategy(Strategy s);

struct Schedule {
  double T_init = 0.02;
  double T_final = 1e-4;
  double eps_init = 0.05;
  double eps_final = 1e-4;
  int levels = 200;
  std::int64_t steps_per_level = 2000;

  void validate() const;
  double temperature(int level) const;
  double eps(int level) const;
};

struct StrategyState {
  Strategy id = Strategy::DirectSingle;
  double lambda = 1.0;
  std::int64_t window_attempts = 0;  ///< nonempty proposals only
  std::int64_t window_accepts = 0;
  std::int64_t attempts = 0;
  std::int64_t accepts = 0;
  double cost = 0.0;      ///< what the equal-budget scheduler balances
  double seconds = 0.0;   ///< wall time spent in this strategy
  std::int64_t level_attempts = 0;
  std::int64_t level_accepts = 0;
};

struct LambdaControl {
  int window = 100;
  double target = 0.23;
  double gamma = 0.5;
  double scale_min = 1e-6;
  double scale_max = 1e3;
  double count_max = 1e3;
};

/// λ ← λ·(accept/target)^γ, clamped; resets the window counters. No-op for windows under `window` attempts.
void adapt_lambda(StrategyState& s, const LambdaControl& c);

/// Accepts with probability min(1, exp(-df/T)).
bool metropolis_accept(double df, double T, Rng& rng);

/// How strategies share a level's step budget.
enum class Balance { Work, Time };

struct AnnealConfig {
  Schedule schedule;
  ObjectiveParams objective;  ///< eps is overwritten per level
  std::array<bool, kNumStrategies> enabled{true, true, true, true, true, true, true, true, true};
  LambdaControl lambda;
  Balance balance = Balance::Work;
  std::uint64_t seed = 1;
  double max_seconds = 0.0;        ///< 0 means unlimited
  bool check_topology = false;     ///< validate after every accepted step (slow)
  std::ostream* log = nullptr;     ///< one line per level

  void validate() const;
};

/// Reads `key = value` lines. Unknown keys throw std::invalid_argument; '#' starts a comment.
///   T_init T_final eps_init eps_final levels steps_per_level seed iterations polish_fraction
///   max_seconds balance(work|time) strategy.<Name>(on|off) mu_angle mu_minlen delta
struct PipelineConfig;
void apply_config_line(PipelineConfig& cfg, std::string_view key, std::string_view value);
void read_config(std::istream& is, PipelineConfig& cfg);
PipelineConfig load_config(const std::string& path);

/// A proposed edit: vertex moves, then edge flips given by their endpoints.
struct Proposal {
  std::vector<std::pair<VId, Point>> moves;
  std::vector<std::pair<VId, VId>> flips;
  bool empty() const { return moves.empty() && flips.empty(); }
};

struct AnnealStats {
  std::array<StrategyState, kNumStrategies> strategies{};
  std::int64_t steps = 0;
  std::int64_t accepted = 0;
  std::int64_t invalid = 0;
  int levels_run = 0;
  double seconds = 0.0;
  std::vector<double> best_trace;  ///< best f at the end of every level
};

struct AnnealResult {
  Triangulation final_state;
  Triangulation best;
  double final_f = 0.0;
  double best_f = 0.0;
  AnnealStats stats;
};

enum class StepOutcome { Empty, Invalid, Rejected, Accepted };

/// Mutable chain state: the triangulation plus the vertex grid used by cluster moves.
class Annealer {
 public:
  Annealer(Triangulation t, AnnealConfig cfg);

  /// One proposal of the given strategy at temperature T.
  StepOutcome step(Strategy s, double T);
  Proposal propose(Strategy s);
  /// f(after) - f(before) of a proposal, or nullopt if it breaks the topology. t is unchanged.
  std::optional<double> delta(const Proposal& pr);
  void apply(const Proposal& pr);

  void set_eps(double eps);
  double f() const { return f_; }
  /// Recomputes f from scratch.
  double refresh_f();

  const Triangulation& tri() const { return t_; }
  Triangulation& tri_mut() { return t_; }
  StrategyState& state(Strategy s) { return stats_.strategies[static_cast<std::size_t>(s)]; }
  AnnealStats& stats() { return stats_; }
  const AnnealConfig& config() const { return cfg_; }
  Rng& rng() { return rng_; }

 private:
  std::vector<VId> movable_;
  void rebuild_movable();
  VId random_movable();
  double eta(VId v) const;
  Point heavy_tailed_unit();
  Point resample_in_star(VId v);
  bool contracted(VId v, double len) const;
  void propose_direct(Proposal& pr, std::size_t count, double lam);
  void propose_cluster(Proposal& pr, std::size_t count, double lam);
  void propose_resample(Proposal& pr, bool small, std::size_t count);
  void propose_swap(Proposal& pr, std::size_t count);
  void propose_contract(Proposal& pr, std::size_t count);
  void propose_flips(Proposal& pr, std::size_t count);
  std::size_t group_size() const;
  std::size_t count_of(Strategy s) const;

  Triangulation t_;
  AnnealConfig cfg_;
  Rng rng_;
  UniformGrid grid_;
  double f_ = 0.0;
  AnnealStats stats_;
  std::size_t last_work_ = 0;
  double nonempty_cost_ = 0.0;
  std::int64_t nonempty_steps_ = 0;
};

/// Runs the whole schedule. The returned final state is at eps_final.
AnnealResult run_annealing(const Triangulation& t, const AnnealConfig& cfg);

struct ContractStats {
  std::size_t contracted = 0;
  std::size_t flagged = 0;
};

/// Contracts every contractible edge shorter than eps, shortest first, retrying flagged edges after progress.
/// Returns the endpoints of edges still shorter than eps. With check_topology, validates after every
/// contraction and throws std::logic_error on the first violation.
std::vector<std::pair<VId, VId>> contract_short_edges(Triangulation& t, const ObjectiveParams& p,
                                                      ContractStats* stats = nullptr, bool check_topology = false);

/// Flips internal edges whose other diagonal is strictly shorter until none is left. Returns the flip count.
std::size_t greedy_flip(Triangulation& t, bool check_topology = false);

struct PolishRound {
  double eps = 0.0;
  double length = 0.0;
  std::size_t contracted = 0;
  std::size_t flagged = 0;
};

struct ContractPolishResult {
  Triangulation tri;
  double eps = 0.0;  ///< contraction length of the returned round
  double length = 0.0;
  std::vector<std::pair<VId, VId>> incontractible;  ///< short edges left in `tri`
  std::vector<PolishRound> rounds;
};

struct ContractPolishConfig {
  AnnealConfig anneal;          ///< strategies, seed, objective weights and check_topology for the polishing runs
  double eps = 1e-4;            ///< starting contraction length
  double eps_growth = 1.3;
  double stop_factor = 1.1;
  std::int64_t polish_steps = 20000;
  double polish_T_init = 1e-3;
  double polish_T_final = 1e-5;
  int polish_levels = 10;
  int max_rounds = 40;
  int max_alternations = 4;
};

ContractPolishResult contract_and_polish(const Triangulation& t, const ContractPolishConfig& cfg);

enum class PipelineMode { Full, FlipPolish, FixedPolish };
const char* to_string(PipelineMode m);

struct PipelineConfig {
  AnnealConfig anneal;
  PipelineMode mode = PipelineMode::Full;
  int iterations = 1;
  double polish_fraction = 0.1;
  std::vector<double> angles = default_angle_grid();
  std::vector<double> areas = default_area_grid();
};

struct PipelineResult {
  Triangulation tri;
  double length = 0.0;
  double refined_length = 0.0;  ///< optimally refined CDT
  double cdt_length = 0.0;      ///< unrefined CDT
  std::vector<double> iteration_lengths;
};

/// optimal refined CDT, then annealing and Contract & Polish, optionally repeated after subdivision.
/// FlipPolish and FixedPolish skip fuzzy contraction and only polish the refined CDT.
PipelineResult full_pipeline(const Scene& scene, const PipelineConfig& cfg);

}  // namespace mwt
