#include "mwt/anneal.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace mwt {

namespace {

constexpr std::array<const char*, kNumStrategies> kStrategyNames{
    "DirectSingle", "DirectGroup",    "ClusterSingle",      "ClusterGroup", "ResampleSmall",
    "ResampleLarge", "SwapContracted", "ContractToNeighbor", "FlipEdges"};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

double tri_area(const Triangulation& t, TId tr) {
  const auto& T = t.tri(tr);
  return 0.5 * orient2d_value(t.pos(T.v[0]), t.pos(T.v[1]), t.pos(T.v[2]));
}

}  // namespace

const char* to_string(Strategy s) { return kStrategyNames[static_cast<std::size_t>(s)]; }

std::optional<Strategy> strategy_from_string(std::string_view name) {
  for (int i = 0; i < kNumStrategies; ++i) {
    if (name == kStrategyNames[static_cast<std::size_t>(i)]) return static_cast<Strategy>(i);
  }
  return std::nullopt;
}

bool is_contraction_strategy(Strategy s) {
  return s == Strategy::ClusterSingle || s == Strategy::ClusterGroup || s == Strategy::SwapContracted ||
         s == Strategy::ContractToNeighbor;
}

bool is_count_strategy(Strategy s) {
  return s == Strategy::ResampleSmall || s == Strategy::ResampleLarge || s == Strategy::SwapContracted ||
         s == Strategy::ContractToNeighbor || s == Strategy::FlipEdges;
}

void Schedule::validate() const {
  if (!(T_final > 0.0) || T_init < T_final) throw std::invalid_argument("schedule needs T_init >= T_final > 0");
  if (!(eps_final > 0.0) || eps_init < eps_final) throw std::invalid_argument("schedule needs eps_init >= eps_final > 0");
  if (levels < 1) throw std::invalid_argument("schedule needs at least one level");
  if (steps_per_level < 0) throw std::invalid_argument("steps_per_level must be nonnegative");
}

namespace {
double geometric(double a, double b, int level, int levels) {
  if (levels <= 1) return a;
  const double s = static_cast<double>(level) / static_cast<double>(levels - 1);
  return a * std::pow(b / a, s);
}
}  // namespace

double Schedule::temperature(int level) const { return geometric(T_init, T_final, level, levels); }
double Schedule::eps(int level) const { return geometric(eps_init, eps_final, level, levels); }

void adapt_lambda(StrategyState& s, const LambdaControl& c) {
  if (s.window_attempts < c.window) return;
  const double rate = static_cast<double>(s.window_accepts) / static_cast<double>(s.window_attempts);
  double lam = s.lambda * std::pow(rate / c.target, c.gamma);
  if (is_count_strategy(s.id)) {
    lam = std::clamp(lam, 1.0, c.count_max);
  } else {
    lam = std::clamp(lam, c.scale_min, c.scale_max);
  }
  s.lambda = lam;
  s.window_attempts = 0;
  s.window_accepts = 0;
}

bool metropolis_accept(double df, double T, Rng& rng) {
  if (df <= 0.0) return true;
  return uniform01(rng) < std::exp(-df / T);
}

void AnnealConfig::validate() const {
  schedule.validate();
  ObjectiveParams p = objective;
  p.eps = schedule.eps_final;
  p.validate();
  if (lambda.window < 1 || !(lambda.target > 0.0 && lambda.target < 1.0)) throw std::invalid_argument("bad lambda control");
}

// ---------------------------------------------------------------------------

Annealer::Annealer(Triangulation t, AnnealConfig cfg)
    : t_(std::move(t)), cfg_(std::move(cfg)), rng_(cfg_.seed), grid_(std::max(5.0 * cfg_.schedule.eps_init, 1e-3)) {
  for (int i = 0; i < kNumStrategies; ++i) {
    auto& s = stats_.strategies[static_cast<std::size_t>(i)];
    s.id = static_cast<Strategy>(i);
    s.lambda = is_count_strategy(s.id) ? 1.0 : 0.1;
  }
  rebuild_movable();
  cfg_.objective.eps = cfg_.schedule.eps_init;
  refresh_f();
}

void Annealer::rebuild_movable() {
  movable_.clear();
  grid_ = UniformGrid(grid_.cell_size());
  for (std::size_t i = 0; i < t_.vertex_capacity(); ++i) {
    const auto& v = t_.vertices()[i];
    if (!v.alive || v.dof == Dof::Fixed) continue;
    movable_.push_back(static_cast<VId>(i));
    grid_.insert(static_cast<VId>(i), v.pos);
  }
}

void Annealer::set_eps(double eps) {
  cfg_.objective.eps = eps;
  grid_.maybe_rebuild(std::max(5.0 * eps, 1e-3));
  refresh_f();
}

double Annealer::refresh_f() {
  f_ = evaluate(t_, cfg_.objective).f_total;
  return f_;
}

VId Annealer::random_movable() { return movable_[uniform_index(rng_, movable_.size())]; }

double Annealer::eta(VId v) const { return std::sqrt(std::max(0.0, t_.star_area(v))); }

Point Annealer::heavy_tailed_unit() {
  // uniform point in the unit disk with its radius scaled by Pareto(alpha = 1/2, x > 1)
  const double r = std::sqrt(uniform01(rng_));
  const double th = 2.0 * std::numbers::pi * uniform01(rng_);
  const double u = 1.0 - uniform01(rng_);  // (0, 1]
  const double pareto = 1.0 / (u * u);
  return {r * pareto * std::cos(th), r * pareto * std::sin(th)};
}

Point Annealer::resample_in_star(VId v) {
  const auto& vx = t_.vertex(v);
  if (vx.dof == Dof::OnSegment) {
    const auto cn = t_.chain_neighbors(v, vx.host);
    if (cn.size() != 2) return vx.pos;
    return lerp(t_.pos(cn[0]), t_.pos(cn[1]), uniform01(rng_));
  }
  std::vector<TId> st;
  t_.star(v, st);
  double total = 0.0;
  std::vector<double> cum;
  cum.reserve(st.size());
  for (TId tr : st) {
    total += std::max(0.0, tri_area(t_, tr));
    cum.push_back(total);
  }
  if (!(total > 0.0)) return vx.pos;
  const double x = uniform01(rng_) * total;
  const std::size_t k = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), x) - cum.begin());
  const auto& T = t_.tri(st[std::min(k, st.size() - 1)]);
  double a = uniform01(rng_), b = uniform01(rng_);
  if (a + b > 1.0) {
    a = 1.0 - a;
    b = 1.0 - b;
  }
  const Point p0 = t_.pos(T.v[0]);
  return p0 + (t_.pos(T.v[1]) - p0) * a + (t_.pos(T.v[2]) - p0) * b;
}

bool Annealer::contracted(VId v, double len) const {
  std::vector<VId> nb;
  t_.neighbors(v, nb);
  const Point p = t_.pos(v);
  return std::any_of(nb.begin(), nb.end(), [&](VId w) { return dist(p, t_.pos(w)) < len; });
}

std::size_t Annealer::group_size() const {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.02 * static_cast<double>(movable_.size()))));
}

std::size_t Annealer::count_of(Strategy s) const {
  switch (s) {
    case Strategy::DirectSingle:
    case Strategy::ClusterSingle: return 1;
    case Strategy::DirectGroup:
    case Strategy::ClusterGroup: return group_size();
    default: {
      const double lam = stats_.strategies[static_cast<std::size_t>(s)].lambda;
      return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(lam)));
    }
  }
}

namespace {
bool has_move(const Proposal& pr, VId v) {
  return std::any_of(pr.moves.begin(), pr.moves.end(), [&](const auto& m) { return m.first == v; });
}
}  // namespace

void Annealer::propose_direct(Proposal& pr, std::size_t count, double lam) {
  count = std::min(count, movable_.size());
  for (std::size_t tries = 0; pr.moves.size() < count && tries < 4 * count + 8; ++tries) {
    const VId v = random_movable();
    if (has_move(pr, v)) continue;
    const Point q = t_.constrain(v, t_.pos(v) + heavy_tailed_unit() * (lam * eta(v)));
    pr.moves.emplace_back(v, q);
  }
}

void Annealer::propose_cluster(Proposal& pr, std::size_t count, double lam) {
  const double eps = cfg_.objective.eps;
  std::vector<VId> near;
  std::vector<TId> st;
  std::unordered_set<TId> tris;
  for (std::size_t g = 0; g < count; ++g) {
    const VId c = random_movable();
    const double d = eps * (0.5 + 4.5 * uniform01(rng_));
    grid_.query(t_.pos(c), d, near);
    tris.clear();
    double area = 0.0;
    for (VId v : near) {
      t_.star(v, st);
      for (TId tr : st) {
        if (tris.insert(tr).second) area += std::max(0.0, tri_area(t_, tr));
      }
    }
    const Point disp = heavy_tailed_unit() * (lam * std::sqrt(area));
    for (VId v : near) {
      if (has_move(pr, v)) continue;
      pr.moves.emplace_back(v, t_.constrain(v, t_.pos(v) + disp));
    }
  }
}

void Annealer::propose_resample(Proposal& pr, bool small, std::size_t count) {
  const double thresh = 10.0 * cfg_.objective.eps * cfg_.objective.eps;
  count = std::min(count, movable_.size());
  for (std::size_t tries = 0; pr.moves.size() < count && tries < 32 * count; ++tries) {
    const VId v = random_movable();
    if (has_move(pr, v)) continue;
    if ((t_.star_area(v) < thresh) != small) continue;
    pr.moves.emplace_back(v, resample_in_star(v));
  }
}

void Annealer::propose_swap(Proposal& pr, std::size_t count) {
  const double eps = cfg_.objective.eps;
  const double l = eps * (0.2 + 1.8 * uniform01(rng_));
  std::vector<VId> cands;
  bool scanned = false;
  std::vector<VId> nb;
  for (std::size_t tries = 0; pr.moves.size() < count && tries < 64 + 4 * count; ++tries) {
    VId v = kNone;
    if (!scanned && tries < 32) {
      const VId w = random_movable();
      if (contracted(w, l)) v = w;
    } else {
      if (!scanned) {
        scanned = true;
        for (VId w : movable_) {
          if (contracted(w, l)) cands.push_back(w);
        }
      }
      if (cands.empty()) return;
      v = cands[uniform_index(rng_, cands.size())];
    }
    if (v == kNone || has_move(pr, v)) continue;
    t_.neighbors(v, nb);
    if (nb.empty()) continue;
    const Point c = t_.pos(nb[uniform_index(rng_, nb.size())]);
    const double r = l * std::sqrt(uniform01(rng_));
    const double th = 2.0 * std::numbers::pi * uniform01(rng_);
    pr.moves.emplace_back(v, t_.constrain(v, c + Point{r * std::cos(th), r * std::sin(th)}));
  }
}

void Annealer::propose_contract(Proposal& pr, std::size_t count) {
  const double eps = cfg_.objective.eps;
  std::vector<VId> nb;
  count = std::min(count, movable_.size());
  std::vector<VId> tried;
  for (std::size_t tries = 0; tried.size() < count && tries < 4 * count + 8; ++tries) {
    const VId v = random_movable();
    if (std::find(tried.begin(), tried.end(), v) != tried.end()) continue;
    tried.push_back(v);
    const bool was = contracted(v, eps);
    const Point q = resample_in_star(v);
    t_.neighbors(v, nb);
    const bool now = std::any_of(nb.begin(), nb.end(), [&](VId w) { return dist(q, t_.pos(w)) < eps; });
    if (was != now) pr.moves.emplace_back(v, q);
  }
}

void Annealer::propose_flips(Proposal& pr, std::size_t count) {
  const std::size_t cap = t_.triangle_capacity();
  if (cap == 0) return;
  for (std::size_t tries = 0; pr.flips.size() < count && tries < 8 * count + 8; ++tries) {
    const TId tr = static_cast<TId>(uniform_index(rng_, cap));
    if (!t_.tri(tr).alive) continue;
    const EdgeRef e{tr, static_cast<int>(uniform_index(rng_, 3))};
    if (t_.can_flip(e) != FlipResult::Flipped) continue;
    auto ab = t_.edge_vertices(e);
    if (std::any_of(pr.flips.begin(), pr.flips.end(), [&](const auto& f) {
          return edge_key(f.first, f.second) == edge_key(ab.first, ab.second);
        }))
      continue;
    pr.flips.push_back(ab);
  }
}

Proposal Annealer::propose(Strategy s) {
  Proposal pr;
  const bool needs_vertices = s != Strategy::FlipEdges;
  if (needs_vertices && movable_.empty()) return pr;
  const std::size_t n = count_of(s);
  const double lam = state(s).lambda;
  switch (s) {
    case Strategy::DirectSingle:
    case Strategy::DirectGroup: propose_direct(pr, n, lam); break;
    case Strategy::ClusterSingle:
    case Strategy::ClusterGroup: propose_cluster(pr, n, lam); break;
    case Strategy::ResampleSmall: propose_resample(pr, true, n); break;
    case Strategy::ResampleLarge: propose_resample(pr, false, n); break;
    case Strategy::SwapContracted: propose_swap(pr, n); break;
    case Strategy::ContractToNeighbor: propose_contract(pr, n); break;
    case Strategy::FlipEdges: propose_flips(pr, n); break;
  }
  // drop moves that do nothing
  std::erase_if(pr.moves, [&](const auto& m) { return m.second == t_.pos(m.first) || !is_finite(m.second); });
  return pr;
}

namespace {

struct Applied {
  std::vector<Point> old;
  std::vector<std::pair<VId, VId>> new_diagonals;
};

/// Applies the proposal, recording how to undo it. Returns false (with t restored) when a flip is not possible.
bool apply_recorded(Triangulation& t, const Proposal& pr, Applied& rec) {
  rec.old.clear();
  rec.new_diagonals.clear();
  for (const auto& [v, q] : pr.moves) {
    rec.old.push_back(t.pos(v));
    t.set_position(v, q);
  }
  for (const auto& [a, b] : pr.flips) {
    const auto e = t.find_edge(a, b);
    if (!e || t.can_flip(*e) != FlipResult::Flipped) {
      for (auto it = rec.new_diagonals.rbegin(); it != rec.new_diagonals.rend(); ++it) t.flip(*t.find_edge(it->first, it->second));
      for (std::size_t i = 0; i < pr.moves.size(); ++i) t.set_position(pr.moves[i].first, rec.old[i]);
      rec.new_diagonals.clear();
      return false;
    }
    const VId c = t.tri(e->t).v[static_cast<std::size_t>(e->i)];
    const auto tw = t.twin(*e);
    const VId d = t.tri(tw->t).v[static_cast<std::size_t>(tw->i)];
    t.flip(*e);
    rec.new_diagonals.emplace_back(c, d);
  }
  return true;
}

void undo_recorded(Triangulation& t, const Proposal& pr, const Applied& rec) {
  for (auto it = rec.new_diagonals.rbegin(); it != rec.new_diagonals.rend(); ++it) t.flip(*t.find_edge(it->first, it->second));
  for (std::size_t i = 0; i < pr.moves.size(); ++i) t.set_position(pr.moves[i].first, rec.old[i]);
}

}  // namespace

std::optional<double> Annealer::delta(const Proposal& pr) {
  std::vector<VId> seeds, onseg;
  for (const auto& [v, q] : pr.moves) {
    seeds.push_back(v);
    if (t_.vertex(v).dof == Dof::OnSegment) onseg.push_back(v);
  }
  Applied rec;
  // quad vertices of the flips, taken from the state they are applied to
  {
    if (!apply_recorded(t_, pr, rec)) return std::nullopt;
    for (const auto& [c, d] : rec.new_diagonals) {
      seeds.push_back(c);
      seeds.push_back(d);
    }
    undo_recorded(t_, pr, rec);
    for (const auto& [a, b] : pr.flips) {
      seeds.push_back(a);
      seeds.push_back(b);
    }
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  }
  LocalObjective L(cfg_.objective);
  L.gather(t_, seeds, onseg);
  apply_recorded(t_, pr, rec);
  bool valid = true;
  for (VId v : seeds) {
    if (!t_.star_positive(v)) {
      valid = false;
      break;
    }
  }
  if (!valid) {
    undo_recorded(t_, pr, rec);
    return std::nullopt;
  }
  L.gather(t_, seeds, onseg);
  const double after = L.sum(t_, seeds);
  undo_recorded(t_, pr, rec);
  const double before = L.sum(t_, seeds);
  last_work_ = L.work();
  return after - before;
}

void Annealer::apply(const Proposal& pr) {
  Applied rec;
  apply_recorded(t_, pr, rec);
  for (const auto& [v, q] : pr.moves) grid_.move(v, q);
}

StepOutcome Annealer::step(Strategy s, double T) {
  const auto t0 = Clock::now();
  auto& st = state(s);
  ++st.attempts;
  ++st.level_attempts;
  ++stats_.steps;
  last_work_ = 0;
  const Proposal pr = propose(s);
  StepOutcome out = StepOutcome::Empty;
  double work = 1.0 + static_cast<double>(pr.moves.size() + pr.flips.size());
  if (!pr.empty()) {
    ++st.window_attempts;
    const auto d = delta(pr);
    work += static_cast<double>(last_work_);
    if (!d) {
      ++stats_.invalid;
      out = StepOutcome::Invalid;
    } else if (metropolis_accept(*d, T, rng_)) {
      apply(pr);
      f_ += *d;
      out = StepOutcome::Accepted;
      ++st.accepts;
      ++st.window_accepts;
      ++st.level_accepts;
      ++stats_.accepted;
      if (cfg_.check_topology) {
        const auto errs = t_.validate();
        if (!errs.empty()) throw std::logic_error("topology broken after " + std::string(to_string(s)) + ": " + errs.front());
      }
    } else {
      out = StepOutcome::Rejected;
    }
    adapt_lambda(st, cfg_.lambda);
  }
  const double secs = seconds_since(t0);
  st.seconds += secs;
  double cost = cfg_.balance == Balance::Time ? secs : work;
  if (out == StepOutcome::Empty) {
    // an empty proposal is charged like an average real one so it does not crowd out the others
    if (nonempty_steps_ > 0) cost = std::max(cost, nonempty_cost_ / static_cast<double>(nonempty_steps_));
  } else {
    nonempty_cost_ += cost;
    ++nonempty_steps_;
  }
  st.cost += cost;
  return out;
}

// ---------------------------------------------------------------------------

AnnealResult run_annealing(const Triangulation& t, const AnnealConfig& cfg) {
  cfg.validate();
  const auto t0 = Clock::now();
  Annealer A(t, cfg);
  AnnealResult res;
  res.best = t;
  res.best_f = std::numeric_limits<double>::infinity();
  std::vector<Strategy> active;
  for (int i = 0; i < kNumStrategies; ++i) {
    if (cfg.enabled[static_cast<std::size_t>(i)]) active.push_back(static_cast<Strategy>(i));
  }
  bool out_of_time = false;
  for (int level = 0; level < cfg.schedule.levels && !out_of_time; ++level) {
    const double T = cfg.schedule.temperature(level);
    const double eps = cfg.schedule.eps(level);
    A.set_eps(eps);
    if (A.f() < res.best_f) {
      res.best_f = A.f();
      res.best = A.tri();
    }
    for (auto& s : A.stats().strategies) s.level_attempts = s.level_accepts = 0;
    // empty proposals do not use up the level budget unless every strategy keeps coming back empty
    std::int64_t empty_streak = 0;
    const std::int64_t max_streak = 16 * static_cast<std::int64_t>(active.size());
    for (std::int64_t k = 0, n = 0; k < cfg.schedule.steps_per_level && !active.empty(); ++n) {
      Strategy pick = active.front();
      for (Strategy s : active) {
        if (A.state(s).cost < A.state(pick).cost) pick = s;
      }
      const StepOutcome o = A.step(pick, T);
      if (o == StepOutcome::Empty) {
        if (++empty_streak > max_streak) break;
        continue;
      }
      empty_streak = 0;
      ++k;
      if (o == StepOutcome::Accepted && A.f() < res.best_f) {
        res.best_f = A.f();
        res.best = A.tri();
      }
      if (cfg.max_seconds > 0.0 && (n & 255) == 0 && seconds_since(t0) > cfg.max_seconds) {
        out_of_time = true;
        break;
      }
    }
    ++A.stats().levels_run;
    A.stats().best_trace.push_back(res.best_f);
    if (cfg.log) {
      auto& os = *cfg.log;
      os << "level " << level << " T=" << T << " eps=" << eps << " f=" << A.f() << " best=" << res.best_f;
      for (Strategy s : active) {
        const auto& st = A.state(s);
        const double rate = st.level_attempts ? static_cast<double>(st.level_accepts) / static_cast<double>(st.level_attempts) : 0.0;
        os << ' ' << to_string(s) << '=' << std::fixed << std::setprecision(3) << rate << std::defaultfloat
           << std::setprecision(6);
      }
      os << '\n';
    }
  }
  res.final_f = A.f();
  res.stats = A.stats();
  res.stats.seconds = seconds_since(t0);
  res.final_state = A.tri();
  return res;
}

// ---------------------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(std::string_view key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad number for " + std::string(key) + ": " + v);
  }
}

bool to_bool(std::string_view key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw std::invalid_argument("bad flag for " + std::string(key) + ": " + v);
}

}  // namespace

void apply_config_line(PipelineConfig& cfg, std::string_view key_in, std::string_view value_in) {
  const std::string key = trim(key_in);
  const std::string v = trim(value_in);
  auto& a = cfg.anneal;
  if (key == "T_init") a.schedule.T_init = to_double(key, v);
  else if (key == "T_final") a.schedule.T_final = to_double(key, v);
  else if (key == "eps_init") a.schedule.eps_init = to_double(key, v);
  else if (key == "eps_final") a.schedule.eps_final = to_double(key, v);
  else if (key == "levels") a.schedule.levels = static_cast<int>(to_double(key, v));
  else if (key == "steps_per_level") a.schedule.steps_per_level = static_cast<std::int64_t>(to_double(key, v));
  else if (key == "seed") a.seed = std::stoull(v);
  else if (key == "iterations") cfg.iterations = static_cast<int>(to_double(key, v));
  else if (key == "polish_fraction") cfg.polish_fraction = to_double(key, v);
  else if (key == "max_seconds") a.max_seconds = to_double(key, v);
  else if (key == "mu_angle") a.objective.mu_angle = to_double(key, v);
  else if (key == "mu_minlen") a.objective.mu_minlen = to_double(key, v);
  else if (key == "delta") a.objective.delta = to_double(key, v);
  else if (key == "balance") {
    if (v == "work") a.balance = Balance::Work;
    else if (v == "time") a.balance = Balance::Time;
    else throw std::invalid_argument("balance must be work or time");
  } else if (key.rfind("strategy.", 0) == 0) {
    const auto s = strategy_from_string(std::string_view(key).substr(9));
    if (!s) throw std::invalid_argument("unknown strategy: " + key.substr(9));
    a.enabled[static_cast<std::size_t>(*s)] = to_bool(key, v);
  } else {
    throw std::invalid_argument("unknown config key: " + key);
  }
}

void read_config(std::istream& is, PipelineConfig& cfg) {
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("line " + std::to_string(n) + ": expected key = value");
    apply_config_line(cfg, std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1));
  }
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  PipelineConfig cfg;
  read_config(in, cfg);
  return cfg;
}

}  // namespace mwt
