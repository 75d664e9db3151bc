#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mwt/anneal.hpp"

namespace mwt {

namespace {

std::vector<std::pair<VId, VId>> short_edges(const Triangulation& t, double eps) {
  std::vector<std::pair<double, std::pair<VId, VId>>> es;
  t.for_each_edge([&](EdgeRef e) {
    const double len = t.edge_length(e);
    if (len < eps) es.push_back({len, t.edge_vertices(e)});
  });
  std::sort(es.begin(), es.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return edge_key(a.second.first, a.second.second) < edge_key(b.second.first, b.second.second);
  });
  std::vector<std::pair<VId, VId>> out;
  out.reserve(es.size());
  for (const auto& x : es) out.push_back(x.second);
  return out;
}

void check_step(const Triangulation& t, const char* what) {
  const auto errs = t.validate();
  if (!errs.empty()) throw std::logic_error(std::string("topology broken after ") + what + ": " + errs.front());
}

}  // namespace

std::vector<std::pair<VId, VId>> contract_short_edges(Triangulation& t, const ObjectiveParams& p, ContractStats* stats,
                                                      bool check_topology) {
  ContractStats local;
  for (;;) {
    bool progress = false;
    for (const auto& [a, b] : short_edges(t, p.eps)) {
      if (!t.vertex(a).alive || !t.vertex(b).alive) continue;
      const auto e = t.find_edge(a, b);
      if (!e || t.edge_length(*e) >= p.eps) continue;
      if (is_contractible(t, *e, p) != Contractibility::Yes) continue;
      if (t.contract(*e).ok()) {
        if (check_topology) check_step(t, "contraction");
        ++local.contracted;
        progress = true;
      }
    }
    // edges flagged in this sweep get another chance once something else moved
    if (!progress) break;
  }
  auto left = short_edges(t, p.eps);
  local.flagged = left.size();
  if (stats) *stats = local;
  return left;
}

std::size_t greedy_flip(Triangulation& t, bool check_topology) {
  std::size_t flips = 0;
  for (bool again = true; again;) {
    again = false;
    for (const EdgeRef e0 : t.edges()) {
      const auto [a, b] = t.edge_vertices(e0);
      const auto e = t.find_edge(a, b);
      if (!e || t.can_flip(*e) != FlipResult::Flipped) continue;
      const VId c = t.tri(e->t).v[static_cast<std::size_t>(e->i)];
      const auto tw = t.twin(*e);
      const VId d = t.tri(tw->t).v[static_cast<std::size_t>(tw->i)];
      if (dist(t.pos(c), t.pos(d)) < dist(t.pos(a), t.pos(b))) {
        t.flip(*e);
        if (check_topology) check_step(t, "greedy flip");
        ++flips;
        again = true;
      }
    }
  }
  return flips;
}

namespace {

AnnealConfig polish_config(const ContractPolishConfig& cfg, double eps, std::uint64_t seed) {
  AnnealConfig a = cfg.anneal;
  a.objective.fuzzy_enabled = false;
  a.objective.polish_mode = true;
  for (int i = 0; i < kNumStrategies; ++i) {
    if (is_contraction_strategy(static_cast<Strategy>(i))) a.enabled[static_cast<std::size_t>(i)] = false;
  }
  a.schedule.T_init = cfg.polish_T_init;
  a.schedule.T_final = std::min(cfg.polish_T_final, cfg.polish_T_init);
  a.schedule.eps_init = a.schedule.eps_final = eps;
  a.schedule.levels = std::max(1, cfg.polish_levels);
  a.schedule.steps_per_level = cfg.polish_steps / a.schedule.levels;
  a.seed = seed;
  a.log = nullptr;
  return a;
}

}  // namespace

ContractPolishResult contract_and_polish(const Triangulation& t, const ContractPolishConfig& cfg) {
  ContractPolishResult res;
  res.length = std::numeric_limits<double>::infinity();
  ObjectiveParams p = cfg.anneal.objective;
  double eps = cfg.eps;
  Triangulation cur = t;
  const bool check = cfg.anneal.check_topology;
  std::uint64_t seed = cfg.anneal.seed * 0x9e3779b97f4a7c15ull + 1;

  // an input without short edges is already a finished triangulation
  if (short_edges(t, eps).empty()) {
    res.tri = t;
    res.length = t.total_edge_length();
    res.eps = eps;
  }

  auto polish = [&](double e) {
    if (cfg.polish_steps <= 0) return;
    const auto r = run_annealing(cur, polish_config(cfg, e, seed++));
    cur = r.best;
  };

  for (int round = 0; round < cfg.max_rounds; ++round) {
    p.eps = eps;
    PolishRound rec;
    rec.eps = eps;
    ContractStats cs;
    // (a) contract, polish, and contract again while short edges keep showing up
    for (int k = 0; k < 3; ++k) {
      contract_short_edges(cur, p, &cs, check);
      rec.contracted += cs.contracted;
      cur.compact();
      polish(eps);
      if (short_edges(cur, eps).empty() || cs.contracted == 0) break;
    }
    // (b)/(c) alternate greedy flips with polishing until the length stops improving
    for (int k = 0; k < cfg.max_alternations; ++k) {
      const double before = cur.total_edge_length();
      const std::size_t flips = greedy_flip(cur, check);
      polish(eps);
      if (flips == 0 && cur.total_edge_length() >= before) break;
      if (cur.total_edge_length() >= before) break;
    }
    contract_short_edges(cur, p, &cs, check);
    rec.contracted += cs.contracted;
    cur.compact();
    auto flagged = short_edges(cur, eps);
    rec.flagged = flagged.size();
    // (d) record
    rec.length = cur.total_edge_length();
    res.rounds.push_back(rec);
    if (rec.length < res.length) {
      res.length = rec.length;
      res.tri = cur;
      res.eps = eps;
      res.incontractible = std::move(flagged);
    } else if (rec.length > cfg.stop_factor * res.length) {
      break;
    }
    eps *= cfg.eps_growth;
    double longest = 0.0;
    cur.for_each_edge([&](EdgeRef e) { longest = std::max(longest, cur.edge_length(e)); });
    if (eps > longest) break;
  }
  return res;
}

const char* to_string(PipelineMode m) {
  switch (m) {
    case PipelineMode::Full: return "full";
    case PipelineMode::FlipPolish: return "flip-polish";
    case PipelineMode::FixedPolish: return "fixed-polish";
  }
  return "?";
}

PipelineResult full_pipeline(const Scene& scene, const PipelineConfig& cfg) {
  cfg.anneal.validate();
  PipelineResult res;
  res.cdt_length = build_cdt(scene).total_edge_length();
  auto opt = optimal_refined_cdt(scene, cfg.angles, cfg.areas);
  res.refined_length = opt.length;
  res.tri = opt.tri;
  res.length = opt.length;

  if (cfg.mode != PipelineMode::Full) {
    AnnealConfig a = cfg.anneal;
    a.objective.fuzzy_enabled = false;
    for (int i = 0; i < kNumStrategies; ++i) {
      const auto s = static_cast<Strategy>(i);
      if (is_contraction_strategy(s)) a.enabled[static_cast<std::size_t>(i)] = false;
      if (s == Strategy::FlipEdges && cfg.mode == PipelineMode::FixedPolish) a.enabled[static_cast<std::size_t>(i)] = false;
    }
    Triangulation out = run_annealing(opt.tri, a).best;
    if (cfg.mode == PipelineMode::FlipPolish) greedy_flip(out);
    const double len = out.total_edge_length();
    res.iteration_lengths.push_back(len);
    if (len < res.length) {
      res.tri = std::move(out);
      res.length = len;
    }
    return res;
  }

  const std::int64_t main_steps = static_cast<std::int64_t>(cfg.anneal.schedule.levels) * cfg.anneal.schedule.steps_per_level;
  ContractPolishConfig cp;
  cp.anneal = cfg.anneal;
  cp.eps = cfg.anneal.schedule.eps_final;
  cp.polish_steps = static_cast<std::int64_t>(std::llround(cfg.polish_fraction * static_cast<double>(main_steps)));
  cp.polish_T_init = std::max(cfg.anneal.schedule.T_final * 10.0, cfg.anneal.schedule.T_final);
  cp.polish_T_final = cfg.anneal.schedule.T_final;

  Triangulation cur = opt.tri;
  for (int it = 0; it < std::max(1, cfg.iterations); ++it) {
    if (it > 0) cur = cur.subdivided();
    AnnealConfig a = cfg.anneal;
    a.seed = cfg.anneal.seed + static_cast<std::uint64_t>(it) * 7919u;
    const auto ar = run_annealing(cur, a);
    cp.anneal.seed = a.seed;
    auto r = contract_and_polish(ar.final_state, cp);
    res.iteration_lengths.push_back(r.length);
    cur = r.tri;
    if (r.length < res.length) {
      res.length = r.length;
      res.tri = std::move(r.tri);
    }
  }
  return res;
}

}  // namespace mwt
