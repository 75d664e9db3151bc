#include "mwt/objective.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace mwt {

void ObjectiveParams::validate() const {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(eps0 > 0.0) || eps0 > eps / 100.0) throw std::invalid_argument("eps0 must be positive and at most eps/100");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (mu_angle < 0.0 || mu_minlen < 0.0) throw std::invalid_argument("penalty weights must be nonnegative");
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
}

const char* to_string(Contractibility c) {
  switch (c) {
    case Contractibility::Yes: return "Yes";
    case Contractibility::BothFixed: return "BothFixed";
    case Contractibility::DifferentSegments: return "DifferentSegments";
    case Contractibility::Conditioning: return "Conditioning";
    case Contractibility::TrappedVertices: return "TrappedVertices";
    case Contractibility::OneHop: return "OneHop";
  }
  return "?";
}

namespace {

bool fixed_on_segment(const Triangulation& t, const Vertex& v, int seg) {
  const auto& sp = t.info().seg_points[static_cast<std::size_t>(seg)];
  return v.host == sp[0] || v.host == sp[1];
}

/// Neighbors of v along constrained edges whose segment belongs to `line`.
void line_neighbors(const Triangulation& t, VId v, int line, std::vector<VId>& out) {
  out.clear();
  std::vector<TId> st;
  t.star(v, st);
  const auto& lines = t.info().line;
  for (TId tr : st) {
    const auto& T = t.tri(tr);
    const int k = t.index_in(tr, v);
    const int s_next = T.seg[static_cast<std::size_t>(prev3(k))];  // edge v -> v[k+1]
    const int s_prev = T.seg[static_cast<std::size_t>(next3(k))];  // edge v[k+2] -> v
    if (s_next != kNone && lines[static_cast<std::size_t>(s_next)] == line) {
      const VId w = T.v[static_cast<std::size_t>(next3(k))];
      if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
    }
    if (s_prev != kNone && lines[static_cast<std::size_t>(s_prev)] == line) {
      const VId w = T.v[static_cast<std::size_t>(prev3(k))];
      if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
    }
  }
}

struct Desc {
  Dof dof;
  int host;
  Point pos;
  VId id;
};

bool segs_collinear(const SceneInfo& info, int s1, int s2, double kappa) {
  const auto& A = info.segments[static_cast<std::size_t>(s1)];
  const auto& B = info.segments[static_cast<std::size_t>(s2)];
  return near_collinear(A.a, A.b, B.a, kappa) && near_collinear(A.a, A.b, B.b, kappa);
}

std::vector<int> desc_lines(const Triangulation& t, const Desc& d) {
  const auto& info = t.info();
  std::vector<int> out;
  if (d.dof == Dof::OnSegment) {
    out.push_back(info.line[static_cast<std::size_t>(d.host)]);
  } else if (d.dof == Dof::Fixed && d.host != kNone) {
    for (int s : info.point_segments[static_cast<std::size_t>(d.host)]) out.push_back(info.line[static_cast<std::size_t>(s)]);
  }
  return out;
}

bool share_line(const Triangulation& t, const Desc& a, const Desc& b, const Desc& c) {
  const auto la = desc_lines(t, a), lb = desc_lines(t, b), lc = desc_lines(t, c);
  for (int l : la) {
    if (std::find(lb.begin(), lb.end(), l) != lb.end() && std::find(lc.begin(), lc.end(), l) != lc.end()) return true;
  }
  return false;
}

/// Case rules for a triangle that would result from a contraction. True means badly conditioned.
bool badly_conditioned(const Triangulation& t, const Desc (&d)[3], double kappa) {
  const auto& info = t.info();
  std::vector<const Desc*> fixed, seg;
  for (const auto& x : d) {
    if (x.dof == Dof::Free) return false;
    (x.dof == Dof::Fixed ? fixed : seg).push_back(&x);
  }
  // three points on one straight constrained line are the trapped-vertex case, handled separately
  if (share_line(t, d[0], d[1], d[2])) return false;
  if (fixed.size() == 3) return near_collinear(d[0].pos, d[1].pos, d[2].pos, kappa);
  if (fixed.size() == 2) {
    const auto& S = info.segments[static_cast<std::size_t>(seg[0]->host)];
    const Point f0 = fixed[0]->pos, f1 = fixed[1]->pos;
    return near_collinear(f0, f1, S.a, kappa) && near_collinear(f0, f1, S.b, kappa) &&
           near_collinear(f0, f1, lerp(S.a, S.b, 0.5), kappa);
  }
  if (fixed.size() == 1) {
    const auto& S = info.segments[static_cast<std::size_t>(seg[0]->host)];
    return segs_collinear(info, seg[0]->host, seg[1]->host, kappa) && near_collinear(S.a, S.b, fixed[0]->pos, kappa);
  }
  return segs_collinear(info, seg[0]->host, seg[1]->host, kappa) && segs_collinear(info, seg[0]->host, seg[2]->host, kappa);
}

Desc desc_of(const Triangulation& t, VId v) {
  const auto& x = t.vertex(v);
  return {x.dof, x.host, x.pos, v};
}

}  // namespace

Contractibility basic_contractibility(const Triangulation& t, VId a, VId b) {
  const Vertex& va = t.vertex(a);
  const Vertex& vb = t.vertex(b);
  if (va.dof == Dof::Fixed && vb.dof == Dof::Fixed) return Contractibility::BothFixed;
  if (va.dof == Dof::Fixed && vb.dof == Dof::OnSegment && !fixed_on_segment(t, va, vb.host))
    return Contractibility::DifferentSegments;
  if (vb.dof == Dof::Fixed && va.dof == Dof::OnSegment && !fixed_on_segment(t, vb, va.host))
    return Contractibility::DifferentSegments;
  if (va.dof == Dof::OnSegment && vb.dof == Dof::OnSegment && va.host != vb.host)
    return Contractibility::DifferentSegments;
  return Contractibility::Yes;
}

Contractibility is_contractible(const Triangulation& t, EdgeRef e, const ObjectiveParams& p) {
  const auto [a, b] = t.edge_vertices(e);
  const Contractibility basic = basic_contractibility(t, a, b);
  if (basic != Contractibility::Yes) return basic;

  const TId t1 = e.t;
  const VId c = t.tri(t1).v[static_cast<std::size_t>(e.i)];
  const auto tw = t.twin(e);
  const TId t2 = tw ? tw->t : kNone;
  const VId d = tw ? t.tri(tw->t).v[static_cast<std::size_t>(tw->i)] : kNone;

  const Vertex& va = t.vertex(a);
  const Vertex& vb = t.vertex(b);
  const bool tie = va.dof == vb.dof;
  VId k = a, r = b;
  if (static_cast<int>(vb.dof) < static_cast<int>(va.dof)) std::swap(k, r);

  // (3) conditioning of the triangles that get the snapped vertex
  if (!(tie && va.dof == Dof::Free)) {
    const Desc merged = desc_of(t, k);
    std::vector<TId> st;
    auto check_star = [&](VId v) {
      t.star(v, st);
      for (TId tr : st) {
        if (tr == t1 || tr == t2) continue;
        const auto& T = t.tri(tr);
        Desc dd[3];
        for (int j = 0; j < 3; ++j) {
          const VId x = T.v[static_cast<std::size_t>(j)];
          dd[j] = (x == a || x == b) ? merged : desc_of(t, x);
        }
        if (badly_conditioned(t, dd, p.kappa)) return false;
      }
      return true;
    };
    if (!check_star(r)) return Contractibility::Conditioning;
    if (tie && !check_star(k)) return Contractibility::Conditioning;
  }

  // (4) vertices trapped on a straight constrained line through the target
  if (!tie) {
    const Vertex& vr = t.vertex(r);
    const int own_line = vr.dof == Dof::OnSegment ? t.info().line[static_cast<std::size_t>(vr.host)] : kNone;
    std::vector<VId> nr, start, step;
    t.neighbors(r, nr);
    const Point pk = t.pos(k);
    for (int L : t.vertex_lines(k)) {
      if (L == own_line) continue;
      std::vector<VId> S;
      for (VId x : nr) {
        if (x != k && t.vertex_on_line(x, L)) S.push_back(x);
      }
      if (S.empty()) continue;
      line_neighbors(t, k, L, start);
      std::size_t covered = 0;
      for (VId n0 : start) {
        const Point dir = t.pos(n0) - pk;
        VId far = kNone;
        double far_d = 0.0;
        for (VId s : S) {
          const double dd = dot(t.pos(s) - pk, dir);
          if (dd > 0.0) {
            ++covered;
            if (dd > far_d) {
              far_d = dd;
              far = s;
            }
          }
        }
        if (far == kNone) continue;
        int long_edges = 0;
        VId prev = k, cur = n0;
        auto visit = [&](VId u, VId w) {
          if (dist(t.pos(u), t.pos(w)) >= p.eps) {
            ++long_edges;
          } else if (basic_contractibility(t, u, w) != Contractibility::Yes) {
            return false;
          }
          return long_edges <= 1;
        };
        if (!visit(prev, cur)) return Contractibility::TrappedVertices;
        std::size_t guard = 0;
        while (cur != far) {
          line_neighbors(t, cur, L, step);
          VId nxt = kNone;
          for (VId x : step) {
            if (x != prev) nxt = x;
          }
          if (nxt == kNone || ++guard > t.vertex_capacity()) return Contractibility::TrappedVertices;
          prev = cur;
          cur = nxt;
          if (!visit(prev, cur)) return Contractibility::TrappedVertices;
        }
      }
      if (covered != S.size()) return Contractibility::TrappedVertices;
    }
  }

  // (5) nontrivial 1-hop connections
  {
    std::vector<VId> na, nb;
    t.neighbors(a, na);
    t.neighbors(b, nb);
    for (VId h : na) {
      if (h == c || h == d) continue;
      if (std::find(nb.begin(), nb.end(), h) == nb.end()) continue;
      const Point ph = t.pos(h);
      const bool near_c = dist(ph, t.pos(c)) < p.eps;
      const bool near_d = d != kNone && dist(ph, t.pos(d)) < p.eps;
      if (!near_c && !near_d) return Contractibility::OneHop;
    }
  }
  return Contractibility::Yes;
}

double edge_contraction(const Triangulation& t, EdgeRef e, const ObjectiveParams& p) {
  if (!p.fuzzy_enabled) return 1.0;
  const double len = t.edge_length(e);
  if (len >= p.eps) return 1.0;
  return contraction_factor(len, p.eps, is_contractible(t, e, p) == Contractibility::Yes);
}

namespace {

template <class CFn>
double weight_with(const Triangulation& t, EdgeRef e, CFn&& c_of) {
  double prod = c_of(EdgeRef{e.t, next3(e.i)}) * c_of(EdgeRef{e.t, prev3(e.i)});
  if (auto tw = t.twin(e)) prod *= c_of(EdgeRef{tw->t, next3(tw->i)}) * c_of(EdgeRef{tw->t, prev3(tw->i)});
  return prod * m_ge2(prod);
}

double minlen_term(double len, double eps0) { return std::max(0.0, eps0 - len) / eps0; }

}  // namespace

double edge_weight(const Triangulation& t, EdgeRef e, const ObjectiveParams& p) {
  if (!p.fuzzy_enabled) return 1.0;
  return weight_with(t, e, [&](EdgeRef x) { return edge_contraction(t, x, p); });
}

double triangle_angle_penalty(const Triangulation& t, TId tri, const ObjectiveParams& p) {
  const auto& T = t.tri(tri);
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    // corner i sits between edges opposite next3(i) and prev3(i)
    if (T.seg[static_cast<std::size_t>(next3(i))] != kNone && T.seg[static_cast<std::size_t>(prev3(i))] != kNone) continue;
    const Point o = t.pos(T.v[static_cast<std::size_t>(i)]);
    const Point u = t.pos(T.v[static_cast<std::size_t>(next3(i))]) - o;
    const Point w = t.pos(T.v[static_cast<std::size_t>(prev3(i))]) - o;
    const double nu = norm(u), nw = norm(w);
    const double cs = (nu > 0.0 && nw > 0.0) ? std::clamp(dot(u, w) / (nu * nw), -1.0, 1.0) : 1.0;
    sum += pi_delta(cs, p.delta);
    if (p.polish_mode) sum += pi_delta_sharp(cs, p.delta);
  }
  return sum;
}

double contractible_weight(const Triangulation& t, const ObjectiveParams& p) {
  std::unordered_map<EdgeKey, double> cache;
  auto c_of = [&](EdgeRef x) {
    const EdgeKey k = t.key(x);
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    const double c = edge_contraction(t, x, p);
    cache.emplace(k, c);
    return c;
  };
  double sum = 0.0;
  t.for_each_edge([&](EdgeRef e) {
    const double w = p.fuzzy_enabled ? weight_with(t, e, c_of) : 1.0;
    sum += w * t.edge_length(e);
  });
  return sum;
}

double angle_penalty(const Triangulation& t, const ObjectiveParams& p) {
  double sum = 0.0;
  for (std::size_t i = 0; i < t.triangle_capacity(); ++i) {
    if (t.triangles()[i].alive) sum += triangle_angle_penalty(t, static_cast<TId>(i), p);
  }
  return sum;
}

double minlen_penalty(const Triangulation& t, const ObjectiveParams& p) {
  double sum = 0.0;
  t.for_each_edge([&](EdgeRef e) { sum += minlen_term(t.edge_length(e), p.eps0); });
  return sum;
}

ObjectiveBreakdown evaluate(const Triangulation& t, const ObjectiveParams& p) {
  ObjectiveBreakdown b;
  b.w_contractible = contractible_weight(t, p);
  b.angle_penalty = angle_penalty(t, p);
  b.minlen_penalty = minlen_penalty(t, p);
  b.f_total = b.w_contractible + p.mu_angle * b.angle_penalty + p.mu_minlen * b.minlen_penalty;
  return b;
}

// ---------------------------------------------------------------------------

void LocalObjective::clear() {
  for (VId v : region_) in_region_[static_cast<std::size_t>(v)] = 0;
  region_.clear();
}

void LocalObjective::gather(const Triangulation& t, std::span<const VId> seeds, std::span<const VId> moved_on_segment) {
  if (in_region_.size() < t.vertex_capacity()) in_region_.resize(t.vertex_capacity(), 0);
  auto add = [&](VId v) {
    if (!in_region_[static_cast<std::size_t>(v)]) {
      in_region_[static_cast<std::size_t>(v)] = 1;
      region_.push_back(v);
    }
  };
  std::vector<VId> nb;
  for (VId v : seeds) {
    add(v);
    if (!p_.fuzzy_enabled) continue;
    t.neighbors(v, nb);
    for (VId n : nb) add(n);
  }
  if (!p_.fuzzy_enabled) return;
  // vertices along the constrained line whose sub-edge lengths feed the trapped-vertex rule
  std::vector<VId> start, step;
  for (VId v : moved_on_segment) {
    const auto& vx = t.vertex(v);
    if (vx.dof != Dof::OnSegment) continue;
    const int L = t.info().line[static_cast<std::size_t>(vx.host)];
    line_neighbors(t, v, L, start);
    for (VId n0 : start) {
      VId prev = v, cur = n0;
      int long_edges = 0;
      for (std::size_t guard = 0; guard < t.vertex_capacity(); ++guard) {
        add(cur);
        if (dist(t.pos(prev), t.pos(cur)) >= p_.eps && ++long_edges >= 3) break;
        line_neighbors(t, cur, L, step);
        VId nxt = kNone;
        for (VId x : step) {
          if (x != prev) nxt = x;
        }
        if (nxt == kNone) break;
        prev = cur;
        cur = nxt;
      }
    }
  }
}

double LocalObjective::sum(const Triangulation& t, std::span<const VId> seeds) const {
  std::unordered_map<EdgeKey, double> cache;
  auto c_of = [&](EdgeRef x) {
    const EdgeKey k = t.key(x);
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    const double c = edge_contraction(t, x, p_);
    cache.emplace(k, c);
    return c;
  };
  std::unordered_set<EdgeKey> done;
  std::vector<TId> st;
  double total = 0.0;
  for (VId u : region_) {
    t.star(u, st);
    for (TId tr : st) {
      for (int i = 0; i < 3; ++i) {
        const EdgeRef e{tr, i};
        if (!done.insert(t.key(e)).second) continue;
        ++work_;
        const double len = t.edge_length(e);
        const double w = p_.fuzzy_enabled ? weight_with(t, e, c_of) : 1.0;
        total += w * len + p_.mu_minlen * minlen_term(len, p_.eps0);
      }
    }
  }
  std::unordered_set<TId> tris;
  for (VId v : seeds) {
    t.star(v, st);
    for (TId tr : st) {
      if (!tris.insert(tr).second) continue;
      ++work_;
      total += p_.mu_angle * triangle_angle_penalty(t, tr, p_);
    }
  }
  return total;
}

double delta_move(Triangulation& t, const std::vector<std::pair<VId, Point>>& moves, const ObjectiveParams& p) {
  std::vector<VId> seeds, onseg;
  std::vector<Point> old;
  for (const auto& [v, q] : moves) {
    seeds.push_back(v);
    old.push_back(t.pos(v));
    if (t.vertex(v).dof == Dof::OnSegment) onseg.push_back(v);
  }
  auto apply = [&](bool after) {
    for (std::size_t i = 0; i < moves.size(); ++i) t.set_position(moves[i].first, after ? moves[i].second : old[i]);
  };
  LocalObjective L(p);
  L.gather(t, seeds, onseg);
  apply(true);
  L.gather(t, seeds, onseg);
  const double after = L.sum(t, seeds);
  apply(false);
  const double before = L.sum(t, seeds);
  return after - before;
}

double delta_flip(Triangulation& t, EdgeRef e, const ObjectiveParams& p) {
  if (t.can_flip(e) != FlipResult::Flipped) return std::nan("");
  const auto [a, b] = t.edge_vertices(e);
  const VId c = t.tri(e.t).v[static_cast<std::size_t>(e.i)];
  const auto tw = t.twin(e);
  const VId d = t.tri(tw->t).v[static_cast<std::size_t>(tw->i)];
  const std::vector<VId> seeds{a, b, c, d};
  LocalObjective L(p);
  L.gather(t, seeds, {});
  t.flip(e);
  L.gather(t, seeds, {});
  const double after = L.sum(t, seeds);
  t.flip(*t.find_edge(c, d));
  return after - L.sum(t, seeds);
}

}  // namespace mwt
