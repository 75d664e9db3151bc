#include "mwt/cdt.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace mwt {

namespace {

/// Mutable working triangulation used during construction and refinement.
class Builder {
 public:
  struct Tri {
    std::array<VId, 3> v{};
    std::array<TId, 3> n{kNone, kNone, kNone};
    std::array<int, 3> s{kNone, kNone, kNone};
    bool alive = true;
  };

  explicit Builder(std::shared_ptr<const SceneInfo> info) : info_(std::move(info)) {}

  std::shared_ptr<const SceneInfo> info_;
  std::vector<Vertex> verts;
  std::vector<Tri> tris;
  std::vector<TId> free_tris;
  TId last = 0;

  Point P(VId v) const { return verts[static_cast<std::size_t>(v)].pos; }
  Tri& T(TId t) { return tris[static_cast<std::size_t>(t)]; }
  const Tri& T(TId t) const { return tris[static_cast<std::size_t>(t)]; }

  VId add_vertex(Point p, Dof dof, int host) {
    Vertex v;
    v.pos = p;
    v.dof = dof;
    v.host = host;
    verts.push_back(v);
    return static_cast<VId>(verts.size() - 1);
  }

  static int idx(const Tri& t, VId v) {
    for (int i = 0; i < 3; ++i) {
      if (t.v[static_cast<std::size_t>(i)] == v) return i;
    }
    return -1;
  }

  /// Replaces `old` triangles by `fresh` ones, reconnecting to everything outside.
  std::vector<TId> replace(const std::vector<TId>& old, const std::vector<std::array<VId, 3>>& fresh,
                           const std::unordered_map<EdgeKey, int>& extra_seg = {}) {
    struct Outer {
      TId nbr;
      int seg;
    };
    std::unordered_map<EdgeKey, Outer> outer;
    std::unordered_map<EdgeKey, int> inner_seg = extra_seg;
    auto in_old = [&](TId t) { return std::find(old.begin(), old.end(), t) != old.end(); };
    for (TId t : old) {
      const Tri& tr = T(t);
      for (int i = 0; i < 3; ++i) {
        const VId a = tr.v[static_cast<std::size_t>(next3(i))], b = tr.v[static_cast<std::size_t>(prev3(i))];
        const TId nb = tr.n[static_cast<std::size_t>(i)];
        if (nb != kNone && in_old(nb)) {
          if (tr.s[static_cast<std::size_t>(i)] != kNone) inner_seg.emplace(edge_key(a, b), tr.s[static_cast<std::size_t>(i)]);
          continue;
        }
        outer[edge_key(a, b)] = Outer{nb, tr.s[static_cast<std::size_t>(i)]};
      }
    }
    for (TId t : old) {
      T(t).alive = false;
      free_tris.push_back(t);
    }
    std::vector<TId> ids;
    for (const auto& f : fresh) {
      TId id;
      if (!free_tris.empty()) {
        id = free_tris.back();
        free_tris.pop_back();
      } else {
        tris.emplace_back();
        id = static_cast<TId>(tris.size() - 1);
      }
      Tri& tr = T(id);
      tr = Tri{};
      tr.v = f;
      ids.push_back(id);
      for (VId v : f) verts[static_cast<std::size_t>(v)].tri = id;
    }
    std::unordered_map<EdgeKey, std::pair<TId, int>> open;
    for (TId id : ids) {
      for (int i = 0; i < 3; ++i) {
        const VId a = T(id).v[static_cast<std::size_t>(next3(i))], b = T(id).v[static_cast<std::size_t>(prev3(i))];
        const EdgeKey k = edge_key(a, b);
        auto o = outer.find(k);
        if (o != outer.end()) {
          T(id).n[static_cast<std::size_t>(i)] = o->second.nbr;
          T(id).s[static_cast<std::size_t>(i)] = o->second.seg;
          if (o->second.nbr != kNone) {
            Tri& ot = T(o->second.nbr);
            for (int j = 0; j < 3; ++j) {
              const VId c = ot.v[static_cast<std::size_t>(next3(j))], d = ot.v[static_cast<std::size_t>(prev3(j))];
              if (edge_key(c, d) == k) ot.n[static_cast<std::size_t>(j)] = id;
            }
          }
          continue;
        }
        auto s = inner_seg.find(k);
        if (s != inner_seg.end()) T(id).s[static_cast<std::size_t>(i)] = s->second;
        auto it = open.find(k);
        if (it == open.end()) {
          open.emplace(k, std::make_pair(id, i));
        } else {
          T(id).n[static_cast<std::size_t>(i)] = it->second.first;
          T(it->second.first).n[static_cast<std::size_t>(it->second.second)] = id;
          open.erase(it);
        }
      }
    }
    if (!ids.empty()) last = ids.front();
    return ids;
  }

  void star(VId v, std::vector<TId>& out) const {
    out.clear();
    const TId t0 = verts[static_cast<std::size_t>(v)].tri;
    TId t = t0;
    bool closed = false;
    for (std::size_t guard = 0; guard <= tris.size(); ++guard) {
      out.push_back(t);
      const int k = idx(T(t), v);
      const TId n = T(t).n[static_cast<std::size_t>(next3(k))];
      if (n == kNone) break;
      if (n == t0) {
        closed = true;
        break;
      }
      t = n;
    }
    if (closed) return;
    t = t0;
    for (std::size_t guard = 0; guard <= tris.size(); ++guard) {
      const int k = idx(T(t), v);
      const TId n = T(t).n[static_cast<std::size_t>(prev3(k))];
      if (n == kNone) break;
      out.push_back(n);
      t = n;
    }
  }

  /// Triangle and corner index such that edge (a,b) is opposite that corner.
  bool find_edge(VId a, VId b, TId& t_out, int& i_out) const {
    std::vector<TId> st;
    star(a, st);
    for (TId t : st) {
      const Tri& tr = T(t);
      const int k = idx(tr, a);
      if (tr.v[static_cast<std::size_t>(next3(k))] == b) {
        t_out = t;
        i_out = prev3(k);
        return true;
      }
      if (tr.v[static_cast<std::size_t>(prev3(k))] == b) {
        t_out = t;
        i_out = next3(k);
        return true;
      }
    }
    return false;
  }

  TId find_tri(const std::array<VId, 3>& tv) const {
    if (tv[0] == kNone) return kNone;
    std::vector<TId> st;
    star(tv[0], st);
    for (TId t : st) {
      if (idx(T(t), tv[1]) >= 0 && idx(T(t), tv[2]) >= 0) return t;
    }
    return kNone;
  }

  void set_seg(VId a, VId b, int seg) {
    TId t;
    int i;
    if (!find_edge(a, b, t, i)) throw std::logic_error("constrained edge missing after insertion");
    T(t).s[static_cast<std::size_t>(i)] = seg;
    const TId n = T(t).n[static_cast<std::size_t>(i)];
    if (n != kNone) {
      Tri& nt = T(n);
      for (int j = 0; j < 3; ++j) {
        if (nt.n[static_cast<std::size_t>(j)] == t) nt.s[static_cast<std::size_t>(j)] = seg;
      }
    }
  }

  enum class Where { Inside, OnEdge, OnVertex, Outside };
  struct Loc {
    Where where = Where::Outside;
    TId t = kNone;
    int i = -1;
  };

  Loc locate_brute(Point p) const {
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (!tris[t].alive) continue;
      Loc l = classify(static_cast<TId>(t), p);
      if (l.where != Where::Outside) return l;
    }
    return {};
  }

  Loc classify(TId t, Point p) const {
    const Tri& tr = T(t);
    int zeros = 0, zi = -1;
    for (int i = 0; i < 3; ++i) {
      const double o = orient2d_value(P(tr.v[static_cast<std::size_t>(next3(i))]), P(tr.v[static_cast<std::size_t>(prev3(i))]), p);
      if (o < 0.0) return {};
      if (o == 0.0) {
        ++zeros;
        zi = i;
      }
    }
    if (zeros == 0) return {Where::Inside, t, -1};
    if (zeros == 1) return {Where::OnEdge, t, zi};
    for (int i = 0; i < 3; ++i) {
      if (P(tr.v[static_cast<std::size_t>(i)]) == p) return {Where::OnVertex, t, i};
    }
    return {Where::OnEdge, t, zi};
  }

  Loc locate(Point p, TId start) const {
    TId t = start;
    if (t == kNone || t >= static_cast<TId>(tris.size()) || !T(t).alive) t = last;
    if (t == kNone || !T(t).alive) {
      for (std::size_t k = 0; k < tris.size(); ++k) {
        if (tris[k].alive) {
          t = static_cast<TId>(k);
          break;
        }
      }
    }
    std::minstd_rand pick(12345);
    for (std::size_t steps = 0; steps < 4 * tris.size() + 64; ++steps) {
      const Tri& tr = T(t);
      const int off = static_cast<int>(pick() % 3);
      bool moved = false;
      for (int k = 0; k < 3; ++k) {
        const int i = (k + off) % 3;
        const double o = orient2d_value(P(tr.v[static_cast<std::size_t>(next3(i))]), P(tr.v[static_cast<std::size_t>(prev3(i))]), p);
        if (o < 0.0 && tr.n[static_cast<std::size_t>(i)] != kNone) {
          t = tr.n[static_cast<std::size_t>(i)];
          moved = true;
          break;
        }
      }
      if (!moved) {
        Loc l = classify(t, p);
        if (l.where != Where::Outside) return l;
        break;
      }
    }
    return locate_brute(p);
  }

  /// Inserts a vertex at a located position and restores the (constrained) Delaunay property.
  VId insert(Point p, Dof dof, int host, const Loc& loc) {
    if (loc.where == Where::OnVertex || loc.where == Where::Outside) throw std::logic_error("cannot insert point here");
    const VId nv = add_vertex(p, dof, host);
    const Tri tr = T(loc.t);
    if (loc.where == Where::Inside) {
      replace({loc.t}, {{{tr.v[0], tr.v[1], nv}}, {{tr.v[1], tr.v[2], nv}}, {{tr.v[2], tr.v[0], nv}}});
    } else {
      const int i = loc.i;
      const VId c = tr.v[static_cast<std::size_t>(i)];
      const VId a = tr.v[static_cast<std::size_t>(next3(i))];
      const VId b = tr.v[static_cast<std::size_t>(prev3(i))];
      const TId t2 = tr.n[static_cast<std::size_t>(i)];
      const int seg = tr.s[static_cast<std::size_t>(i)];
      std::unordered_map<EdgeKey, int> extra;
      if (seg != kNone) {
        extra.emplace(edge_key(a, nv), seg);
        extra.emplace(edge_key(nv, b), seg);
      }
      if (t2 == kNone) {
        replace({loc.t}, {{{c, a, nv}}, {{c, nv, b}}}, extra);
      } else {
        const Tri& o = T(t2);
        VId d = kNone;
        for (int j = 0; j < 3; ++j) {
          if (o.n[static_cast<std::size_t>(j)] == loc.t) d = o.v[static_cast<std::size_t>(j)];
        }
        replace({loc.t, t2}, {{{c, a, nv}}, {{c, nv, b}}, {{d, b, nv}}, {{d, nv, a}}}, extra);
      }
    }
    legalize_around(nv);
    return nv;
  }

  bool flip(TId t, int i) {
    const Tri tr = T(t);
    const TId t2 = tr.n[static_cast<std::size_t>(i)];
    if (t2 == kNone || tr.s[static_cast<std::size_t>(i)] != kNone) return false;
    const VId c = tr.v[static_cast<std::size_t>(i)];
    const VId a = tr.v[static_cast<std::size_t>(next3(i))];
    const VId b = tr.v[static_cast<std::size_t>(prev3(i))];
    const Tri& o = T(t2);
    VId d = kNone;
    for (int j = 0; j < 3; ++j) {
      if (o.n[static_cast<std::size_t>(j)] == t) d = o.v[static_cast<std::size_t>(j)];
    }
    if (orient2d_value(P(c), P(a), P(d)) <= 0.0 || orient2d_value(P(d), P(b), P(c)) <= 0.0) return false;
    replace({t, t2}, {{{c, a, d}}, {{d, b, c}}});
    return true;
  }

  /// Opposite vertex across edge i of t, or kNone.
  VId apex_across(TId t, int i) const {
    const TId t2 = T(t).n[static_cast<std::size_t>(i)];
    if (t2 == kNone) return kNone;
    const Tri& o = T(t2);
    for (int j = 0; j < 3; ++j) {
      if (o.n[static_cast<std::size_t>(j)] == t) return o.v[static_cast<std::size_t>(j)];
    }
    return kNone;
  }

  bool locally_delaunay(TId t, int i) const {
    if (T(t).s[static_cast<std::size_t>(i)] != kNone) return true;
    const VId d = apex_across(t, i);
    if (d == kNone) return true;
    const Tri& tr = T(t);
    return in_circle(P(tr.v[0]), P(tr.v[1]), P(tr.v[2]), P(d)) <= 0.0;
  }

  void legalize_around(VId p) {
    std::vector<std::pair<VId, VId>> stack;
    std::vector<TId> st;
    star(p, st);
    for (TId t : st) {
      const int k = idx(T(t), p);
      stack.emplace_back(T(t).v[static_cast<std::size_t>(next3(k))], T(t).v[static_cast<std::size_t>(prev3(k))]);
    }
    while (!stack.empty()) {
      auto [u, w] = stack.back();
      stack.pop_back();
      TId t;
      int i;
      if (!find_edge(u, w, t, i)) continue;
      if (T(t).v[static_cast<std::size_t>(i)] != p) {
        const TId n = T(t).n[static_cast<std::size_t>(i)];
        if (n == kNone) continue;
        const int j = idx(T(n), p);
        if (j < 0) continue;
        t = n;
        i = j;
      }
      if (locally_delaunay(t, i)) continue;
      const VId d = apex_across(t, i);
      if (flip(t, i)) {
        stack.emplace_back(u, d);
        stack.emplace_back(d, w);
      }
    }
  }

  /// Makes segment (a, b) an edge by flipping away crossing edges, then marks it constrained.
  void insert_segment(VId a, VId b, int seg) {
    TId t0;
    int i0;
    if (find_edge(a, b, t0, i0)) {
      set_seg(a, b, seg);
      return;
    }
    const Point pa = P(a), pb = P(b);
    std::deque<std::pair<VId, VId>> crossing;
    {
      std::vector<TId> st;
      star(a, st);
      TId cur = kNone;
      VId R = kNone, L = kNone;
      for (TId t : st) {
        const Tri& tr = T(t);
        const int k = idx(tr, a);
        const VId v1 = tr.v[static_cast<std::size_t>(next3(k))], v2 = tr.v[static_cast<std::size_t>(prev3(k))];
        const double o1 = orient2d_value(pa, P(v1), pb);
        const double o2 = orient2d_value(pa, P(v2), pb);
        if (o1 > 0.0 && o2 < 0.0) {
          cur = tr.n[static_cast<std::size_t>(k)];
          R = v1;
          L = v2;
          break;
        }
        if ((o1 == 0.0 && dot(P(v1) - pa, pb - pa) > 0.0) || (o2 == 0.0 && dot(P(v2) - pa, pb - pa) > 0.0))
          throw SceneError("vertex lies on the interior of segment", seg);
      }
      if (cur == kNone) throw std::logic_error("segment insertion walk failed to start");
      crossing.emplace_back(R, L);
      for (std::size_t guard = 0; guard <= tris.size(); ++guard) {
        const Tri& tr = T(cur);
        VId x = kNone;
        for (VId v : tr.v) {
          if (v != R && v != L) x = v;
        }
        if (x == b) break;
        const double o = orient2d_value(pa, pb, P(x));
        if (o == 0.0) throw SceneError("vertex lies on the interior of segment", seg);
        if (o > 0.0) {
          // x is left of ab: exit through (R, x), opposite L
          cur = tr.n[static_cast<std::size_t>(idx(tr, L))];
          L = x;
        } else {
          cur = tr.n[static_cast<std::size_t>(idx(tr, R))];
          R = x;
        }
        crossing.emplace_back(R, L);
        if (cur == kNone) throw std::logic_error("segment insertion walk left the domain");
      }
    }
    auto crosses = [&](VId c, VId d) {
      if (c == a || c == b || d == a || d == b) return false;
      const double oc = orient2d_value(pa, pb, P(c)), od = orient2d_value(pa, pb, P(d));
      return (oc > 0.0 && od < 0.0) || (oc < 0.0 && od > 0.0);
    };
    std::vector<std::pair<VId, VId>> created;
    std::size_t stall = 0;
    while (!crossing.empty()) {
      auto [u, w] = crossing.front();
      crossing.pop_front();
      TId t;
      int i;
      if (!find_edge(u, w, t, i)) continue;
      const VId c = T(t).v[static_cast<std::size_t>(i)];
      const VId d = apex_across(t, i);
      if (flip(t, i)) {
        stall = 0;
        if (crosses(c, d)) crossing.emplace_back(c, d);
        else created.emplace_back(c, d);
      } else {
        crossing.emplace_back(u, w);
        if (++stall > 4 * crossing.size() + 16) throw std::logic_error("segment insertion stalled");
      }
    }
    set_seg(a, b, seg);
    // restore the Delaunay property among the new edges
    bool changed = true;
    for (std::size_t pass = 0; changed && pass < 64; ++pass) {
      changed = false;
      for (auto& e : created) {
        TId t;
        int i;
        if (!find_edge(e.first, e.second, t, i)) continue;
        if (locally_delaunay(t, i)) continue;
        const VId c = T(t).v[static_cast<std::size_t>(i)];
        const VId d = apex_across(t, i);
        if (flip(t, i)) {
          e = {c, d};
          changed = true;
        }
      }
    }
  }

  Triangulation finish() const {
    std::vector<std::array<VId, 3>> out;
    std::unordered_map<EdgeKey, int> cons;
    for (const auto& tr : tris) {
      if (!tr.alive) continue;
      out.push_back(tr.v);
      for (int i = 0; i < 3; ++i) {
        if (tr.s[static_cast<std::size_t>(i)] != kNone)
          cons[edge_key(tr.v[static_cast<std::size_t>(next3(i))], tr.v[static_cast<std::size_t>(prev3(i))])] = tr.s[static_cast<std::size_t>(i)];
      }
    }
    return Triangulation::from_triangles(info_, verts, out, cons);
  }

  static Builder from(const Triangulation& t) {
    Builder b(t.info_ptr());
    std::vector<VId> remap(t.vertex_capacity(), kNone);
    for (std::size_t v = 0; v < t.vertex_capacity(); ++v) {
      const auto& vx = t.vertices()[v];
      if (!vx.alive) continue;
      remap[v] = b.add_vertex(vx.pos, vx.dof, vx.host);
    }
    std::vector<TId> tmap(t.triangle_capacity(), kNone);
    for (std::size_t i = 0; i < t.triangle_capacity(); ++i) {
      if (!t.triangles()[i].alive) continue;
      tmap[i] = static_cast<TId>(b.tris.size());
      b.tris.emplace_back();
    }
    for (std::size_t i = 0; i < t.triangle_capacity(); ++i) {
      const auto& tr = t.triangles()[i];
      if (!tr.alive) continue;
      Tri& nt = b.tris[static_cast<std::size_t>(tmap[i])];
      for (int k = 0; k < 3; ++k) {
        nt.v[static_cast<std::size_t>(k)] = remap[static_cast<std::size_t>(tr.v[static_cast<std::size_t>(k)])];
        const TId n = tr.nbr[static_cast<std::size_t>(k)];
        nt.n[static_cast<std::size_t>(k)] = n == kNone ? kNone : tmap[static_cast<std::size_t>(n)];
        nt.s[static_cast<std::size_t>(k)] = tr.seg[static_cast<std::size_t>(k)];
        b.verts[static_cast<std::size_t>(nt.v[static_cast<std::size_t>(k)])].tri = tmap[i];
      }
    }
    return b;
  }
};

double corner_angle(Point p, Point a, Point b) {
  const Point u = a - p, w = b - p;
  return std::atan2(std::fabs(cross(u, w)), dot(u, w));
}

}  // namespace

Triangulation build_cdt(const Scene& scene) {
  validate_scene(scene);
  auto info = SceneInfo::from_scene(scene);
  const Box& box = info->box;
  auto corner = [&](Point c) {
    for (std::size_t p = 0; p < info->points.size(); ++p) {
      if (info->points[p] == c) return static_cast<VId>(p);
    }
    throw SceneError("scene box corner is not a vertex");
  };
  const VId corners[4] = {corner(box.lo), corner({box.hi.x, box.lo.y}), corner(box.hi), corner({box.lo.x, box.hi.y})};

  // Vertex ids follow the insertion order; Fixed hosts carry the point ids.
  Builder w(info);
  std::vector<VId> id_of(info->points.size(), kNone);
  for (VId c : corners) id_of[static_cast<std::size_t>(c)] = w.add_vertex(info->points[static_cast<std::size_t>(c)], Dof::Fixed, c);
  w.replace({}, {{{0, 1, 2}}, {{0, 2, 3}}});

  std::vector<VId> order;
  for (std::size_t p = 0; p < info->points.size(); ++p) {
    if (id_of[p] == kNone) order.push_back(static_cast<VId>(p));
  }
  std::mt19937_64 rng(0x6d7774ULL);
  std::shuffle(order.begin(), order.end(), rng);
  for (VId v : order) {
    const Point p = info->points[static_cast<std::size_t>(v)];
    const auto loc = w.locate(p, w.last);
    if (loc.where == Builder::Where::OnVertex || loc.where == Builder::Where::Outside)
      throw SceneError("cannot place vertex during triangulation");
    id_of[static_cast<std::size_t>(v)] = w.insert(p, Dof::Fixed, v, loc);
  }
  for (std::size_t s = 0; s < info->segments.size(); ++s) {
    const auto& sp = info->seg_points[s];
    w.insert_segment(id_of[static_cast<std::size_t>(sp[0])], id_of[static_cast<std::size_t>(sp[1])], static_cast<int>(s));
  }
  return w.finish();
}

double min_angle_deg(Point a, Point b, Point c) {
  const double A = corner_angle(a, b, c), B = corner_angle(b, c, a), C = corner_angle(c, a, b);
  return std::min({A, B, C}) * 180.0 / std::numbers::pi;
}

bool angle_forced(const Triangulation& t, TId tri, int corner) {
  const auto& tr = t.tri(tri);
  return tr.seg[static_cast<std::size_t>(next3(corner))] != kNone && tr.seg[static_cast<std::size_t>(prev3(corner))] != kNone;
}

namespace {

class Refiner {
 public:
  Refiner(Builder& b, double min_angle, double max_area, std::size_t limit)
      : b_(b), min_angle_(min_angle), max_area_(max_area), limit_(limit) {}

  bool run() {
    if (min_angle_ > 0.0) {
      for (std::size_t t = 0; t < b_.tris.size(); ++t) {
        if (!b_.tris[t].alive) continue;
        for (int i = 0; i < 3; ++i) check_encroach(static_cast<TId>(t), i);
      }
    }
    for (std::size_t t = 0; t < b_.tris.size(); ++t) {
      if (b_.tris[t].alive && bad(static_cast<TId>(t))) bad_.push_back(b_.tris[t].v);
    }
    while (true) {
      if (b_.verts.size() > limit_) return false;
      if (!enc_.empty()) {
        auto [u, w] = enc_.front();
        enc_.pop_front();
        TId t;
        int i;
        if (!b_.find_edge(u, w, t, i)) continue;
        if (!encroached(t, i)) continue;
        split_segment(t, i);
        continue;
      }
      if (bad_.empty()) return true;
      const auto tv = bad_.front();
      bad_.pop_front();
      const TId t = b_.find_tri(tv);
      if (t == kNone || !bad(t)) continue;
      refine_triangle(t);
    }
  }

  std::size_t inserted = 0;

 private:
  Builder& b_;
  double min_angle_;
  double max_area_;
  std::size_t limit_;
  std::deque<std::pair<VId, VId>> enc_;
  std::deque<std::array<VId, 3>> bad_;

  bool encroached(TId t, int i) const {
    const auto& tr = b_.T(t);
    if (tr.s[static_cast<std::size_t>(i)] == kNone) return false;
    const Point a = b_.P(tr.v[static_cast<std::size_t>(next3(i))]), c = b_.P(tr.v[static_cast<std::size_t>(prev3(i))]);
    auto inside = [&](VId x) { return x != kNone && dot(a - b_.P(x), c - b_.P(x)) < 0.0; };
    return inside(tr.v[static_cast<std::size_t>(i)]) || inside(b_.apex_across(t, i));
  }

  void check_encroach(TId t, int i) {
    if (min_angle_ > 0.0 && encroached(t, i))
      enc_.emplace_back(b_.T(t).v[static_cast<std::size_t>(next3(i))], b_.T(t).v[static_cast<std::size_t>(prev3(i))]);
  }

  bool seditious(TId t) const {
    const auto& tr = b_.T(t);
    int shortest = 0;
    double best = INFINITY;
    for (int i = 0; i < 3; ++i) {
      const double l = dist(b_.P(tr.v[static_cast<std::size_t>(next3(i))]), b_.P(tr.v[static_cast<std::size_t>(prev3(i))]));
      if (l < best) {
        best = l;
        shortest = i;
      }
    }
    const VId p = tr.v[static_cast<std::size_t>(next3(shortest))], q = tr.v[static_cast<std::size_t>(prev3(shortest))];
    const auto& vp = b_.verts[static_cast<std::size_t>(p)];
    const auto& vq = b_.verts[static_cast<std::size_t>(q)];
    if (vp.dof != Dof::OnSegment || vq.dof != Dof::OnSegment || vp.host == vq.host) return false;
    const auto& info = *b_.info_;
    const auto& sp = info.seg_points[static_cast<std::size_t>(vp.host)];
    const auto& sq = info.seg_points[static_cast<std::size_t>(vq.host)];
    for (int z : {sp[0], sp[1]}) {
      if (z != sq[0] && z != sq[1]) continue;
      const Point Z = info.points[static_cast<std::size_t>(z)];
      const double dp = dist(Z, vp.pos), dq = dist(Z, vq.pos);
      if (std::fabs(dp - dq) <= 1e-9 * std::max(dp, dq) && corner_angle(Z, vp.pos, vq.pos) < std::numbers::pi / 3.0)
        return true;
    }
    return false;
  }

  bool bad(TId t) const {
    const auto& tr = b_.T(t);
    const Point a = b_.P(tr.v[0]), c = b_.P(tr.v[1]), d = b_.P(tr.v[2]);
    const double area = 0.5 * orient2d_value(a, c, d);
    if (area > max_area_) return true;
    if (min_angle_ <= 0.0) return false;
    const double ang[3] = {corner_angle(a, c, d), corner_angle(c, d, a), corner_angle(d, a, c)};
    int k = 0;
    for (int i = 1; i < 3; ++i) {
      if (ang[i] < ang[k]) k = i;
    }
    if (ang[k] * 180.0 / std::numbers::pi >= min_angle_) return false;
    if (tr.s[static_cast<std::size_t>(next3(k))] != kNone && tr.s[static_cast<std::size_t>(prev3(k))] != kNone) return false;
    if (seditious(t)) return false;
    return true;
  }

  void after_insert(VId v) {
    ++inserted;
    std::vector<TId> st;
    b_.star(v, st);
    for (TId t : st) {
      if (bad(t)) bad_.push_back(b_.T(t).v);
      for (int i = 0; i < 3; ++i) check_encroach(t, i);
    }
  }

  void split_segment(TId t, int i) {
    const auto& tr = b_.T(t);
    const int seg = tr.s[static_cast<std::size_t>(i)];
    const VId u = tr.v[static_cast<std::size_t>(next3(i))], w = tr.v[static_cast<std::size_t>(prev3(i))];
    const auto& info = *b_.info_;
    const Segment& S = info.segments[static_cast<std::size_t>(seg)];
    const double pu = project_param(b_.P(u), S.a, S.b), pw = project_param(b_.P(w), S.a, S.b);
    double split = 0.5 * (pu + pw);
    // concentric shells around an input vertex shared with another segment
    auto shared = [&](VId v) {
      const auto& vx = b_.verts[static_cast<std::size_t>(v)];
      return vx.dof == Dof::Fixed && info.point_segments[static_cast<std::size_t>(vx.host)].size() >= 2;
    };
    const bool su = shared(u), sw = shared(w);
    if (su != sw) {
      const double L = std::fabs(pw - pu) * S.length();
      const double d = std::exp2(std::round(std::log2(0.5 * L)));
      const double frac = d / L;
      split = su ? pu + (pw - pu) * frac : pw + (pu - pw) * frac;
    }
    const Point p = lerp(S.a, S.b, split);
    if (p == b_.P(u) || p == b_.P(w)) return;
    Builder::Loc loc{Builder::Where::OnEdge, t, i};
    const VId nv = b_.insert(p, Dof::OnSegment, seg, loc);
    after_insert(nv);
  }

  void refine_triangle(TId t) {
    const auto& tr = b_.T(t);
    const Point a = b_.P(tr.v[0]), c = b_.P(tr.v[1]), d = b_.P(tr.v[2]);
    const Point cc = circumcenter(a, c, d);
    if (!is_finite(cc)) return;
    const Point start = (a + c + d) * (1.0 / 3.0);
    // walk from the centroid toward the circumcenter; a constrained edge in the way is split
    TId cur = t;
    for (std::size_t guard = 0; guard <= b_.tris.size(); ++guard) {
      const auto& ct = b_.T(cur);
      int exit = -1;
      for (int i = 0; i < 3; ++i) {
        const Point p = b_.P(ct.v[static_cast<std::size_t>(next3(i))]), q = b_.P(ct.v[static_cast<std::size_t>(prev3(i))]);
        if (orient2d_value(p, q, cc) < 0.0) {
          const double s1 = orient2d_value(start, cc, p), s2 = orient2d_value(start, cc, q);
          if (s1 <= 0.0 && s2 >= 0.0) {
            exit = i;
            break;
          }
        }
      }
      if (exit < 0) {
        // cc is in cur (possibly on its boundary), or the walk degenerated
        auto loc = b_.classify(cur, cc);
        if (loc.where == Builder::Where::Outside) loc = b_.locate(cc, cur);
        insert_circumcenter(t, cc, loc);
        return;
      }
      if (ct.s[static_cast<std::size_t>(exit)] != kNone || ct.n[static_cast<std::size_t>(exit)] == kNone) {
        if (ct.s[static_cast<std::size_t>(exit)] != kNone) split_segment(cur, exit);
        return;
      }
      cur = ct.n[static_cast<std::size_t>(exit)];
    }
  }

  void insert_circumcenter(TId bad_tri, Point cc, const Builder::Loc& loc) {
    if (loc.where == Builder::Where::Outside || loc.where == Builder::Where::OnVertex) return;
    if (loc.where == Builder::Where::OnEdge && b_.T(loc.t).s[static_cast<std::size_t>(loc.i)] != kNone) {
      split_segment(loc.t, loc.i);
      return;
    }
    if (min_angle_ > 0.0) {
      // cavity of cc: subsegments on its boundary that cc would encroach are split instead
      std::vector<TId> cavity{loc.t};
      std::unordered_set<TId> seen{loc.t};
      std::vector<std::pair<TId, int>> hits;
      for (std::size_t k = 0; k < cavity.size(); ++k) {
        const auto& tr = b_.T(cavity[k]);
        for (int i = 0; i < 3; ++i) {
          const Point p = b_.P(tr.v[static_cast<std::size_t>(next3(i))]), q = b_.P(tr.v[static_cast<std::size_t>(prev3(i))]);
          if (tr.s[static_cast<std::size_t>(i)] != kNone) {
            if (dot(p - cc, q - cc) < 0.0) hits.emplace_back(cavity[k], i);
            continue;
          }
          const TId n = tr.n[static_cast<std::size_t>(i)];
          if (n == kNone || seen.count(n)) continue;
          const auto& nt = b_.T(n);
          if (in_circle(b_.P(nt.v[0]), b_.P(nt.v[1]), b_.P(nt.v[2]), cc) > 0.0) {
            seen.insert(n);
            cavity.push_back(n);
          }
        }
      }
      if (!hits.empty()) {
        std::vector<std::pair<VId, VId>> keys;
        for (auto [tt, i] : hits)
          keys.emplace_back(b_.T(tt).v[static_cast<std::size_t>(next3(i))], b_.T(tt).v[static_cast<std::size_t>(prev3(i))]);
        for (auto [u, w] : keys) {
          TId tt;
          int i;
          if (b_.find_edge(u, w, tt, i)) split_segment(tt, i);
        }
        bad_.push_back(b_.T(bad_tri).alive ? b_.T(bad_tri).v : std::array<VId, 3>{kNone, kNone, kNone});
        return;
      }
    }
    const VId nv = b_.insert(cc, Dof::Free, kNone, loc);
    after_insert(nv);
  }
};

}  // namespace

RefineResult refine_cdt(const Triangulation& t, double min_angle, double max_area) {
  if (min_angle > 33.0) throw std::invalid_argument("min_angle above 33 degrees may not terminate");
  if (!(max_area > 0.0)) throw std::invalid_argument("max_area must be positive");
  Builder b = Builder::from(t);
  const std::size_t input = std::max<std::size_t>(b.verts.size(), 1);
  Refiner r(b, min_angle, max_area, 50 * input);
  RefineResult out;
  out.partial = !r.run();
  out.inserted = r.inserted;
  out.tri = b.finish();
  return out;
}

std::vector<double> default_angle_grid() { return {0, 5, 10, 15, 20, 25, 30}; }
std::vector<double> default_area_grid() {
  return {std::numeric_limits<double>::infinity(), 1e-1, 1e-2, 1e-3, 1e-4};
}

OptimalRefined optimal_refined_cdt(const Scene& scene, const std::vector<double>& angle_grid,
                                   const std::vector<double>& area_grid) {
  if (angle_grid.empty() || area_grid.empty()) throw std::invalid_argument("refinement grids must be nonempty");
  const Triangulation base = build_cdt(scene);
  OptimalRefined best;
  bool have = false;
  for (double ang : angle_grid) {
    for (double area : area_grid) {
      RefineCell cell{ang, area, 0.0, false};
      try {
        RefineResult r = (ang <= 0.0 && std::isinf(area)) ? RefineResult{base, 0, false} : refine_cdt(base, ang, area);
        if (!r.partial) {
          cell.ok = true;
          cell.length = r.tri.total_edge_length();
          if (!have || cell.length < best.length) {
            best.tri = std::move(r.tri);
            best.length = cell.length;
            best.min_angle = ang;
            best.max_area = area;
            have = true;
          }
        }
      } catch (const std::exception&) {
        cell.ok = false;
      }
      best.cells.push_back(cell);
    }
  }
  if (!have) throw std::runtime_error("no refinement cell succeeded");
  return best;
}

}  // namespace mwt
