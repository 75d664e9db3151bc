#include "mwt/triangulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace mwt {

const char* to_string(FlipResult r) {
  switch (r) {
    case FlipResult::Flipped: return "Flipped";
    case FlipResult::RejectedNotConvex: return "RejectedNotConvex";
    case FlipResult::RejectedConstrained: return "RejectedConstrained";
  }
  return "?";
}

const char* to_string(ContractStatus s) {
  switch (s) {
    case ContractStatus::Contracted: return "Contracted";
    case ContractStatus::BothFixed: return "BothFixed";
    case ContractStatus::DifferentSegments: return "DifferentSegments";
    case ContractStatus::Topology: return "Topology";
  }
  return "?";
}

std::shared_ptr<const SceneInfo> SceneInfo::from_scene(const Scene& scene, double kappa) {
  auto info = std::make_shared<SceneInfo>();
  info->segments = scene.segments;
  info->box = scene.box;
  info->name = scene.name;
  std::map<std::pair<double, double>, int> ids;
  auto point_id = [&](Point p) {
    auto [it, fresh] = ids.emplace(std::make_pair(p.x, p.y), static_cast<int>(info->points.size()));
    if (fresh) {
      info->points.push_back(p);
      info->point_segments.emplace_back();
    }
    return it->second;
  };
  for (std::size_t s = 0; s < scene.segments.size(); ++s) {
    const int pa = point_id(scene.segments[s].a);
    const int pb = point_id(scene.segments[s].b);
    info->seg_points.push_back({pa, pb});
    info->point_segments[static_cast<std::size_t>(pa)].push_back(static_cast<int>(s));
    info->point_segments[static_cast<std::size_t>(pb)].push_back(static_cast<int>(s));
  }

  std::vector<int> parent(scene.segments.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (std::size_t p = 0; p < info->points.size(); ++p) {
    const auto& inc = info->point_segments[p];
    for (std::size_t i = 0; i < inc.size(); ++i) {
      for (std::size_t j = i + 1; j < inc.size(); ++j) {
        const auto& s1 = info->seg_points[static_cast<std::size_t>(inc[i])];
        const auto& s2 = info->seg_points[static_cast<std::size_t>(inc[j])];
        const int o1 = s1[0] == static_cast<int>(p) ? s1[1] : s1[0];
        const int o2 = s2[0] == static_cast<int>(p) ? s2[1] : s2[0];
        const Point P = info->points[p];
        const Point A = info->points[static_cast<std::size_t>(o1)];
        const Point B = info->points[static_cast<std::size_t>(o2)];
        if (dot(A - P, B - P) < 0.0 && collinearity_quality(A, P, B) < kappa) {
          parent[static_cast<std::size_t>(find(inc[i]))] = find(inc[j]);
        }
      }
    }
  }
  info->line.resize(scene.segments.size());
  for (std::size_t s = 0; s < scene.segments.size(); ++s) info->line[s] = find(static_cast<int>(s));
  return info;
}

// ---------------------------------------------------------------------------

VId Triangulation::add_vertex(Point p, Dof dof, std::int32_t host) {
  Vertex v;
  v.pos = p;
  v.dof = dof;
  v.host = host;
  ++live_verts_;
  if (!free_verts_.empty()) {
    const VId id = free_verts_.back();
    free_verts_.pop_back();
    verts_[static_cast<std::size_t>(id)] = v;
    return id;
  }
  verts_.push_back(v);
  return static_cast<VId>(verts_.size() - 1);
}

TId Triangulation::add_triangle(VId a, VId b, VId c) {
  Triangle t;
  t.v = {a, b, c};
  ++live_tris_;
  ++topo_version_;
  TId id;
  if (!free_tris_.empty()) {
    id = free_tris_.back();
    free_tris_.pop_back();
    tris_[static_cast<std::size_t>(id)] = t;
  } else {
    tris_.push_back(t);
    id = static_cast<TId>(tris_.size() - 1);
  }
  for (VId v : {a, b, c}) verts_[static_cast<std::size_t>(v)].tri = id;
  return id;
}

void Triangulation::kill_triangle(TId t) {
  auto& tr = tris_[static_cast<std::size_t>(t)];
  if (!tr.alive) return;
  tr.alive = false;
  --live_tris_;
  ++topo_version_;
  free_tris_.push_back(t);
}

void Triangulation::kill_vertex(VId v) {
  auto& vx = verts_[static_cast<std::size_t>(v)];
  if (!vx.alive) return;
  vx.alive = false;
  vx.tri = kNone;
  --live_verts_;
  free_verts_.push_back(v);
}

std::size_t Triangulation::num_edges() const {
  std::size_t n = 0;
  for (std::size_t t = 0; t < tris_.size(); ++t) {
    const auto& tr = tris_[t];
    if (!tr.alive) continue;
    for (int i = 0; i < 3; ++i) {
      const TId nb = tr.nbr[static_cast<std::size_t>(i)];
      if (nb == kNone || static_cast<TId>(t) < nb) ++n;
    }
  }
  return n;
}

std::pair<VId, VId> Triangulation::edge_vertices(EdgeRef e) const {
  const auto& tr = tri(e.t);
  return {tr.v[static_cast<std::size_t>(next3(e.i))], tr.v[static_cast<std::size_t>(prev3(e.i))]};
}

EdgeKey Triangulation::key(EdgeRef e) const {
  auto [a, b] = edge_vertices(e);
  return edge_key(a, b);
}

double Triangulation::edge_length(EdgeRef e) const {
  auto [a, b] = edge_vertices(e);
  return dist(pos(a), pos(b));
}

int Triangulation::index_in(TId t, VId v) const {
  const auto& tr = tri(t);
  if (tr.v[0] == v) return 0;
  if (tr.v[1] == v) return 1;
  if (tr.v[2] == v) return 2;
  return -1;
}

std::optional<EdgeRef> Triangulation::twin(EdgeRef e) const {
  const TId n = tri(e.t).nbr[static_cast<std::size_t>(e.i)];
  if (n == kNone) return std::nullopt;
  const auto& nt = tri(n);
  for (int j = 0; j < 3; ++j) {
    if (nt.nbr[static_cast<std::size_t>(j)] == e.t) return EdgeRef{n, j};
  }
  return std::nullopt;
}

void Triangulation::star(VId v, std::vector<TId>& out) const {
  out.clear();
  const TId t0 = vertex(v).tri;
  if (t0 == kNone) return;
  const std::size_t cap = tris_.size() + 1;
  TId t = t0;
  bool closed = false;
  while (out.size() < cap) {
    out.push_back(t);
    const int k = index_in(t, v);
    const TId n = tri(t).nbr[static_cast<std::size_t>(next3(k))];
    if (n == kNone) break;
    if (n == t0) {
      closed = true;
      break;
    }
    t = n;
  }
  if (closed) return;
  // open fan: walk clockwise from t0 and prepend
  std::vector<TId> back;
  t = t0;
  while (back.size() < cap) {
    const int k = index_in(t, v);
    const TId n = tri(t).nbr[static_cast<std::size_t>(prev3(k))];
    if (n == kNone) break;
    back.push_back(n);
    t = n;
  }
  std::reverse(back.begin(), back.end());
  back.insert(back.end(), out.begin(), out.end());
  out.swap(back);
}

void Triangulation::neighbors(VId v, std::vector<VId>& out) const {
  std::vector<TId> st;
  star(v, st);
  out.clear();
  for (TId t : st) {
    const int k = index_in(t, v);
    out.push_back(tri(t).v[static_cast<std::size_t>(next3(k))]);
  }
  if (!st.empty()) {
    const TId last = st.back();
    const int k = index_in(last, v);
    if (tri(last).nbr[static_cast<std::size_t>(next3(k))] == kNone) {
      out.push_back(tri(last).v[static_cast<std::size_t>(prev3(k))]);
    }
  }
}

std::vector<VId> Triangulation::neighbors(VId v) const {
  std::vector<VId> out;
  neighbors(v, out);
  return out;
}

bool Triangulation::on_hull(VId v) const {
  std::vector<TId> st;
  star(v, st);
  for (TId t : st) {
    const int k = index_in(t, v);
    if (tri(t).nbr[static_cast<std::size_t>(next3(k))] == kNone) return true;
    if (tri(t).nbr[static_cast<std::size_t>(prev3(k))] == kNone) return true;
  }
  return false;
}

double Triangulation::star_area(VId v) const {
  std::vector<TId> st;
  star(v, st);
  double a = 0.0;
  for (TId t : st) {
    const auto& tr = tri(t);
    a += 0.5 * orient2d_value(pos(tr.v[0]), pos(tr.v[1]), pos(tr.v[2]));
  }
  return a;
}

bool Triangulation::star_positive(VId v) const {
  std::vector<TId> st;
  star(v, st);
  for (TId t : st) {
    const auto& tr = tri(t);
    if (orient2d(pos(tr.v[0]), pos(tr.v[1]), pos(tr.v[2])) != Orientation::Positive) return false;
  }
  return true;
}

std::optional<EdgeRef> Triangulation::find_edge(VId a, VId b) const {
  std::vector<TId> st;
  star(a, st);
  for (TId t : st) {
    const int k = index_in(t, a);
    const auto& tr = tri(t);
    if (tr.v[static_cast<std::size_t>(next3(k))] == b) return EdgeRef{t, prev3(k)};
    if (tr.v[static_cast<std::size_t>(prev3(k))] == b) return EdgeRef{t, next3(k)};
  }
  return std::nullopt;
}

void Triangulation::for_each_edge(const std::function<void(EdgeRef)>& f) const {
  for (std::size_t t = 0; t < tris_.size(); ++t) {
    const auto& tr = tris_[t];
    if (!tr.alive) continue;
    for (int i = 0; i < 3; ++i) {
      const TId nb = tr.nbr[static_cast<std::size_t>(i)];
      if (nb == kNone || static_cast<TId>(t) < nb) f(EdgeRef{static_cast<TId>(t), i});
    }
  }
}

std::vector<EdgeRef> Triangulation::edges() const {
  std::vector<EdgeRef> out;
  for_each_edge([&](EdgeRef e) { out.push_back(e); });
  return out;
}

bool Triangulation::is_fixed_on_segment(VId v, int seg) const {
  const auto& vx = vertex(v);
  if (vx.dof != Dof::Fixed || vx.host == kNone) return false;
  const auto& sp = info_->seg_points[static_cast<std::size_t>(seg)];
  return sp[0] == vx.host || sp[1] == vx.host;
}

bool Triangulation::vertex_on_segment(VId v, int seg) const {
  const auto& vx = vertex(v);
  if (vx.dof == Dof::OnSegment) return vx.host == seg;
  return is_fixed_on_segment(v, seg);
}

bool Triangulation::vertex_on_line(VId v, int line) const {
  const auto& vx = vertex(v);
  if (vx.dof == Dof::OnSegment) return info_->line[static_cast<std::size_t>(vx.host)] == line;
  if (vx.dof == Dof::Fixed && vx.host != kNone) {
    for (int s : info_->point_segments[static_cast<std::size_t>(vx.host)]) {
      if (info_->line[static_cast<std::size_t>(s)] == line) return true;
    }
  }
  return false;
}

std::vector<int> Triangulation::vertex_lines(VId v) const {
  std::vector<int> out;
  const auto& vx = vertex(v);
  if (vx.dof == Dof::OnSegment) {
    out.push_back(info_->line[static_cast<std::size_t>(vx.host)]);
  } else if (vx.dof == Dof::Fixed && vx.host != kNone) {
    for (int s : info_->point_segments[static_cast<std::size_t>(vx.host)]) {
      const int l = info_->line[static_cast<std::size_t>(s)];
      if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
    }
  }
  return out;
}

std::vector<VId> Triangulation::chain_neighbors(VId v, int seg) const {
  std::vector<VId> out;
  std::vector<TId> st;
  star(v, st);
  for (TId t : st) {
    const int k = index_in(t, v);
    const auto& tr = tri(t);
    // edge v -> v[k+1] is opposite v[k+2]; edge v[k+2] -> v is opposite v[k+1]
    if (tr.seg[static_cast<std::size_t>(prev3(k))] == seg) {
      const VId w = tr.v[static_cast<std::size_t>(next3(k))];
      if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
    }
    if (tr.seg[static_cast<std::size_t>(next3(k))] == seg) {
      const VId w = tr.v[static_cast<std::size_t>(prev3(k))];
      if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
    }
  }
  return out;
}

Point Triangulation::constrain(VId v, Point p) const {
  const auto& vx = vertex(v);
  switch (vx.dof) {
    case Dof::Fixed: return vx.pos;
    case Dof::OnSegment: {
      const auto& s = info_->segments[static_cast<std::size_t>(vx.host)];
      return lerp(s.a, s.b, project_param(p, s.a, s.b));
    }
    case Dof::Free: return p;
  }
  return p;
}

void Triangulation::replace_nbr(TId t, TId old_nbr, TId new_nbr, std::int32_t seg) {
  if (t == kNone) return;
  auto& tr = tri_mut(t);
  for (int j = 0; j < 3; ++j) {
    if (tr.nbr[static_cast<std::size_t>(j)] == old_nbr) {
      tr.nbr[static_cast<std::size_t>(j)] = new_nbr;
      tr.seg[static_cast<std::size_t>(j)] = seg;
      return;
    }
  }
}

FlipResult Triangulation::can_flip(EdgeRef e) const {
  const auto& t1 = tri(e.t);
  if (t1.seg[static_cast<std::size_t>(e.i)] != kNone) return FlipResult::RejectedConstrained;
  const TId n = t1.nbr[static_cast<std::size_t>(e.i)];
  if (n == kNone) return FlipResult::RejectedConstrained;
  const VId c = t1.v[static_cast<std::size_t>(e.i)];
  const VId a = t1.v[static_cast<std::size_t>(next3(e.i))];
  const VId b = t1.v[static_cast<std::size_t>(prev3(e.i))];
  const auto& t2 = tri(n);
  int j = 0;
  while (j < 3 && t2.nbr[static_cast<std::size_t>(j)] != e.t) ++j;
  if (j == 3) return FlipResult::RejectedNotConvex;
  const VId d = t2.v[static_cast<std::size_t>(j)];
  if (orient2d(pos(c), pos(a), pos(d)) != Orientation::Positive) return FlipResult::RejectedNotConvex;
  if (orient2d(pos(d), pos(b), pos(c)) != Orientation::Positive) return FlipResult::RejectedNotConvex;
  // A quad corner between two constrained sides of one straight line is not strictly convex.
  const int s_ca = t1.seg[static_cast<std::size_t>(prev3(e.i))];  // edge c-a, opposite b
  const int s_bc = t1.seg[static_cast<std::size_t>(next3(e.i))];  // edge b-c, opposite a
  const int ia = index_in(n, a), ib = index_in(n, b);
  const int s_ad = t2.seg[static_cast<std::size_t>(ib)];  // edge a-d, opposite b in t2
  const int s_db = t2.seg[static_cast<std::size_t>(ia)];  // edge d-b, opposite a in t2
  auto same_line = [&](int s, int r) {
    return s != kNone && r != kNone && info_->line[static_cast<std::size_t>(s)] == info_->line[static_cast<std::size_t>(r)];
  };
  if (same_line(s_ca, s_ad) || same_line(s_db, s_bc) || same_line(s_bc, s_ca) || same_line(s_ad, s_db))
    return FlipResult::RejectedNotConvex;
  return FlipResult::Flipped;
}

FlipResult Triangulation::flip(EdgeRef e) {
  const FlipResult check = can_flip(e);
  if (check != FlipResult::Flipped) return check;
  const TId t = e.t;
  const TId n = tri(t).nbr[static_cast<std::size_t>(e.i)];
  const Triangle t1 = tri(t);
  const Triangle t2 = tri(n);
  const VId c = t1.v[static_cast<std::size_t>(e.i)];
  const VId a = t1.v[static_cast<std::size_t>(next3(e.i))];
  const VId b = t1.v[static_cast<std::size_t>(prev3(e.i))];
  const int ia = index_in(n, a), ib = index_in(n, b);
  int j = 0;
  while (t2.nbr[static_cast<std::size_t>(j)] != t) ++j;
  const VId d = t2.v[static_cast<std::size_t>(j)];

  const TId n_ca = t1.nbr[static_cast<std::size_t>(prev3(e.i))];
  const int s_ca = t1.seg[static_cast<std::size_t>(prev3(e.i))];
  const TId n_bc = t1.nbr[static_cast<std::size_t>(next3(e.i))];
  const int s_bc = t1.seg[static_cast<std::size_t>(next3(e.i))];
  const TId n_ad = t2.nbr[static_cast<std::size_t>(ib)];
  const int s_ad = t2.seg[static_cast<std::size_t>(ib)];
  const TId n_db = t2.nbr[static_cast<std::size_t>(ia)];
  const int s_db = t2.seg[static_cast<std::size_t>(ia)];

  auto& T = tri_mut(t);
  T.v = {c, a, d};
  T.nbr = {n_ad, n, n_ca};
  T.seg = {s_ad, kNone, s_ca};
  auto& N = tri_mut(n);
  N.v = {d, b, c};
  N.nbr = {n_bc, t, n_db};
  N.seg = {s_bc, kNone, s_db};
  replace_nbr(n_ad, n, t, s_ad);
  replace_nbr(n_bc, t, n, s_bc);
  vertex_mut(a).tri = t;
  vertex_mut(b).tri = n;
  vertex_mut(c).tri = t;
  vertex_mut(d).tri = n;
  ++topo_version_;
  return FlipResult::Flipped;
}

ContractResult Triangulation::contract(EdgeRef e) {
  const Triangle T = tri(e.t);
  const VId a = T.v[static_cast<std::size_t>(next3(e.i))];
  const VId b = T.v[static_cast<std::size_t>(prev3(e.i))];
  const VId c = T.v[static_cast<std::size_t>(e.i)];
  const TId t1 = e.t;
  const TId t2 = T.nbr[static_cast<std::size_t>(e.i)];
  VId d = kNone;
  if (t2 != kNone) {
    const auto& N = tri(t2);
    for (int j = 0; j < 3; ++j) {
      if (N.nbr[static_cast<std::size_t>(j)] == t1) d = N.v[static_cast<std::size_t>(j)];
    }
    if (d == kNone) return {ContractStatus::Topology, kNone};
  }

  const Vertex& va = vertex(a);
  const Vertex& vb = vertex(b);
  if (va.dof == Dof::Fixed && vb.dof == Dof::Fixed) return {ContractStatus::BothFixed, kNone};

  VId k = a, r = b;
  if (static_cast<int>(vb.dof) < static_cast<int>(va.dof) || (va.dof == vb.dof && b < a)) std::swap(k, r);
  const Vertex& vk = vertex(k);
  const Vertex& vr = vertex(r);

  // segment compatibility
  if (vk.dof == Dof::Fixed && vr.dof == Dof::OnSegment) {
    if (!is_fixed_on_segment(k, vr.host)) return {ContractStatus::DifferentSegments, kNone};
  }
  if (vk.dof == Dof::OnSegment && vr.dof == Dof::OnSegment && vk.host != vr.host)
    return {ContractStatus::DifferentSegments, kNone};

  // link condition: the only common neighbors are the opposite corners
  std::vector<VId> na, nb;
  neighbors(a, na);
  neighbors(b, nb);
  for (VId x : na) {
    if (x == c || x == d) continue;
    if (std::find(nb.begin(), nb.end(), x) != nb.end()) return {ContractStatus::Topology, kNone};
  }
  if (t2 != kNone && on_hull(a) && on_hull(b)) return {ContractStatus::Topology, kNone};

  // merged edge flags for the two collapsing triangles
  auto merged_seg = [&](TId t, VId x, VId y, int& seg_out, TId& n_x, TId& n_y) -> bool {
    const auto& tr = tri(t);
    const int ix = index_in(t, x), iy = index_in(t, y);
    n_x = tr.nbr[static_cast<std::size_t>(ix)];  // edge opposite x
    n_y = tr.nbr[static_cast<std::size_t>(iy)];
    const int sx = tr.seg[static_cast<std::size_t>(ix)], sy = tr.seg[static_cast<std::size_t>(iy)];
    if (sx != kNone && sy != kNone && sx != sy) return false;
    seg_out = sx != kNone ? sx : sy;
    if (n_x == kNone && n_y == kNone) return false;
    return true;
  };
  int seg1 = kNone, seg2 = kNone;
  TId n1a = kNone, n1b = kNone, n2a = kNone, n2b = kNone;
  if (!merged_seg(t1, a, b, seg1, n1a, n1b)) return {ContractStatus::Topology, kNone};
  if (t2 != kNone && !merged_seg(t2, a, b, seg2, n2a, n2b)) return {ContractStatus::Topology, kNone};

  // candidate positions
  std::vector<Point> candidates;
  if (vk.dof == Dof::Fixed) {
    candidates.push_back(vk.pos);
  } else if (vk.dof == Dof::Free) {
    const Point pa = pos(a), pb = pos(b);
    candidates.push_back(lerp(pa, pb, 0.5));
    for (int i = 1; i <= 8; ++i) candidates.push_back(lerp(pa, pb, i / 9.0));
  } else {
    const int host = vk.host;
    const auto& s = info_->segments[static_cast<std::size_t>(host)];
    auto param = [&](Point p) { return project_param(p, s.a, s.b); };
    VId lo = kNone, hi = kNone;
    auto outer = [&](VId v, VId skip) {
      for (VId w : chain_neighbors(v, host)) {
        if (w != skip) return w;
      }
      return static_cast<VId>(kNone);
    };
    if (vr.dof == Dof::OnSegment) {
      candidates.push_back(lerp(s.a, s.b, 0.5 * (param(pos(k)) + param(pos(r)))));
      lo = outer(k, r);
      hi = outer(r, k);
    } else {
      candidates.push_back(vk.pos);
      auto cn = chain_neighbors(k, host);
      if (cn.size() == 2) {
        lo = cn[0];
        hi = cn[1];
      }
    }
    if (lo != kNone && hi != kNone) {
      const double u0 = param(pos(lo)), u1 = param(pos(hi));
      for (int i = 1; i <= 8; ++i) candidates.push_back(lerp(s.a, s.b, u0 + (u1 - u0) * (i / 9.0)));
    }
  }

  // triangles that survive and touch a or b
  std::vector<TId> sa, sb, touched;
  star(a, sa);
  star(b, sb);
  for (TId t : sa) {
    if (t != t1 && t != t2) touched.push_back(t);
  }
  for (TId t : sb) {
    if (t != t1 && t != t2) touched.push_back(t);
  }

  auto position_ok = [&](Point p) {
    for (TId t : touched) {
      const auto& tr = tri(t);
      Point q[3];
      for (int j = 0; j < 3; ++j) {
        const VId v = tr.v[static_cast<std::size_t>(j)];
        q[j] = (v == a || v == b) ? p : pos(v);
      }
      if (orient2d(q[0], q[1], q[2]) != Orientation::Positive) return false;
    }
    return true;
  };
  std::optional<Point> chosen;
  for (Point p : candidates) {
    if (position_ok(p)) {
      chosen = p;
      break;
    }
  }
  if (!chosen) return {ContractStatus::Topology, kNone};

  // commit
  replace_nbr(n1a, t1, n1b, seg1);
  replace_nbr(n1b, t1, n1a, seg1);
  if (t2 != kNone) {
    replace_nbr(n2a, t2, n2b, seg2);
    replace_nbr(n2b, t2, n2a, seg2);
  }
  for (TId t : touched) {
    auto& tr = tri_mut(t);
    for (auto& v : tr.v) {
      if (v == r) v = k;
    }
  }
  kill_triangle(t1);
  if (t2 != kNone) kill_triangle(t2);
  kill_vertex(r);
  set_position(k, *chosen);
  auto pick = [&](VId v, std::initializer_list<TId> options) {
    for (TId t : options) {
      if (t != kNone && tri(t).alive && index_in(t, v) >= 0) {
        vertex_mut(v).tri = t;
        return;
      }
    }
  };
  if (!touched.empty()) vertex_mut(k).tri = touched.front();
  pick(c, {n1a, n1b});
  if (d != kNone) pick(d, {n2a, n2b});
  ++topo_version_;
  return {ContractStatus::Contracted, k};
}

Triangulation Triangulation::from_triangles(std::shared_ptr<const SceneInfo> info, std::vector<Vertex> vertices,
                                            const std::vector<std::array<VId, 3>>& tris,
                                            const std::unordered_map<EdgeKey, int>& constrained) {
  Triangulation out(std::move(info));
  out.verts_ = std::move(vertices);
  out.live_verts_ = 0;
  for (auto& v : out.verts_) {
    v.tri = kNone;
    if (v.alive) ++out.live_verts_;
  }
  std::unordered_map<EdgeKey, EdgeRef> open;
  open.reserve(tris.size() * 2);
  for (const auto& tv : tris) {
    const TId t = out.add_triangle(tv[0], tv[1], tv[2]);
    for (int i = 0; i < 3; ++i) {
      const VId p = tv[static_cast<std::size_t>(next3(i))], q = tv[static_cast<std::size_t>(prev3(i))];
      const EdgeKey k = edge_key(p, q);
      auto cit = constrained.find(k);
      if (cit != constrained.end()) out.tri_mut(t).seg[static_cast<std::size_t>(i)] = cit->second;
      auto it = open.find(k);
      if (it == open.end()) {
        open.emplace(k, EdgeRef{t, i});
      } else {
        const EdgeRef o = it->second;
        out.tri_mut(t).nbr[static_cast<std::size_t>(i)] = o.t;
        out.tri_mut(o.t).nbr[static_cast<std::size_t>(o.i)] = t;
        open.erase(it);
      }
    }
  }
  return out;
}

Triangulation Triangulation::subdivided() const {
  std::vector<Vertex> verts;
  std::vector<VId> remap(verts_.size(), kNone);
  for (std::size_t v = 0; v < verts_.size(); ++v) {
    if (!verts_[v].alive) continue;
    remap[v] = static_cast<VId>(verts.size());
    Vertex nv = verts_[v];
    nv.tri = kNone;
    verts.push_back(nv);
  }
  std::unordered_map<EdgeKey, VId> mid;
  std::unordered_map<EdgeKey, int> constrained;
  for_each_edge([&](EdgeRef e) {
    auto [p, q] = edge_vertices(e);
    const int s = edge_segment(e);
    Vertex m;
    m.pos = lerp(pos(p), pos(q), 0.5);
    if (s != kNone) {
      m.dof = Dof::OnSegment;
      m.host = s;
      {
        const auto& sg = info_->segments[static_cast<std::size_t>(s)];
        m.pos = lerp(sg.a, sg.b, project_param(m.pos, sg.a, sg.b));
      }
    }
    const VId id = static_cast<VId>(verts.size());
    verts.push_back(m);
    mid.emplace(edge_key(p, q), id);
    if (s != kNone) {
      constrained.emplace(edge_key(remap[static_cast<std::size_t>(p)], id), s);
      constrained.emplace(edge_key(remap[static_cast<std::size_t>(q)], id), s);
    }
  });
  std::vector<std::array<VId, 3>> out;
  out.reserve(live_tris_ * 4);
  for (const auto& tr : tris_) {
    if (!tr.alive) continue;
    const VId v0 = remap[static_cast<std::size_t>(tr.v[0])];
    const VId v1 = remap[static_cast<std::size_t>(tr.v[1])];
    const VId v2 = remap[static_cast<std::size_t>(tr.v[2])];
    const VId m0 = mid.at(edge_key(tr.v[1], tr.v[2]));
    const VId m1 = mid.at(edge_key(tr.v[2], tr.v[0]));
    const VId m2 = mid.at(edge_key(tr.v[0], tr.v[1]));
    out.push_back({v0, m2, m1});
    out.push_back({v1, m0, m2});
    out.push_back({v2, m1, m0});
    out.push_back({m0, m1, m2});
  }
  return from_triangles(info_, std::move(verts), out, constrained);
}

double Triangulation::total_edge_length() const {
  double sum = 0.0;
  for_each_edge([&](EdgeRef e) { sum += edge_length(e); });
  return sum;
}

std::vector<std::string> Triangulation::validate() const {
  std::vector<std::string> out;
  auto report = [&](const std::string& s) { out.push_back(s); };

  // (a) orientation and references
  for (std::size_t t = 0; t < tris_.size(); ++t) {
    const auto& tr = tris_[t];
    if (!tr.alive) continue;
    bool refs_ok = true;
    for (VId v : tr.v) {
      if (v < 0 || static_cast<std::size_t>(v) >= verts_.size() || !verts_[static_cast<std::size_t>(v)].alive) {
        report("triangle " + std::to_string(t) + " references a dead or missing vertex");
        refs_ok = false;
      }
    }
    if (!refs_ok) continue;
    if (orient2d(pos(tr.v[0]), pos(tr.v[1]), pos(tr.v[2])) != Orientation::Positive)
      report("triangle " + std::to_string(t) + " is not positively oriented");
  }

  // (b) neighbor symmetry and (d) flag consistency, per edge key
  std::unordered_map<EdgeKey, std::vector<EdgeRef>> inc;
  for (std::size_t t = 0; t < tris_.size(); ++t) {
    const auto& tr = tris_[t];
    if (!tr.alive) continue;
    for (int i = 0; i < 3; ++i) inc[key(EdgeRef{static_cast<TId>(t), i})].push_back({static_cast<TId>(t), i});
  }
  for (const auto& [k, refs] : inc) {
    const std::string name = "edge (" + std::to_string(key_first(k)) + "," + std::to_string(key_second(k)) + ")";
    if (refs.size() > 2) {
      report(name + " is shared by more than two triangles");
      continue;
    }
    bool sym = true;
    if (refs.size() == 1) {
      sym = tri(refs[0].t).nbr[static_cast<std::size_t>(refs[0].i)] == kNone;
    } else {
      sym = tri(refs[0].t).nbr[static_cast<std::size_t>(refs[0].i)] == refs[1].t &&
            tri(refs[1].t).nbr[static_cast<std::size_t>(refs[1].i)] == refs[0].t;
    }
    if (!sym) {
      report(name + " has asymmetric neighbor links");
      continue;
    }
    const int s0 = edge_segment(refs[0]);
    if (refs.size() == 2 && edge_segment(refs[1]) != s0) report(name + " has inconsistent constraint flags");
    if (refs.size() == 1 && (s0 == kNone || info_->is_geometry(s0)))
      report(name + " is on the hull but not a boundary constraint");
    if (s0 != kNone) {
      const auto& s = info_->segments[static_cast<std::size_t>(s0)];
      for (VId v : {key_first(k), key_second(k)}) {
        if (point_segment_distance(pos(v), s.a, s.b) > 1e-12)
          report(name + " is constrained but vertex " + std::to_string(v) + " is off its segment");
      }
    }
  }

  // vertices
  std::vector<int> tri_count(verts_.size(), 0);
  for (const auto& tr : tris_) {
    if (!tr.alive) continue;
    for (VId v : tr.v) {
      if (v >= 0 && static_cast<std::size_t>(v) < verts_.size()) ++tri_count[static_cast<std::size_t>(v)];
    }
  }
  std::vector<TId> st;
  for (std::size_t v = 0; v < verts_.size(); ++v) {
    const auto& vx = verts_[v];
    if (!vx.alive) continue;
    const std::string name = "vertex " + std::to_string(v);
    if (!is_finite(vx.pos)) report(name + " has a non-finite position");
    if (vx.tri == kNone || static_cast<std::size_t>(vx.tri) >= tris_.size() || !tris_[static_cast<std::size_t>(vx.tri)].alive ||
        index_in(vx.tri, static_cast<VId>(v)) < 0) {
      report(name + " has a stale triangle reference");
      continue;
    }
    star(static_cast<VId>(v), st);
    if (static_cast<int>(st.size()) != tri_count[v]) report(name + " does not have a single fan of triangles");
    if (vx.dof == Dof::OnSegment) {
      if (vx.host < 0 || static_cast<std::size_t>(vx.host) >= info_->segments.size()) {
        report(name + " has an invalid host segment");
      } else {
        const auto& s = info_->segments[static_cast<std::size_t>(vx.host)];
        if (point_segment_distance(vx.pos, s.a, s.b) > 1e-12) report(name + " is off its host segment");
      }
    } else if (vx.dof == Dof::Fixed && vx.host != kNone) {
      if (!(vx.pos == info_->points[static_cast<std::size_t>(vx.host)])) report(name + " moved away from its fixed point");
    }
  }

  // (c) segment coverage
  std::vector<std::vector<std::pair<double, double>>> pieces(info_->segments.size());
  for_each_edge([&](EdgeRef e) {
    const int s = edge_segment(e);
    if (s == kNone) return;
    const auto& sg = info_->segments[static_cast<std::size_t>(s)];
    auto [p, q] = edge_vertices(e);
    double u0 = project_param(pos(p), sg.a, sg.b), u1 = project_param(pos(q), sg.a, sg.b);
    if (u0 > u1) std::swap(u0, u1);
    pieces[static_cast<std::size_t>(s)].emplace_back(u0, u1);
  });
  for (std::size_t s = 0; s < pieces.size(); ++s) {
    auto& pc = pieces[s];
    std::sort(pc.begin(), pc.end());
    const double tol = 1e-12 / std::max(1e-300, info_->segments[s].length());
    bool ok = !pc.empty() && std::fabs(pc.front().first) <= tol && std::fabs(pc.back().second - 1.0) <= tol;
    for (std::size_t i = 1; ok && i < pc.size(); ++i) {
      if (std::fabs(pc[i].first - pc[i - 1].second) > tol) ok = false;
    }
    if (!ok) report("segment " + std::to_string(s) + " is not exactly covered by constrained edges");
  }
  return out;
}

void Triangulation::compact() {
  std::vector<VId> vmap(verts_.size(), kNone);
  std::vector<Vertex> nv;
  for (std::size_t v = 0; v < verts_.size(); ++v) {
    if (!verts_[v].alive) continue;
    vmap[v] = static_cast<VId>(nv.size());
    nv.push_back(verts_[v]);
  }
  std::vector<TId> tmap(tris_.size(), kNone);
  std::vector<Triangle> nt;
  for (std::size_t t = 0; t < tris_.size(); ++t) {
    if (!tris_[t].alive) continue;
    tmap[t] = static_cast<TId>(nt.size());
    nt.push_back(tris_[t]);
  }
  for (auto& tr : nt) {
    for (auto& v : tr.v) v = vmap[static_cast<std::size_t>(v)];
    for (auto& n : tr.nbr) {
      if (n != kNone) n = tmap[static_cast<std::size_t>(n)];
    }
  }
  for (auto& v : nv) {
    if (v.tri != kNone) v.tri = tmap[static_cast<std::size_t>(v.tri)];
  }
  verts_ = std::move(nv);
  tris_ = std::move(nt);
  free_verts_.clear();
  free_tris_.clear();
  live_verts_ = verts_.size();
  live_tris_ = tris_.size();
  ++topo_version_;
}

}  // namespace mwt
