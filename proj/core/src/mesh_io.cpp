#include "mwt/mesh_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace mwt {

Scene scene_of(const Triangulation& t) {
  const auto& info = t.info();
  Scene s;
  s.segments = info.segments;
  s.box = info.box;
  s.name = info.name;
  return s;
}

namespace {

class LineReader {
 public:
  LineReader(std::istream& is, std::string what) : is_(is), what_(std::move(what)) {}

  bool next(std::istringstream& ss) {
    std::string line;
    while (std::getline(is_, line)) {
      ++lineno_;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      ss.clear();
      ss.str(line);
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw MeshFormatError(what_ + " line " + std::to_string(lineno_) + ": " + msg, lineno_);
  }

  int line() const { return lineno_; }

 private:
  std::istream& is_;
  std::string what_;
  int lineno_ = 0;
};

const char* dof_name(Dof d) {
  switch (d) {
    case Dof::Fixed: return "fixed";
    case Dof::OnSegment: return "segment";
    case Dof::Free: return "free";
  }
  return "free";
}

}  // namespace

void write_mesh(std::ostream& os, const Triangulation& src) {
  Triangulation t = src;
  t.compact();
  os << "mwt-mesh 1\n";
  write_scene(os, scene_of(t));
  char buf[256];
  os << "vertices " << t.num_vertices() << "\n";
  for (const auto& v : t.vertices()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %s %d\n", v.pos.x, v.pos.y, dof_name(v.dof), v.host);
    os << buf;
  }
  os << "triangles " << t.num_triangles() << "\n";
  for (const auto& tr : t.triangles()) {
    os << tr.v[0] << ' ' << tr.v[1] << ' ' << tr.v[2] << ' ' << tr.nbr[0] << ' ' << tr.nbr[1] << ' ' << tr.nbr[2]
       << ' ' << tr.seg[0] << ' ' << tr.seg[1] << ' ' << tr.seg[2] << '\n';
  }
}

Triangulation read_mesh(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("mwt-mesh 1", 0) != 0)
    throw MeshFormatError("mesh line 1: bad header", 1);
  // the scene block is self-delimiting; read it from a buffer of the remaining text
  std::stringstream rest;
  rest << is.rdbuf();
  std::string all = rest.str();
  const auto vpos = all.find("\nvertices ");
  if (vpos == std::string::npos) throw MeshFormatError("missing section 'vertices'");
  std::istringstream scene_in(all.substr(0, vpos + 1));
  Scene scene = read_scene(scene_in);
  auto info = SceneInfo::from_scene(scene);

  std::istringstream body(all.substr(vpos + 1));
  const int offset = 1 + static_cast<int>(std::count(all.begin(), all.begin() + static_cast<long>(vpos + 1), '\n'));
  LineReader in(body, "mesh");
  std::istringstream ss;
  auto fail = [&](const std::string& msg) {
    throw MeshFormatError("mesh line " + std::to_string(in.line() + offset) + ": " + msg, in.line() + offset);
  };
  std::string key;
  std::size_t nv = 0, nt = 0;
  if (!in.next(ss) || !(ss >> key >> nv) || key != "vertices") fail("missing section 'vertices'");
  std::vector<Vertex> verts(nv);
  for (auto& v : verts) {
    std::string dof;
    if (!in.next(ss) || !(ss >> v.pos.x >> v.pos.y >> dof >> v.host)) fail("bad vertex");
    if (dof == "fixed") v.dof = Dof::Fixed;
    else if (dof == "segment") v.dof = Dof::OnSegment;
    else if (dof == "free") v.dof = Dof::Free;
    else fail("unknown dof '" + dof + "'");
  }
  if (!in.next(ss) || !(ss >> key >> nt) || key != "triangles") fail("missing section 'triangles'");
  std::vector<std::array<VId, 3>> tris(nt);
  std::unordered_map<EdgeKey, int> cons;
  for (auto& tv : tris) {
    std::array<TId, 3> nb{};
    std::array<int, 3> sg{};
    if (!in.next(ss) || !(ss >> tv[0] >> tv[1] >> tv[2] >> nb[0] >> nb[1] >> nb[2] >> sg[0] >> sg[1] >> sg[2]))
      fail("bad triangle");
    for (int i = 0; i < 3; ++i) {
      const VId a = tv[static_cast<std::size_t>(i)];
      if (a < 0 || static_cast<std::size_t>(a) >= nv) fail("vertex index out of range");
      if (sg[static_cast<std::size_t>(i)] < -1 || sg[static_cast<std::size_t>(i)] >= static_cast<int>(info->segments.size()))
        fail("segment index out of range");
      if (sg[static_cast<std::size_t>(i)] != kNone)
        cons[edge_key(tv[static_cast<std::size_t>(next3(i))], tv[static_cast<std::size_t>(prev3(i))])] = sg[static_cast<std::size_t>(i)];
    }
  }
  return Triangulation::from_triangles(info, std::move(verts), tris, cons);
}

void save_mesh(const std::string& path, const Triangulation& t) {
  std::ofstream os(path);
  if (!os) throw MeshFormatError("cannot write " + path);
  write_mesh(os, t);
}

Triangulation load_mesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw MeshFormatError("cannot read " + path);
  return read_mesh(is);
}

void write_node(std::ostream& os, const Triangulation& src) {
  Triangulation t = src;
  t.compact();
  char buf[256];
  os << t.num_vertices() << " 2 0 1\n";
  for (std::size_t i = 0; i < t.vertices().size(); ++i) {
    const auto& v = t.vertices()[i];
    std::snprintf(buf, sizeof buf, "%zu %.17g %.17g %d\n", i, v.pos.x, v.pos.y, v.dof == Dof::Free ? 0 : 1);
    os << buf;
  }
}

void write_ele(std::ostream& os, const Triangulation& src) {
  Triangulation t = src;
  t.compact();
  os << t.num_triangles() << " 3 0\n";
  for (std::size_t i = 0; i < t.triangles().size(); ++i) {
    const auto& tr = t.triangles()[i];
    os << i << ' ' << tr.v[0] << ' ' << tr.v[1] << ' ' << tr.v[2] << '\n';
  }
}

void write_poly(std::ostream& os, const Triangulation& src) {
  Triangulation t = src;
  t.compact();
  std::vector<std::pair<EdgeRef, int>> segs;
  t.for_each_edge([&](EdgeRef e) {
    if (t.is_constrained(e)) segs.emplace_back(e, t.edge_segment(e));
  });
  os << "0 2 0 1\n";
  os << segs.size() << " 1\n";
  for (std::size_t i = 0; i < segs.size(); ++i) {
    auto [a, b] = t.edge_vertices(segs[i].first);
    os << i << ' ' << a << ' ' << b << ' ' << segs[i].second + 2 << '\n';
  }
  os << "0\n";
}

void write_triangle_files(const std::string& base, const Triangulation& t) {
  for (const char* ext : {".node", ".ele", ".poly"}) {
    std::ofstream os(base + ext);
    if (!os) throw MeshFormatError("cannot write " + base + ext);
    if (ext[1] == 'n') write_node(os, t);
    else if (ext[1] == 'e') write_ele(os, t);
    else write_poly(os, t);
  }
}

Triangulation read_triangle(const Scene& scene, std::istream& node, std::istream& ele, std::istream* poly) {
  auto info = SceneInfo::from_scene(scene);
  std::istringstream ss;

  LineReader nr(node, ".node");
  std::size_t n = 0;
  int dim = 0, nattr = 0, nmark = 0;
  if (!nr.next(ss) || !(ss >> n >> dim >> nattr >> nmark)) nr.fail("bad header");
  if (dim != 2) nr.fail("dimension must be 2");
  std::vector<Vertex> verts(n);
  int first = -1;
  for (std::size_t i = 0; i < n; ++i) {
    long id = 0;
    Point p;
    if (!nr.next(ss) || !(ss >> id >> p.x >> p.y)) nr.fail("bad vertex");
    if (i == 0) first = static_cast<int>(id);
    if (id - first != static_cast<long>(i)) nr.fail("vertex ids must be consecutive");
    verts[i].pos = p;
  }
  if (first < 0) first = 0;

  LineReader er(ele, ".ele");
  std::size_t m = 0;
  int per = 0;
  if (!er.next(ss) || !(ss >> m >> per)) er.fail("bad header");
  if (per != 3) er.fail("only 3-node triangles are supported");
  std::vector<std::array<VId, 3>> tris(m);
  for (auto& tv : tris) {
    long id = 0;
    long a = 0, b = 0, c = 0;
    if (!er.next(ss) || !(ss >> id >> a >> b >> c)) er.fail("bad triangle");
    for (long* x : {&a, &b, &c}) {
      *x -= first;
      if (*x < 0 || static_cast<std::size_t>(*x) >= n) er.fail("vertex index out of range");
    }
    tv = {static_cast<VId>(a), static_cast<VId>(b), static_cast<VId>(c)};
    if (orient2d_value(verts[static_cast<std::size_t>(a)].pos, verts[static_cast<std::size_t>(b)].pos, verts[static_cast<std::size_t>(c)].pos) < 0.0)
      std::swap(tv[1], tv[2]);
  }

  auto host_of = [&](Point p, Point q) -> int {
    for (std::size_t s = 0; s < info->segments.size(); ++s) {
      const auto& sg = info->segments[s];
      if (point_segment_distance(p, sg.a, sg.b) <= 1e-12 && point_segment_distance(q, sg.a, sg.b) <= 1e-12)
        return static_cast<int>(s);
    }
    return kNone;
  };

  std::unordered_map<EdgeKey, int> cons;
  if (poly) {
    LineReader pr(*poly, ".poly");
    std::size_t pn = 0;
    if (!pr.next(ss) || !(ss >> pn)) pr.fail("bad header");
    for (std::size_t i = 0; i < pn; ++i) {
      if (!pr.next(ss)) pr.fail("missing vertex lines");
    }
    std::size_t ns = 0;
    int has_marker = 0;
    if (!pr.next(ss) || !(ss >> ns)) pr.fail("missing segment section");
    ss >> has_marker;
    for (std::size_t i = 0; i < ns; ++i) {
      long id = 0, a = 0, b = 0;
      int marker = 0;
      if (!pr.next(ss) || !(ss >> id >> a >> b)) pr.fail("bad segment");
      if (has_marker) ss >> marker;
      a -= first;
      b -= first;
      if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n || static_cast<std::size_t>(b) >= n) pr.fail("vertex index out of range");
      const Point pa = verts[static_cast<std::size_t>(a)].pos, pb = verts[static_cast<std::size_t>(b)].pos;
      int seg = kNone;
      if (marker >= 2 && static_cast<std::size_t>(marker - 2) < info->segments.size()) {
        const auto& sg = info->segments[static_cast<std::size_t>(marker - 2)];
        if (point_segment_distance(pa, sg.a, sg.b) <= 1e-12 && point_segment_distance(pb, sg.a, sg.b) <= 1e-12) seg = marker - 2;
      }
      if (seg == kNone) seg = host_of(pa, pb);
      if (seg == kNone) pr.fail("segment does not lie on the scene geometry");
      cons[edge_key(static_cast<VId>(a), static_cast<VId>(b))] = seg;
    }
  } else {
    for (const auto& tv : tris) {
      for (int i = 0; i < 3; ++i) {
        const VId a = tv[static_cast<std::size_t>(i)], b = tv[static_cast<std::size_t>(next3(i))];
        const int seg = host_of(verts[static_cast<std::size_t>(a)].pos, verts[static_cast<std::size_t>(b)].pos);
        if (seg != kNone) cons[edge_key(a, b)] = seg;
      }
    }
  }

  // degrees of freedom from the scene
  std::map<std::pair<double, double>, int> point_id;
  for (std::size_t p = 0; p < info->points.size(); ++p) point_id[{info->points[p].x, info->points[p].y}] = static_cast<int>(p);
  for (std::size_t v = 0; v < n; ++v) {
    auto it = point_id.find({verts[v].pos.x, verts[v].pos.y});
    if (it != point_id.end()) {
      verts[v].dof = Dof::Fixed;
      verts[v].host = it->second;
    }
  }
  for (const auto& [k, seg] : cons) {
    for (VId v : {key_first(k), key_second(k)}) {
      auto& vx = verts[static_cast<std::size_t>(v)];
      if (vx.dof == Dof::Free) {
        vx.dof = Dof::OnSegment;
        vx.host = seg;
      }
    }
  }
  return Triangulation::from_triangles(info, std::move(verts), tris, cons);
}

Triangulation read_triangle_files(const std::string& base, const Scene& scene) {
  std::ifstream node(base + ".node");
  if (!node) throw MeshFormatError("missing .node section: cannot read " + base + ".node");
  std::ifstream ele(base + ".ele");
  if (!ele) throw MeshFormatError("missing .ele section: cannot read " + base + ".ele");
  std::ifstream poly(base + ".poly");
  return read_triangle(scene, node, ele, poly ? &poly : nullptr);
}

}  // namespace mwt
