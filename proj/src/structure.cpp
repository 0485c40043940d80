#include "hdk/structure.hpp"

#include <algorithm>
#include <numeric>

namespace hdk {

namespace {

// Minimal union-find over int64 indices.
class UnionFind {
public:
  explicit UnionFind(int64_t n) : parent_(size_t(n)) {
    std::iota(parent_.begin(), parent_.end(), int64_t(0));
  }
  int64_t find(int64_t x) {
    while (parent_[size_t(x)] != x) {
      parent_[size_t(x)] = parent_[size_t(parent_[size_t(x)])];
      x = parent_[size_t(x)];
    }
    return x;
  }
  void unite(int64_t a, int64_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent_[size_t(b)] = a;  // min-root keeps components canonical
    else parent_[size_t(a)] = b;
  }

private:
  std::vector<int64_t> parent_;
};

int edge_transitions(const LabelField& f, int64_t edge, std::array<Label, 4>& labels) {
  auto q = f.edge_quadrants(edge);
  for (int i = 0; i < 4; ++i) labels[size_t(i)] = f.label_at(q[size_t(i)]);
  int t = 0;
  for (int i = 0; i < 4; ++i) t += labels[size_t(i)] != labels[size_t((i + 1) & 3)];
  return t;
}

// Link graph of the partition on the octahedral sphere around a grid vertex.
// Nodes 0..5 are the edge-germ directions (axis*2 + positive); arcs are the
// sector-face germs. Classified by homeomorphism type after suppressing
// degree-2 nodes: empty, circle, theta, K4, or none of those.
VertexClass classify_octants(const std::array<Label, 8>& oct) {
  bool all_equal = true;
  for (int s = 1; s < 8; ++s) all_equal &= oct[size_t(s)] == oct[0];
  if (all_equal) return VertexClass::Interior;

  // Arc list: for each face germ (normal axis a, db, dc in {0,1}) the arc
  // joins direction nodes of axes b (sign 1-db) and c (sign 1-dc); it is
  // present iff the two octants separated by the face differ.
  struct Arc {
    int u, v;
  };
  Arc arcs[12];
  int arc_count = 0;
  for (int a = 0; a < 3; ++a) {
    int b = (a + 1) % 3, c = (a + 2) % 3;
    for (int db = 0; db < 2; ++db)
      for (int dc = 0; dc < 2; ++dc) {
        int upper = 0, lower = 0;  // octant codes, bit i = positive side of axis i
        upper |= 1 << a;
        int bbit = (1 - db) << b;
        int cbit = (1 - dc) << c;
        upper |= bbit | cbit;
        lower = bbit | cbit;
        if (oct[size_t(upper)] == oct[size_t(lower)]) continue;
        Arc& e = arcs[arc_count++];
        e.u = 2 * b + (1 - db);
        e.v = 2 * c + (1 - dc);
      }
  }
  if (arc_count == 0) return VertexClass::NonSimple;  // distinct octants need arcs

  // Suppress degree-2 nodes; track arcs as endpoint pairs with liveness.
  int deg[6] = {0, 0, 0, 0, 0, 0};
  bool alive[12];
  for (int i = 0; i < arc_count; ++i) {
    alive[i] = true;
    ++deg[arcs[i].u];
    ++deg[arcs[i].v];
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (int n = 0; n < 6; ++n) {
      if (deg[n] != 2) continue;
      int e1 = -1, e2 = -1;
      for (int i = 0; i < arc_count && e2 < 0; ++i) {
        if (!alive[i]) continue;
        if (arcs[i].u == n || arcs[i].v == n) (e1 < 0 ? e1 : e2) = i;
      }
      if (e1 < 0 || e2 < 0) continue;
      if (e1 == e2) continue;  // loop at n: a circle component, leave as is
      if (arcs[e1].u == n && arcs[e1].v == n) continue;
      if (arcs[e2].u == n && arcs[e2].v == n) continue;
      int x = arcs[e1].u == n ? arcs[e1].v : arcs[e1].u;
      int y = arcs[e2].u == n ? arcs[e2].v : arcs[e2].u;
      alive[e2] = false;
      arcs[e1].u = x;
      arcs[e1].v = y;
      deg[n] = 0;
      changed = true;
      // degrees of x and y are unchanged (one arc swapped for another),
      // unless x or y was n itself, excluded above
    }
  }

  int live_arcs = 0, loops = 0;
  int degs[6] = {0, 0, 0, 0, 0, 0};
  for (int i = 0; i < arc_count; ++i) {
    if (!alive[i]) continue;
    ++live_arcs;
    if (arcs[i].u == arcs[i].v) ++loops;
    ++degs[arcs[i].u];
    ++degs[arcs[i].v];
  }
  int live_nodes = 0;
  for (int n = 0; n < 6; ++n) live_nodes += degs[n] > 0;

  // connectivity over live nodes
  auto connected = [&]() {
    int start = -1;
    for (int n = 0; n < 6; ++n)
      if (degs[n] > 0) {
        start = n;
        break;
      }
    if (start < 0) return true;
    bool seen[6] = {};
    int stack[6], top = 0;
    stack[top++] = start;
    seen[start] = true;
    while (top) {
      int n = stack[--top];
      for (int i = 0; i < arc_count; ++i) {
        if (!alive[i]) continue;
        int m = -1;
        if (arcs[i].u == n) m = arcs[i].v;
        else if (arcs[i].v == n) m = arcs[i].u;
        if (m >= 0 && !seen[m]) {
          seen[m] = true;
          stack[top++] = m;
        }
      }
    }
    for (int n = 0; n < 6; ++n)
      if (degs[n] > 0 && !seen[n]) return false;
    return true;
  };

  if (!connected()) return VertexClass::NonSimple;
  // single circle: one node carrying one loop
  if (live_nodes == 1 && live_arcs == 1 && loops == 1) return VertexClass::Surface;
  // theta: two nodes, three parallel arcs
  if (live_nodes == 2 && live_arcs == 3 && loops == 0) {
    for (int n = 0; n < 6; ++n)
      if (degs[n] != 0 && degs[n] != 3) return VertexClass::NonSimple;
    return VertexClass::TripleLine;
  }
  // K4: four nodes, six arcs, simple, all degree 3, every pair adjacent
  if (live_nodes == 4 && live_arcs == 6 && loops == 0) {
    for (int n = 0; n < 6; ++n)
      if (degs[n] != 0 && degs[n] != 3) return VertexClass::NonSimple;
    for (int i = 0; i < arc_count; ++i) {
      if (!alive[i]) continue;
      for (int j = i + 1; j < arc_count; ++j) {
        if (!alive[j]) continue;
        bool same = (arcs[i].u == arcs[j].u && arcs[i].v == arcs[j].v) ||
                    (arcs[i].u == arcs[j].v && arcs[i].v == arcs[j].u);
        if (same) return VertexClass::NonSimple;  // parallel arcs
      }
    }
    return VertexClass::Tetrahedral;
  }
  return VertexClass::NonSimple;
}

}  // namespace

FaceInfo classify_face(const LabelField& field, int64_t face) {
  auto sides = field.face_sides(face);
  Label lo = field.label_at(sides[0]), hi = field.label_at(sides[1]);
  FaceInfo info;
  if (lo == hi) return info;
  info.cls = FaceClass::Sector;
  info.a = std::min(lo, hi);
  info.b = std::max(lo, hi);
  info.lower_is_a = lo < hi;
  return info;
}

EdgeClass classify_edge(const LabelField& field, int64_t edge) {
  std::array<Label, 4> l{};
  int t = edge_transitions(field, edge, l);
  switch (t) {
    case 0: return EdgeClass::Interior;
    case 2: return EdgeClass::Surface;
    case 3: return EdgeClass::Triple;
    default: return EdgeClass::Cross;
  }
}

VertexClass classify_vertex(const LabelField& field, int64_t vertex) {
  auto o = field.vertex_octants(vertex);
  std::array<Label, 8> labels{};
  for (int i = 0; i < 8; ++i) labels[size_t(i)] = field.label_at(o[size_t(i)]);
  return classify_octants(labels);
}

StructureCache::StructureCache(const LabelField& field) : field_(&field) {
  int64_t n = field.dims().voxels();
  faces_.resize(size_t(3 * n));
  edges_.resize(size_t(3 * n));
  vertices_.resize(size_t(n));
  for (int64_t f = 0; f < 3 * n; ++f) {
    faces_[size_t(f)] = classify_face(field, f);
    sector_faces_ += faces_[size_t(f)].cls == FaceClass::Sector;
  }
  for (int64_t e = 0; e < 3 * n; ++e) {
    edges_[size_t(e)] = classify_edge(field, e);
    cross_edges_ += edges_[size_t(e)] == EdgeClass::Cross;
  }
  for (int64_t v = 0; v < n; ++v) {
    vertices_[size_t(v)] = classify_vertex(field, v);
    nonsimple_vertices_ += vertices_[size_t(v)] == VertexClass::NonSimple;
  }
}

SectorSet sectors(const StructureCache& cache) {
  const LabelField& f = cache.field();
  int64_t nf = 3 * f.dims().voxels();
  UnionFind uf(nf);
  // two sector faces meeting at a Surface edge belong to one sheet
  for (int64_t e = 0; e < nf; ++e) {
    if (cache.edges()[size_t(e)] != EdgeClass::Surface) continue;
    auto faces = f.edge_faces(e);
    int64_t first = -1;
    for (int64_t fid : faces) {
      if (cache.faces()[size_t(fid)].cls != FaceClass::Sector) continue;
      if (first < 0) first = fid;
      else uf.unite(first, fid);
    }
  }
  std::vector<int32_t> comp_of(size_t(nf), -1);
  std::vector<int64_t> roots;
  for (int64_t fid = 0; fid < nf; ++fid) {
    if (cache.faces()[size_t(fid)].cls != FaceClass::Sector) continue;
    roots.push_back(uf.find(fid));
  }
  // canonical order: (a, b, min face id); min face id == root under min-root UF
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  struct Key {
    Label a, b;
    int64_t root;
  };
  std::vector<Key> keys;
  keys.reserve(roots.size());
  for (int64_t r : roots) {
    const FaceInfo& fi = cache.faces()[size_t(r)];
    keys.push_back({fi.a, fi.b, r});
  }
  std::sort(keys.begin(), keys.end(), [](const Key& l, const Key& r) {
    return std::tie(l.a, l.b, l.root) < std::tie(r.a, r.b, r.root);
  });
  SectorSet out;
  out.components.resize(keys.size());
  std::vector<int32_t> index_of_root(size_t(nf), -1);
  for (size_t i = 0; i < keys.size(); ++i) {
    index_of_root[size_t(keys[i].root)] = int32_t(i);
    out.components[i].a = keys[i].a;
    out.components[i].b = keys[i].b;
  }
  for (int64_t fid = 0; fid < nf; ++fid) {
    if (cache.faces()[size_t(fid)].cls != FaceClass::Sector) continue;
    int32_t ci = index_of_root[size_t(uf.find(fid))];
    comp_of[size_t(fid)] = ci;
    out.components[size_t(ci)].faces.push_back(fid);
    const FaceInfo& fi = cache.faces()[size_t(fid)];
    if (fi.a != out.components[size_t(ci)].a || fi.b != out.components[size_t(ci)].b)
      throw Error(Errc::Internal, "sector component crosses label pairs");
  }
  out.component_of_face = std::move(comp_of);
  return out;
}

SingularGraph singular_graph(const StructureCache& cache, bool lenient) {
  if (!lenient && (cache.has_cross_edges() || cache.has_nonsimple_vertices()))
    throw Error(Errc::NonSimpleEncountered, "field has Cross edges or NonSimple vertices");
  const LabelField& f = cache.field();
  int64_t n = f.dims().voxels();
  SingularGraph g;
  for (int64_t e = 0; e < 3 * n; ++e)
    if (cache.edges()[size_t(e)] == EdgeClass::Triple) g.triple_edges.push_back(e);
  for (int64_t v = 0; v < n; ++v) {
    VertexClass c = cache.vertices()[size_t(v)];
    if (c == VertexClass::Tetrahedral) g.p_vertices.push_back(v);
    else if (c == VertexClass::TripleLine) ++g.triple_line_vertices;
  }
  if (g.triple_edges.empty()) return g;

  // components of the 1-complex of triple edges, joined at shared endpoints
  UnionFind uf(int64_t(g.triple_edges.size()));
  std::vector<std::pair<int64_t, int64_t>> by_vertex;  // (vertex, triple-edge slot)
  by_vertex.reserve(g.triple_edges.size() * 2);
  for (size_t i = 0; i < g.triple_edges.size(); ++i) {
    auto vs = f.edge_vertices(g.triple_edges[i]);
    by_vertex.emplace_back(vs[0], int64_t(i));
    by_vertex.emplace_back(vs[1], int64_t(i));
  }
  std::sort(by_vertex.begin(), by_vertex.end());
  std::vector<char> has_p(g.triple_edges.size(), 0);
  for (size_t i = 0; i < by_vertex.size();) {
    size_t j = i;
    while (j < by_vertex.size() && by_vertex[j].first == by_vertex[i].first) ++j;
    for (size_t k = i + 1; k < j; ++k) uf.unite(by_vertex[i].second, by_vertex[k].second);
    if (cache.vertices()[size_t(by_vertex[i].first)] == VertexClass::Tetrahedral)
      has_p[size_t(by_vertex[i].second)] = 1;
    i = j;
  }
  std::vector<char> root_has_p(g.triple_edges.size(), 0);
  for (size_t i = 0; i < g.triple_edges.size(); ++i)
    if (has_p[i]) root_has_p[size_t(uf.find(int64_t(i)))] = 1;
  std::vector<char> seen(g.triple_edges.size(), 0);
  for (size_t i = 0; i < g.triple_edges.size(); ++i) {
    int64_t r = uf.find(int64_t(i));
    if (seen[size_t(r)]) continue;
    seen[size_t(r)] = 1;
    ++g.component_count;
    if (!root_has_p[size_t(r)]) ++g.circle_count;
  }
  return g;
}

SimplicityReport is_simple(const StructureCache& cache) {
  SimplicityReport rep;
  const auto& edges = cache.edges();
  for (int64_t e = 0; e < int64_t(edges.size()); ++e)
    if (edges[size_t(e)] == EdgeClass::Cross) rep.cross_edges.push_back(e);
  const auto& verts = cache.vertices();
  for (int64_t v = 0; v < int64_t(verts.size()); ++v)
    if (verts[size_t(v)] == VertexClass::NonSimple) rep.nonsimple_vertices.push_back(v);
  rep.simple = rep.cross_edges.empty() && rep.nonsimple_vertices.empty();
  return rep;
}

int64_t region_component_count(const LabelField& field, Label label) {
  int64_t n = field.dims().voxels();
  UnionFind uf(n);
  for (int64_t v = 0; v < n; ++v) {
    if (field.label_at(v) != label) continue;
    for (int a = 0; a < 3; ++a) {
      int64_t w = field.neighbor(v, a, +1);
      if (field.label_at(w) == label) uf.unite(v, w);
    }
  }
  int64_t count = 0;
  for (int64_t v = 0; v < n; ++v)
    if (field.label_at(v) == label && uf.find(v) == v) ++count;
  return count;
}

DecompositionValidity validate(const StructureCache& cache) {
  const LabelField& f = cache.field();
  int64_t n = f.dims().voxels();
  DecompositionValidity val;

  // regions: one union-find pass over all labels at once
  {
    UnionFind uf(n);
    for (int64_t v = 0; v < n; ++v)
      for (int a = 0; a < 3; ++a) {
        int64_t w = f.neighbor(v, a, +1);
        if (f.label_at(w) == f.label_at(v)) uf.unite(v, w);
      }
    std::vector<int64_t> root_count(size_t(f.label_count()), 0);
    for (int64_t v = 0; v < n; ++v)
      if (uf.find(v) == v) ++root_count[size_t(f.label_at(v))];
    val.regions_connected = true;
    for (int64_t c : root_count) val.regions_connected &= c == 1;
  }

  // partition: sector faces glued through shared non-interior edges/vertices
  {
    UnionFind uf(3 * n);
    std::vector<char> is_sector(size_t(3 * n), 0);
    for (int64_t fid = 0; fid < 3 * n; ++fid)
      is_sector[size_t(fid)] = cache.faces()[size_t(fid)].cls == FaceClass::Sector;
    for (int64_t e = 0; e < 3 * n; ++e) {
      if (cache.edges()[size_t(e)] == EdgeClass::Interior) continue;
      auto faces = f.edge_faces(e);
      int64_t first = -1;
      for (int64_t fid : faces) {
        if (!is_sector[size_t(fid)]) continue;
        if (first < 0) first = fid;
        else uf.unite(first, fid);
      }
    }
    for (int64_t v = 0; v < n; ++v) {
      if (cache.vertices()[size_t(v)] == VertexClass::Interior) continue;
      // all sector faces incident to v: faces (a, v - db e_b - dc e_c)
      int64_t first = -1;
      Coord p = f.voxel_coord(v);
      for (int a = 0; a < 3; ++a) {
        int b = (a + 1) % 3, c = (a + 2) % 3;
        for (int db = 0; db < 2; ++db)
          for (int dc = 0; dc < 2; ++dc) {
            Coord q = p;
            auto shift = [&](int ax, int d) {
              if (ax == 0) q.x = LabelField::wrap(q.x + d, f.dims().nx);
              else if (ax == 1) q.y = LabelField::wrap(q.y + d, f.dims().ny);
              else q.z = LabelField::wrap(q.z + d, f.dims().nz);
            };
            shift(b, -db);
            shift(c, -dc);
            int64_t fid = 3 * f.voxel_index(q.x, q.y, q.z) + a;
            if (!is_sector[size_t(fid)]) continue;
            if (first < 0) first = fid;
            else uf.unite(first, fid);
          }
      }
    }
    int64_t comps = 0;
    for (int64_t fid = 0; fid < 3 * n; ++fid)
      if (is_sector[size_t(fid)] && uf.find(fid) == fid) ++comps;
    val.partition_connected = comps == 1;
  }

  val.simple = !cache.has_cross_edges() && !cache.has_nonsimple_vertices();
  val.proper = val.regions_connected;
  val.overall = val.regions_connected && val.partition_connected && val.simple && val.proper;
  return val;
}

DecompositionValidity validate(const LabelField& field) {
  StructureCache cache(field);
  return validate(cache);
}

}  // namespace hdk
