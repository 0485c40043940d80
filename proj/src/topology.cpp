#include "hdk/topology.hpp"

#include <algorithm>
#include <numeric>

namespace hdk {

namespace {

void hnf_reduce(std::vector<std::array<int64_t, 3>>& rows) {
  // row-style HNF over Z^3: echelon by columns with gcd elimination
  size_t top = 0;
  for (int col = 0; col < 3 && top < rows.size(); ++col) {
    // repeatedly pick the row with the smallest nonzero |entry| in this column
    while (true) {
      size_t best = SIZE_MAX;
      int64_t bestv = 0;
      for (size_t i = top; i < rows.size(); ++i) {
        int64_t v = rows[i][size_t(col)];
        if (v == 0) continue;
        int64_t av = v < 0 ? -v : v;
        if (best == SIZE_MAX || av < bestv) {
          best = i;
          bestv = av;
        }
      }
      if (best == SIZE_MAX) break;  // column clear below top
      std::swap(rows[top], rows[best]);
      bool clean = true;
      for (size_t i = top + 1; i < rows.size(); ++i) {
        int64_t q = rows[i][size_t(col)] / rows[top][size_t(col)];
        if (q != 0)
          for (int c = 0; c < 3; ++c) rows[i][size_t(c)] -= q * rows[top][size_t(c)];
        if (rows[i][size_t(col)] != 0) clean = false;
      }
      if (clean) {
        if (rows[top][size_t(col)] < 0)
          for (int c = 0; c < 3; ++c) rows[top][size_t(c)] = -rows[top][size_t(c)];
        ++top;
        break;
      }
    }
  }
  rows.resize(top);
  // reduce entries above each pivot into [0, pivot)
  for (size_t i = 0; i < rows.size(); ++i) {
    int pc = 0;
    while (pc < 3 && rows[i][size_t(pc)] == 0) ++pc;
    for (size_t j = 0; j < i; ++j) {
      int64_t p = rows[i][size_t(pc)];
      int64_t q = rows[j][size_t(pc)] / p;
      if (rows[j][size_t(pc)] % p < 0) --q;  // floor division
      if (q != 0)
        for (int c = 0; c < 3; ++c) rows[j][size_t(c)] -= q * rows[i][size_t(c)];
    }
  }
}

}  // namespace

LatticeImage hnf_lattice(const std::vector<std::array<int64_t, 3>>& generators) {
  std::vector<std::array<int64_t, 3>> rows;
  LatticeImage out;
  for (const auto& g : generators) {
    if (g == std::array<int64_t, 3>{0, 0, 0}) continue;
    if (lattice_contains(out, g)) continue;
    rows.assign(1, g);
    for (int i = 0; i < out.rank; ++i) rows.push_back(out.basis[size_t(i)]);
    hnf_reduce(rows);
    out.rank = int(rows.size());
    out.basis = {};
    for (size_t i = 0; i < rows.size(); ++i) out.basis[i] = rows[i];
  }
  if (out.rank == 3) {
    int64_t det = 1;
    for (int i = 0; i < 3; ++i) {
      int pc = 0;
      while (pc < 3 && out.basis[size_t(i)][size_t(pc)] == 0) ++pc;
      det *= out.basis[size_t(i)][size_t(pc)];
    }
    out.index = det < 0 ? -det : det;
  } else {
    out.index = -1;
  }
  return out;
}

bool lattice_contains(const LatticeImage& l, const std::array<int64_t, 3>& v) {
  std::array<int64_t, 3> w = v;
  for (int i = 0; i < l.rank; ++i) {
    int pc = 0;
    while (pc < 3 && l.basis[size_t(i)][size_t(pc)] == 0) ++pc;
    if (pc == 3) continue;
    int64_t q = w[size_t(pc)] / l.basis[size_t(i)][size_t(pc)];
    for (int c = 0; c < 3; ++c) w[size_t(c)] -= q * l.basis[size_t(i)][size_t(c)];
    if (w[size_t(pc)] != 0) return false;
  }
  return w == std::array<int64_t, 3>{0, 0, 0};
}

int64_t cover_component_count(const LatticeImage& l, const std::array<int64_t, 3>& m) {
  std::vector<std::array<int64_t, 3>> gens;
  for (int i = 0; i < l.rank; ++i) gens.push_back(l.basis[size_t(i)]);
  gens.push_back({m[0], 0, 0});
  gens.push_back({0, m[1], 0});
  gens.push_back({0, 0, m[2]});
  LatticeImage sum = hnf_lattice(gens);
  if (sum.rank != 3) throw Error(Errc::Internal, "cover lattice is not full rank");
  return sum.index;
}

namespace {

struct BoundarySurface {
  bool is_surface = true;
  int64_t components = 0;
  std::vector<int64_t> genus;  // per component when classifiable, sorted
};

// Union-find over int32 with canonical min roots.
struct UF32 {
  std::vector<int32_t> p;
  explicit UF32(int64_t n) : p(size_t(n)) { std::iota(p.begin(), p.end(), 0); }
  int32_t find(int32_t x) {
    while (p[size_t(x)] != x) {
      p[size_t(x)] = p[size_t(p[size_t(x)])];
      x = p[size_t(x)];
    }
    return x;
  }
  void unite(int32_t a, int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) p[size_t(b)] = a;
    else p[size_t(a)] = b;
  }
};

BoundarySurface boundary_surface(const LabelField& f, const RegionComplex& rc) {
  BoundarySurface out;
  int64_t n2 = rc.cx.counts[2];
  UF32 uf(n2);

  struct EndGerm {
    int32_t cell2;
  };
  auto end_germ = [&](int64_t c1, bool far_end) -> int32_t {
    int64_t e = rc.cell1_edge[size_t(c1)];
    int s = rc.cell1_start[size_t(c1)];
    int len = rc.cell1_len[size_t(c1)];
    auto quads = f.edge_quadrants(e);
    auto efaces = f.edge_faces(e);
    int qi = far_end ? (s + len - 1) & 3 : s;
    int fi = far_end ? (s + len - 1) & 3 : (s + 3) & 3;
    int64_t face = efaces[size_t(fi)];
    auto sides = f.face_sides(face);
    int64_t side_voxel = quads[size_t(qi)];
    int32_t cell = sides[0] == side_voxel ? rc.face_lower_cell[size_t(face)]
                                          : rc.face_upper_cell[size_t(face)];
    if (cell < 0) throw Error(Errc::Internal, "boundary edge end without germ face");
    if (rc.cell2_side[size_t(cell)] < 0)
      throw Error(Errc::Internal, "boundary edge glued to an interior face");
    return cell;
  };

  for (int64_t c1 = 0; c1 < rc.cx.counts[1]; ++c1) {
    if (rc.cell1_len[size_t(c1)] == 4) continue;
    uf.unite(end_germ(c1, false), end_germ(c1, true));
  }

  // per-component cell counts
  std::vector<int64_t> fcount(size_t(n2), 0), ecount(size_t(n2), 0), vcount(size_t(n2), 0);
  for (int64_t c2 = 0; c2 < n2; ++c2)
    if (rc.cell2_side[size_t(c2)] >= 0) ++fcount[size_t(uf.find(int32_t(c2)))];
  for (int64_t c1 = 0; c1 < rc.cx.counts[1]; ++c1) {
    if (rc.cell1_len[size_t(c1)] == 4) continue;
    ++ecount[size_t(uf.find(end_germ(c1, false)))];
  }
  for (int64_t c0 = 0; c0 < rc.cx.counts[0]; ++c0) {
    uint8_t mask = rc.cell0_mask[size_t(c0)];
    if (mask == 0xFF) continue;
    if (!octant_component_is_disk(mask)) out.is_surface = false;
    // locate one incident boundary germ face
    int64_t vertex = rc.cell0_vertex[size_t(c0)];
    auto oct = f.vertex_octants(vertex);
    int32_t cell = -1;
    for (int s = 0; s < 8 && cell < 0; ++s) {
      if (!((mask >> s) & 1)) continue;
      for (int a = 0; a < 3 && cell < 0; ++a) {
        int t = s ^ (1 << a);
        if ((mask >> t) & 1) continue;
        int upper_oct = (s >> a) & 1 ? s : t;
        int64_t face = 3 * oct[size_t(upper_oct)] + a;
        auto sides = f.face_sides(face);
        int64_t side_voxel = oct[size_t(s)];
        int32_t cand = sides[0] == side_voxel ? rc.face_lower_cell[size_t(face)]
                                              : rc.face_upper_cell[size_t(face)];
        if (cand >= 0 && rc.cell2_side[size_t(cand)] >= 0) cell = cand;
      }
    }
    if (cell < 0) throw Error(Errc::Internal, "boundary vertex without incident germ");
    ++vcount[size_t(uf.find(cell))];
  }

  for (int64_t c2 = 0; c2 < n2; ++c2) {
    if (rc.cell2_side[size_t(c2)] < 0 || uf.find(int32_t(c2)) != c2) continue;
    ++out.components;
    int64_t chi = vcount[size_t(c2)] - ecount[size_t(c2)] + fcount[size_t(c2)];
    if ((2 - chi) % 2 != 0 || chi > 2) {
      out.is_surface = false;
      out.genus.push_back(-1);
    } else {
      out.genus.push_back((2 - chi) / 2);
    }
  }
  std::sort(out.genus.begin(), out.genus.end());
  return out;
}

RegionSummary region_summary_impl(const LabelField& field, Label label, bool require_connected) {
  if (label < 0 || label >= field.label_count())
    throw Error(Errc::LabelOutOfRange, "no such region label");
  int64_t comps = region_component_count(field, label);
  if (comps == 0) throw Error(Errc::Internal, "label not present");
  if (require_connected && comps != 1)
    throw Error(Errc::DisconnectedRegion,
                "region " + std::to_string(label) + " has " + std::to_string(comps) + " components");
  RegionComplex rc = build_region_complex(field, label);
  RegionSummary s;
  s.label = label;
  s.connected = comps == 1;
  s.voxels = rc.cx.counts[3];
  s.euler_closure = rc.cx.counts[0] - rc.cx.counts[1] + rc.cx.counts[2] - rc.cx.counts[3];
  HomologyResult h = homology_of_complex(rc.cx);
  s.h1_rank = h.betti[1];
  s.h2_rank = h.betti[2];
  s.h1_torsion_free = !h.torsion[1];
  BoundarySurface bs = boundary_surface(field, rc);
  s.boundary_is_surface = bs.is_surface;
  s.boundary_components = bs.components;
  s.boundary_genus = bs.genus;
  s.handlebody_cert = comps == 1 && bs.is_surface && bs.components == 1 &&
                      s.euler_closure == 1 - s.h1_rank && s.h1_torsion_free && s.h2_rank == 0;
  return s;
}

}  // namespace

RegionSummary region_summary(const LabelField& field, Label label) {
  return region_summary_impl(field, label, true);
}

RegionSummary region_summary_lenient(const LabelField& field, Label label) {
  return region_summary_impl(field, label, false);
}

SurfaceProfile surface_profile(const StructureCache& cache, const SectorSet& secs, Label a, Label b) {
  if (a == b) throw Error(Errc::PreconditionFailed, "surface profile needs distinct labels");
  SurfaceProfile out;
  out.a = std::min(a, b);
  out.b = std::max(a, b);
  for (const SectorComponent& comp : secs.components) {
    if (comp.a != out.a || comp.b != out.b) continue;
    SectorComplex sc = build_sector_complex(cache, comp);
    SurfaceComponentProfile p;
    p.euler = sc.cx.counts[0] - sc.cx.counts[1] + sc.cx.counts[2];
    // boundary circles: components of the boundary 1-complex
    UF32 uf(sc.cx.counts[0]);
    std::vector<char> touched(size_t(sc.cx.counts[0]), 0);
    for (int64_t c1 = 0; c1 < sc.cx.counts[1]; ++c1) {
      if (!sc.cell1_boundary[size_t(c1)]) continue;
      int32_t u = sc.cx.bnd[1].cell[size_t(2 * c1)];
      int32_t v = sc.cx.bnd[1].cell[size_t(2 * c1 + 1)];
      uf.unite(u, v);
      touched[size_t(u)] = touched[size_t(v)] = 1;
    }
    for (int64_t c0 = 0; c0 < sc.cx.counts[0]; ++c0)
      if (touched[size_t(c0)] && uf.find(int32_t(c0)) == c0) ++p.boundary_circles;
    int64_t num = 2 - p.euler - p.boundary_circles;
    if (num < 0 || num % 2 != 0)
      throw Error(Errc::Internal, "sector component fails surface classification");
    p.genus = num / 2;
    p.orientable = true;
    out.components.push_back(p);
  }
  std::sort(out.components.begin(), out.components.end());
  return out;
}

SurfaceProfile surface_profile(const LabelField& field, Label a, Label b) {
  StructureCache cache(field);
  SectorSet secs = sectors(cache);
  return surface_profile(cache, secs, a, b);
}

std::vector<int64_t> type_vector(const LabelField& field) {
  std::vector<int64_t> type;
  for (Label l = 0; l < field.label_count(); ++l) {
    RegionSummary s;
    try {
      s = region_summary(field, l);
    } catch (const Error& e) {
      if (e.code() == Errc::DisconnectedRegion)
        throw Error(Errc::CertificateFailed,
                    "region " + std::to_string(l) + " is disconnected");
      throw;
    }
    if (!s.handlebody_cert)
      throw Error(Errc::CertificateFailed,
                  "handlebody certificate failed for region " + std::to_string(l));
    type.push_back(s.h1_rank);
  }
  std::sort(type.begin(), type.end());
  return type;
}

LatticeImage h1_image(const LabelField& field, Label label) {
  int64_t n = field.dims().voxels();
  std::vector<int32_t> idx(size_t(n), -1);
  std::vector<int64_t> voxels;
  for (int64_t v = 0; v < n; ++v)
    if (field.label_at(v) == label) {
      idx[size_t(v)] = int32_t(voxels.size());
      voxels.push_back(v);
    }
  if (voxels.empty()) throw Error(Errc::LabelOutOfRange, "label not present");
  std::vector<std::array<int64_t, 3>> pos(voxels.size());
  std::vector<char> seen(voxels.size(), 0);
  std::vector<int32_t> stack;
  seen[0] = 1;
  pos[0] = {0, 0, 0};
  stack.push_back(0);
  while (!stack.empty()) {
    int32_t vi = stack.back();
    stack.pop_back();
    int64_t v = voxels[size_t(vi)];
    for (int a = 0; a < 3; ++a)
      for (int step : {+1, -1}) {
        int64_t w = field.neighbor(v, a, step);
        int32_t wi = idx[size_t(w)];
        if (wi < 0 || seen[size_t(wi)]) continue;
        seen[size_t(wi)] = 1;
        pos[size_t(wi)] = pos[size_t(vi)];
        pos[size_t(wi)][size_t(a)] += step;
        stack.push_back(wi);
      }
  }
  for (char s : seen)
    if (!s) throw Error(Errc::DisconnectedRegion, "region " + std::to_string(label) + " disconnected");
  std::vector<std::array<int64_t, 3>> gens;
  for (size_t vi = 0; vi < voxels.size(); ++vi) {
    int64_t v = voxels[vi];
    for (int a = 0; a < 3; ++a) {
      int64_t w = field.neighbor(v, a, +1);
      int32_t wi = idx[size_t(w)];
      if (wi < 0) continue;
      std::array<int64_t, 3> d = pos[vi];
      d[size_t(a)] += 1;
      for (int c = 0; c < 3; ++c) d[size_t(c)] -= pos[size_t(wi)][size_t(c)];
      if (d == std::array<int64_t, 3>{0, 0, 0}) continue;
      // voxel displacements of a cycle are whole periods; report in H1 units
      for (int c = 0; c < 3; ++c) {
        int32_t period = field.dims().axis(c);
        if (d[size_t(c)] % period != 0)
          throw Error(Errc::Internal, "cycle displacement is not a period multiple");
        d[size_t(c)] /= period;
      }
      gens.push_back(d);
    }
  }
  return hnf_lattice(gens);
}

SpineGraph spine(const LabelField& field, Label label) {
  RegionComplex rc = build_region_complex(field, label);
  int64_t euler_closure = rc.cx.counts[0] - rc.cx.counts[1] + rc.cx.counts[2] - rc.cx.counts[3];
  CollapseResult col = collapse(rc.cx);
  if (col.alive_counts[3] != 0 || col.alive_counts[2] != 0)
    throw Error(Errc::CollapseStuck, "cut closure did not collapse to a 1-complex (" +
                                         std::to_string(col.alive_counts[2]) +
                                         " faces remain); subdivide and retry");
  // surviving graph
  std::vector<int32_t> vid(size_t(rc.cx.counts[0]), -1);
  int32_t nv = 0;
  for (int64_t c0 = 0; c0 < rc.cx.counts[0]; ++c0)
    if (col.alive[0][size_t(c0)]) vid[size_t(c0)] = nv++;
  struct E {
    int32_t tail, head;
    std::array<int64_t, 3> d;
    bool alive = true;
  };
  std::vector<E> edges;
  for (int64_t c1 = 0; c1 < rc.cx.counts[1]; ++c1) {
    if (!col.alive[1][size_t(c1)]) continue;
    int32_t head = vid[size_t(rc.cx.bnd[1].cell[size_t(2 * c1)])];
    int32_t tail = vid[size_t(rc.cx.bnd[1].cell[size_t(2 * c1 + 1)])];
    int axis = int(rc.cell1_edge[size_t(c1)] % 3);
    std::array<int64_t, 3> d{0, 0, 0};
    d[size_t(axis)] = 1;
    edges.push_back({tail, head, d, true});
  }

  // suppress degree-2 vertices (loops stay)
  const size_t nvs = size_t(nv);
  std::vector<std::vector<int32_t>> inc(nvs);
  for (size_t i = 0; i < edges.size(); ++i) {
    inc[size_t(edges[i].tail)].push_back(int32_t(i));
    if (edges[i].head != edges[i].tail) inc[size_t(edges[i].head)].push_back(int32_t(i));
  }
  std::vector<char> vertex_alive(size_t(nv), 1);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int32_t v = 0; v < nv; ++v) {
      if (!vertex_alive[size_t(v)]) continue;
      std::vector<int32_t> live;
      for (int32_t ei : inc[size_t(v)])
        if (edges[size_t(ei)].alive) live.push_back(ei);
      if (live.size() != 2 || live[0] == live[1]) continue;
      E& e1 = edges[size_t(live[0])];
      E& e2 = edges[size_t(live[1])];
      if ((e1.tail == v && e1.head == v) || (e2.tail == v && e2.head == v)) continue;
      int32_t x = e1.tail == v ? e1.head : e1.tail;
      int32_t y = e2.tail == v ? e2.head : e2.tail;
      std::array<int64_t, 3> d{0, 0, 0};
      for (int c = 0; c < 3; ++c) {
        int64_t leg1 = e1.head == v ? e1.d[size_t(c)] : -e1.d[size_t(c)];  // x -> v
        int64_t leg2 = e2.tail == v ? e2.d[size_t(c)] : -e2.d[size_t(c)];  // v -> y
        d[size_t(c)] = leg1 + leg2;
      }
      e2.alive = false;
      e1.tail = x;
      e1.head = y;
      e1.d = d;
      vertex_alive[size_t(v)] = 0;
      inc[size_t(x)].push_back(live[0]);
      inc[size_t(y)].push_back(live[0]);
      changed = true;
    }
  }

  SpineGraph g;
  std::vector<int32_t> remap(size_t(nv), -1);
  {
    std::vector<Coord> anchors(nvs);
    int32_t next = 0;
    for (int64_t c0 = 0; c0 < rc.cx.counts[0]; ++c0) {
      if (!col.alive[0][size_t(c0)]) continue;
      anchors[size_t(next)] = field.voxel_coord(rc.cell0_vertex[size_t(c0)]);
      ++next;
    }
    for (int32_t v = 0; v < nv; ++v)
      if (vertex_alive[size_t(v)]) {
        remap[size_t(v)] = int32_t(g.vertices++);
        g.positions.push_back(anchors[size_t(v)]);
      }
  }
  for (const E& e : edges) {
    if (!e.alive) continue;
    g.edges.push_back({remap[size_t(e.tail)], remap[size_t(e.head)], e.d});
  }
  g.euler = g.vertices - int64_t(g.edges.size());
  if (g.euler != euler_closure)
    throw Error(Errc::Internal, "spine euler mismatch with cut closure");

  // cycle displacement lattice from a spanning forest
  std::vector<std::array<int64_t, 3>> pos(size_t(g.vertices), {0, 0, 0});
  std::vector<char> seen(size_t(g.vertices), 0);
  std::vector<std::vector<std::pair<int32_t, int8_t>>> adj(size_t(g.vertices));
  for (size_t i = 0; i < g.edges.size(); ++i) {
    adj[size_t(g.edges[i].tail)].push_back({int32_t(i), +1});
    adj[size_t(g.edges[i].head)].push_back({int32_t(i), -1});
  }
  std::vector<std::array<int64_t, 3>> gens;
  std::vector<char> edge_used(g.edges.size(), 0);
  for (int32_t root = 0; root < g.vertices; ++root) {
    if (seen[size_t(root)]) continue;
    seen[size_t(root)] = 1;
    std::vector<int32_t> stack{root};
    while (!stack.empty()) {
      int32_t v = stack.back();
      stack.pop_back();
      for (auto [ei, dir] : adj[size_t(v)]) {
        const SpineEdge& e = g.edges[size_t(ei)];
        int32_t w = dir > 0 ? e.head : e.tail;
        if (!seen[size_t(w)]) {
          seen[size_t(w)] = 1;
          edge_used[size_t(ei)] = 1;
          for (int c = 0; c < 3; ++c)
            pos[size_t(w)][size_t(c)] = pos[size_t(v)][size_t(c)] + dir * e.displacement[size_t(c)];
          stack.push_back(w);
        }
      }
    }
  }
  for (size_t i = 0; i < g.edges.size(); ++i) {
    if (edge_used[i]) continue;
    const SpineEdge& e = g.edges[i];
    std::array<int64_t, 3> d{};
    for (int c = 0; c < 3; ++c)
      d[size_t(c)] = pos[size_t(e.tail)][size_t(c)] + e.displacement[size_t(c)] -
                     pos[size_t(e.head)][size_t(c)];
    for (int c = 0; c < 3; ++c) {
      int32_t period = field.dims().axis(c);
      if (d[size_t(c)] % period != 0)
        throw Error(Errc::Internal, "spine cycle displacement is not a period multiple");
      d[size_t(c)] /= period;
    }
    gens.push_back(d);
  }
  g.cycle_lattice = hnf_lattice(gens);
  if (!(g.cycle_lattice == h1_image(field, label)))
    throw Error(Errc::Internal, "spine displacement lattice mismatch with h1 image");
  return g;
}

}  // namespace hdk
