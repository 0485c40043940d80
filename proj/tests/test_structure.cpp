#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hdk/structure.hpp"

using namespace hdk;

namespace {

LabelField from_fn(GridDims d, int k, Label (*fn)(int, int, int)) {
  std::vector<Label> l(size_t(d.voxels()));
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x)
        l[size_t(x) + size_t(d.nx) * (size_t(y) + size_t(d.ny) * size_t(z))] = fn(x, y, z);
  return LabelField::create(d, l, k);
}

LabelField slabs() {
  return from_fn({2, 2, 2}, 2, [](int x, int, int) { return Label(x % 2); });
}

LabelField parity() {
  return from_fn({2, 2, 2}, 2, [](int x, int y, int z) { return Label((x + y + z) % 2); });
}

// four-label octant configuration with a tetrahedral link at vertex (1,1,1)
LabelField tetra_corner() {
  return from_fn({2, 2, 2}, 4, [](int x, int y, int z) -> Label {
    if (x == 1 && y == 1) return 0;           // A: (+,+,+), (+,+,-)
    if (y == 0 && z == 1) return 1;           // B: (+,-,+), (-,-,+)
    if (x == 0 && y == 1) return 2;           // C: (-,+,+), (-,+,-)
    return 3;                                 // D: (+,-,-), (-,-,-)
  });
}

}  // namespace

TEST_CASE("face classification") {
  LabelField c = from_fn({2, 2, 2}, 1, [](int, int, int) { return Label(0); });
  for (int64_t fi = 0; fi < 24; ++fi) CHECK(classify_face(c, fi).cls == FaceClass::Interior);
  LabelField s = slabs();
  int64_t face = 3 * s.voxel_index(1, 0, 0) + 0;  // between x=0 and x=1
  FaceInfo info = classify_face(s, face);
  CHECK(info.cls == FaceClass::Sector);
  CHECK(info.a == 0);
  CHECK(info.b == 1);
}

TEST_CASE("edge classification covers the four local models") {
  LabelField c = from_fn({2, 2, 2}, 1, [](int, int, int) { return Label(0); });
  CHECK(classify_edge(c, 0) == EdgeClass::Interior);
  // AABB around every x-normal-adjacent edge of the slab field
  LabelField s = slabs();
  int64_t ez = 3 * s.voxel_index(1, 1, 1) + 2;  // z-edge, quadrants differ in x
  CHECK(classify_edge(s, ez) == EdgeClass::Surface);
  // ABAB checkerboard: every edge of the parity field is a cross
  LabelField p = parity();
  for (int64_t e = 0; e < 24; ++e) CHECK(classify_edge(p, e) == EdgeClass::Cross);
  // AABC: three labels, repeat adjacent
  LabelField t = tetra_corner();
  int64_t ex = 3 * t.voxel_index(1, 1, 1) + 0;  // quadrants D,A,A,B
  CHECK(classify_edge(t, ex) == EdgeClass::Triple);
}

TEST_CASE("vertex classification matches the link-graph models") {
  LabelField c = from_fn({2, 2, 2}, 1, [](int, int, int) { return Label(0); });
  CHECK(classify_vertex(c, 0) == VertexClass::Interior);
  LabelField zsplit = from_fn({2, 2, 2}, 2, [](int, int, int z) { return Label(z % 2); });
  for (int64_t v = 0; v < 8; ++v) CHECK(classify_vertex(zsplit, v) == VertexClass::Surface);

  LabelField t = tetra_corner();
  int64_t v = t.voxel_index(1, 1, 1);
  CHECK(classify_vertex(t, v) == VertexClass::Tetrahedral);
  // oracle: the six incident edge germs are 4 triples and 2 surfaces
  int triples = 0, surfaces = 0;
  for (int a = 0; a < 3; ++a) {
    for (int64_t e : {3 * v + a, 3 * t.neighbor(v, a, -1) + a}) {
      EdgeClass ec = classify_edge(t, e);
      triples += ec == EdgeClass::Triple;
      surfaces += ec == EdgeClass::Surface;
    }
  }
  CHECK(triples == 4);
  CHECK(surfaces == 2);

  // parity octants: every edge germ is a cross, so the vertex is not simple
  LabelField p = parity();
  for (int64_t pv = 0; pv < 8; ++pv) CHECK(classify_vertex(p, pv) == VertexClass::NonSimple);
}

TEST_CASE("slab sectors are two parallel tori") {
  LabelField s = slabs();
  StructureCache cache(s);
  SectorSet ss = sectors(cache);
  REQUIRE(ss.components.size() == 2);
  for (const auto& comp : ss.components) {
    CHECK(comp.a == 0);
    CHECK(comp.b == 1);
    CHECK(comp.faces.size() == 4);
  }
  SingularGraph g = singular_graph(cache);
  CHECK(g.triple_edges.empty());
  CHECK(g.component_count == 0);
  CHECK(g.circle_count == 0);
  CHECK(g.p_vertices.empty());
}

TEST_CASE("sector side constancy within a component") {
  LabelField t = tetra_corner();
  StructureCache cache(t);
  SectorSet ss = sectors(cache);
  for (const auto& comp : ss.components)
    for (int64_t fid : comp.faces) {
      const FaceInfo& fi = cache.faces()[size_t(fid)];
      CHECK(fi.a == comp.a);
      CHECK(fi.b == comp.b);
    }
}

TEST_CASE("germ accounting at surface and triple edges") {
  LabelField t = tetra_corner();
  StructureCache cache(t);
  for (int64_t e = 0; e < 24; ++e) {
    int sector_germs = 0;
    for (int64_t fid : t.edge_faces(e))
      sector_germs += cache.faces()[size_t(fid)].cls == FaceClass::Sector;
    EdgeClass ec = cache.edges()[size_t(e)];
    if (ec == EdgeClass::Surface) CHECK(sector_germs == 2);
    if (ec == EdgeClass::Triple) CHECK(sector_germs == 3);
    if (ec == EdgeClass::Interior) CHECK(sector_germs == 0);
  }
}

TEST_CASE("is_simple reports offenders") {
  LabelField p = parity();
  StructureCache cache(p);
  SimplicityReport rep = is_simple(cache);
  CHECK_FALSE(rep.simple);
  CHECK(rep.cross_edges.size() == 24);
  CHECK_THROWS_AS(singular_graph(cache), Error);
  SingularGraph lenient = singular_graph(cache, true);
  CHECK(lenient.triple_edges.empty());
}

TEST_CASE("validate flags") {
  // slabs: regions fine but the partition has two components
  DecompositionValidity v = validate(slabs());
  CHECK(v.regions_connected);
  CHECK_FALSE(v.partition_connected);
  CHECK(v.simple);
  CHECK(v.proper);
  CHECK_FALSE(v.overall);

  // label 0 split into two disjoint slabs
  LabelField split = from_fn({4, 2, 2}, 2, [](int x, int, int) { return Label(x % 2); });
  DecompositionValidity vs = validate(split);
  CHECK_FALSE(vs.regions_connected);
  CHECK_FALSE(vs.proper);

  // checkerboard-like field: simple fails, cross edges reported
  DecompositionValidity vp = validate(parity());
  CHECK_FALSE(vp.simple);
}

TEST_CASE("classification totality") {
  for (const LabelField& f : {slabs(), parity(), tetra_corner()}) {
    StructureCache cache(f);
    CHECK(cache.faces().size() == size_t(3 * f.dims().voxels()));
    CHECK(cache.edges().size() == size_t(3 * f.dims().voxels()));
    CHECK(cache.vertices().size() == size_t(f.dims().voxels()));
  }
}
