#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hdk/moves.hpp"
#include "hdk/patterns.hpp"

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

// two parallel solid-torus columns in a sea: labels 1 and 2 wrap z
LabelField two_columns() {
  return from_fn({6, 6, 2}, 3, [](int x, int y, int) -> Label {
    if (x == 1 && y == 1) return 1;
    if (x == 4 && y == 1) return 2;
    return 0;
  });
}

// offset brick wall, two rows of three bricks: a valid type-(1,1,1,1,1,1)
// decomposition into six disk columns
LabelField six_bricks() {
  return from_fn({12, 12, 2}, 6, [](int x, int y, int) -> Label {
    if (y < 6) return Label(x / 4);               // A, B, C
    if (x >= 2 && x <= 5) return 3;               // D
    if (x >= 6 && x <= 9) return 4;               // E
    return 5;                                     // F wraps x
  });
}

}  // namespace

TEST_CASE("guide path parsing and validation") {
  GuidePath g = GuidePath::parse("1,2,3;1,2,4;1,3,4");
  CHECK(g.voxels.size() == 3);
  CHECK(g.voxels[1].z == 4);
  CHECK_THROWS_AS(GuidePath::parse("1,2"), Error);
  LabelField f = two_columns();
  CHECK_NOTHROW(g.validate(f));
  GuidePath bad = GuidePath::parse("0,0,0;2,0,0");
  CHECK_THROWS_AS(bad.validate(f), Error);
  GuidePath dup = GuidePath::parse("0,0,0;1,0,0;0,0,0");
  CHECK_THROWS_AS(dup.validate(f), Error);
}

TEST_CASE("raw relabel and its failure modes") {
  LabelField f = two_columns();
  // identity relabel
  MoveResult r = relabel(f, {{1, 1, 0}}, 1);
  CHECK(r.field == f);
  CHECK(r.record.changes.empty());
  // dent the sea
  MoveResult r2 = relabel(f, {{2, 1, 0}}, 1);
  CHECK(r2.field.label(2, 1, 0) == 1);
  CHECK(r2.record.changes.size() == 1);
  // emptying a region is refused
  std::vector<Coord> column1{{1, 1, 0}, {1, 1, 1}};
  CHECK_THROWS_AS(relabel(f, column1, 0), Error);
  CHECK_THROWS_AS(relabel(f, {{0, 0, 0}}, 9), Error);
}

TEST_CASE("domain connection merges two solid tori into a genus-2 region") {
  LabelField f = six_bricks();
  CHECK(type_vector(f) == std::vector<int64_t>(6, 1));
  // guide from inside brick A through brick B, ending next to brick E
  GuidePath g = GuidePath::parse("3,5,0;4,5,0;5,5,0;6,5,0");
  MoveResult r = domain_connection(f, 0, 4, g);
  CHECK(r.field.label_count() == 5);
  CHECK(r.record.merged_from == 4);
  CHECK(r.record.merged_into == 0);
  auto t = type_vector(r.field);
  CHECK(t == std::vector<int64_t>{1, 1, 1, 1, 2});
  CHECK(r.record.cert.validity_after.overall);
}

TEST_CASE("colored types follow domain connections") {
  LabelField f = six_bricks();
  // color bricks A and E alike, everything else distinct
  Coloring coloring{{0, 1, 2, 3, 0, 4}, 5};
  CHECK(check_coloring(f, coloring).empty());
  ColoredType before = colored_type(f, coloring);
  CHECK(before.genus_by_color[0] == std::vector<int64_t>{1, 1});
  // concatenation of the colored type is the type vector
  std::vector<int64_t> concat;
  for (const auto& g : before.genus_by_color) concat.insert(concat.end(), g.begin(), g.end());
  std::sort(concat.begin(), concat.end());
  CHECK(concat == type_vector(f));
  // connect the same-colored bricks: their sequence becomes the sum
  MoveResult r = domain_connection(f, 0, 4, GuidePath::parse("3,5,0;4,5,0;5,5,0;6,5,0"));
  Coloring after_coloring{{0, 1, 2, 3, 4}, 5};
  ColoredType after = colored_type(r.field, after_coloring);
  CHECK(after.genus_by_color[0] == std::vector<int64_t>{2});
}

TEST_CASE("domain connection preconditions") {
  LabelField f = six_bricks();
  // adjacent regions are rejected outright
  GuidePath adj = GuidePath::parse("3,3,0;4,3,0");
  CHECK_THROWS_AS(domain_connection(f, 0, 1, adj), Error);
  // guide crossing two sectors on its way
  GuidePath two = GuidePath::parse("2,5,0;2,6,0;3,6,0;4,6,0;4,5,0;5,5,0;6,5,0");
  CHECK_THROWS_AS(domain_connection(f, 0, 4, two), Error);
  // guide not reaching region 4
  GuidePath shortg = GuidePath::parse("3,5,0;4,5,0");
  CHECK_THROWS_AS(domain_connection(f, 0, 4, shortg), Error);
  // untouched on failure: the original field still has 6 labels
  CHECK(f.label_count() == 6);
}

TEST_CASE("script parsing") {
  MoveScript s = MoveScript::parse_text(
      "# comment\n"
      "subdivide 2\n"
      "stab1 i=0 path=1,1,0;2,1,0\n"
      "destab kind=1 restore=2 tube=1,1,0;2,1,0\n"
      "move02 i=0 l=2 path=3,3,0\n"
      "move20 disk=0,2:0\n"
      "expect type=(1,1,2)\n"
      "expect pvertices=2\n"
      "expect pair=(0,1) components=3\n");
  REQUIRE(s.steps.size() == 8);
  CHECK(s.steps[0].op == ScriptStep::Op::Subdivide);
  CHECK(s.steps[1].op == ScriptStep::Op::Stab1);
  CHECK(s.steps[2].op == ScriptStep::Op::Destab);
  CHECK(s.steps[2].destab_kind == DestabKind::Type1);
  CHECK(s.steps[4].op == ScriptStep::Op::Move20);
  CHECK(s.steps[4].component_index == 0);
  CHECK(s.steps[5].expect_type == std::vector<int64_t>{1, 1, 2});
  CHECK(s.steps[7].a == 0);
  CHECK(s.steps[7].expect_count == 3);
  CHECK_THROWS_AS(MoveScript::parse_text("frobnicate x=1\n"), Error);
}

TEST_CASE("empty script is the identity") {
  LabelField f = two_columns();
  ScriptOutcome out = run_script(f, MoveScript{});
  CHECK(out.field == f);
  CHECK(out.ledger.empty());
}

TEST_CASE("expect failures abort with the step index") {
  LabelField f = two_columns();
  MoveScript s = MoveScript::parse_text("expect pvertices=99\n");
  try {
    run_script(f, s);
    FAIL("expected StepFailed");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::StepFailed);
    CHECK(std::string(e.what()).find("step 0") != std::string::npos);
  }
}

TEST_CASE("stabilization and destabilization round trips") {
  LabelField h = generate("honeycomb");
  // type-1 bridge and its inverse
  GuidePath bridge = GuidePath::parse("4,7,0;4,8,0;4,9,0;4,10,0;4,11,0");
  MoveResult s1 = stab_type1(h, 2, bridge);
  CHECK(type_vector(s1.field) == std::vector<int64_t>{1, 1, 2});
  CHECK(s1.record.cert.validity_after.overall);
  // certification soundness: the recorded types match recomputation
  CHECK(s1.record.cert.type_before == type_vector(h));
  CHECK(s1.record.cert.type_after == type_vector(s1.field));
  MoveResult d1 = destab(s1.field, DestabKind::Type1, bridge.voxels, 1);
  CHECK(d1.field == h);

  // Heegaard-style type-0 drill and its inverse
  GuidePath u = GuidePath::parse("3,11,0;2,11,0;2,10,0;2,9,0;2,8,0;3,8,0");
  MoveResult s0 = stab_type0(h, 0, 1, u);
  CHECK(type_vector(s0.field) == std::vector<int64_t>{1, 2, 2});
  MoveResult d0 = destab(s0.field, DestabKind::Type0, u.voxels, 0);
  CHECK(d0.field == h);

  // type-2 drill creates a disk between the far pair
  GuidePath v = GuidePath::parse("3,11,0;2,11,0;2,10,0;2,9,0;2,8,0");
  MoveResult s2 = stab_type2(h, 0, 1, 2, v);
  SurfaceProfile f12 = surface_profile(s2.field, 1, 2);
  int64_t disks = 0;
  for (const auto& c : f12.components) disks += c.euler == 1 && c.boundary_circles == 1;
  CHECK(disks == 1);
  MoveResult d2 = destab(s2.field, DestabKind::Type2, v.voxels, 0);
  CHECK(d2.field == h);
}

TEST_CASE("stabilization preconditions") {
  LabelField h = generate("honeycomb");
  // stab0 endpoint away from the (i,j) sector
  CHECK_THROWS_AS(stab_type0(h, 0, 1, GuidePath::parse("1,5,0;1,6,0")), Error);
  // stab2 must end on the (i,k) sector, not back on (i,j)
  try {
    stab_type2(h, 0, 1, 2, GuidePath::parse("3,11,0;3,10,0;3,9,0"));
    FAIL("expected PreconditionFailed");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::PreconditionFailed);
  }
  // stab1 guide may not enter region i
  CHECK_THROWS_AS(stab_type1(h, 2, GuidePath::parse("5,2,0")), Error);
}

TEST_CASE("appendix composite equals the direct type-0 stabilization") {
  LabelField h = generate("honeycomb");
  ScriptOutcome direct = run_script(h, MoveScript::parse_text(bundled_script("appendixA_direct")));
  ScriptOutcome comp = run_script(h, MoveScript::parse_text(bundled_script("appendixA_composite")));
  CHECK(direct.field == comp.field);
}

TEST_CASE("0-2 move on the brick field and its inverse") {
  LabelField bricks = generate("bricks");
  GuidePath finger = GuidePath::parse("3,6,0;4,6,0;5,6,0");
  MoveResult r = move_02(bricks, 0, 4, finger);
  CHECK(r.record.cert.p_vertices_before == 0);
  CHECK(r.record.cert.p_vertices_after == 2);
  CHECK(r.record.cert.type_after == r.record.cert.type_before);
  // a second disjoint finger doubles the vertex count
  MoveResult r2 = move_02(r.field, 0, 4, GuidePath::parse("3,11,0;4,11,0;5,11,0"));
  CHECK(r2.record.cert.p_vertices_after == 4);
  // undo restores bit-exactly through the ledger
  std::vector<MoveRecord> ledger{r.record};
  StructureCache cache(r.field);
  SectorSet secs = sectors(cache);
  int64_t index = 0, found = -1;
  for (const auto& comp : secs.components) {
    if (comp.a != 0 || comp.b != 4) continue;
    SectorComplex sc = build_sector_complex(cache, comp);
    if (sc.cx.counts[0] - sc.cx.counts[1] + sc.cx.counts[2] == 1) found = index;
    ++index;
  }
  REQUIRE(found >= 0);
  MoveResult undo = move_20(r.field, 0, 4, found, ledger);
  CHECK(undo.field == bricks);
}

TEST_CASE("0-2 move failure modes") {
  LabelField bricks = generate("bricks");
  // finger stopping short of region l: no disk appears
  try {
    move_02(bricks, 0, 4, GuidePath::parse("3,6,0;4,6,0"));
    FAIL("expected CertificationFailed");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::CertificationFailed);
  }
  // undoing a non-disk component is refused
  LabelField h = generate("honeycomb");
  std::vector<MoveRecord> empty_ledger;
  CHECK_THROWS_AS(move_20(h, 0, 1, 0, empty_ledger), Error);  // annulus, NotADisk
  // a 2-3 move needs a singular edge joining two vertices; the honeycomb has
  // only vertex-free triple circles
  try {
    move_23(h, 0, GuidePath::parse("4,7,0"));
    FAIL("expected PreconditionFailed");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::PreconditionFailed);
  }
}

TEST_CASE("destab preconditions") {
  LabelField bricks = generate("bricks");
  // a tube that would slice brick A in half
  std::vector<Coord> cut;
  for (int x = 0; x <= 3; ++x)
    for (int z = 0; z < 2; ++z) cut.push_back({x, 3, z});
  CHECK_THROWS_AS(destab(bricks, DestabKind::Type1, cut, 1), Error);
  CHECK(bricks == generate("bricks"));  // untouched
}

TEST_CASE("thin guides auto-subdivide and still certify") {
  LabelField h = generate("honeycomb");  // nz = 2: any z-step is a wrap conflict
  GuidePath thin = GuidePath::parse("4,7,0;4,7,1;4,8,1;4,9,1;4,10,1;4,11,1");
  MoveResult r = stab_type1(h, 2, thin);
  CHECK(r.record.subdivide_factor == 2);
  CHECK(r.field.dims() == GridDims{24, 24, 4});
  CHECK(type_vector(r.field) == std::vector<int64_t>{1, 1, 2});
}
