// Acceptance suite: reproduces every bundled worked example at desk scale and
// prints one pass/fail line per criterion.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <functional>
#include <random>
#include <sstream>

#include "hdk/report.hpp"

using namespace hdk;

namespace {

int failures = 0;

void criterion(int number, const std::string& name, double limit_seconds,
               const std::function<void()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  std::string error;
  try {
    body();
  } catch (const Error& e) {
    error = std::string("[") + errc_name(e.code()) + "] " + e.what();
  } catch (const std::exception& e) {
    error = e.what();
  }
  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (error.empty() && elapsed > limit_seconds)
    error = "runtime " + std::to_string(elapsed) + "s exceeds " + std::to_string(limit_seconds) + "s";
  if (error.empty()) {
    printf("PASS criterion %d: %s (%.2fs)\n", number, name.c_str(), elapsed);
  } else {
    printf("FAIL criterion %d: %s (%.2fs): %s\n", number, name.c_str(), elapsed, error.c_str());
    ++failures;
  }
  fflush(stdout);
}

void require(bool cond, const std::string& what) {
  if (!cond) throw std::runtime_error("check failed: " + what);
}

template <typename T>
void require_eq(const T& got, const T& want, const std::string& what) {
  if (!(got == want)) {
    std::ostringstream os;
    os << what << " mismatch";
    throw std::runtime_error(os.str());
  }
}

SurfaceComponentProfile comp(int64_t euler, int64_t boundary) {
  SurfaceComponentProfile c;
  c.euler = euler;
  c.boundary_circles = boundary;
  c.genus = (2 - euler - boundary) / 2;
  c.orientable = true;
  return c;
}

// ---- criterion bodies ------------------------------------------------------

void c1_honeycomb() {
  LabelField h = generate("honeycomb", GridDims{12, 12, 2});
  DecompositionReport rep = build_report(h);
  require(rep.type.has_value(), "honeycomb type defined");
  require_eq(*rep.type, std::vector<int64_t>{1, 1, 1}, "type vector");
  require_eq(rep.pairs.size(), size_t(3), "pair count");
  for (const SurfaceProfile& p : rep.pairs) {
    require_eq(p.components.size(), size_t(3), "components per pair");
    for (const auto& c : p.components) {
      require_eq(c.euler, int64_t(0), "annulus euler");
      require_eq(c.boundary_circles, int64_t(2), "annulus boundary");
      require_eq(c.genus, int64_t(0), "annulus genus");
    }
  }
  require_eq(rep.p_vertices, int64_t(0), "p vertices");
  require_eq(rep.triple_circles, int64_t(6), "triple circles");
  require(rep.validity.overall, "validity");
}

void c2_prop46() {
  LabelField t3 = generate("t003");
  require_eq(type_vector(t3), std::vector<int64_t>{0, 0, 3}, "t003 type");
  SurfaceProfile f01 = surface_profile(t3, 0, 1);
  require_eq(f01.components.size(), size_t(4), "t003 ball-ball disks");
  for (const auto& c : f01.components) {
    require_eq(c.euler, int64_t(1), "disk euler");
    require_eq(c.boundary_circles, int64_t(1), "disk boundary");
  }
  LabelField t2 = generate("t022");
  require_eq(type_vector(t2), std::vector<int64_t>{0, 2, 2}, "t022 type");
}

void c3_srs3() {
  LabelField f = generate("srs3", GridDims{24, 24, 24});
  DecompositionReport rep = build_report(f);
  require(rep.type.has_value(), "srs3 certificates");
  require_eq(*rep.type, std::vector<int64_t>{5, 5, 5}, "srs3 type");
  for (const RegionSummary& s : rep.regions) {
    require(s.handlebody_cert, "handlebody certificate");
    require_eq(s.boundary_components, int64_t(1), "connected boundary");
    require_eq(int64_t(2 - 2 * s.boundary_genus[0]), int64_t(-8), "boundary euler -8");
  }
}

void c4_destab_replay() {
  LabelField h = generate("honeycomb");
  std::string golden = report_invariants_json(build_report(h));
  ScriptOutcome s222 = run_script(h, MoveScript::parse_text(bundled_script("make_222")));
  require_eq(type_vector(s222.field), std::vector<int64_t>{2, 2, 2}, "type (2,2,2)");
  // the script's own expect clauses check (2,2,1) -> (2,1,1) -> (1,1,1)
  ScriptOutcome back =
      run_script(s222.field, MoveScript::parse_text(bundled_script("3srs_to_honeycomb")));
  for (const MoveRecord& rec : back.ledger)
    if (rec.kind == MoveKind::Destab1) {
      int64_t before = 0, after = 0;
      for (int64_t g : rec.cert.type_before) before += g;
      for (int64_t g : rec.cert.type_after) after += g;
      require_eq(after, before - 1, "single genus -1 per destab");
    }
  require(back.field == h, "field restored bit-exactly");
  require_eq(report_invariants_json(build_report(back.field)), golden, "golden report bytes");
}

void c5_ex222_separation() {
  LabelField a = generate("ex222a");
  LabelField b = generate("ex222b");
  require_eq(type_vector(a), std::vector<int64_t>{2, 2, 2}, "ex222a type");
  require_eq(type_vector(b), std::vector<int64_t>{2, 2, 2}, "ex222b type");
  // (a): every pair is a 2-holed torus plus a disk
  for (Label x = 0; x < 3; ++x)
    for (Label y = Label(x + 1); y < 3; ++y) {
      SurfaceProfile p = surface_profile(a, x, y);
      require_eq(p.components, std::vector<SurfaceComponentProfile>{comp(-2, 2), comp(1, 1)},
                 "ex222a pair profile");
    }
  // (b): pair (1,2) is a 1-holed torus plus an annulus; the region-0 walls
  // are 3-holed spheres
  require_eq(surface_profile(b, 1, 2).components,
             std::vector<SurfaceComponentProfile>{comp(-1, 1), comp(0, 2)}, "ex222b F12");
  require_eq(surface_profile(b, 0, 1).components,
             std::vector<SurfaceComponentProfile>{comp(-1, 3)}, "ex222b F01");
  require_eq(surface_profile(b, 0, 2).components,
             std::vector<SurfaceComponentProfile>{comp(-1, 3)}, "ex222b F02");
  std::vector<std::string> diff = diff_reports(build_report(a), build_report(b));
  require(!diff.empty(), "reports differ");
}

void c6_appendix_composite() {
  LabelField h = generate("honeycomb");
  ScriptOutcome direct = run_script(h, MoveScript::parse_text(bundled_script("appendixA_direct")));
  ScriptOutcome composite =
      run_script(h, MoveScript::parse_text(bundled_script("appendixA_composite")));
  require(direct.field == composite.field, "same field");
  require_eq(report_invariants_json(build_report(direct.field)),
             report_invariants_json(build_report(composite.field)), "byte-equal reports");
}

std::vector<std::pair<std::pair<Label, Label>, GuidePath>> move02_sites(const LabelField& f) {
  std::vector<std::pair<std::pair<Label, Label>, GuidePath>> sites;
  const GridDims& d = f.dims();
  auto adj_label = [&](int x, int y, int dx, int dy) { return f.label(x + dx, y + dy, 0); };
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y)
      for (auto [dx, dy] : {std::pair<int, int>{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
        Label j = f.label(x, y, 0);
        Coord c2{LabelField::wrap(x + dx, d.nx), LabelField::wrap(y + dy, d.ny), 0};
        Coord c3{LabelField::wrap(x + 2 * dx, d.nx), LabelField::wrap(y + 2 * dy, d.ny), 0};
        if (f.label(c2.x, c2.y, 0) != j || f.label(c3.x, c3.y, 0) != j) continue;
        // start next to i, tip next to l, both different from j
        for (auto [sx, sy] : {std::pair<int, int>{dy, dx}, {-dy, -dx}}) {
          Label i = adj_label(x, y, sx, sy);
          Label l = adj_label(c3.x, c3.y, dx, dy);
          if (i == j || l == j || i == l) continue;
          GuidePath g;
          g.voxels = {Coord{x, y, 0}, c2, c3};
          sites.push_back({{i, l}, g});
        }
      }
  return sites;
}

void c7_move_deltas() {
  LabelField bricks = generate("bricks");
  // collect certified sites once
  std::vector<std::pair<std::pair<Label, Label>, GuidePath>> pool;
  for (auto& site : move02_sites(bricks)) {
    try {
      MoveResult r = move_02(bricks, site.first.first, site.first.second, site.second);
      if (r.record.cert.p_vertices_after == r.record.cert.p_vertices_before + 2)
        pool.push_back(site);
    } catch (const Error&) {
    }
    if (pool.size() >= 24) break;
  }
  require(pool.size() >= 8, "enough certified 0-2 sites");
  std::mt19937 rng(42);
  int64_t applications = 0;
  for (int iter = 0; iter < 1000; ++iter) {
    auto& site = pool[rng() % pool.size()];
    MoveResult r = move_02(bricks, site.first.first, site.first.second, site.second);
    const DeltaCert& cert = r.record.cert;
    require_eq(cert.p_vertices_after, cert.p_vertices_before + 2, "p vertices +2");
    require_eq(cert.type_after, cert.type_before, "type unchanged");
    require(cert.validity_after.overall, "validity preserved");
    ++applications;
    if (iter % 25 == 0) {  // round trips on a sample
      Label a = std::min(site.first.first, site.first.second);
      Label b = std::max(site.first.first, site.first.second);
      StructureCache cache(r.field);
      SectorSet secs = sectors(cache);
      int64_t index = 0, found = -1;
      for (auto& compn : secs.components) {
        if (compn.a != a || compn.b != b) continue;
        SectorComplex sc = build_sector_complex(cache, compn);
        if (sc.cx.counts[0] - sc.cx.counts[1] + sc.cx.counts[2] == 1) found = index;
        ++index;
      }
      require(found >= 0, "created disk located");
      std::vector<MoveRecord> ledger{r.record};
      MoveResult undo = move_20(r.field, a, b, found, ledger);
      require(undo.field == bricks, "move02/move20 round trip bit-exact");
    }
  }
  require_eq(applications, int64_t(1000), "1000 applications");

  // stabilization/destabilization round trips on the honeycomb
  LabelField h = generate("honeycomb");
  {
    GuidePath u = GuidePath::parse("3,11,0;2,11,0;2,10,0;2,9,0;2,8,0;3,8,0");
    MoveResult s0 = stab_type0(h, 0, 1, u);
    MoveResult d0 = destab(s0.field, DestabKind::Type0, u.voxels, 0);
    require(d0.field == h, "stab0/destab0 round trip");
  }
  {
    GuidePath g = GuidePath::parse("4,7,0;4,8,0;4,9,0;4,10,0;4,11,0");
    MoveResult s1 = stab_type1(h, 2, g);
    MoveResult d1 = destab(s1.field, DestabKind::Type1, g.voxels, 1);
    require(d1.field == h, "stab1/destab1 round trip");
  }
  {
    GuidePath g = GuidePath::parse("3,11,0;2,11,0;2,10,0;2,9,0;2,8,0");
    MoveResult s2 = stab_type2(h, 0, 1, 2, g);
    MoveResult d2 = destab(s2.field, DestabKind::Type2, g.voxels, 0);
    require(d2.field == h, "stab2/destab2 round trip");
  }
}

void c8_polycontinuity() {
  LabelField p = generate("schwarz_p");
  ContinuityVerdict vp = classify_continuity(p);
  require(vp.kind == ContinuityVerdict::Kind::NContinuous, "schwarz_p polycontinuous");
  require_eq(vp.n, int64_t(2), "schwarz_p bicontinuous");
  for (Label l = 0; l < 2; ++l) {
    RegionSummary s = region_summary(p, l);
    require(s.handlebody_cert && s.h1_rank == 3, "schwarz_p genus 3");
  }
  LabelField srs = generate("srs3");
  ContinuityVerdict vs = classify_continuity(srs);
  require(vs.kind == ContinuityVerdict::Kind::NContinuous, "srs3 polycontinuous");
  require_eq(vs.n, int64_t(3), "srs3 tricontinuous");
  LabelField h = generate("honeycomb");
  ContinuityVerdict vh = classify_continuity(h);
  require(vh.kind == ContinuityVerdict::Kind::InfinitelyManyDomains, "honeycomb verdict");
  for (Label l = 0; l < 3; ++l) require_eq(h1_image(h, l).rank, 1, "honeycomb rank-1 image");
  LabelField a = generate("ex1111a");
  LabelField b = generate("ex1111b");
  bool a_has_rank2 = false;
  for (Label l = 0; l < 4; ++l) a_has_rank2 |= h1_image(a, l).rank == 2;
  require(a_has_rank2, "ex1111a has a rank-2 region");
  for (Label l = 0; l < 4; ++l) require_eq(h1_image(b, l).rank, 3, "ex1111b all rank 3");
}

void c9_property_suites() {
  std::vector<std::string> names;
  for (const GeneratorInfo& g : generator_catalog()) names.push_back(g.name);
  for (const std::string& name : names) {
    LabelField f = generate(name);
    // global Euler balance on the torus complex
    int64_t chi = 0;
    for (int dim = 0; dim <= 3; ++dim)
      chi += (dim % 2 == 0 ? 1 : -1) * cell_count(f.dims(), dim);
    require_eq(chi, int64_t(0), "torus euler balance");
    // cut-closure cell counts consistent with local multiplicities
    {
      StructureCache cache(f);
      int64_t n = f.dims().voxels();
      int64_t sum_v3 = 0, sum_v2 = 0;
      for (Label l = 0; l < f.label_count(); ++l) {
        RegionComplex rc = build_region_complex(f, l);
        sum_v3 += rc.cx.counts[3];
        sum_v2 += rc.cx.counts[2];
      }
      require_eq(sum_v3, n, "regions cover the voxels once");
      require_eq(sum_v2, 3 * n + cache.sector_face_count(), "face germs counted per side");
    }
    // genus double computation whenever a certificate passes
    DecompositionReport base = build_report(f);
    for (const RegionSummary& s : base.regions)
      if (s.handlebody_cert) {
        require_eq(s.euler_closure, 1 - s.h1_rank, "euler = 1 - h1");
        require_eq(s.boundary_genus, std::vector<int64_t>{s.h1_rank}, "boundary genus = h1");
      }
    // subdivision invariance of the full invariant report
    std::string golden = report_invariants_json(base);
    for (int s : {2, 3}) {
      DecompositionReport fine = build_report(subdivide(f, s));
      require_eq(report_invariants_json(fine), golden, name + " subdivision x" + std::to_string(s));
    }
  }
  // failed certifications leave the input untouched
  LabelField h = generate("honeycomb");
  LabelField copy = h;
  try {
    stab_type1(h, 0, GuidePath::parse("5,9,0"));  // interior cell, no i-contact
    throw std::runtime_error("expected a failure");
  } catch (const Error&) {
  }
  require(h == copy, "failed move leaves the field untouched");
}

// ---- CLI pipeline checks ----------------------------------------------------

int run_cli(const std::string& args) {
#ifdef HDK_BINARY_PATH
  std::string cmd = std::string(HDK_BINARY_PATH) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
#else
  (void)args;
  return -1;
#endif
}

void cli_pipeline() {
#ifdef HDK_BINARY_PATH
  std::string dir = "acceptance_tmp";
  std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str());
  require_eq(run_cli("gen honeycomb --dims 12,12,2 -o " + dir + "/h.pld"), 0, "gen honeycomb");
  require_eq(run_cli("gen honeycomb --dims 3,3,1 -o " + dir + "/bad.pld"), 1, "gen bad dims exit 1");
  require_eq(run_cli("report " + dir + "/h.pld --json"), 0, "report");
  require_eq(run_cli("validate " + dir + "/h.pld"), 0, "validate");
  // subdivision invariance through the CLI diff
  LabelField h = read_pld_file(dir + "/h.pld");
  write_pld_file(dir + "/h2.pld", subdivide(h, 2));
  require_eq(run_cli("diff " + dir + "/h.pld " + dir + "/h2.pld"), 0, "diff subdivided exit 0");
  require_eq(run_cli("gen ex222a -o " + dir + "/a.pld"), 0, "gen ex222a");
  require_eq(run_cli("gen ex222b -o " + dir + "/b.pld"), 0, "gen ex222b");
  require_eq(run_cli("diff " + dir + "/a.pld " + dir + "/b.pld"), 1, "diff separates ex222");
  require_eq(run_cli(std::string("apply ") + dir + "/h.pld " + HDK_SCRIPTS_DIR +
                     "/make_222.mvs -o " + dir + "/s222.pld"),
             0, "apply make_222");
  require_eq(run_cli(std::string("apply ") + dir + "/s222.pld " + HDK_SCRIPTS_DIR +
                     "/3srs_to_honeycomb.mvs -o " + dir + "/back.pld"),
             0, "apply destab script");
  require_eq(run_cli("diff " + dir + "/back.pld " + dir + "/h.pld"), 0, "round trip diff exit 0");
  {
    std::ofstream bad(dir + "/bad.mvs");
    bad << "destab kind=1 restore=0 tube=4,7,0;4,8,0;4,9,0;4,10,0;4,11,0\n";
  }
  require_eq(run_cli("apply " + dir + "/h.pld " + dir + "/bad.mvs -o " + dir + "/x.pld"), 2,
             "bad move exits 2");
  require_eq(run_cli("gen checkerboard -o " + dir + "/c.pld"), 0, "gen checkerboard");
  require_eq(run_cli("validate " + dir + "/c.pld"), 0, "validate non-simple exits 0");
  require_eq(run_cli("color " + dir + "/h.pld"), 0, "color");
  require_eq(run_cli("export " + dir + "/h.pld -o " + dir + "/h.obj"), 0, "export");
  require_eq(run_cli("lift " + dir + "/h.pld --window 2 --obj " + dir + "/hw.obj --label 0"), 0,
             "lift");
  std::system(("rm -rf " + dir).c_str());
#endif
}

}  // namespace

int main() {
  criterion(1, "honeycomb golden report", 5.0, c1_honeycomb);
  criterion(2, "type-(0,0,3) and type-(0,2,2) spot checks", 10.0, c2_prop46);
  criterion(3, "3srs type (5,5,5)", 60.0, c3_srs3);
  criterion(4, "destabilization replay to the honeycomb", 30.0, c4_destab_replay);
  criterion(5, "type-(2,2,2) separation by pair profiles", 10.0, c5_ex222_separation);
  criterion(6, "type-0 = type-2 then type-1 composite", 10.0, c6_appendix_composite);
  criterion(7, "randomized 0-2 deltas and move round trips", 60.0, c7_move_deltas);
  criterion(8, "polycontinuity classification", 30.0, c8_polycontinuity);
  criterion(9, "property suites", 120.0, c9_property_suites);
  criterion(10, "command-line pipeline", 120.0, cli_pipeline);
  if (failures) {
    printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  printf("all criteria passed\n");
  return 0;
}
