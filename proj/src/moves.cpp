#include "hdk/moves.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hdk {

namespace {

bool face_adjacent(const LabelField& f, const Coord& u, const Coord& v) {
  const GridDims& d = f.dims();
  int diffs = 0;
  bool adjacent = true;
  auto check = [&](int32_t ua, int32_t va, int32_t n) {
    int32_t a = LabelField::wrap(ua, n), b = LabelField::wrap(va, n);
    if (a == b) return;
    ++diffs;
    if (b != LabelField::wrap(a + 1, n) && b != LabelField::wrap(a - 1, n)) adjacent = false;
  };
  check(u.x, v.x, d.nx);
  check(u.y, v.y, d.ny);
  check(u.z, v.z, d.nz);
  return diffs == 1 && adjacent;
}

bool voxel_adjacent_to_label(const LabelField& f, const Coord& c, Label l) {
  int64_t v = f.voxel_index(c.x, c.y, c.z);
  for (int a = 0; a < 3; ++a)
    for (int s : {+1, -1})
      if (f.label_at(f.neighbor(v, a, s)) == l) return true;
  return false;
}

LabelField apply_changes(const LabelField& f, const std::vector<VoxelChange>& changes) {
  std::vector<Label> labels = f.raw();
  for (const VoxelChange& c : changes) labels[size_t(c.voxel)] = c.after;
  try {
    return LabelField::create(f.dims(), std::move(labels), f.label_count());
  } catch (const Error& e) {
    if (e.code() == Errc::MissingLabel)
      throw Error(Errc::EmptiesRegion, std::string("relabeling empties a region: ") + e.what());
    throw;
  }
}

std::vector<VoxelChange> changes_for(const LabelField& f, const std::vector<Coord>& voxels,
                                     Label new_label) {
  if (new_label < 0 || new_label >= f.label_count())
    throw Error(Errc::LabelOutOfRange, "relabel target out of range");
  std::vector<VoxelChange> out;
  std::set<int64_t> seen;
  for (const Coord& c : voxels) {
    int64_t v = f.voxel_index(c.x, c.y, c.z);
    if (!seen.insert(v).second) continue;
    Label before = f.label_at(v);
    if (before != new_label) out.push_back({v, before, new_label});
  }
  return out;
}

struct ProfileKey {
  int64_t euler, boundary;
  auto operator<=>(const ProfileKey&) const = default;
};

std::multiset<std::pair<int64_t, int64_t>> profile_multiset(const SurfaceProfile& p) {
  std::multiset<std::pair<int64_t, int64_t>> out;
  for (const auto& c : p.components) out.insert({c.euler, c.boundary_circles});
  return out;
}

const SurfaceProfile* find_pair(const CertSnapshot& s, Label a, Label b) {
  for (const auto& p : s.pair_profiles)
    if (p.a == std::min(a, b) && p.b == std::max(a, b)) return &p;
  return nullptr;
}

int64_t disk_count(const CertSnapshot& s) {
  int64_t n = 0;
  for (const auto& p : s.pair_profiles)
    for (const auto& c : p.components) n += c.euler == 1 && c.boundary_circles == 1;
  return n;
}

DeltaCert make_cert(const CertSnapshot& before, const CertSnapshot& after) {
  DeltaCert cert;
  if (before.type) cert.type_before = *before.type;
  if (after.type) cert.type_after = *after.type;
  cert.p_vertices_before = before.p_vertices;
  cert.p_vertices_after = after.p_vertices;
  cert.validity_after = after.validity;
  std::map<std::pair<Label, Label>, std::pair<int64_t, int64_t>> counts;
  for (const auto& p : before.pair_profiles)
    counts[{p.a, p.b}].first = int64_t(p.components.size());
  for (const auto& p : after.pair_profiles)
    counts[{p.a, p.b}].second = int64_t(p.components.size());
  for (const auto& [k, v] : counts)
    if (v.first != v.second) cert.pair_deltas.push_back({k.first, k.second, v.first, v.second});
  return cert;
}

[[noreturn]] void fail_pre(const std::string& msg) { throw Error(Errc::PreconditionFailed, msg); }
[[noreturn]] void fail_cert(const std::string& msg) { throw Error(Errc::CertificationFailed, msg); }

void require_types(const CertSnapshot& before, const CertSnapshot& after) {
  if (!before.type) fail_pre("input field has no defined type vector");
  if (!after.type) fail_cert("result field has no defined type vector");
  if (!after.validity.overall) fail_cert("result field fails validation");
}

// genus_by_label comparison with per-label increments
void require_genus_delta(const CertSnapshot& before, const CertSnapshot& after,
                         const std::vector<std::pair<Label, int64_t>>& deltas) {
  std::vector<int64_t> expect = before.genus_by_label;
  for (auto [l, d] : deltas) expect[size_t(l)] += d;
  if (after.genus_by_label != expect) {
    std::string got = "{", want = "{";
    for (int64_t g : after.genus_by_label) got += std::to_string(g) + ",";
    for (int64_t g : expect) want += std::to_string(g) + ",";
    fail_cert("genus delta mismatch: got " + got + "} want " + want + "}");
  }
}

void require_new_disk(const CertSnapshot& before, const CertSnapshot& after, Label a, Label b,
                      const char* what) {
  auto bs = find_pair(before, a, b) ? profile_multiset(*find_pair(before, a, b))
                                    : std::multiset<std::pair<int64_t, int64_t>>{};
  auto as = find_pair(after, a, b) ? profile_multiset(*find_pair(after, a, b))
                                   : std::multiset<std::pair<int64_t, int64_t>>{};
  bs.insert({1, 1});
  if (bs != as) fail_cert(std::string(what) + ": pair does not gain exactly one disk component");
}

void require_lost_disk(const CertSnapshot& before, const CertSnapshot& after, Label a, Label b,
                       const char* what) {
  auto bs = find_pair(before, a, b) ? profile_multiset(*find_pair(before, a, b))
                                    : std::multiset<std::pair<int64_t, int64_t>>{};
  auto as = find_pair(after, a, b) ? profile_multiset(*find_pair(after, a, b))
                                   : std::multiset<std::pair<int64_t, int64_t>>{};
  as.insert({1, 1});
  if (bs != as) fail_cert(std::string(what) + ": pair does not lose exactly one disk component");
}

// wrap conflicts that make a guide too thin at this resolution: a step along
// an axis of size 2 touches its partner on both sides. Thick guides that
// touch themselves in the bulk are legitimate relabeling sets.
bool guide_conflicts(const LabelField& f, const std::vector<Coord>& coords) {
  const GridDims& d = f.dims();
  for (size_t i = 0; i + 1 < coords.size(); ++i) {
    const Coord &u = coords[i], &v = coords[i + 1];
    if (LabelField::wrap(u.x, d.nx) != LabelField::wrap(v.x, d.nx) && d.nx == 2) return true;
    if (LabelField::wrap(u.y, d.ny) != LabelField::wrap(v.y, d.ny) && d.ny == 2) return true;
    if (LabelField::wrap(u.z, d.nz) != LabelField::wrap(v.z, d.nz) && d.nz == 2) return true;
  }
  return false;
}

int axis_step(int32_t a, int32_t b, int32_t n, int* axis_out, int axis) {
  if (a == b) return 0;
  *axis_out = axis;
  return LabelField::wrap(a + 1, n) == b ? +1 : -1;
}

// Doubles the grid and rescales the guide; flush offsets keep the endpoints
// against the regions they must touch.
std::vector<Coord> scale_guide(const LabelField& f, const std::vector<Coord>& coords,
                               Label anchor_start, Label anchor_end) {
  const GridDims& d = f.dims();
  GridDims nd{2 * d.nx, 2 * d.ny, 2 * d.nz};
  auto flush_offset = [&](const Coord& c, Label anchor) -> Coord {
    Coord h{0, 0, 0};
    if (anchor < 0) return h;
    int64_t v = f.voxel_index(c.x, c.y, c.z);
    for (int a = 0; a < 3; ++a)
      for (int s : {+1, -1})
        if (f.label_at(f.neighbor(v, a, s)) == anchor) {
          if (a == 0) h.x = s > 0;
          else if (a == 1) h.y = s > 0;
          else h.z = s > 0;
          return h;
        }
    return h;
  };
  std::vector<Coord> out;
  auto push = [&](Coord c) {
    c.x = LabelField::wrap(c.x, nd.nx);
    c.y = LabelField::wrap(c.y, nd.ny);
    c.z = LabelField::wrap(c.z, nd.nz);
    if (out.empty() || !(out.back() == c)) out.push_back(c);
  };
  auto walk_axis = [&](Coord& cur, int axis, int step, int times) {
    for (int t = 0; t < times; ++t) {
      if (axis == 0) cur.x += step;
      else if (axis == 1) cur.y += step;
      else cur.z += step;
      push(cur);
    }
  };
  Coord h0 = flush_offset(coords.front(), anchor_start);
  Coord cur{2 * coords.front().x + h0.x, 2 * coords.front().y + h0.y, 2 * coords.front().z + h0.z};
  push(cur);
  // retreat to the block corner before walking
  walk_axis(cur, 0, -1, h0.x);
  walk_axis(cur, 1, -1, h0.y);
  walk_axis(cur, 2, -1, h0.z);
  for (size_t i = 0; i + 1 < coords.size(); ++i) {
    const Coord &u = coords[i], &v = coords[i + 1];
    int axis = -1, step = 0;
    if (int s = axis_step(u.x, v.x, d.nx, &axis, 0)) step = s;
    if (int s = axis_step(u.y, v.y, d.ny, &axis, 1)) step = s;
    if (int s = axis_step(u.z, v.z, d.nz, &axis, 2)) step = s;
    walk_axis(cur, axis, step, 2);
  }
  Coord h1 = flush_offset(coords.back(), anchor_end);
  walk_axis(cur, 0, +1, h1.x);
  walk_axis(cur, 1, +1, h1.y);
  walk_axis(cur, 2, +1, h1.z);
  return out;
}

struct Prepared {
  LabelField field;
  std::vector<Coord> voxels;
  int factor = 1;
};

Prepared prepare_guide(const LabelField& field, const GuidePath& guide, Label anchor_start,
                       Label anchor_end) {
  guide.validate(field);
  Prepared p{field, guide.voxels, 1};
  for (int round = 0; round < 2 && guide_conflicts(p.field, p.voxels); ++round) {
    p.voxels = scale_guide(p.field, p.voxels, anchor_start, anchor_end);
    p.field = subdivide(p.field, 2);
    p.factor *= 2;
  }
  if (guide_conflicts(p.field, p.voxels))
    fail_pre("guide is too thin even after automatic subdivision");
  return p;
}

MoveResult commit(MoveKind kind, std::string params, const LabelField& before_field,
                  const std::vector<VoxelChange>& changes, const CertSnapshot& before,
                  const CertSnapshot& after, LabelField after_field, int factor) {
  MoveRecord rec;
  rec.kind = kind;
  rec.params = std::move(params);
  rec.cert = make_cert(before, after);
  rec.changes = changes;
  rec.subdivide_factor = factor;
  return MoveResult{std::move(after_field), std::move(rec)};
}

}  // namespace

const char* move_kind_name(MoveKind k) {
  switch (k) {
    case MoveKind::Stab0: return "stab0";
    case MoveKind::Stab1: return "stab1";
    case MoveKind::Stab2: return "stab2";
    case MoveKind::Destab0: return "destab0";
    case MoveKind::Destab1: return "destab1";
    case MoveKind::Destab2: return "destab2";
    case MoveKind::Move02: return "move02";
    case MoveKind::Move20: return "move20";
    case MoveKind::Move23: return "move23";
    case MoveKind::Move32: return "move32";
    case MoveKind::Connect: return "connect";
    case MoveKind::RawRelabel: return "relabel";
    case MoveKind::Subdivide: return "subdivide";
  }
  return "?";
}

GuidePath GuidePath::parse(const std::string& text) {
  GuidePath g;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    if (part.empty()) continue;
    Coord c;
    char c1 = 0, c2 = 0;
    std::istringstream ps(part);
    if (!(ps >> c.x >> c1 >> c.y >> c2 >> c.z) || c1 != ',' || c2 != ',')
      throw Error(Errc::ParseError, "bad path coordinate '" + part + "'");
    g.voxels.push_back(c);
  }
  if (g.voxels.empty()) throw Error(Errc::ParseError, "empty guide path");
  return g;
}

void GuidePath::validate(const LabelField& field) const {
  if (voxels.empty()) fail_pre("empty guide path");
  std::set<int64_t> seen;
  for (const Coord& c : voxels)
    if (!seen.insert(field.voxel_index(c.x, c.y, c.z)).second)
      fail_pre("guide path revisits a voxel");
  for (size_t i = 0; i + 1 < voxels.size(); ++i)
    if (!face_adjacent(field, voxels[i], voxels[i + 1]))
      fail_pre("guide path steps must be face-adjacent");
}

CertSnapshot cert_snapshot(const LabelField& field) {
  CertSnapshot s;
  s.label_count = field.label_count();
  StructureCache cache(field);
  SectorSet secs = sectors(cache);
  for (Label a = 0; a < s.label_count; ++a)
    for (Label b = a + 1; b < s.label_count; ++b) {
      SurfaceProfile p = surface_profile(cache, secs, a, b);
      if (!p.components.empty()) s.pair_profiles.push_back(std::move(p));
    }
  SingularGraph g = singular_graph(cache, true);
  s.p_vertices = int64_t(g.p_vertices.size());
  s.validity = validate(cache);
  bool all = true;
  for (Label l = 0; l < s.label_count; ++l) {
    RegionSummary sum = region_summary_lenient(field, l);
    s.genus_by_label.push_back(sum.handlebody_cert ? sum.h1_rank : -1);
    all &= sum.handlebody_cert;
  }
  if (all) {
    std::vector<int64_t> t = s.genus_by_label;
    std::sort(t.begin(), t.end());
    s.type = std::move(t);
  }
  return s;
}

MoveResult relabel(const LabelField& field, const std::vector<Coord>& voxels, Label new_label) {
  if (voxels.empty()) fail_pre("relabel needs a nonempty voxel set");
  auto changes = changes_for(field, voxels, new_label);
  LabelField out = apply_changes(field, changes);
  MoveRecord rec;
  rec.kind = MoveKind::RawRelabel;
  rec.params = "relabel to " + std::to_string(new_label);
  rec.changes = changes;
  rec.subdivide_factor = 1;
  return MoveResult{std::move(out), std::move(rec)};
}

MoveResult stab_type0(const LabelField& field, Label i, Label j, const GuidePath& guide) {
  if (i == j) fail_pre("stab0 needs distinct labels");
  Prepared p = prepare_guide(field, guide, j, j);
  for (const Coord& c : p.voxels)
    if (p.field.label(c.x, c.y, c.z) != i) fail_pre("stab0 guide must lie inside region i");
  if (!voxel_adjacent_to_label(p.field, p.voxels.front(), j) ||
      !voxel_adjacent_to_label(p.field, p.voxels.back(), j))
    fail_pre("stab0 guide endpoints must touch the (i,j) sector");
  CertSnapshot before = cert_snapshot(p.field);
  auto changes = changes_for(p.field, p.voxels, j);
  LabelField out = apply_changes(p.field, changes);
  CertSnapshot after = cert_snapshot(out);
  require_types(before, after);
  require_genus_delta(before, after, {{i, +1}, {j, +1}});
  return commit(MoveKind::Stab0, "i=" + std::to_string(i) + " j=" + std::to_string(j), p.field,
                changes, before, after, std::move(out), p.factor);
}

MoveResult stab_type1(const LabelField& field, Label i, const GuidePath& guide) {
  Prepared p = prepare_guide(field, guide, i, i);
  std::set<Label> side;
  for (const Coord& c : p.voxels) {
    Label l = p.field.label(c.x, c.y, c.z);
    if (l == i) fail_pre("stab1 guide may not enter region i");
    side.insert(l);
  }
  if (side.size() > 2) fail_pre("stab1 guide must stay in the two sides of one sector");
  if (!voxel_adjacent_to_label(p.field, p.voxels.front(), i) ||
      !voxel_adjacent_to_label(p.field, p.voxels.back(), i))
    fail_pre("stab1 guide endpoints must touch region i");
  CertSnapshot before = cert_snapshot(p.field);
  auto changes = changes_for(p.field, p.voxels, i);
  LabelField out = apply_changes(p.field, changes);
  CertSnapshot after = cert_snapshot(out);
  require_types(before, after);
  require_genus_delta(before, after, {{i, +1}});
  return commit(MoveKind::Stab1, "i=" + std::to_string(i), p.field, changes, before, after,
                std::move(out), p.factor);
}

MoveResult stab_type2(const LabelField& field, Label i, Label j, Label k, const GuidePath& guide) {
  if (i == j || i == k || j == k) fail_pre("stab2 needs three distinct labels");
  Prepared p = prepare_guide(field, guide, j, k);
  for (const Coord& c : p.voxels)
    if (p.field.label(c.x, c.y, c.z) != i) fail_pre("stab2 guide must lie inside region i");
  if (!voxel_adjacent_to_label(p.field, p.voxels.front(), j))
    fail_pre("stab2 guide must start at the (i,j) sector");
  if (!voxel_adjacent_to_label(p.field, p.voxels.back(), k))
    fail_pre("stab2 guide must end at the (i,k) sector");
  CertSnapshot before = cert_snapshot(p.field);
  auto changes = changes_for(p.field, p.voxels, j);
  LabelField out = apply_changes(p.field, changes);
  CertSnapshot after = cert_snapshot(out);
  require_types(before, after);
  require_genus_delta(before, after, {{i, +1}});
  require_new_disk(before, after, j, k, "stab2");
  return commit(MoveKind::Stab2,
                "i=" + std::to_string(i) + " j=" + std::to_string(j) + " k=" + std::to_string(k),
                p.field, changes, before, after, std::move(out), p.factor);
}

MoveResult destab(const LabelField& field, DestabKind kind, const std::vector<Coord>& tube,
                  Label restore_label) {
  if (tube.empty()) fail_pre("destab tube is empty");
  Label tube_label = field.label(tube[0].x, tube[0].y, tube[0].z);
  for (const Coord& c : tube)
    if (field.label(c.x, c.y, c.z) != tube_label) fail_pre("destab tube must have a uniform label");
  if (tube_label == restore_label) fail_pre("destab tube already carries the restore label");

  if (kind == DestabKind::Type1) {
    // some cross-section disk of the tube must meet the singular graph
    // transversely in exactly two points
    if (tube.size() < 2) fail_pre("destab1 tube needs at least two voxels");
    bool found = false;
    for (size_t mid = 1; mid < tube.size() && !found; ++mid) {
      int64_t u = field.voxel_index(tube[mid - 1].x, tube[mid - 1].y, tube[mid - 1].z);
      int64_t v = field.voxel_index(tube[mid].x, tube[mid].y, tube[mid].z);
      int64_t face = -1;
      for (int a = 0; a < 3; ++a) {
        if (field.neighbor(v, a, -1) == u) face = 3 * v + a;
        if (field.neighbor(u, a, -1) == v) face = 3 * u + a;
      }
      if (face < 0) fail_pre("destab1 tube voxels are not consecutive");
      bool transverse = true;
      for (int64_t e : field.face_edges(face)) {
        EdgeClass ec = classify_edge(field, e);
        if (ec == EdgeClass::Triple || ec == EdgeClass::Cross) transverse = false;
      }
      if (!transverse) continue;
      int singular_corners = 0;
      for (int64_t vert : field.face_vertices(face)) {
        VertexClass c = classify_vertex(field, vert);
        if (c == VertexClass::TripleLine || c == VertexClass::Tetrahedral) ++singular_corners;
      }
      found = singular_corners == 2;
    }
    if (!found)
      fail_pre("no tube cross-section meets the singular graph transversely in two points");
  }

  CertSnapshot before = cert_snapshot(field);
  if (!before.type) fail_pre("input field has no defined type vector");
  auto changes = changes_for(field, tube, restore_label);
  LabelField out = apply_changes(field, changes);

  // affected regions keep nontrivial images (unbounded lifted components)
  std::set<Label> affected{tube_label, restore_label};
  for (const Coord& c : tube) {
    int64_t v = field.voxel_index(c.x, c.y, c.z);
    for (int a = 0; a < 3; ++a)
      for (int s : {+1, -1}) affected.insert(field.label_at(field.neighbor(v, a, s)));
  }
  for (Label l : affected) {
    if (region_component_count(out, l) != 1)
      fail_pre("destab would disconnect region " + std::to_string(l));
    if (h1_image(field, l).rank < 1 || h1_image(out, l).rank < 1)
      fail_pre("destab affects a region with trivial image lattice");
  }

  CertSnapshot after = cert_snapshot(out);
  require_types(before, after);
  MoveKind mk = MoveKind::Destab0;
  switch (kind) {
    case DestabKind::Type0:
      require_genus_delta(before, after, {{tube_label, -1}, {restore_label, -1}});
      mk = MoveKind::Destab0;
      break;
    case DestabKind::Type1:
      require_genus_delta(before, after, {{tube_label, -1}});
      mk = MoveKind::Destab1;
      break;
    case DestabKind::Type2:
      require_genus_delta(before, after, {{restore_label, -1}});
      if (disk_count(after) != disk_count(before) - 1)
        fail_cert("destab2 must remove exactly one disk component");
      mk = MoveKind::Destab2;
      break;
  }
  return commit(mk, "restore=" + std::to_string(restore_label), field, changes, before, after,
                std::move(out), 1);
}

MoveResult move_02(const LabelField& field, Label i, Label l, const GuidePath& guide) {
  if (i == l) fail_pre("move02 needs distinct end regions");
  Prepared p = prepare_guide(field, guide, i, l);
  Label j = p.field.label(p.voxels[0].x, p.voxels[0].y, p.voxels[0].z);
  if (j == i || j == l) fail_pre("move02 guide must run inside a third region");
  for (const Coord& c : p.voxels)
    if (p.field.label(c.x, c.y, c.z) != j) fail_pre("move02 guide must stay inside one region");
  if (!voxel_adjacent_to_label(p.field, p.voxels.front(), i))
    fail_pre("move02 guide must start next to region i");
  // hugging: every guide voxel stays against the boundary of its region
  // (within two cells, so refined guides still qualify); a finger that stops
  // short of region l is caught by certification instead
  for (const Coord& c : p.voxels) {
    bool near = false;
    for (int dx = -2; dx <= 2 && !near; ++dx)
      for (int dy = -2; dy <= 2 && !near; ++dy)
        for (int dz = -2; dz <= 2 && !near; ++dz)
          near = p.field.label(c.x + dx, c.y + dy, c.z + dz) != j;
    if (!near) fail_pre("move02 guide does not hug a sector of its region");
  }
  CertSnapshot before = cert_snapshot(p.field);
  if (!before.type) fail_pre("input field has no defined type vector");
  auto changes = changes_for(p.field, p.voxels, i);
  LabelField out = apply_changes(p.field, changes);
  CertSnapshot after = cert_snapshot(out);
  require_types(before, after);
  require_genus_delta(before, after, {});
  if (after.p_vertices != before.p_vertices + 2)
    fail_cert("move02 must create exactly two vertices, got " +
              std::to_string(after.p_vertices - before.p_vertices));
  require_new_disk(before, after, i, l, "move02");
  return commit(MoveKind::Move02, "i=" + std::to_string(i) + " l=" + std::to_string(l), p.field,
                changes, before, after, std::move(out), p.factor);
}

MoveResult move_23(const LabelField& field, Label m, const GuidePath& guide) {
  Prepared p = prepare_guide(field, guide, -1, -1);
  Label j = p.field.label(p.voxels[0].x, p.voxels[0].y, p.voxels[0].z);
  if (j == m) fail_pre("move23 guide already carries the pushing label");
  for (const Coord& c : p.voxels)
    if (p.field.label(c.x, c.y, c.z) != j) fail_pre("move23 guide must stay inside one region");
  // the guide must sit against a triple edge joining two vertices of P
  bool found = false;
  for (const Coord& c : p.voxels) {
    int64_t v = p.field.voxel_index(c.x, c.y, c.z);
    Coord pc = p.field.voxel_coord(v);
    for (int a = 0; a < 3 && !found; ++a) {
      int bb = (a + 1) % 3, cc = (a + 2) % 3;
      for (int db = 0; db < 2 && !found; ++db)
        for (int dc = 0; dc < 2 && !found; ++dc) {
          Coord q = pc;
          auto shift = [&](int ax, int d) {
            if (ax == 0) q.x += d;
            else if (ax == 1) q.y += d;
            else q.z += d;
          };
          shift(bb, db);
          shift(cc, dc);
          int64_t e = 3 * p.field.voxel_index(q.x, q.y, q.z) + a;
          if (classify_edge(p.field, e) != EdgeClass::Triple) continue;
          auto vs = p.field.edge_vertices(e);
          if (classify_vertex(p.field, vs[0]) == VertexClass::Tetrahedral &&
              classify_vertex(p.field, vs[1]) == VertexClass::Tetrahedral)
            found = true;
        }
    }
    if (found) break;
  }
  if (!found) fail_pre("move23 guide is not adjacent to a triple edge joining two vertices");
  CertSnapshot before = cert_snapshot(p.field);
  if (!before.type) fail_pre("input field has no defined type vector");
  auto changes = changes_for(p.field, p.voxels, m);
  LabelField out = apply_changes(p.field, changes);
  CertSnapshot after = cert_snapshot(out);
  require_types(before, after);
  require_genus_delta(before, after, {});
  if (after.p_vertices != before.p_vertices + 1)
    fail_cert("move23 must create exactly one vertex");
  if (disk_count(after) != disk_count(before) + 1)
    fail_cert("move23 must create exactly one disk component");
  return commit(MoveKind::Move23, "m=" + std::to_string(m), p.field, changes, before, after,
                std::move(out), p.factor);
}

namespace {

// the indexed component of the pair in canonical sector order
const SectorComponent* pair_component(const SectorSet& secs, Label a, Label b, int64_t index) {
  int64_t seen = 0;
  for (const auto& comp : secs.components) {
    if (comp.a != std::min(a, b) || comp.b != std::max(a, b)) continue;
    if (seen == index) return &comp;
    ++seen;
  }
  return nullptr;
}

MoveResult undo_finger(const LabelField& field, MoveKind kind, Label a, Label b,
                       int64_t component_index, const std::vector<MoveRecord>& ledger,
                       MoveKind origin_kind) {
  StructureCache cache(field);
  SectorSet secs = sectors(cache);
  const SectorComponent* comp = pair_component(secs, a, b, component_index);
  if (!comp) fail_pre("no such sector component");
  SectorComplex sc = build_sector_complex(cache, *comp);
  int64_t chi = sc.cx.counts[0] - sc.cx.counts[1] + sc.cx.counts[2];
  int64_t circles = 0;
  {
    std::vector<int32_t> parent(size_t(sc.cx.counts[0]));
    for (size_t ii = 0; ii < parent.size(); ++ii) parent[ii] = int32_t(ii);
    std::function<int32_t(int32_t)> find = [&](int32_t x) {
      while (parent[size_t(x)] != x) x = parent[size_t(x)] = parent[size_t(parent[size_t(x)])];
      return x;
    };
    std::vector<char> touched(size_t(sc.cx.counts[0]), 0);
    for (int64_t c1 = 0; c1 < sc.cx.counts[1]; ++c1) {
      if (!sc.cell1_boundary[size_t(c1)]) continue;
      int32_t u = find(sc.cx.bnd[1].cell[size_t(2 * c1)]);
      int32_t v = find(sc.cx.bnd[1].cell[size_t(2 * c1 + 1)]);
      if (u != v) parent[size_t(std::max(u, v))] = std::min(u, v);
      touched[size_t(sc.cx.bnd[1].cell[size_t(2 * c1)])] = 1;
      touched[size_t(sc.cx.bnd[1].cell[size_t(2 * c1 + 1)])] = 1;
    }
    for (int64_t c0 = 0; c0 < sc.cx.counts[0]; ++c0)
      if (touched[size_t(c0)] && find(int32_t(c0)) == c0) ++circles;
  }
  if (chi != 1 || circles != 1) throw Error(Errc::NotADisk, "component is not a disk");
  if (kind == MoveKind::Move20) {
    int64_t boundary_p = 0;
    for (int64_t c0 = 0; c0 < sc.cx.counts[0]; ++c0) {
      int64_t vertex = sc.cell0_vertex[size_t(c0)];
      if (cache.vertices()[size_t(vertex)] == VertexClass::Tetrahedral) ++boundary_p;
    }
    if (boundary_p != 2)
      throw Error(Errc::NotADisk, "disk boundary carries " + std::to_string(boundary_p) +
                                      " vertices, need 2");
  }

  // recover the finger from the most recent applicable originating record
  const MoveRecord* origin = nullptr;
  for (auto it = ledger.rbegin(); it != ledger.rend() && !origin; ++it) {
    if (it->kind != origin_kind) continue;
    bool applicable = !it->changes.empty();
    for (const VoxelChange& c : it->changes)
      applicable &= field.label_at(c.voxel) == c.after;
    if (applicable) origin = &*it;
  }
  if (!origin)
    fail_pre(std::string(move_kind_name(kind)) +
             " needs the originating record in the script ledger to retract the finger");
  CertSnapshot before = cert_snapshot(field);
  if (!before.type) fail_pre("input field has no defined type vector");
  std::vector<VoxelChange> changes;
  for (const VoxelChange& c : origin->changes) changes.push_back({c.voxel, c.after, c.before});
  LabelField out = apply_changes(field, changes);
  CertSnapshot after = cert_snapshot(out);
  require_types(before, after);
  require_genus_delta(before, after, {});
  if (kind == MoveKind::Move20) {
    if (after.p_vertices != before.p_vertices - 2)
      fail_cert("move20 must remove exactly two vertices");
    require_lost_disk(before, after, a, b, "move20");
  } else {
    if (after.p_vertices != before.p_vertices - 1)
      fail_cert("move32 must remove exactly one vertex");
    if (disk_count(after) != disk_count(before) - 1)
      fail_cert("move32 must remove exactly one disk component");
  }
  return commit(kind,
                "disk=" + std::to_string(a) + "," + std::to_string(b) + ":" +
                    std::to_string(component_index),
                field, changes, before, after, std::move(out), 1);
}

}  // namespace

MoveResult move_20(const LabelField& field, Label a, Label b, int64_t component_index,
                   const std::vector<MoveRecord>& ledger) {
  return undo_finger(field, MoveKind::Move20, a, b, component_index, ledger, MoveKind::Move02);
}

MoveResult move_32(const LabelField& field, Label a, Label b, int64_t component_index,
                   const std::vector<MoveRecord>& ledger) {
  return undo_finger(field, MoveKind::Move32, a, b, component_index, ledger, MoveKind::Move23);
}

MoveResult domain_connection(const LabelField& field, Label a, Label b, const GuidePath& guide) {
  if (a == b) fail_pre("connect needs distinct labels");
  Prepared p = prepare_guide(field, guide, -1, b);
  CertSnapshot before = cert_snapshot(p.field);
  if (!before.type) fail_pre("input field has no defined type vector");
  if (find_pair(before, a, b)) fail_pre("regions already share a sector");
  if (p.field.label(p.voxels[0].x, p.voxels[0].y, p.voxels[0].z) != a)
    fail_pre("connect guide must start inside region a");
  int transitions = 0;
  for (size_t s = 0; s + 1 < p.voxels.size(); ++s) {
    Label l1 = p.field.label(p.voxels[s].x, p.voxels[s].y, p.voxels[s].z);
    Label l2 = p.field.label(p.voxels[s + 1].x, p.voxels[s + 1].y, p.voxels[s + 1].z);
    if (l1 == b || l2 == b) fail_pre("connect guide may not enter region b");
    transitions += l1 != l2;
  }
  if (transitions != 1) fail_pre("connect guide must cross exactly one sector");
  if (!voxel_adjacent_to_label(p.field, p.voxels.back(), b))
    fail_pre("connect guide must end next to region b");

  auto stage1 = changes_for(p.field, p.voxels, a);
  LabelField mid = apply_changes(p.field, stage1);
  {
    SurfaceProfile ab = surface_profile(mid, a, b);
    if (ab.components.size() != 1 || ab.components[0].euler != 1 ||
        ab.components[0].boundary_circles != 1)
      fail_cert("connect must create exactly one disk between the regions");
  }
  // merge b into a, compacting labels above b
  std::vector<VoxelChange> changes = stage1;
  std::vector<Label> labels = mid.raw();
  for (int64_t v = 0; v < int64_t(labels.size()); ++v) {
    Label l = labels[size_t(v)];
    Label nl = l == b ? a : (l > b ? Label(l - 1) : l);
    if (nl != l) changes.push_back({v, p.field.label_at(v), nl});
  }
  // rebuild from the original with dedup: later changes win per voxel
  std::vector<Label> merged = p.field.raw();
  for (const VoxelChange& c : changes) merged[size_t(c.voxel)] = c.after;
  LabelField out = LabelField::create(p.field.dims(), std::move(merged),
                                      p.field.label_count() - 1);
  CertSnapshot after = cert_snapshot(out);
  if (!after.type) fail_cert("connect result has no defined type vector");
  if (!after.validity.overall) fail_cert("connect result fails validation");
  std::vector<int64_t> expect;
  for (Label l = 0; l < before.label_count; ++l) {
    if (l == b) continue;
    int64_t g = before.genus_by_label[size_t(l)];
    if (l == a) g += before.genus_by_label[size_t(b)];
    expect.push_back(g);
  }
  std::sort(expect.begin(), expect.end());
  if (*after.type != expect) fail_cert("connect genus must be the sum of the joined regions");
  MoveResult res = commit(MoveKind::Connect, "a=" + std::to_string(a) + " b=" + std::to_string(b),
                          p.field, changes, before, after, std::move(out), p.factor);
  res.record.merged_from = b;
  res.record.merged_into = a;
  return res;
}

MoveScript MoveScript::parse(std::istream& in) {
  MoveScript script;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t h = line.find('#');
    if (h != std::string::npos) line = line.substr(0, h);
    std::istringstream ls(line);
    std::string op;
    if (!(ls >> op)) continue;
    ScriptStep step;
    step.line = lineno;
    auto kv = [&]() {
      std::map<std::string, std::string> out;
      std::string tok;
      while (ls >> tok) {
        size_t eq = tok.find('=');
        if (eq == std::string::npos)
          throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": expected key=value");
        out[tok.substr(0, eq)] = tok.substr(eq + 1);
      }
      return out;
    };
    auto need = [&](std::map<std::string, std::string>& m, const std::string& key) {
      auto it = m.find(key);
      if (it == m.end())
        throw Error(Errc::ParseError,
                    "line " + std::to_string(lineno) + ": missing " + key + "=");
      return it->second;
    };
    auto as_label = [&](const std::string& s) { return Label(std::stol(s)); };
    if (op == "subdivide") {
      step.op = ScriptStep::Op::Subdivide;
      if (!(ls >> step.factor) || step.factor < 2)
        throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": subdivide <s>=2..");
    } else if (op == "stab0") {
      auto m = kv();
      step.op = ScriptStep::Op::Stab0;
      step.i = as_label(need(m, "i"));
      step.j = as_label(need(m, "j"));
      step.path = GuidePath::parse(need(m, "path"));
    } else if (op == "stab1") {
      auto m = kv();
      step.op = ScriptStep::Op::Stab1;
      step.i = as_label(need(m, "i"));
      step.path = GuidePath::parse(need(m, "path"));
    } else if (op == "stab2") {
      auto m = kv();
      step.op = ScriptStep::Op::Stab2;
      step.i = as_label(need(m, "i"));
      step.j = as_label(need(m, "j"));
      step.k = as_label(need(m, "k"));
      step.path = GuidePath::parse(need(m, "path"));
    } else if (op == "destab") {
      auto m = kv();
      step.op = ScriptStep::Op::Destab;
      std::string kind = need(m, "kind");
      if (kind == "0") step.destab_kind = DestabKind::Type0;
      else if (kind == "1") step.destab_kind = DestabKind::Type1;
      else if (kind == "2") step.destab_kind = DestabKind::Type2;
      else throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": kind=0|1|2");
      step.restore = as_label(need(m, "restore"));
      step.tube = GuidePath::parse(need(m, "tube")).voxels;
    } else if (op == "move02") {
      auto m = kv();
      step.op = ScriptStep::Op::Move02;
      step.i = as_label(need(m, "i"));
      step.l = as_label(need(m, "l"));
      step.path = GuidePath::parse(need(m, "path"));
    } else if (op == "move20" || op == "move32") {
      auto m = kv();
      step.op = op == "move20" ? ScriptStep::Op::Move20 : ScriptStep::Op::Move32;
      std::string disk = need(m, "disk");
      size_t comma = disk.find(','), colon = disk.find(':');
      if (comma == std::string::npos || colon == std::string::npos || colon < comma)
        throw Error(Errc::ParseError,
                    "line " + std::to_string(lineno) + ": disk=<a>,<b>:<index>");
      step.a = Label(std::stol(disk.substr(0, comma)));
      step.b = Label(std::stol(disk.substr(comma + 1, colon - comma - 1)));
      step.component_index = std::stol(disk.substr(colon + 1));
    } else if (op == "move23") {
      auto m = kv();
      step.op = ScriptStep::Op::Move23;
      step.m = as_label(need(m, "m"));
      step.path = GuidePath::parse(need(m, "path"));
    } else if (op == "connect") {
      auto m = kv();
      step.op = ScriptStep::Op::Connect;
      step.a = as_label(need(m, "a"));
      step.b = as_label(need(m, "b"));
      step.path = GuidePath::parse(need(m, "path"));
    } else if (op == "expect") {
      auto m = kv();
      if (m.count("type")) {
        step.op = ScriptStep::Op::ExpectType;
        std::string t = m["type"];
        if (t.size() < 2 || t.front() != '(' || t.back() != ')')
          throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": type=(g1,g2,...)");
        std::stringstream ts(t.substr(1, t.size() - 2));
        std::string num;
        while (std::getline(ts, num, ',')) step.expect_type.push_back(std::stol(num));
      } else if (m.count("pvertices")) {
        step.op = ScriptStep::Op::ExpectPVertices;
        step.expect_count = std::stol(m["pvertices"]);
      } else if (m.count("pair")) {
        step.op = ScriptStep::Op::ExpectPairComponents;
        std::string t = m["pair"];
        if (t.size() < 2 || t.front() != '(' || t.back() != ')')
          throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": pair=(a,b)");
        size_t comma = t.find(',');
        step.a = Label(std::stol(t.substr(1, comma - 1)));
        step.b = Label(std::stol(t.substr(comma + 1, t.size() - comma - 2)));
        step.expect_count = std::stol(need(m, "components"));
      } else {
        throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": unknown expect clause");
      }
    } else {
      throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": unknown op '" + op + "'");
    }
    script.steps.push_back(std::move(step));
  }
  return script;
}

MoveScript MoveScript::parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

MoveScript MoveScript::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open script " + path);
  return parse(in);
}

ScriptOutcome run_script(const LabelField& field, const MoveScript& script) {
  ScriptOutcome out{field, {}};
  for (size_t idx = 0; idx < script.steps.size(); ++idx) {
    const ScriptStep& s = script.steps[idx];
    try {
      switch (s.op) {
        case ScriptStep::Op::Subdivide: {
          out.field = subdivide(out.field, s.factor);
          MoveRecord rec;
          rec.kind = MoveKind::Subdivide;
          rec.subdivide_factor = s.factor;
          rec.params = "s=" + std::to_string(s.factor);
          out.ledger.push_back(std::move(rec));
          break;
        }
        case ScriptStep::Op::Stab0: {
          MoveResult r = stab_type0(out.field, s.i, s.j, s.path);
          out.field = std::move(r.field);
          out.ledger.push_back(std::move(r.record));
          break;
        }
        case ScriptStep::Op::Stab1: {
          MoveResult r = stab_type1(out.field, s.i, s.path);
          out.field = std::move(r.field);
          out.ledger.push_back(std::move(r.record));
          break;
        }
        case ScriptStep::Op::Stab2: {
          MoveResult r = stab_type2(out.field, s.i, s.j, s.k, s.path);
          out.field = std::move(r.field);
          out.ledger.push_back(std::move(r.record));
          break;
        }
        case ScriptStep::Op::Destab: {
          MoveResult r = destab(out.field, s.destab_kind, s.tube, s.restore);
          out.field = std::move(r.field);
          out.ledger.push_back(std::move(r.record));
          break;
        }
        case ScriptStep::Op::Move02: {
          MoveResult r = move_02(out.field, s.i, s.l, s.path);
          out.field = std::move(r.field);
          out.ledger.push_back(std::move(r.record));
          break;
        }
        case ScriptStep::Op::Move20: {
          MoveResult r = move_20(out.field, s.a, s.b, s.component_index, out.ledger);
          out.field = std::move(r.field);
          out.ledger.push_back(std::move(r.record));
          break;
        }
        case ScriptStep::Op::Move23: {
          MoveResult r = move_23(out.field, s.m, s.path);
          out.field = std::move(r.field);
          out.ledger.push_back(std::move(r.record));
          break;
        }
        case ScriptStep::Op::Move32: {
          MoveResult r = move_32(out.field, s.a, s.b, s.component_index, out.ledger);
          out.field = std::move(r.field);
          out.ledger.push_back(std::move(r.record));
          break;
        }
        case ScriptStep::Op::Connect: {
          MoveResult r = domain_connection(out.field, s.a, s.b, s.path);
          out.field = std::move(r.field);
          out.ledger.push_back(std::move(r.record));
          break;
        }
        case ScriptStep::Op::ExpectType: {
          std::vector<int64_t> t = type_vector(out.field);
          std::vector<int64_t> want = s.expect_type;
          std::sort(want.begin(), want.end());
          if (t != want) {
            std::string got;
            for (int64_t g : t) got += std::to_string(g) + ",";
            throw Error(Errc::CertificationFailed, "expect type failed, got (" + got + ")");
          }
          break;
        }
        case ScriptStep::Op::ExpectPVertices: {
          StructureCache cache(out.field);
          SingularGraph g = singular_graph(cache, true);
          if (int64_t(g.p_vertices.size()) != s.expect_count)
            throw Error(Errc::CertificationFailed,
                        "expect pvertices failed, got " + std::to_string(g.p_vertices.size()));
          break;
        }
        case ScriptStep::Op::ExpectPairComponents: {
          SurfaceProfile p = surface_profile(out.field, s.a, s.b);
          if (int64_t(p.components.size()) != s.expect_count)
            throw Error(Errc::CertificationFailed,
                        "expect pair components failed, got " +
                            std::to_string(p.components.size()));
          break;
        }
      }
    } catch (const Error& e) {
      throw Error(Errc::StepFailed, "step " + std::to_string(idx) + " (line " +
                                        std::to_string(s.line) + "): [" + errc_name(e.code()) +
                                        "] " + e.what());
    }
  }
  return out;
}

}  // namespace hdk
