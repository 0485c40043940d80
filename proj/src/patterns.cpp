#include "hdk/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace hdk {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<Label> new_labels(const GridDims& d) { return std::vector<Label>(size_t(d.voxels())); }

void set_label(std::vector<Label>& l, const GridDims& d, int x, int y, int z, Label v) {
  l[size_t(x) + size_t(d.nx) * (size_t(y) + size_t(d.ny) * size_t(z))] = v;
}

// ---- honeycomb ------------------------------------------------------------
// Three-coloring of the 12x12 square torus carrying the hexagonal-tiling
// combinatorics: the hexagonal lattice is sheared onto the square torus, so
// nearest-center Voronoi in the hex quadratic form dx^2 + dx dy + dy^2 gives
// the three cells. Centers (0,0), (4,4), (8,8) carry colors 0, 2, 1.
Label honeycomb_cell_12(int x, int y) {
  static const int cx[3] = {0, 4, 8};
  static const int cy[3] = {0, 4, 8};
  static const Label color[3] = {0, 2, 1};
  int64_t best = -1;
  Label best_color = 0;
  for (int c = 0; c < 3; ++c) {
    int64_t dx = 2 * x + 1 - 2 * cx[c];
    int64_t dy = 2 * y + 1 - 2 * cy[c];
    int64_t q = INT64_MAX;
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b) {
        int64_t u = dx + 24 * a, v = dy + 24 * b;
        q = std::min(q, u * u + u * v + v * v);
      }
    if (best < 0 || q < best || (q == best && color[c] < best_color)) {
      best = q;
      best_color = color[c];
    }
  }
  return best_color;
}

LabelField gen_honeycomb(GridDims d) {
  if (d.nx % 12 != 0 || d.ny % 12 != 0 || d.nx < 12 || d.ny < 12 || d.nz < 2)
    throw Error(Errc::DimsTooSmall, "honeycomb needs nx,ny multiples of 12 and nz >= 2");
  auto l = new_labels(d);
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x)
        set_label(l, d, x, y, z, honeycomb_cell_12(x * 12 / d.nx, y * 12 / d.ny));
  return LabelField::create(d, std::move(l), 3);
}

// ---- slabs ----------------------------------------------------------------
LabelField gen_slabs(GridDims d) {
  if (d.nx % 2 != 0) throw Error(Errc::DimsTooSmall, "slabs needs even nx");
  auto l = new_labels(d);
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x) set_label(l, d, x, y, z, x < d.nx / 2 ? 0 : 1);
  return LabelField::create(d, std::move(l), 2);
}

// ---- level-set generators -------------------------------------------------
LabelField gen_level_set(GridDims d, int kind) {
  if (d.nx != d.ny || d.ny != d.nz || d.nx < 8 || d.nx % 2 != 0)
    throw Error(Errc::DimsTooSmall, "level-set generators need cubical even dims >= 8");
  auto l = new_labels(d);
  int n = d.nx;
  for (int z = 0; z < n; ++z)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        double X = 2.0 * kPi * (x + 0.5) / n;
        double Y = 2.0 * kPi * (y + 0.5) / n;
        double Z = 2.0 * kPi * (z + 0.5) / n;
        double v = kind == 0 ? std::cos(X) + std::cos(Y) + std::cos(Z)
                             : std::sin(X) * std::cos(Y) + std::sin(Y) * std::cos(Z) +
                                   std::sin(Z) * std::cos(X);
        set_label(l, d, x, y, z, v > 0.0 ? 0 : 1);
      }
  return LabelField::create(d, std::move(l), 2);
}

// ---- banded fields (ex1111a / ex1111b) -------------------------------------
// Relabels a run of `via` voxels along the z-column at (x,y) that starts next
// to `from` and ends next to `to`; the resulting finger welds the three
// sector walls into one connected polyhedron.
void carve_finger(std::vector<Label>& l, const GridDims& d, int x, int y, Label from, Label via,
                  Label to) {
  auto get = [&](int z) {
    return l[size_t(x) + size_t(d.nx) * (size_t(y) + size_t(d.ny) * size_t(LabelField::wrap(z, d.nz)))];
  };
  for (int z0 = 0; z0 < d.nz; ++z0) {
    if (get(z0 - 1) != from || get(z0) != via) continue;
    int len = 0;
    while (len < d.nz && get(z0 + len) == via) ++len;
    if (get(z0 + len) != to) continue;
    for (int k = 0; k < len; ++k)
      set_label(l, d, x, y, LabelField::wrap(z0 + k, d.nz), from);
    return;
  }
  throw Error(Errc::Internal, "no finger column found between the requested bands");
}

// Four z-slabs welded by three fingers: every region wraps x and y only.
LabelField gen_ex1111a(GridDims d) {
  if (d.nx % 8 != 0 || d.nx != d.ny || d.ny != d.nz)
    throw Error(Errc::DimsTooSmall, "ex1111a needs cubical dims, a multiple of 8");
  GridDims base{8, 8, 8};
  auto l = new_labels(base);
  for (int z = 0; z < 8; ++z)
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x) set_label(l, base, x, y, z, Label(z / 2));
  carve_finger(l, base, 0, 0, 0, 1, 2);
  carve_finger(l, base, 4, 4, 1, 2, 3);
  carve_finger(l, base, 0, 4, 2, 3, 0);
  LabelField f = LabelField::create(base, std::move(l), 4);
  return d.nx == 8 ? f : subdivide(f, d.nx / 8);
}

// Four level bands of the P-approximant welded by two fingers: every region
// wraps all three axes.
LabelField gen_ex1111b(GridDims d) {
  if (d.nx % 16 != 0 || d.nx != d.ny || d.ny != d.nz)
    throw Error(Errc::DimsTooSmall, "ex1111b needs cubical dims, a multiple of 16");
  GridDims base{16, 16, 16};
  auto l = new_labels(base);
  const double c = 0.95;
  for (int z = 0; z < 16; ++z)
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) {
        double f = std::cos(2.0 * kPi * (x + 0.5) / 16) + std::cos(2.0 * kPi * (y + 0.5) / 16) +
                   std::cos(2.0 * kPi * (z + 0.5) / 16);
        Label lab = f < -c ? 3 : (f < 0.0 ? 2 : (f < c ? 1 : 0));
        set_label(l, base, x, y, z, lab);
      }
  carve_finger(l, base, 0, 4, 0, 1, 2);
  carve_finger(l, base, 0, 7, 1, 2, 3);
  LabelField f = LabelField::create(base, std::move(l), 4);
  return d.nx == 16 ? f : subdivide(f, d.nx / 16);
}

// ---- bricks ------------------------------------------------------------------
// Offset brick wall times the z-circle: six disk columns, a decomposition of
// type (1,1,1,1,1,1). Every brick corner joins three bricks, and a fourth
// region is always one brick away, so the field hosts certified 0-2 moves.
Label brick_cell_12(int x, int y) {
  if (y < 6) return Label(x / 4);          // A, B, C
  if (x >= 2 && x <= 5) return 3;          // D
  if (x >= 6 && x <= 9) return 4;          // E
  return 5;                                // F wraps in x
}

LabelField gen_bricks(GridDims d) {
  if (d.nx % 12 != 0 || d.ny % 12 != 0 || d.nx < 12 || d.ny < 12 || d.nz < 2)
    throw Error(Errc::DimsTooSmall, "bricks needs nx,ny multiples of 12 and nz >= 2");
  auto l = new_labels(d);
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x)
        set_label(l, d, x, y, z, brick_cell_12(x * 12 / d.nx, y * 12 / d.ny));
  return LabelField::create(d, std::move(l), 6);
}

// ---- checkerboard (non-simple) ---------------------------------------------
// 6x6 plan with one genuine checkerboard corner: region 1 snakes so that the
// two cells (0,0) and (1,1) touch only across the corner, giving a vertical
// line of cross edges after taking the product with the z-circle.
Label checkerboard_cell_6(int x, int y) {
  static const char table[6][7] = {
      "100001",  // y = 0
      "011111",  // y = 1
      "000000",  // y = 2
      "000000",  // y = 3
      "000000",  // y = 4
      "000000",  // y = 5
  };
  return table[y][x] == '1' ? 1 : 0;
}

LabelField gen_checkerboard(GridDims d) {
  if (d.nx % 6 != 0 || d.ny % 6 != 0 || d.nz < 2)
    throw Error(Errc::DimsTooSmall, "checkerboard needs nx,ny multiples of 6 and nz >= 2");
  auto l = new_labels(d);
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x)
        set_label(l, d, x, y, z, checkerboard_cell_6(x * 6 / d.nx, y * 6 / d.ny));
  return LabelField::create(d, std::move(l), 2);
}

// ---- t003 / t022 -----------------------------------------------------------
// Type-(0,0,3): two balls joined through four tubes; the complement is the
// thickened 1-skeleton, a genus-3 handlebody. The four tube caps on the
// second ball are the four disks of F_01.
LabelField gen_t003(GridDims d) {
  if (d.nx != d.ny || d.ny != d.nz || d.nx % 8 != 0)
    throw Error(Errc::DimsTooSmall, "t003 needs cubical dims, a multiple of 8");
  GridDims base{8, 8, 8};
  auto l = std::vector<Label>(size_t(base.voxels()), 2);
  auto box = [&](int x0, int x1, int y0, int y1, int z0, int z1, Label v) {
    for (int z = z0; z <= z1; ++z)
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) set_label(l, base, x & 7, y & 7, z & 7, v);
  };
  box(1, 4, 1, 4, 1, 2, 0);  // ball A
  box(1, 4, 1, 4, 5, 6, 1);  // ball B
  box(2, 2, 2, 2, 3, 4, 0);  // direct tube
  box(3, 3, 3, 3, 7, 8, 0);  // z-wrapping tube (8 wraps to 0)
  // x-wrapping tube with a climb
  box(5, 7, 2, 2, 2, 2, 0);
  box(7, 7, 2, 2, 3, 5, 0);
  box(8, 8, 2, 2, 5, 5, 0);  // 8 wraps to 0, adjacent to ball B at x=1
  // y-wrapping tube with a climb
  box(2, 2, 5, 7, 2, 2, 0);
  box(2, 2, 7, 7, 3, 5, 0);
  box(2, 2, 8, 8, 5, 5, 0);
  LabelField f = LabelField::create(base, std::move(l), 3);
  return d.nx == 8 ? f : subdivide(f, d.nx / 8);
}

// Type-(0,2,2): cut one handle segment out of each side of the standard
// genus-3 splitting. The plate in the z-tube of the frame and the plate in
// the z-handle of the dual side are joined by a thin bridge, so together
// they form the ball; each side keeps its other two handles.
LabelField gen_t022(GridDims d) {
  if (d.nx != d.ny || d.ny != d.nz || d.nx % 8 != 0)
    throw Error(Errc::DimsTooSmall, "t022 needs cubical dims, a multiple of 8");
  GridDims base{8, 8, 8};
  auto l = std::vector<Label>(size_t(base.voxels()));
  auto in01 = [](int u) { return u == 0 || u == 1; };
  auto bridge = [](int x, int y, int z) {
    return (x == 1 && y == 1 && z == 3) || (x == 1 && y == 2 && z == 3) ||
           (x == 1 && y == 2 && z == 2) || (x == 1 && y == 2 && z == 1);
  };
  for (int z = 0; z < 8; ++z)
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x) {
        int count = in01(x) + in01(y) + in01(z);
        bool frame = count >= 2;
        bool plate = in01(x) && in01(y) && (z == 4 || z == 5);
        bool plate2 = z == 1 && x >= 2 && y >= 2;
        Label v;
        if (plate || plate2 || bridge(x, y, z)) v = 0;
        else if (frame) v = 1;
        else v = 2;
        set_label(l, base, x, y, z, v);
      }
  LabelField f = LabelField::create(base, std::move(l), 3);
  return d.nx == 8 ? f : subdivide(f, d.nx / 8);
}

// ---- srs3 ------------------------------------------------------------------
// The srs net in the edge-8 cube, vertices from the standard crystallographic
// data; the second and third nets are its images under the 2pi/3 rotation
// about the line through (0,0,8) and (8,8,0).
struct Seg {
  std::array<int64_t, 3> a, b;
};

struct Net {
  std::vector<std::array<int64_t, 3>> vertices;  // mod 8
  std::vector<Seg> segments;                     // endpoints may leave [0,8)
};

std::array<int64_t, 3> rot_axis_111m(const std::array<int64_t, 3>& p) {
  // 2pi/3 rotation about direction (1,1,-1) through (0,0,8)
  return {-p[2] + 8, p[0], -p[1] + 8};
}

std::vector<Net> srs_nets() {
  std::vector<std::array<int64_t, 3>> v1 = {{1, 1, 1}, {3, 7, 5}, {7, 5, 3}, {5, 3, 7},
                                            {5, 5, 5}, {7, 3, 1}, {3, 1, 7}, {1, 7, 3}};
  std::vector<Net> nets(3);
  nets[0].vertices = v1;
  for (int m = 1; m < 3; ++m) {
    for (auto p : nets[size_t(m - 1)].vertices) {
      auto q = rot_axis_111m(p);
      for (auto& c : q) c = ((c % 8) + 8) % 8;
      nets[size_t(m)].vertices.push_back(q);
    }
    std::sort(nets[size_t(m)].vertices.begin(), nets[size_t(m)].vertices.end());
  }
  // edges: face-diagonal steps of squared length 8 between periodic copies
  for (Net& net : nets) {
    std::set<std::array<int64_t, 6>> seen;
    for (const auto& u : net.vertices)
      for (const auto& w : net.vertices)
        for (int ox = -8; ox <= 8; ox += 8)
          for (int oy = -8; oy <= 8; oy += 8)
            for (int oz = -8; oz <= 8; oz += 8) {
              std::array<int64_t, 3> v{w[0] + ox, w[1] + oy, w[2] + oz};
              int64_t d2 = 0;
              for (int c = 0; c < 3; ++c) d2 += (v[size_t(c)] - u[size_t(c)]) * (v[size_t(c)] - u[size_t(c)]);
              if (d2 != 8) continue;
              std::array<int64_t, 6> key{u[0], u[1], u[2], v[0], v[1], v[2]};
              std::array<int64_t, 6> rkey{v[0] % 8, v[1] % 8, v[2] % 8, u[0] + v[0] - (v[0] % 8),
                                          u[1] + v[1] - (v[1] % 8), u[2] + v[2] - (v[2] % 8)};
              // canonical: keep the copy whose start is the lexicographically
              // smaller endpoint inside the cell
              (void)rkey;
              bool fwd = std::lexicographical_compare(u.begin(), u.end(), v.begin(), v.end());
              if (!fwd) continue;
              if (seen.insert(key).second) net.segments.push_back({u, v});
            }
    // drop duplicate geometric edges (each edge found once from its low end,
    // but wrapped copies can repeat): keep segments whose midpoint-doubled
    // lies in [0,16)^3
    std::vector<Seg> uniq;
    std::set<std::array<int64_t, 6>> mids;
    for (const Seg& s : net.segments) {
      std::array<int64_t, 6> mid{};
      for (int c = 0; c < 3; ++c) {
        int64_t m2 = s.a[size_t(c)] + s.b[size_t(c)];
        m2 = ((m2 % 16) + 16) % 16;
        mid[size_t(c)] = m2;
      }
      std::array<int64_t, 3> dvec{};
      for (int c = 0; c < 3; ++c) dvec[size_t(c)] = s.b[size_t(c)] - s.a[size_t(c)];
      std::sort(dvec.begin(), dvec.end());
      mid[3] = dvec[0];
      mid[4] = dvec[1];
      mid[5] = dvec[2];
      if (mids.insert(mid).second) uniq.push_back(s);
    }
    net.segments = std::move(uniq);
    // the quotient graph oracle: 8 vertices of degree 3, hence 12 edges
    if (net.vertices.size() != 8 || net.segments.size() != 12)
      throw Error(Errc::Internal,
                  "srs net data failed the degree/edge-count oracle: " +
                      std::to_string(net.vertices.size()) + " vertices, " +
                      std::to_string(net.segments.size()) + " edges");
  }
  // the three nets must be disjoint
  std::set<std::array<int64_t, 3>> all;
  for (const Net& net : nets)
    for (const auto& v : net.vertices)
      if (!all.insert(v).second) throw Error(Errc::Internal, "srs nets share a vertex");
  return nets;
}

LabelField gen_srs3(GridDims d) {
  if (d.nx != d.ny || d.ny != d.nz || d.nx % 8 != 0 || d.nx < 16)
    throw Error(Errc::DimsTooSmall, "srs3 needs cubical dims, a multiple of 8, at least 16");
  static const std::vector<Net> nets = srs_nets();
  int n = d.nx;
  // work in units of 1/n of the crystallographic cell: voxel centers at 8*i+4,
  // endpoints scaled by n, periodic copies shifted by 8n
  struct ScaledSeg {
    std::array<int64_t, 3> a, d;
    int64_t dd;
  };
  std::vector<std::vector<ScaledSeg>> scaled(3);
  for (int m = 0; m < 3; ++m)
    for (const Seg& s : nets[size_t(m)].segments)
      for (int ox = -1; ox <= 1; ++ox)
        for (int oy = -1; oy <= 1; ++oy)
          for (int oz = -1; oz <= 1; ++oz) {
            ScaledSeg ss;
            ss.a = {n * s.a[0] + 8 * n * ox, n * s.a[1] + 8 * n * oy, n * s.a[2] + 8 * n * oz};
            ss.d = {n * (s.b[0] - s.a[0]), n * (s.b[1] - s.a[1]), n * (s.b[2] - s.a[2])};
            ss.dd = ss.d[0] * ss.d[0] + ss.d[1] * ss.d[1] + ss.d[2] * ss.d[2];
            scaled[size_t(m)].push_back(ss);
          }
  auto l = new_labels(d);
  for (int z = 0; z < n; ++z)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        std::array<int64_t, 3> p{8 * x + 4, 8 * y + 4, 8 * z + 4};
        // min squared distance per net as exact fraction num/den
        int64_t best_num = 0, best_den = 0;
        Label best = -1;
        for (Label m = 0; m < 3; ++m) {
          int64_t num = 0, den = 0;
          for (const ScaledSeg& s : scaled[size_t(m)]) {
            std::array<int64_t, 3> ap{p[0] - s.a[0], p[1] - s.a[1], p[2] - s.a[2]};
            int64_t t = ap[0] * s.d[0] + ap[1] * s.d[1] + ap[2] * s.d[2];
            int64_t ap2 = ap[0] * ap[0] + ap[1] * ap[1] + ap[2] * ap[2];
            int64_t cnum, cden;
            if (t <= 0) {
              cnum = ap2;
              cden = 1;
            } else if (t >= s.dd) {
              int64_t b0 = ap[0] - s.d[0], b1 = ap[1] - s.d[1], b2 = ap[2] - s.d[2];
              cnum = b0 * b0 + b1 * b1 + b2 * b2;
              cden = 1;
            } else {
              cnum = ap2 * s.dd - t * t;
              cden = s.dd;
            }
            if (den == 0 || cnum * den < num * cden) {
              num = cnum;
              den = cden;
            }
          }
          if (best < 0 || num * best_den < best_num * den) {
            best_num = num;
            best_den = den;
            best = m;
          }
        }
        set_label(l, d, x, y, z, best);
      }
  return LabelField::create(d, std::move(l), 3);
}

}  // namespace

const std::vector<GeneratorInfo>& generator_catalog() {
  static const std::vector<GeneratorInfo> cat = {
      {"honeycomb", {12, 12, 2}, "nx,ny multiples of 12; nz >= 2"},
      {"slabs", {2, 2, 2}, "even nx"},
      {"schwarz_p", {16, 16, 16}, "cubical even dims >= 8"},
      {"gyroid", {16, 16, 16}, "cubical even dims >= 8"},
      {"srs3", {24, 24, 24}, "cubical dims, multiple of 8, >= 16"},
      {"t003", {8, 8, 8}, "cubical dims, multiple of 8"},
      {"t022", {8, 8, 8}, "cubical dims, multiple of 8"},
      {"ex222a", {12, 12, 2}, "honeycomb dims"},
      {"ex222b", {12, 12, 2}, "honeycomb dims"},
      {"ex1111a", {8, 8, 8}, "cubical dims, multiple of 8"},
      {"ex1111b", {16, 16, 16}, "cubical dims, multiple of 16"},
      {"checkerboard", {6, 6, 2}, "nx,ny multiples of 6; nz >= 2"},
      {"bricks", {12, 12, 2}, "nx,ny multiples of 12; nz >= 2"},
  };
  return cat;
}

LabelField generate(const std::string& name, std::optional<GridDims> dims) {
  GridDims d{0, 0, 0};
  for (const GeneratorInfo& g : generator_catalog())
    if (g.name == name) d = dims.value_or(g.default_dims);
  if (d.nx == 0) throw Error(Errc::ParseError, "unknown generator '" + name + "'");
  if (d.nx < 2 || d.ny < 2 || d.nz < 2)
    throw Error(Errc::DimsTooSmall, "dims must be >= 2 per axis");
  if (name == "honeycomb") return gen_honeycomb(d);
  if (name == "slabs") return gen_slabs(d);
  if (name == "schwarz_p") return gen_level_set(d, 0);
  if (name == "gyroid") return gen_level_set(d, 1);
  if (name == "srs3") return gen_srs3(d);
  if (name == "t003") return gen_t003(d);
  if (name == "t022") return gen_t022(d);
  if (name == "ex1111a") return gen_ex1111a(d);
  if (name == "ex1111b") return gen_ex1111b(d);
  if (name == "checkerboard") return gen_checkerboard(d);
  if (name == "bricks") return gen_bricks(d);
  if (name == "ex222a" || name == "ex222b") {
    LabelField h = gen_honeycomb(d);
    MoveScript script = MoveScript::parse_text(bundled_script(name));
    return run_script(h, script).field;
  }
  throw Error(Errc::Internal, "unhandled generator");
}

std::vector<ColoringViolation> check_coloring(const LabelField& field, const Coloring& coloring) {
  if (int32_t(coloring.color_of_label.size()) != field.label_count())
    throw Error(Errc::InvalidColoring, "coloring must assign every label");
  std::vector<char> used(size_t(coloring.colors), 0);
  for (int32_t c : coloring.color_of_label) {
    if (c < 0 || c >= coloring.colors)
      throw Error(Errc::InvalidColoring, "color out of range");
    used[size_t(c)] = 1;
  }
  for (char u : used)
    if (!u) throw Error(Errc::InvalidColoring, "coloring is not surjective");
  StructureCache cache(field);
  SectorSet secs = sectors(cache);
  std::vector<ColoringViolation> out;
  for (size_t i = 0; i < secs.components.size(); ++i) {
    const SectorComponent& comp = secs.components[i];
    if (coloring.color_of_label[size_t(comp.a)] == coloring.color_of_label[size_t(comp.b)])
      out.push_back({int32_t(i), comp.a, comp.b});
  }
  return out;
}

namespace {

std::vector<std::pair<Label, Label>> adjacency_pairs(const LabelField& field) {
  StructureCache cache(field);
  std::set<std::pair<Label, Label>> pairs;
  for (const FaceInfo& fi : cache.faces())
    if (fi.cls == FaceClass::Sector) pairs.insert({fi.a, fi.b});
  return {pairs.begin(), pairs.end()};
}

bool color_search(const std::vector<std::pair<Label, Label>>& pairs, int32_t k, int32_t colors,
                  std::vector<int32_t>& assign, int32_t next) {
  if (next == k) {
    std::vector<char> used(size_t(colors), 0);
    for (int32_t c : assign) used[size_t(c)] = 1;
    for (char u : used)
      if (!u) return false;
    return true;
  }
  for (int32_t c = 0; c < colors; ++c) {
    assign[size_t(next)] = c;
    bool ok = true;
    for (auto [a, b] : pairs)
      if (a <= next && b <= next && b == next && assign[size_t(a)] == assign[size_t(b)]) ok = false;
    if (ok && color_search(pairs, k, colors, assign, next + 1)) return true;
  }
  assign[size_t(next)] = -1;
  return false;
}

}  // namespace

std::optional<Coloring> find_coloring(const LabelField& field, int32_t colors) {
  int32_t k = field.label_count();
  if (k > 8) throw Error(Errc::TooManyLabels, "coloring search supports at most 8 labels");
  if (colors < 1 || colors > k) return std::nullopt;
  auto pairs = adjacency_pairs(field);
  std::vector<int32_t> assign(size_t(k), -1);
  if (!color_search(pairs, k, colors, assign, 0)) return std::nullopt;
  return Coloring{assign, colors};
}

Coloring min_coloring(const LabelField& field) {
  for (int32_t n = 1; n <= field.label_count(); ++n)
    if (auto c = find_coloring(field, n)) return *c;
  throw Error(Errc::Internal, "no coloring with k colors; adjacency graph inconsistent");
}

ColoredType colored_type(const LabelField& field, const Coloring& coloring) {
  if (!check_coloring(field, coloring).empty())
    throw Error(Errc::InvalidColoring, "coloring has same-color sectors");
  ColoredType out;
  out.genus_by_color.resize(size_t(coloring.colors));
  for (Label l = 0; l < field.label_count(); ++l) {
    RegionSummary s = region_summary(field, l);
    if (!s.handlebody_cert)
      throw Error(Errc::CertificateFailed,
                  "handlebody certificate failed for region " + std::to_string(l));
    out.genus_by_color[size_t(coloring.color_of_label[size_t(l)])].push_back(s.h1_rank);
  }
  for (auto& v : out.genus_by_color) std::sort(v.begin(), v.end());
  return out;
}

ContinuityVerdict classify_continuity(const LabelField& field) {
  ContinuityVerdict verdict;
  StructureCache cache(field);
  DecompositionValidity val = validate(cache);
  if (!val.overall) {
    verdict.kind = ContinuityVerdict::Kind::NotProperRepresentation;
    return verdict;
  }
  std::vector<LatticeImage> images;
  for (Label l = 0; l < field.label_count(); ++l) {
    images.push_back(h1_image(field, l));
    if (images.back().rank < 3) {
      verdict.kind = ContinuityVerdict::Kind::InfinitelyManyDomains;
      verdict.witness_label = l;
      return verdict;
    }
  }
  SectorSet secs = sectors(cache);
  for (Label a = 0; a < field.label_count(); ++a)
    for (Label b = a + 1; b < field.label_count(); ++b) {
      SurfaceProfile p = surface_profile(cache, secs, a, b);
      for (const auto& comp : p.components)
        if (comp.euler == 1 && comp.boundary_circles == 1) {
          verdict.kind = ContinuityVerdict::Kind::DiskSector;
          verdict.witness_a = a;
          verdict.witness_b = b;
          return verdict;
        }
    }
  verdict.kind = ContinuityVerdict::Kind::NContinuous;
  verdict.n = 0;
  for (const LatticeImage& img : images) verdict.n += img.index;
  return verdict;
}

LabelField cover_field(const LabelField& field, std::array<int32_t, 3> window) {
  const GridDims& d = field.dims();
  GridDims nd{d.nx * window[0], d.ny * window[1], d.nz * window[2]};
  if (nd.voxels() > cell_limit()) throw Error(Errc::Overflow, "window exceeds cell limit");
  std::vector<Label> l(size_t(nd.voxels()));
  for (int z = 0; z < nd.nz; ++z)
    for (int y = 0; y < nd.ny; ++y)
      for (int x = 0; x < nd.nx; ++x)
        l[size_t(x) + size_t(nd.nx) * (size_t(y) + size_t(nd.ny) * size_t(z))] =
            field.label(x % d.nx, y % d.ny, z % d.nz);
  return LabelField::create(nd, std::move(l), field.label_count());
}

WindowLift lift_window(const LabelField& field, std::array<int32_t, 3> window) {
  if (window[0] < 1 || window[1] < 1 || window[2] < 1)
    throw Error(Errc::PreconditionFailed, "window factors must be >= 1");
  WindowLift out;
  out.window = window;
  LabelField cover = cover_field(field, window);
  for (Label l = 0; l < field.label_count(); ++l) {
    int64_t count = region_component_count(cover, l);
    LatticeImage img = h1_image(field, l);
    int64_t expected =
        cover_component_count(img, {int64_t(window[0]), int64_t(window[1]), int64_t(window[2])});
    if (count != expected)
      throw Error(Errc::Internal, "window component count " + std::to_string(count) +
                                      " disagrees with the image-lattice index " +
                                      std::to_string(expected));
    out.components_per_label.push_back(count);
  }
  return out;
}

LiftedNet net_lift(const LabelField& field, Label label, std::array<int32_t, 3> window) {
  SpineGraph g = spine(field, label);
  const GridDims& d = field.dims();
  int64_t copies = int64_t(window[0]) * window[1] * window[2];
  LiftedNet out;
  out.vertices = g.vertices * copies;
  out.edges = int64_t(g.edges.size()) * copies;
  // union-find over vertex copies; an edge from the copy at window cell w
  // lands in the cell shifted by the number of fundamental domains the edge
  // crosses, read off the anchors and the geometric displacement
  auto copy_index = [&](int64_t v, int64_t cx, int64_t cy, int64_t cz) {
    int64_t c = cx + window[0] * (cy + int64_t(window[1]) * cz);
    return v * copies + c;
  };
  std::vector<int64_t> parent(size_t(out.vertices));
  for (size_t i = 0; i < parent.size(); ++i) parent[i] = int64_t(i);
  std::function<int64_t(int64_t)> find = [&](int64_t x) {
    while (parent[size_t(x)] != x) x = parent[size_t(x)] = parent[size_t(parent[size_t(x)])];
    return x;
  };
  auto unite = [&](int64_t a, int64_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[size_t(std::max(a, b))] = std::min(a, b);
  };
  auto mod = [](int64_t v, int64_t n) { return ((v % n) + n) % n; };
  for (const SpineEdge& e : g.edges) {
    const Coord& pt = g.positions[size_t(e.tail)];
    const Coord& ph = g.positions[size_t(e.head)];
    int64_t raw[3] = {pt.x + e.displacement[0] - ph.x, pt.y + e.displacement[1] - ph.y,
                      pt.z + e.displacement[2] - ph.z};
    int64_t shift[3];
    int64_t dims[3] = {d.nx, d.ny, d.nz};
    for (int c = 0; c < 3; ++c) {
      if (raw[c] % dims[c] != 0)
        throw Error(Errc::Internal, "spine edge does not connect its anchors");
      shift[c] = raw[c] / dims[c];
    }
    for (int64_t cz = 0; cz < window[2]; ++cz)
      for (int64_t cy = 0; cy < window[1]; ++cy)
        for (int64_t cx = 0; cx < window[0]; ++cx)
          unite(copy_index(e.tail, cx, cy, cz),
                copy_index(e.head, mod(cx + shift[0], window[0]), mod(cy + shift[1], window[1]),
                           mod(cz + shift[2], window[2])));
  }
  std::set<int64_t> roots;
  for (int64_t v = 0; v < out.vertices; ++v) roots.insert(find(v));
  out.components = int64_t(roots.size());
  return out;
}

void export_obj(std::ostream& out, const LabelField& field, const ObjOptions& options) {
  LabelField cover = options.window_groups ? cover_field(field, options.window) : field;
  StructureCache cache(cover);
  SectorSet secs = sectors(cache);
  const GridDims& d = cover.dims();
  DecompositionValidity val = validate(cache);
  out << "# pld-meta dims " << d.nx << ' ' << d.ny << ' ' << d.nz << '\n';
  out << "# pld-meta labels " << cover.label_count() << '\n';
  std::string type = "undefined";
  try {
    auto t = type_vector(cover);
    type = "(";
    for (size_t i = 0; i < t.size(); ++i) type += (i ? "," : "") + std::to_string(t[i]);
    type += ")";
  } catch (const Error&) {
  }
  out << "# pld-meta type " << type << '\n';
  out << "# pld-meta flags " << (val.simple ? "simple" : "non_simple") << ' '
      << (val.proper ? "proper" : "non_proper") << '\n';

  // vertex pool: unwrapped corner coordinates, deduplicated and sorted
  std::map<std::array<int32_t, 3>, int64_t> vid;
  auto quad_corners = [&](int64_t fid) {
    int axis = int(fid % 3);
    Coord base = cover.voxel_coord(fid / 3);
    int bb = (axis + 1) % 3, cc = (axis + 2) % 3;
    auto corner = [&](int db, int dc) {
      std::array<int32_t, 3> p{base.x, base.y, base.z};
      p[size_t(bb)] += db;
      p[size_t(cc)] += dc;
      return p;
    };
    // orient the quad so its normal points from the a side to the b side
    std::array<std::array<int32_t, 3>, 4> cw{corner(0, 0), corner(1, 0), corner(1, 1),
                                             corner(0, 1)};
    if (axis == 1) std::swap(cw[1], cw[3]);  // (b,c)=(z,x) has reversed parity
    if (!cache.faces()[size_t(fid)].lower_is_a) std::swap(cw[1], cw[3]);
    return cw;
  };
  for (const SectorComponent& comp : secs.components)
    for (int64_t fid : comp.faces)
      for (const auto& c : quad_corners(fid)) vid.emplace(c, 0);
  int64_t next = 1;  // obj indices are 1-based
  for (auto& [coord, id] : vid) id = next++;
  for (const auto& [coord, id] : vid)
    out << "v " << coord[0] << ' ' << coord[1] << ' ' << coord[2] << '\n';
  // one group per sector component; window copies split automatically
  // because components of the cover are per-copy where the sector is bounded
  for (const SectorComponent& comp : secs.components) {
    out << "o pair_" << comp.a << '_' << comp.b << '\n';
    for (int64_t fid : comp.faces) {
      out << 'f';
      for (const auto& c : quad_corners(fid)) out << ' ' << vid[c];
      out << '\n';
    }
  }
}

namespace {

// Bundled scripts. Guides are frozen voxel paths on the 12x12x2 honeycomb;
// every move re-certifies its declared delta when applied.
const std::map<std::string, std::string>& script_map() {
  static const std::map<std::string, std::string> scripts = {
      {"make_222",
       "# honeycomb -> type (2,2,2): one type-1 stabilization per region,\n"
       "# each bridge hugging one arc of the complementary pair\n"
       "stab1 i=0 path=3,7,0;3,6,0;4,6,0;4,5,0;5,5,0;5,4,0;6,4,0;6,3,0;7,3,0\n"
       "expect type=(1,1,2)\n"
       "stab1 i=2 path=7,11,0;7,10,0;8,10,0;8,9,0;9,9,0;9,8,0;10,8,0;10,7,0;11,7,0\n"
       "expect type=(1,2,2)\n"
       "stab1 i=1 path=3,11,0;3,0,0;2,0,0;2,1,0;1,1,0;1,2,0;0,2,0;0,3,0;11,3,0\n"
       "expect type=(2,2,2)\n"},
      {"3srs_to_honeycomb",
       "# type (2,2,2) -> honeycomb by three certified type-1 destabilizations\n"
       "destab kind=1 restore=0 tube=3,11,0;3,0,0;2,0,0;2,1,0;1,1,0;1,2,0;0,2,0;0,3,0;11,3,0\n"
       "expect type=(2,2,1)\n"
       "destab kind=1 restore=1 tube=7,11,0;7,10,0;8,10,0;8,9,0;9,9,0;9,8,0;10,8,0;10,7,0;11,7,0\n"
       "expect type=(2,1,1)\n"
       "destab kind=1 restore=2 tube=3,7,0;3,6,0;4,6,0;4,5,0;5,5,0;5,4,0;6,4,0;6,3,0;7,3,0\n"
       "expect type=(1,1,1)\n"},
      {"ex222a",
       "# symmetric type-(2,2,2): every pair becomes a 2-holed torus plus a disk\n"
       "stab1 i=0 path=3,7,0;3,6,0;4,6,0;4,5,0;5,5,0;5,4,0;6,4,0;6,3,0;7,3,0\n"
       "stab1 i=2 path=7,11,0;7,10,0;8,10,0;8,9,0;9,9,0;9,8,0;10,8,0;10,7,0;11,7,0\n"
       "stab1 i=1 path=3,11,0;3,0,0;2,0,0;2,1,0;1,1,0;1,2,0;0,2,0;0,3,0;11,3,0\n"
       "expect type=(2,2,2)\n"},
      {"ex222b",
       "# asymmetric type-(2,2,2): two bridges run through region 0, so its\n"
       "# walls become 3-holed spheres and pair (1,2) keeps an intact annulus\n"
       "stab1 i=1 path=3,8,0;2,8,0;1,8,0;0,8,0;11,8,0\n"
       "stab1 i=2 path=8,2,0;8,3,0;9,3,0;10,3,0;11,3,0;0,3,0\n"
       "stab1 i=0 path=3,7,1;3,6,1;4,6,1;5,6,1;5,5,1;5,4,1;6,4,1;6,3,1;7,3,1\n"
       "expect type=(2,2,2)\n"},
      {"appendixA_direct",
       "# type-0 stabilization along a U-shaped drill through region 0\n"
       "stab0 i=0 j=1 path=3,11,0;2,11,0;2,10,0;2,9,0;2,8,0;3,8,0\n"
       "expect type=(1,2,2)\n"},
      {"appendixA_composite",
       "# the same relabeling generated by a type-2 then a type-1 stabilization\n"
       "stab2 i=0 j=1 k=2 path=3,11,0;2,11,0;2,10,0;2,9,0;2,8,0\n"
       "stab1 i=1 path=3,8,0\n"
       "expect type=(1,2,2)\n"},
  };
  return scripts;
}

}  // namespace

const std::string& bundled_script(const std::string& name) {
  auto it = script_map().find(name);
  if (it == script_map().end()) throw Error(Errc::ParseError, "unknown bundled script " + name);
  return it->second;
}

std::vector<std::string> bundled_script_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : script_map()) out.push_back(k);
  return out;
}

}  // namespace hdk
