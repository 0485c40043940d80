#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "hdk/grid.hpp"

using namespace hdk;

namespace {

LabelField constant_field(int n, Label value = 0, int k = 1) {
  return LabelField::create({n, n, n}, std::vector<Label>(size_t(n) * n * n, value), k);
}

LabelField x_parity_slabs() {
  std::vector<Label> l(8);
  for (int z = 0; z < 2; ++z)
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 2; ++x) l[size_t(x + 2 * (y + 2 * z))] = Label(x % 2);
  return LabelField::create({2, 2, 2}, l, 2);
}

}  // namespace

TEST_CASE("constant field construction") {
  LabelField f = constant_field(2);
  CHECK(f.dims().voxels() == 8);
  CHECK(f.label_count() == 1);
}

TEST_CASE("field invariants are enforced") {
  CHECK_THROWS_AS(LabelField::create({2, 2, 2}, std::vector<Label>(7, 0), 1), Error);
  CHECK_THROWS_AS(LabelField::create({2, 2, 2}, std::vector<Label>(8, 5), 3), Error);
  // label 2 never used
  std::vector<Label> l(8, 0);
  l[0] = 1;
  CHECK_THROWS_AS(LabelField::create({2, 2, 2}, l, 3), Error);
  CHECK_THROWS_AS(LabelField::create({1, 2, 2}, std::vector<Label>(4, 0), 1), Error);
}

TEST_CASE("voxel lookup wraps") {
  LabelField f = constant_field(2);
  CHECK(f.label(-1, -1, -1) == 0);
  LabelField s = x_parity_slabs();
  CHECK(s.label(3, 0, 0) == s.label(1, 0, 0));
  CHECK(s.label(3, 0, 0) == 1);
  // wrap totality: +nx shifts agree everywhere
  for (int x = -2; x < 4; ++x)
    for (int y = 0; y < 2; ++y) CHECK(s.label(x, y, 0) == s.label(x + 2, y, 0));
}

TEST_CASE("cell counts per dimension") {
  LabelField f = constant_field(2);
  CHECK(cells(f, 3).size() == 8);
  CHECK(cells(f, 2).size() == 24);
  CHECK(cells(f, 0).size() == 8);
  LabelField g = LabelField::create({3, 2, 2}, std::vector<Label>(12, 0), 1);
  CHECK(cells(g, 1).size() == 36);
  // euler characteristic of the torus complex is zero
  for (const LabelField* fp : {&f, &g}) {
    int64_t chi = 0;
    for (int d = 0; d <= 3; ++d) chi += (d % 2 == 0 ? 1 : -1) * cell_count(fp->dims(), d);
    CHECK(chi == 0);
  }
}

TEST_CASE("edge quadrants are the four voxels around the edge") {
  LabelField f = constant_field(3);
  int64_t base = f.voxel_index(1, 1, 1);
  auto q = f.edge_quadrants(3 * base + 0);  // x-edge at (1,1,1)
  CHECK(q[0] == f.voxel_index(1, 0, 0));
  CHECK(q[1] == f.voxel_index(1, 1, 0));
  CHECK(q[2] == f.voxel_index(1, 1, 1));
  CHECK(q[3] == f.voxel_index(1, 0, 1));
  auto faces = f.edge_faces(3 * base + 0);
  for (int i = 0; i < 4; ++i) {
    auto sides = f.face_sides(faces[size_t(i)]);
    bool ok = (sides[0] == q[size_t(i)] && sides[1] == q[size_t((i + 1) & 3)]) ||
              (sides[1] == q[size_t(i)] && sides[0] == q[size_t((i + 1) & 3)]);
    CHECK(ok);
  }
}

TEST_CASE("subdivision multiplies dims and copies labels") {
  LabelField f = subdivide(constant_field(2), 2);
  CHECK(f.dims() == GridDims{4, 4, 4});
  CHECK(f.label_count() == 1);
  LabelField s = subdivide(x_parity_slabs(), 3);
  CHECK(s.dims() == GridDims{6, 6, 6});
  for (int x = 0; x < 6; ++x)
    for (int y = 0; y < 6; ++y)
      for (int z = 0; z < 6; ++z) CHECK(s.label(x, y, z) == Label(x / 3 % 2));
}

TEST_CASE("pld round trip is bit exact") {
  LabelField s = x_parity_slabs();
  std::ostringstream out;
  write_pld(out, s);
  std::string text = out.str();
  CHECK(text.substr(0, 6) == "pld 1\n");
  CHECK(text.back() == '\n');
  std::istringstream in(text);
  LabelField back = read_pld(in);
  CHECK(back == s);
  std::ostringstream out2;
  write_pld(out2, back);
  CHECK(out2.str() == text);
}

TEST_CASE("pld reader accepts comments and rejects junk") {
  std::istringstream good("# comment\npld 1\ndims 2 2 2\n# another\nlabels 2\n0 1 0 1\n0 1 0 1\n");
  LabelField f = read_pld(good);
  CHECK(f.label(1, 0, 0) == 1);
  std::istringstream bad("pld 2\ndims 2 2 2\nlabels 1\n");
  CHECK_THROWS_AS(read_pld(bad), Error);
  std::istringstream trunc("pld 1\ndims 2 2 2\nlabels 1\n0 0 0\n");
  CHECK_THROWS_AS(read_pld(trunc), Error);
}
