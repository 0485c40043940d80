#pragma once

// Periodic cubical complex on the 3-torus with one region label per voxel.
//
// Cell conventions (all coordinates taken mod dims):
//   voxel  v=(x,y,z)     the unit cube [x,x+1]x[y,y+1]x[z,z+1]
//   face   (a, x,y,z)    the lower face of voxel (x,y,z) with normal axis a;
//                        it separates voxel (x,y,z)-e_a from voxel (x,y,z)
//   edge   (a, x,y,z)    the segment from vertex (x,y,z) to (x,y,z)+e_a
//   vertex (x,y,z)       the integer grid point
//
// Flat ids: voxel/vertex id = x + nx*(y + ny*z); face/edge id = 3*base + axis.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdk {

using Label = int32_t;

enum class Errc {
  LengthMismatch,
  LabelOutOfRange,
  MissingLabel,
  Overflow,
  DimsTooSmall,
  DisconnectedRegion,
  NonSimpleEncountered,
  CertificateFailed,
  PreconditionFailed,
  CertificationFailed,
  NotADisk,
  EmptiesRegion,
  ParseError,
  StepFailed,
  CollapseStuck,
  TooManyLabels,
  InvalidColoring,
  InvalidField,
  NotAChainComplex,
  IoError,
  Internal,
};

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

private:
  Errc code_;
};

const char* errc_name(Errc c);

struct GridDims {
  int32_t nx = 0, ny = 0, nz = 0;

  int64_t voxels() const { return int64_t(nx) * ny * nz; }
  int32_t axis(int a) const { return a == 0 ? nx : (a == 1 ? ny : nz); }
  bool operator==(const GridDims&) const = default;
};

struct Coord {
  int32_t x = 0, y = 0, z = 0;
  bool operator==(const Coord&) const = default;
};

// Cell of the torus complex in (dim, base, spanned-axes) form.
struct CellId {
  int8_t dim = 0;
  Coord base;
  uint8_t axes = 0;  // bitmask of spanned axes, popcount == dim
};

// Effective voxel ceiling; HDK_CELL_LIMIT overrides the 2^27 default.
int64_t cell_limit();

class LabelField {
public:
  static LabelField create(GridDims dims, std::vector<Label> labels, int32_t label_count);

  const GridDims& dims() const { return dims_; }
  int32_t label_count() const { return k_; }
  const std::vector<Label>& raw() const { return labels_; }

  int64_t voxel_index(int32_t x, int32_t y, int32_t z) const {
    x = wrap(x, dims_.nx);
    y = wrap(y, dims_.ny);
    z = wrap(z, dims_.nz);
    return x + int64_t(dims_.nx) * (y + int64_t(dims_.ny) * z);
  }
  Coord voxel_coord(int64_t id) const {
    int32_t x = int32_t(id % dims_.nx);
    int64_t r = id / dims_.nx;
    return Coord{x, int32_t(r % dims_.ny), int32_t(r / dims_.ny)};
  }

  Label label(int32_t x, int32_t y, int32_t z) const { return labels_[size_t(voxel_index(x, y, z))]; }
  Label label_at(int64_t voxel) const { return labels_[size_t(voxel)]; }

  // Voxel neighbor across the face in direction +/-axis.
  int64_t neighbor(int64_t voxel, int axis, int step) const;

  // Face id 3*b+a separates voxel b-e_a from voxel b. Returns {lower, upper}.
  std::array<int64_t, 2> face_sides(int64_t face) const;

  // The 4 voxels around edge id 3*b+a in cyclic order, and the 4 faces
  // between consecutive quadrants (faces[i] separates quad[i] from quad[i+1]).
  std::array<int64_t, 4> edge_quadrants(int64_t edge) const;
  std::array<int64_t, 4> edge_faces(int64_t edge) const;

  // The 8 voxels around vertex v: octant s in {0..7} (bits x,y,z) is voxel
  // (v - (1,1,1) + s) componentwise mod dims.
  std::array<int64_t, 8> vertex_octants(int64_t vertex) const;

  // Endpoint vertices of edge id, {base, base+e_a}.
  std::array<int64_t, 2> edge_vertices(int64_t edge) const;
  // The 4 boundary edges of a face, and its 4 corner vertices.
  std::array<int64_t, 4> face_edges(int64_t face) const;
  std::array<int64_t, 4> face_vertices(int64_t face) const;

  static int32_t wrap(int64_t v, int32_t n) {
    int64_t m = v % n;
    return int32_t(m < 0 ? m + n : m);
  }

  bool operator==(const LabelField&) const = default;

private:
  LabelField() = default;
  GridDims dims_;
  int32_t k_ = 0;
  std::vector<Label> labels_;
};

// Counts per dimension: N, 3N, 3N, N for dim 3, 2, 1, 0.
int64_t cell_count(const GridDims& dims, int dim);

// Enumerates every cell of the given dimension once, in id order.
std::vector<CellId> cells(const LabelField& field, int dim);

// CellId for flat ids under the conventions above.
CellId face_cell(const LabelField& field, int64_t face);
CellId edge_cell(const LabelField& field, int64_t edge);
CellId vertex_cell(const LabelField& field, int64_t vertex);

// Each voxel becomes s^3 copies of itself; the embedded polyhedron is
// unchanged up to isotopy.
LabelField subdivide(const LabelField& field, int s);

// Label-field file format (pld 1): see README. Bit-exact writer.
LabelField read_pld(std::istream& in);
LabelField read_pld_file(const std::string& path);
void write_pld(std::ostream& out, const LabelField& field);
void write_pld_file(const std::string& path, const LabelField& field);

}  // namespace hdk
