#pragma once

// Exact chain-complex machinery: integer Smith normal form with GF(2)/GF(3)
// rank cross-checks, elementary collapse, and the cut-closure complexes of
// regions (3-complex) and sector components (2-complex).
//
// Cut-closure convention: shared faces/edges/vertices are duplicated per
// local incidence germ. Around an edge the label's quadrants split into
// cyclic runs, one edge copy per run; around a vertex the label's octants
// split into face-adjacency components, one vertex copy per component.

#include <array>

#include "hdk/grid.hpp"
#include "hdk/structure.hpp"

namespace hdk {

struct DenseMat {
  int64_t rows = 0, cols = 0;
  std::vector<int64_t> a;  // row-major

  int64_t& at(int64_t r, int64_t c) { return a[size_t(r * cols + c)]; }
  int64_t at(int64_t r, int64_t c) const { return a[size_t(r * cols + c)]; }
  static DenseMat zero(int64_t r, int64_t c) {
    DenseMat m;
    m.rows = r;
    m.cols = c;
    m.a.assign(size_t(r * c), 0);
    return m;
  }
};

// Diagonal of the Smith normal form (nonzero entries, in divisibility order).
std::vector<int64_t> smith_normal_form(DenseMat m);
int64_t rank_mod_p(const DenseMat& m, int64_t p);

struct HomologyResult {
  std::vector<int64_t> betti;
  std::vector<bool> torsion;  // torsion[d]: H_d has torsion
};

// boundaries[i] is the matrix of d_(i+1): (i+1)-chains -> i-chains.
// cell_counts[d] gives the rank of the chain group in dimension d.
HomologyResult homology_rank(const std::vector<int64_t>& cell_counts,
                             const std::vector<DenseMat>& boundaries);

struct ChainComplex {
  struct Boundary {
    std::vector<int64_t> off;  // counts[d]+1 offsets
    std::vector<int32_t> cell;
    std::vector<int8_t> sign;
  };
  std::array<int64_t, 4> counts{0, 0, 0, 0};
  std::array<Boundary, 4> bnd;  // bnd[d] = boundary of d-cells, d >= 1
  int top_dim = 0;
};

// Removes free pairs greedily, top dimension first. Returns per-dim alive
// flags; the surviving subcomplex is homotopy equivalent to the input.
struct CollapseResult {
  std::array<std::vector<char>, 4> alive;
  std::array<int64_t, 4> alive_counts{0, 0, 0, 0};
};
CollapseResult collapse(const ChainComplex& cx);

// Homology of the complex: collapse, then SNF on the surviving core with a
// GF(2)/GF(3) cross-check of the ranks.
HomologyResult homology_of_complex(const ChainComplex& cx);

// Full cubical chain complex of the torus carrying the field's dims.
ChainComplex torus_complex(const GridDims& dims);

// Cut-closure complex of one region.
struct RegionComplex {
  ChainComplex cx;
  Label label = -1;
  // per-cell provenance
  std::vector<int64_t> cell3_voxel;
  std::vector<int64_t> cell2_face;
  std::vector<int64_t> cell2_side;  // germ side voxel, -1 for interior faces
  std::vector<int64_t> cell1_edge;
  std::vector<int8_t> cell1_start, cell1_len;  // quadrant run
  std::vector<int64_t> cell0_vertex;
  std::vector<uint8_t> cell0_mask;  // octant component mask
  // grid-cell -> first complex-cell lookup
  std::vector<int32_t> face_lower_cell, face_upper_cell;  // germ or shared interior id
  std::vector<int32_t> edge_first_cell;                   // runs in canonical order
  std::vector<int32_t> vertex_first_cell;                 // components by min octant

  int32_t edge_cell_for(const LabelField& f, int64_t edge, int64_t quadrant_voxel) const;
  int32_t vertex_cell_for(const LabelField& f, int64_t vertex, int64_t octant_voxel) const;
};

RegionComplex build_region_complex(const LabelField& field, Label label);

// Cyclic runs of `label` among the 4 quadrant labels of an edge.
// run_of[q] = run slot for quadrant q (-1 if not label), slots in canonical
// order (sorted by start position; a full cycle is one run starting at 0).
int edge_runs(const std::array<Label, 4>& quads, Label label, std::array<int8_t, 4>& run_of,
              std::array<int8_t, 4>& run_start, std::array<int8_t, 4>& run_len);

// Face-adjacency components of `label` octants around a vertex, canonical
// order by minimal octant. comp_of[s] = slot or -1. Returns component count.
int octant_components(const std::array<Label, 8>& oct, Label label, std::array<int8_t, 8>& comp_of,
                      std::array<uint8_t, 8>& comp_mask);

// True when the octant set (a proper nonempty subset, face-connected) closes
// up to a disk on the link sphere; interior vertices (mask 0xFF) pass too.
bool octant_component_is_disk(uint8_t mask);

// Cut-closure complex of one sector component (a 2-complex).
struct SectorComplex {
  ChainComplex cx;  // dims 0..2 used
  // 1-cells: (edge, face) germs; paired germs across a Surface edge share one cell
  std::vector<int64_t> cell1_edge;
  std::vector<int64_t> cell1_face;   // representative incident face
  std::vector<char> cell1_boundary;  // not glued to a second face
  std::vector<int64_t> cell0_vertex;
};

SectorComplex build_sector_complex(const StructureCache& cache, const SectorComponent& comp);

}  // namespace hdk
