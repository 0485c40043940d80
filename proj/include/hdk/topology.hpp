#pragma once

// Region-level exact topology: Euler characteristics of cut closures, surface
// classification of sector components, handlebody certificates, H1-image
// lattices in Z^3, and spines.

#include "hdk/homology.hpp"
#include "hdk/structure.hpp"

namespace hdk {

// Sublattice of Z^3 in row-style Hermite normal form: rows are basis vectors,
// pivot columns strictly increase, pivots positive, entries above a pivot
// reduced into [0, pivot). Equal lattices compare equal.
struct LatticeImage {
  int rank = 0;
  std::array<std::array<int64_t, 3>, 3> basis{};  // first `rank` rows
  int64_t index = -1;                             // |Z^3 / L| when rank 3, else -1 (infinite)

  bool operator==(const LatticeImage&) const = default;
};

LatticeImage hnf_lattice(const std::vector<std::array<int64_t, 3>>& generators);
bool lattice_contains(const LatticeImage& l, const std::array<int64_t, 3>& v);
// |Z^3 / (L + m Z^3)|: the number of components of the region's preimage in
// the m-fold cover.
int64_t cover_component_count(const LatticeImage& l, const std::array<int64_t, 3>& m);

struct SurfaceComponentProfile {
  int64_t euler = 0;
  int64_t boundary_circles = 0;
  int64_t genus = 0;
  bool orientable = true;

  auto operator<=>(const SurfaceComponentProfile&) const = default;
};

struct SurfaceProfile {
  Label a = -1, b = -1;
  std::vector<SurfaceComponentProfile> components;  // sorted by (euler, boundary)

  bool operator==(const SurfaceProfile&) const = default;
};

struct RegionSummary {
  Label label = -1;
  bool connected = false;
  int64_t voxels = 0;
  int64_t euler_closure = 0;
  int64_t h1_rank = 0;
  int64_t h2_rank = 0;
  bool h1_torsion_free = true;
  bool boundary_is_surface = true;  // every cut-closure vertex link is a disk
  int64_t boundary_components = 0;
  std::vector<int64_t> boundary_genus;  // sorted ascending
  bool handlebody_cert = false;
};

RegionSummary region_summary(const LabelField& field, Label label);
// Same computation without the connectedness precondition (used by reports).
RegionSummary region_summary_lenient(const LabelField& field, Label label);

// Profile of all sector components of the pair; empty when no shared sector.
SurfaceProfile surface_profile(const StructureCache& cache, const SectorSet& secs, Label a, Label b);
SurfaceProfile surface_profile(const LabelField& field, Label a, Label b);

// Sorted genus multiset; throws CertificateFailed naming the first bad label.
std::vector<int64_t> type_vector(const LabelField& field);

LatticeImage h1_image(const LabelField& field, Label label);

struct SpineEdge {
  int32_t tail = 0, head = 0;
  std::array<int64_t, 3> displacement{};
};

struct SpineGraph {
  int64_t vertices = 0;
  std::vector<Coord> positions;  // grid-vertex anchor per spine vertex
  std::vector<SpineEdge> edges;  // displacements are true geometric steps
  int64_t euler = 0;             // vertices - edges
  LatticeImage cycle_lattice;
};

// Greedy free collapse of the cut closure to a 1-complex, then degree-2
// suppression. Postconditions asserted: euler matches the closure's Euler
// characteristic and the cycle displacement lattice matches h1_image.
SpineGraph spine(const LabelField& field, Label label);

}  // namespace hdk
