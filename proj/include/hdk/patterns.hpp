#pragma once

// Bundled decomposition generators, colorings, polycontinuity classification,
// covering-window lifts, and mesh export.

#include <iosfwd>
#include <optional>

#include "hdk/moves.hpp"
#include "hdk/topology.hpp"

namespace hdk {

struct GeneratorInfo {
  std::string name;
  GridDims default_dims;
  std::string dims_rule;  // human-readable constraint
};

const std::vector<GeneratorInfo>& generator_catalog();

// Throws DimsTooSmall when the dims violate the generator's rule.
LabelField generate(const std::string& name, std::optional<GridDims> dims = std::nullopt);

struct Coloring {
  std::vector<int32_t> color_of_label;  // size k, colors 0..n-1 surjective
  int32_t colors = 0;
};

struct ColoringViolation {
  int32_t component = -1;  // index into SectorSet::components
  Label a = -1, b = -1;
};

// Every sector component whose two sides share a color.
std::vector<ColoringViolation> check_coloring(const LabelField& field, const Coloring& coloring);

// Exact minimum-size coloring, lexicographically least assignment.
Coloring min_coloring(const LabelField& field);
std::optional<Coloring> find_coloring(const LabelField& field, int32_t colors);

struct ColoredType {
  std::vector<std::vector<int64_t>> genus_by_color;  // sorted per color
};

ColoredType colored_type(const LabelField& field, const Coloring& coloring);

struct ContinuityVerdict {
  enum class Kind { NContinuous, InfinitelyManyDomains, DiskSector, NotProperRepresentation };
  Kind kind = Kind::NotProperRepresentation;
  int64_t n = 0;               // NContinuous: sum of image indices
  Label witness_label = -1;    // InfinitelyManyDomains: region with rank < 3
  Label witness_a = -1, witness_b = -1;  // DiskSector: pair with a disk component

  bool operator==(const ContinuityVerdict&) const = default;
};

ContinuityVerdict classify_continuity(const LabelField& field);

struct WindowLift {
  std::array<int32_t, 3> window{1, 1, 1};
  std::vector<int64_t> components_per_label;
};

// Components of every region in the (mx,my,mz)-fold cover; each count is
// cross-checked against the index formula from the H1-image lattice.
WindowLift lift_window(const LabelField& field, std::array<int32_t, 3> window);
LabelField cover_field(const LabelField& field, std::array<int32_t, 3> window);

struct LiftedNet {
  int64_t vertices = 0;
  int64_t edges = 0;
  int64_t components = 0;
};

// Spine copies translated over the window with displacement-consistent gluing.
LiftedNet net_lift(const LabelField& field, Label label, std::array<int32_t, 3> window);

struct ObjOptions {
  bool window_groups = false;  // split groups per window copy
  std::array<int32_t, 3> window{1, 1, 1};
};

// One quad group per sector pair (and per window copy); vertices in voxel
// units with deterministic ordering; pld-meta header lines carry dims, type
// and validity flags.
void export_obj(std::ostream& out, const LabelField& field, const ObjOptions& options = {});

// Bundled move scripts (also shipped under scripts/).
const std::string& bundled_script(const std::string& name);
std::vector<std::string> bundled_script_names();

}  // namespace hdk
