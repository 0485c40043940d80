#pragma once

// Extraction of the partition polyhedron from a label field: face/edge/vertex
// classification against the three local models (disk, triple line, vertex),
// sector components, the singular graph, and decomposition validity.

#include <optional>

#include "hdk/grid.hpp"

namespace hdk {

enum class FaceClass : uint8_t { Interior, Sector };
enum class EdgeClass : uint8_t { Interior, Surface, Triple, Cross };
enum class VertexClass : uint8_t { Interior, Surface, TripleLine, Tetrahedral, NonSimple };

struct FaceInfo {
  FaceClass cls = FaceClass::Interior;
  Label a = -1, b = -1;    // sector pair, a < b
  bool lower_is_a = false;  // true if the voxel on the lower side carries label a
};

FaceInfo classify_face(const LabelField& field, int64_t face);
EdgeClass classify_edge(const LabelField& field, int64_t edge);
VertexClass classify_vertex(const LabelField& field, int64_t vertex);

// Per-cell classification tables shared by the higher-level computations.
class StructureCache {
public:
  explicit StructureCache(const LabelField& field);

  const LabelField& field() const { return *field_; }
  const std::vector<FaceInfo>& faces() const { return faces_; }
  const std::vector<EdgeClass>& edges() const { return edges_; }
  const std::vector<VertexClass>& vertices() const { return vertices_; }

  bool has_cross_edges() const { return cross_edges_ > 0; }
  bool has_nonsimple_vertices() const { return nonsimple_vertices_ > 0; }
  int64_t sector_face_count() const { return sector_faces_; }

private:
  const LabelField* field_;
  std::vector<FaceInfo> faces_;
  std::vector<EdgeClass> edges_;
  std::vector<VertexClass> vertices_;
  int64_t cross_edges_ = 0;
  int64_t nonsimple_vertices_ = 0;
  int64_t sector_faces_ = 0;
};

struct SectorComponent {
  Label a = -1, b = -1;
  std::vector<int64_t> faces;  // sorted face ids
};

struct SectorSet {
  std::vector<SectorComponent> components;  // sorted by (a, b, min face)
  // face id -> component index, -1 for non-sector faces
  std::vector<int32_t> component_of_face;
};

SectorSet sectors(const StructureCache& cache);

struct SingularGraph {
  std::vector<int64_t> triple_edges;
  std::vector<int64_t> p_vertices;        // Tetrahedral vertices
  int64_t triple_line_vertices = 0;
  int64_t component_count = 0;
  int64_t circle_count = 0;  // components with no Tetrahedral vertex
};

// Throws NonSimpleEncountered on Cross/NonSimple cells unless lenient.
SingularGraph singular_graph(const StructureCache& cache, bool lenient = false);

struct SimplicityReport {
  bool simple = true;
  std::vector<int64_t> cross_edges;
  std::vector<int64_t> nonsimple_vertices;
};

SimplicityReport is_simple(const StructureCache& cache);

struct DecompositionValidity {
  bool regions_connected = false;
  bool partition_connected = false;
  bool simple = false;
  bool proper = false;
  bool overall = false;
};

// proper == regions_connected in this representation: every sector separates
// two distinct face-connected regions, so a loop meeting P once would join
// two different regions.
DecompositionValidity validate(const StructureCache& cache);
DecompositionValidity validate(const LabelField& field);

// Connected components of one label class under face adjacency.
int64_t region_component_count(const LabelField& field, Label label);

}  // namespace hdk
