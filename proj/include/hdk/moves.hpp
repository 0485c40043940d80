#pragma once

// Certified move engine: stabilizations, destabilizations, 0-2/2-0/2-3/3-2
// moves and domain-connections as guided voxel relabelings. A move commits
// only if recomputing the invariants before and after shows exactly the
// combinatorial delta its definition declares; otherwise the input field is
// returned untouched inside the thrown error.

#include <optional>
#include <string>

#include "hdk/topology.hpp"

namespace hdk {

struct GuidePath {
  std::vector<Coord> voxels;

  // "x,y,z;x,y,z;..." with coordinates taken mod dims
  static GuidePath parse(const std::string& text);
  // face-connected, injective, no wrap double-adjacency between steps
  void validate(const LabelField& field) const;
};

enum class MoveKind {
  Stab0,
  Stab1,
  Stab2,
  Destab0,
  Destab1,
  Destab2,
  Move02,
  Move20,
  Move23,
  Move32,
  Connect,
  RawRelabel,
  Subdivide,
};

const char* move_kind_name(MoveKind k);

struct PairComponentDelta {
  Label a = -1, b = -1;
  int64_t before = 0, after = 0;
};

struct DeltaCert {
  std::vector<int64_t> type_before, type_after;  // sorted genus multisets
  int64_t p_vertices_before = 0, p_vertices_after = 0;
  std::vector<PairComponentDelta> pair_deltas;  // pairs whose component count changed
  DecompositionValidity validity_after;
};

struct VoxelChange {
  int64_t voxel = 0;
  Label before = -1, after = -1;
};

struct MoveRecord {
  MoveKind kind = MoveKind::RawRelabel;
  std::string params;
  DeltaCert cert;
  std::vector<VoxelChange> changes;
  Label merged_from = -1, merged_into = -1;  // Connect only
  int subdivide_factor = 0;                  // Subdivide only
};

struct MoveResult {
  LabelField field;
  MoveRecord record;
};

// Primitive relabeling; no certification beyond field invariants.
MoveResult relabel(const LabelField& field, const std::vector<Coord>& voxels, Label new_label);

MoveResult stab_type0(const LabelField& field, Label i, Label j, const GuidePath& guide);
MoveResult stab_type1(const LabelField& field, Label i, const GuidePath& guide);
MoveResult stab_type2(const LabelField& field, Label i, Label j, Label k, const GuidePath& guide);

enum class DestabKind { Type0, Type1, Type2 };
MoveResult destab(const LabelField& field, DestabKind kind, const std::vector<Coord>& tube,
                  Label restore_label);

MoveResult move_02(const LabelField& field, Label i, Label l, const GuidePath& guide);
MoveResult move_23(const LabelField& field, Label m, const GuidePath& guide);
// Inverse moves recover the finger from the originating record in the ledger.
MoveResult move_20(const LabelField& field, Label a, Label b, int64_t component_index,
                   const std::vector<MoveRecord>& ledger);
MoveResult move_32(const LabelField& field, Label a, Label b, int64_t component_index,
                   const std::vector<MoveRecord>& ledger);

MoveResult domain_connection(const LabelField& field, Label a, Label b, const GuidePath& guide);

// Line-based script; '#' starts a comment. See README for the grammar.
struct ScriptStep {
  enum class Op {
    Subdivide,
    Stab0,
    Stab1,
    Stab2,
    Destab,
    Move02,
    Move20,
    Move23,
    Move32,
    Connect,
    ExpectType,
    ExpectPVertices,
    ExpectPairComponents,
  };
  Op op;
  int line = 0;
  Label i = -1, j = -1, k = -1, l = -1, a = -1, b = -1, m = -1, restore = -1;
  int factor = 0;
  DestabKind destab_kind = DestabKind::Type0;
  GuidePath path;
  std::vector<Coord> tube;
  int64_t component_index = -1;
  std::vector<int64_t> expect_type;
  int64_t expect_count = -1;
};

struct MoveScript {
  std::vector<ScriptStep> steps;

  static MoveScript parse(std::istream& in);
  static MoveScript parse_text(const std::string& text);
  static MoveScript parse_file(const std::string& path);
};

struct ScriptOutcome {
  LabelField field;
  std::vector<MoveRecord> ledger;
};

// Applies the script in order; an expect clause or move failure aborts with
// StepFailed carrying the step index.
ScriptOutcome run_script(const LabelField& field, const MoveScript& script);

// Invariant bundle used for certification (lenient: type may be absent).
struct CertSnapshot {
  std::optional<std::vector<int64_t>> type;      // sorted
  std::vector<int64_t> genus_by_label;           // -1 when the cert fails
  std::vector<SurfaceProfile> pair_profiles;     // all pairs a<b
  int64_t p_vertices = 0;
  DecompositionValidity validity;
  int32_t label_count = 0;
};

CertSnapshot cert_snapshot(const LabelField& field);

}  // namespace hdk
