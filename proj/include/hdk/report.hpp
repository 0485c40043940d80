#pragma once

// The decomposition report: the full invariant bundle used as the equivalence
// fingerprint. The canonical serialization covers only subdivision-invariant
// data (no dims, no voxel counts) so that equal decompositions are byte-equal
// even across refinement; size metadata travels in a separate meta section.

#include <string>

#include "hdk/patterns.hpp"

namespace hdk {

struct DecompositionReport {
  GridDims dims;
  int32_t labels = 0;
  std::vector<RegionSummary> regions;
  std::vector<LatticeImage> images;
  std::optional<std::vector<int64_t>> type;  // absent when a certificate fails
  std::vector<SurfaceProfile> pairs;         // non-empty pairs, sorted by (a, b)
  int64_t p_vertices = 0;
  int64_t triple_circles = 0;
  int64_t singular_components = 0;
  DecompositionValidity validity;
  ContinuityVerdict continuity;
};

DecompositionReport build_report(const LabelField& field);

// Canonical invariant fingerprint: stable key order, integers only, sorted
// components. Byte-equal iff the reports agree.
std::string report_invariants_json(const DecompositionReport& report);
// Full serialization: {"meta": {...}, "invariants": {...}}.
std::string report_json(const DecompositionReport& report);
std::string report_text(const DecompositionReport& report);

// Human-readable field-by-field differences of the invariant sections.
std::vector<std::string> diff_reports(const DecompositionReport& a, const DecompositionReport& b);

}  // namespace hdk
