#include "hdk/report.hpp"

#include <json.hpp>

#include <sstream>

namespace hdk {

using ordered_json = nlohmann::ordered_json;

DecompositionReport build_report(const LabelField& field) {
  DecompositionReport rep;
  rep.dims = field.dims();
  rep.labels = field.label_count();
  StructureCache cache(field);
  SectorSet secs = sectors(cache);
  for (Label l = 0; l < rep.labels; ++l) {
    rep.regions.push_back(region_summary_lenient(field, l));
    if (rep.regions.back().connected) {
      rep.images.push_back(h1_image(field, l));
    } else {
      rep.images.push_back(LatticeImage{});
    }
  }
  bool all_cert = true;
  for (const RegionSummary& s : rep.regions) all_cert &= s.handlebody_cert;
  if (all_cert) {
    std::vector<int64_t> t;
    for (const RegionSummary& s : rep.regions) t.push_back(s.h1_rank);
    std::sort(t.begin(), t.end());
    rep.type = std::move(t);
  }
  for (Label a = 0; a < rep.labels; ++a)
    for (Label b = a + 1; b < rep.labels; ++b) {
      SurfaceProfile p = surface_profile(cache, secs, a, b);
      if (!p.components.empty()) rep.pairs.push_back(std::move(p));
    }
  SingularGraph g = singular_graph(cache, true);
  rep.p_vertices = int64_t(g.p_vertices.size());
  rep.triple_circles = g.circle_count;
  rep.singular_components = g.component_count;
  rep.validity = validate(cache);
  rep.continuity = classify_continuity(field);
  return rep;
}

namespace {

ordered_json lattice_json(const LatticeImage& img) {
  ordered_json j;
  j["rank"] = img.rank;
  ordered_json basis = ordered_json::array();
  for (int i = 0; i < img.rank; ++i)
    basis.push_back({img.basis[size_t(i)][0], img.basis[size_t(i)][1], img.basis[size_t(i)][2]});
  j["basis"] = basis;
  j["index"] = img.index;  // -1 encodes an infinite index
  return j;
}

ordered_json continuity_json(const ContinuityVerdict& v) {
  ordered_json j;
  switch (v.kind) {
    case ContinuityVerdict::Kind::NContinuous:
      j["verdict"] = "n_continuous";
      j["n"] = v.n;
      break;
    case ContinuityVerdict::Kind::InfinitelyManyDomains:
      j["verdict"] = "infinitely_many_domains";
      j["witness_label"] = v.witness_label;
      break;
    case ContinuityVerdict::Kind::DiskSector:
      j["verdict"] = "disk_sector";
      j["witness_pair"] = {v.witness_a, v.witness_b};
      break;
    case ContinuityVerdict::Kind::NotProperRepresentation:
      j["verdict"] = "not_proper_representation";
      break;
  }
  return j;
}

ordered_json invariants_json(const DecompositionReport& rep) {
  ordered_json j;
  j["labels"] = rep.labels;
  if (rep.type) j["type_vector"] = *rep.type;
  else j["type_vector"] = nullptr;
  ordered_json regions = ordered_json::array();
  for (size_t i = 0; i < rep.regions.size(); ++i) {
    const RegionSummary& s = rep.regions[i];
    ordered_json r;
    r["label"] = s.label;
    r["connected"] = s.connected;
    r["euler"] = s.euler_closure;
    r["h1_rank"] = s.h1_rank;
    r["h2_rank"] = s.h2_rank;
    r["h1_torsion_free"] = s.h1_torsion_free;
    r["boundary_components"] = s.boundary_components;
    r["boundary_genus"] = s.boundary_genus;
    r["handlebody_cert"] = s.handlebody_cert;
    r["h1_image"] = lattice_json(rep.images[i]);
    regions.push_back(std::move(r));
  }
  j["regions"] = std::move(regions);
  ordered_json pairs = ordered_json::array();
  for (const SurfaceProfile& p : rep.pairs) {
    ordered_json pj;
    pj["pair"] = {p.a, p.b};
    ordered_json comps = ordered_json::array();
    for (const SurfaceComponentProfile& c : p.components)
      comps.push_back({{"euler", c.euler},
                       {"boundary", c.boundary_circles},
                       {"genus", c.genus},
                       {"orientable", c.orientable}});
    pj["components"] = std::move(comps);
    pairs.push_back(std::move(pj));
  }
  j["pairs"] = std::move(pairs);
  j["singular"] = {{"p_vertices", rep.p_vertices},
                   {"circles", rep.triple_circles},
                   {"components", rep.singular_components}};
  j["validity"] = {{"regions_connected", rep.validity.regions_connected},
                   {"partition_connected", rep.validity.partition_connected},
                   {"simple", rep.validity.simple},
                   {"proper", rep.validity.proper},
                   {"overall", rep.validity.overall}};
  j["continuity"] = continuity_json(rep.continuity);
  return j;
}

}  // namespace

std::string report_invariants_json(const DecompositionReport& rep) {
  return invariants_json(rep).dump(2) + "\n";
}

std::string report_json(const DecompositionReport& rep) {
  ordered_json j;
  ordered_json meta;
  meta["dims"] = {rep.dims.nx, rep.dims.ny, rep.dims.nz};
  ordered_json voxels = ordered_json::array();
  for (const RegionSummary& s : rep.regions) voxels.push_back(s.voxels);
  meta["voxels_per_region"] = std::move(voxels);
  j["meta"] = std::move(meta);
  j["invariants"] = invariants_json(rep);
  return j.dump(2) + "\n";
}

std::string report_text(const DecompositionReport& rep) {
  std::ostringstream out;
  out << "dims " << rep.dims.nx << 'x' << rep.dims.ny << 'x' << rep.dims.nz << ", " << rep.labels
      << " regions\n";
  out << "type: ";
  if (rep.type) {
    out << '(';
    for (size_t i = 0; i < rep.type->size(); ++i) out << (i ? "," : "") << (*rep.type)[i];
    out << ")\n";
  } else {
    out << "undefined (a handlebody certificate failed)\n";
  }
  for (size_t i = 0; i < rep.regions.size(); ++i) {
    const RegionSummary& s = rep.regions[i];
    out << "region " << s.label << ": voxels=" << s.voxels << " euler=" << s.euler_closure
        << " h1=" << s.h1_rank << " boundary=" << s.boundary_components << " genus=[";
    for (size_t k = 0; k < s.boundary_genus.size(); ++k)
      out << (k ? "," : "") << s.boundary_genus[k];
    out << "] cert=" << (s.handlebody_cert ? "pass" : "fail")
        << " image_rank=" << rep.images[i].rank << "\n";
  }
  for (const SurfaceProfile& p : rep.pairs) {
    out << "pair (" << p.a << ',' << p.b << "): ";
    for (size_t i = 0; i < p.components.size(); ++i) {
      const auto& c = p.components[i];
      out << (i ? " " : "") << "(chi=" << c.euler << ",b=" << c.boundary_circles
          << ",g=" << c.genus << ")";
    }
    out << "\n";
  }
  out << "singular: p_vertices=" << rep.p_vertices << " circles=" << rep.triple_circles
      << " components=" << rep.singular_components << "\n";
  out << "validity: regions=" << rep.validity.regions_connected
      << " partition=" << rep.validity.partition_connected << " simple=" << rep.validity.simple
      << " proper=" << rep.validity.proper << " overall=" << rep.validity.overall << "\n";
  switch (rep.continuity.kind) {
    case ContinuityVerdict::Kind::NContinuous:
      out << "continuity: " << rep.continuity.n << "-continuous\n";
      break;
    case ContinuityVerdict::Kind::InfinitelyManyDomains:
      out << "continuity: infinitely many domains (region " << rep.continuity.witness_label
          << " has image rank < 3)\n";
      break;
    case ContinuityVerdict::Kind::DiskSector:
      out << "continuity: disk sector on pair (" << rep.continuity.witness_a << ','
          << rep.continuity.witness_b << ")\n";
      break;
    case ContinuityVerdict::Kind::NotProperRepresentation:
      out << "continuity: not a proper representation\n";
      break;
  }
  return out.str();
}

namespace {

void diff_json(const std::string& path, const ordered_json& a, const ordered_json& b,
               std::vector<std::string>& out) {
  if (a == b) return;
  if (a.is_object() && b.is_object()) {
    for (auto it = a.begin(); it != a.end(); ++it) {
      std::string sub = path.empty() ? it.key() : path + "." + it.key();
      if (!b.contains(it.key())) out.push_back(sub + ": only in first");
      else diff_json(sub, it.value(), b.at(it.key()), out);
    }
    for (auto it = b.begin(); it != b.end(); ++it)
      if (!a.contains(it.key()))
        out.push_back((path.empty() ? it.key() : path + "." + it.key()) + ": only in second");
    return;
  }
  if (a.is_array() && b.is_array()) {
    if (a.size() != b.size()) {
      out.push_back(path + ": " + std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                    " entries");
      return;
    }
    for (size_t i = 0; i < a.size(); ++i)
      diff_json(path + "[" + std::to_string(i) + "]", a[i], b[i], out);
    return;
  }
  out.push_back(path + ": " + a.dump() + " vs " + b.dump());
}

}  // namespace

std::vector<std::string> diff_reports(const DecompositionReport& a, const DecompositionReport& b) {
  std::vector<std::string> out;
  std::istringstream ja(report_invariants_json(a)), jb(report_invariants_json(b));
  diff_json("", ordered_json::parse(ja), ordered_json::parse(jb), out);
  return out;
}

}  // namespace hdk
