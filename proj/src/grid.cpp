#include "hdk/grid.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hdk {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::LabelOutOfRange: return "LabelOutOfRange";
    case Errc::MissingLabel: return "MissingLabel";
    case Errc::Overflow: return "Overflow";
    case Errc::DimsTooSmall: return "DimsTooSmall";
    case Errc::DisconnectedRegion: return "DisconnectedRegion";
    case Errc::NonSimpleEncountered: return "NonSimpleEncountered";
    case Errc::CertificateFailed: return "CertificateFailed";
    case Errc::PreconditionFailed: return "PreconditionFailed";
    case Errc::CertificationFailed: return "CertificationFailed";
    case Errc::NotADisk: return "NotADisk";
    case Errc::EmptiesRegion: return "EmptiesRegion";
    case Errc::ParseError: return "ParseError";
    case Errc::StepFailed: return "StepFailed";
    case Errc::CollapseStuck: return "CollapseStuck";
    case Errc::TooManyLabels: return "TooManyLabels";
    case Errc::InvalidColoring: return "InvalidColoring";
    case Errc::InvalidField: return "InvalidField";
    case Errc::NotAChainComplex: return "NotAChainComplex";
    case Errc::IoError: return "IoError";
    case Errc::Internal: return "Internal";
  }
  return "Unknown";
}

int64_t cell_limit() {
  static int64_t limit = [] {
    if (const char* env = std::getenv("HDK_CELL_LIMIT")) {
      char* end = nullptr;
      long long v = std::strtoll(env, &end, 10);
      if (end != env && v > 0) return int64_t(v);
    }
    return int64_t(1) << 27;
  }();
  return limit;
}

LabelField LabelField::create(GridDims dims, std::vector<Label> labels, int32_t label_count) {
  if (dims.nx < 2 || dims.ny < 2 || dims.nz < 2)
    throw Error(Errc::DimsTooSmall, "grid dims must be >= 2 per axis");
  if (dims.voxels() > cell_limit())
    throw Error(Errc::Overflow, "voxel count " + std::to_string(dims.voxels()) +
                                    " exceeds cell limit " + std::to_string(cell_limit()));
  if (int64_t(labels.size()) != dims.voxels())
    throw Error(Errc::LengthMismatch, "label array length " + std::to_string(labels.size()) +
                                          " != voxel count " + std::to_string(dims.voxels()));
  if (label_count < 1) throw Error(Errc::LabelOutOfRange, "label count must be >= 1");
  std::vector<char> seen(size_t(label_count), 0);
  for (Label l : labels) {
    if (l < 0 || l >= label_count)
      throw Error(Errc::LabelOutOfRange, "label " + std::to_string(l) + " outside [0," +
                                             std::to_string(label_count) + ")");
    seen[size_t(l)] = 1;
  }
  for (int32_t l = 0; l < label_count; ++l)
    if (!seen[size_t(l)])
      throw Error(Errc::MissingLabel, "label " + std::to_string(l) + " never used");
  LabelField f;
  f.dims_ = dims;
  f.k_ = label_count;
  f.labels_ = std::move(labels);
  return f;
}

int64_t LabelField::neighbor(int64_t voxel, int axis, int step) const {
  Coord c = voxel_coord(voxel);
  switch (axis) {
    case 0: c.x = wrap(c.x + step, dims_.nx); break;
    case 1: c.y = wrap(c.y + step, dims_.ny); break;
    default: c.z = wrap(c.z + step, dims_.nz); break;
  }
  return voxel_index(c.x, c.y, c.z);
}

std::array<int64_t, 2> LabelField::face_sides(int64_t face) const {
  int axis = int(face % 3);
  int64_t base = face / 3;
  return {neighbor(base, axis, -1), base};
}

std::array<int64_t, 4> LabelField::edge_quadrants(int64_t edge) const {
  int axis = int(edge % 3);
  int64_t base = edge / 3;
  int b = (axis + 1) % 3, c = (axis + 2) % 3;
  Coord p = voxel_coord(base);
  auto vox = [&](int db, int dc) {
    Coord q = p;
    auto shift = [&](int ax, int d) {
      if (ax == 0) q.x = wrap(q.x + d, dims_.nx);
      else if (ax == 1) q.y = wrap(q.y + d, dims_.ny);
      else q.z = wrap(q.z + d, dims_.nz);
    };
    shift(b, db);
    shift(c, dc);
    return voxel_index(q.x, q.y, q.z);
  };
  // cyclic order around the edge: (-,-), (0,-), (0,0), (-,0) in (b,c)
  return {vox(-1, -1), vox(0, -1), vox(0, 0), vox(-1, 0)};
}

std::array<int64_t, 4> LabelField::edge_faces(int64_t edge) const {
  int axis = int(edge % 3);
  int b = (axis + 1) % 3, c = (axis + 2) % 3;
  auto quads = edge_quadrants(edge);
  // faces[i] separates quads[i] from quads[(i+1)%4]; consecutive quadrants
  // differ in axis b (steps 0->1, 2->3) or axis c (1->2, 3->0).
  // face(a, v) is the lower-a face of voxel v.
  std::array<int64_t, 4> f{};
  f[0] = 3 * quads[1] + b;  // between (-,-) and (0,-): lower-b face of (0,-)
  f[1] = 3 * quads[2] + c;  // between (0,-) and (0,0): lower-c face of (0,0)
  f[2] = 3 * quads[2] + b;  // between (0,0) and (-,0): lower-b face of (0,0)
  f[3] = 3 * quads[3] + c;  // between (-,0) and (-,-): lower-c face of (-,0)
  return f;
}

std::array<int64_t, 8> LabelField::vertex_octants(int64_t vertex) const {
  Coord p = voxel_coord(vertex);
  std::array<int64_t, 8> out{};
  for (int s = 0; s < 8; ++s) {
    int32_t x = wrap(p.x - 1 + (s & 1), dims_.nx);
    int32_t y = wrap(p.y - 1 + ((s >> 1) & 1), dims_.ny);
    int32_t z = wrap(p.z - 1 + ((s >> 2) & 1), dims_.nz);
    out[size_t(s)] = voxel_index(x, y, z);
  }
  return out;
}

std::array<int64_t, 2> LabelField::edge_vertices(int64_t edge) const {
  int axis = int(edge % 3);
  int64_t base = edge / 3;
  return {base, neighbor(base, axis, +1)};
}

std::array<int64_t, 4> LabelField::face_edges(int64_t face) const {
  int axis = int(face % 3);
  int64_t base = face / 3;
  int b = (axis + 1) % 3, c = (axis + 2) % 3;
  int64_t vb = neighbor(base, b, +1);
  int64_t vc = neighbor(base, c, +1);
  // face (a, base) is spanned by b,c at the corner `base` vertex
  return {3 * base + b, 3 * base + c, 3 * vc + b, 3 * vb + c};
}

std::array<int64_t, 4> LabelField::face_vertices(int64_t face) const {
  int axis = int(face % 3);
  int64_t base = face / 3;
  int b = (axis + 1) % 3, c = (axis + 2) % 3;
  int64_t vb = neighbor(base, b, +1);
  int64_t vc = neighbor(base, c, +1);
  int64_t vbc = neighbor(vb, c, +1);
  return {base, vb, vc, vbc};
}

int64_t cell_count(const GridDims& dims, int dim) {
  int64_t n = dims.voxels();
  return (dim == 3 || dim == 0) ? n : 3 * n;
}

static CellId make_cell(const LabelField& f, int dim, int64_t base, uint8_t axes) {
  CellId c;
  c.dim = int8_t(dim);
  c.base = f.voxel_coord(base);
  c.axes = axes;
  return c;
}

std::vector<CellId> cells(const LabelField& field, int dim) {
  if (dim < 0 || dim > 3) throw Error(Errc::Internal, "cell dim out of range");
  std::vector<CellId> out;
  out.reserve(size_t(cell_count(field.dims(), dim)));
  int64_t n = field.dims().voxels();
  if (dim == 3) {
    for (int64_t v = 0; v < n; ++v) out.push_back(make_cell(field, 3, v, 0b111));
  } else if (dim == 0) {
    for (int64_t v = 0; v < n; ++v) out.push_back(make_cell(field, 0, v, 0));
  } else if (dim == 2) {
    for (int64_t v = 0; v < n; ++v)
      for (int a = 0; a < 3; ++a) out.push_back(face_cell(field, 3 * v + a));
  } else {
    for (int64_t v = 0; v < n; ++v)
      for (int a = 0; a < 3; ++a) out.push_back(edge_cell(field, 3 * v + a));
  }
  return out;
}

CellId face_cell(const LabelField& field, int64_t face) {
  int axis = int(face % 3);
  return make_cell(field, 2, face / 3, uint8_t(0b111 & ~(1 << axis)));
}

CellId edge_cell(const LabelField& field, int64_t edge) {
  int axis = int(edge % 3);
  return make_cell(field, 1, edge / 3, uint8_t(1 << axis));
}

CellId vertex_cell(const LabelField& field, int64_t vertex) {
  return make_cell(field, 0, vertex, 0);
}

LabelField subdivide(const LabelField& field, int s) {
  if (s < 2) throw Error(Errc::PreconditionFailed, "subdivision factor must be >= 2");
  const GridDims& d = field.dims();
  GridDims nd{d.nx * s, d.ny * s, d.nz * s};
  if (nd.voxels() > cell_limit())
    throw Error(Errc::Overflow, "subdivided voxel count exceeds cell limit");
  std::vector<Label> labels(size_t(nd.voxels()));
  for (int32_t z = 0; z < nd.nz; ++z)
    for (int32_t y = 0; y < nd.ny; ++y)
      for (int32_t x = 0; x < nd.nx; ++x)
        labels[size_t(x) + size_t(nd.nx) * (size_t(y) + size_t(nd.ny) * size_t(z))] =
            field.label(x / s, y / s, z / s);
  return LabelField::create(nd, std::move(labels), field.label_count());
}

LabelField read_pld(std::istream& in) {
  auto next_line = [&](std::string& line) {
    while (std::getline(in, line)) {
      size_t i = line.find_first_not_of(" \t\r");
      if (i == std::string::npos) continue;
      if (line[i] == '#') continue;
      return true;
    }
    return false;
  };
  std::string line;
  if (!next_line(line)) throw Error(Errc::ParseError, "empty pld file");
  {
    std::istringstream ls(line);
    std::string magic;
    int version = 0;
    if (!(ls >> magic >> version) || magic != "pld" || version != 1)
      throw Error(Errc::ParseError, "expected header 'pld 1'");
  }
  GridDims dims;
  if (!next_line(line)) throw Error(Errc::ParseError, "missing dims line");
  {
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw >> dims.nx >> dims.ny >> dims.nz) || kw != "dims")
      throw Error(Errc::ParseError, "expected 'dims <nx> <ny> <nz>'");
  }
  int32_t k = 0;
  if (!next_line(line)) throw Error(Errc::ParseError, "missing labels line");
  {
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw >> k) || kw != "labels") throw Error(Errc::ParseError, "expected 'labels <k>'");
  }
  if (dims.nx < 2 || dims.ny < 2 || dims.nz < 2) throw Error(Errc::DimsTooSmall, "pld dims too small");
  if (dims.voxels() > cell_limit()) throw Error(Errc::Overflow, "pld voxel count exceeds cell limit");
  std::vector<Label> labels;
  labels.reserve(size_t(dims.voxels()));
  while (int64_t(labels.size()) < dims.voxels()) {
    if (!next_line(line)) throw Error(Errc::ParseError, "truncated label data");
    std::istringstream ls(line);
    Label v;
    while (ls >> v) labels.push_back(v);
    if (int64_t(labels.size()) > dims.voxels())
      throw Error(Errc::ParseError, "too many label values");
  }
  try {
    return LabelField::create(dims, std::move(labels), k);
  } catch (const Error& e) {
    throw Error(e.code(), std::string("invalid pld field: ") + e.what());
  }
}

LabelField read_pld_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path);
  return read_pld(in);
}

void write_pld(std::ostream& out, const LabelField& field) {
  const GridDims& d = field.dims();
  out << "pld 1\n";
  out << "dims " << d.nx << ' ' << d.ny << ' ' << d.nz << '\n';
  out << "labels " << field.label_count() << '\n';
  for (int32_t z = 0; z < d.nz; ++z)
    for (int32_t y = 0; y < d.ny; ++y) {
      for (int32_t x = 0; x < d.nx; ++x) {
        if (x) out << ' ';
        out << field.label(x, y, z);
      }
      out << '\n';
    }
}

void write_pld_file(const std::string& path, const LabelField& field) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot open " + path + " for writing");
  write_pld(out, field);
  out.flush();
  if (!out) throw Error(Errc::IoError, "write failed for " + path);
}

}  // namespace hdk
