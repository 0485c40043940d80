// hdk: handlebody decompositions of the 3-torus as labeled periodic voxel
// fields. Subcommands: gen, report, validate, apply, diff, lift, color, export.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "hdk/report.hpp"

namespace {

using namespace hdk;

int exit_code_for(Errc c) {
  switch (c) {
    case Errc::ParseError:
    case Errc::IoError:
    case Errc::DimsTooSmall:
    case Errc::LengthMismatch:
    case Errc::LabelOutOfRange:
    case Errc::MissingLabel:
    case Errc::Overflow:
    case Errc::InvalidField:
    case Errc::TooManyLabels:
      return 1;
    case Errc::StepFailed:
    case Errc::CertificationFailed:
    case Errc::PreconditionFailed:
    case Errc::CertificateFailed:
    case Errc::NotADisk:
    case Errc::NonSimpleEncountered:
    case Errc::CollapseStuck:
    case Errc::DisconnectedRegion:
    case Errc::InvalidColoring:
    case Errc::EmptiesRegion:
      return 2;
    case Errc::Internal:
    case Errc::NotAChainComplex:
      return 3;
  }
  return 3;
}

GridDims parse_dims(const std::string& text) {
  GridDims d;
  char c1 = 0, c2 = 0;
  std::istringstream ss(text);
  if (!(ss >> d.nx >> c1 >> d.ny >> c2 >> d.nz) || c1 != ',' || c2 != ',')
    throw Error(Errc::ParseError, "expected --dims NX,NY,NZ");
  return d;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"handlebody decomposition kit for the 3-torus"};
  app.require_subcommand(1);

  std::string gen_name, gen_dims, gen_out;
  auto* gen = app.add_subcommand("gen", "generate a bundled decomposition");
  gen->add_option("name", gen_name, "generator name")->required();
  gen->add_option("--dims", gen_dims, "NX,NY,NZ (defaults per generator)");
  gen->add_option("-o,--out", gen_out, "output .pld file")->required();

  std::string report_file;
  bool report_as_json = false;
  auto* rep = app.add_subcommand("report", "print the invariant report");
  rep->add_option("file", report_file)->required();
  rep->add_flag("--json", report_as_json, "canonical JSON with meta section");

  std::string validate_file;
  auto* val = app.add_subcommand("validate", "print validity flags");
  val->add_option("file", validate_file)->required();

  std::string diff_a, diff_b;
  auto* dif = app.add_subcommand("diff", "compare two invariant reports");
  dif->add_option("a", diff_a)->required();
  dif->add_option("b", diff_b)->required();

  std::string apply_file, apply_script, apply_out;
  auto* app_cmd = app.add_subcommand("apply", "run a move script");
  app_cmd->add_option("file", apply_file)->required();
  app_cmd->add_option("script", apply_script)->required();
  app_cmd->add_option("-o,--out", apply_out)->required();

  std::string lift_file, lift_obj;
  int lift_window_m = 2;
  int lift_label = -1;
  auto* lift = app.add_subcommand("lift", "window lift and OBJ export");
  lift->add_option("file", lift_file)->required();
  lift->add_option("--window", lift_window_m, "window multiplier per axis")->check(CLI::Range(1, 8));
  lift->add_option("--obj", lift_obj, "write the windowed sector mesh");
  lift->add_option("--label", lift_label, "also lift this region's net");

  std::string color_file;
  int color_n = 0;
  auto* col = app.add_subcommand("color", "compute a coloring");
  col->add_option("file", color_file)->required();
  col->add_option("--colors", color_n, "requested color count (default: minimum)");

  std::string export_file, export_out;
  auto* exp = app.add_subcommand("export", "write the sector mesh as OBJ");
  exp->add_option("file", export_file)->required();
  exp->add_option("-o,--out", export_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      std::optional<GridDims> dims;
      if (!gen_dims.empty()) dims = parse_dims(gen_dims);
      LabelField f = generate(gen_name, dims);
      write_pld_file(gen_out, f);
      std::cout << "wrote " << gen_out << " (" << f.dims().nx << 'x' << f.dims().ny << 'x'
                << f.dims().nz << ", " << f.label_count() << " labels)\n";
    } else if (rep->parsed()) {
      LabelField f = read_pld_file(report_file);
      DecompositionReport r = build_report(f);
      if (report_as_json) std::cout << report_json(r);
      else std::cout << report_text(r);
      // pipeline guard: a report computed from a move pipeline must agree
      // with itself when rebuilt; cheap internal re-check of the type vector
      if (r.type) {
        std::vector<int64_t> again = type_vector(f);
        if (again != *r.type) throw Error(Errc::Internal, "type vector re-check failed");
      }
    } else if (val->parsed()) {
      LabelField f = read_pld_file(validate_file);
      DecompositionValidity v = validate(f);
      std::cout << "regions_connected=" << v.regions_connected
                << " partition_connected=" << v.partition_connected << " simple=" << v.simple
                << " proper=" << v.proper << " overall=" << v.overall << "\n";
    } else if (dif->parsed()) {
      DecompositionReport ra = build_report(read_pld_file(diff_a));
      DecompositionReport rb = build_report(read_pld_file(diff_b));
      if (report_invariants_json(ra) == report_invariants_json(rb)) {
        std::cout << "reports are byte-equal\n";
        return 0;
      }
      for (const std::string& d : diff_reports(ra, rb)) std::cout << d << "\n";
      return 1;
    } else if (app_cmd->parsed()) {
      LabelField f = read_pld_file(apply_file);
      MoveScript script = MoveScript::parse_file(apply_script);
      ScriptOutcome out = run_script(f, script);
      write_pld_file(apply_out, out.field);
      std::cout << "applied " << out.ledger.size() << " steps, wrote " << apply_out << "\n";
    } else if (lift->parsed()) {
      LabelField f = read_pld_file(lift_file);
      std::array<int32_t, 3> w{lift_window_m, lift_window_m, lift_window_m};
      WindowLift wl = lift_window(f, w);
      for (Label l = 0; l < f.label_count(); ++l)
        std::cout << "label " << l << ": " << wl.components_per_label[size_t(l)]
                  << " components in the " << lift_window_m << "^3 window\n";
      if (!lift_obj.empty()) {
        std::ofstream os(lift_obj);
        if (!os) throw Error(Errc::IoError, "cannot open " + lift_obj);
        ObjOptions opt;
        opt.window_groups = true;
        opt.window = w;
        export_obj(os, f, opt);
        std::cout << "wrote " << lift_obj << "\n";
      }
      if (lift_label >= 0) {
        LiftedNet net = net_lift(f, Label(lift_label), w);
        std::cout << "net of label " << lift_label << ": " << net.vertices << " vertices, "
                  << net.edges << " edges, " << net.components << " components\n";
      }
    } else if (col->parsed()) {
      LabelField f = read_pld_file(color_file);
      Coloring c;
      if (color_n > 0) {
        auto found = find_coloring(f, color_n);
        if (!found) {
          std::cerr << "no valid coloring with " << color_n << " colors\n";
          return 2;
        }
        c = *found;
      } else {
        c = min_coloring(f);
      }
      std::cout << c.colors << " colors:";
      for (Label l = 0; l < f.label_count(); ++l)
        std::cout << " " << l << "->" << c.color_of_label[size_t(l)];
      std::cout << "\n";
    } else if (exp->parsed()) {
      LabelField f = read_pld_file(export_file);
      std::ofstream os(export_out);
      if (!os) throw Error(Errc::IoError, "cannot open " + export_out);
      export_obj(os, f);
      std::cout << "wrote " << export_out << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
