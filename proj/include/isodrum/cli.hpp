#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "isodrum/catalog.hpp"
#include "isodrum/eigensolve.hpp"
#include "isodrum/error.hpp"
#include "isodrum/geometry.hpp"
#include "isodrum/gluing.hpp"
#include "isodrum/raster.hpp"
#include "isodrum/spectra.hpp"
#include "isodrum/transplant.hpp"

namespace isodrum {

// Everything a subcommand needs, validated before any computation starts.
struct RunConfig {
  std::string command;
  std::string family;
  std::string domain_class;  // A | B; empty = command default
  std::string base = "simplex";
  std::string convention = "dirichlet";
  std::string format;  // obj | stl | csv (defaulted per command)
  std::string out;
  double h = 0.05;
  double height = 0.0;  // extrude 2D assemblies into prisms when > 0
  int modes = 25;
  double tol = kDefaultEigenTol;
  std::uint64_t seed = kDefaultSeed;
  int table = 0;
};

namespace cli_detail {

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) fail(ErrorCode::Io, "cannot read file: ", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_output(const RunConfig& cfg, const std::string& payload,
                         std::ostream& out) {
  if (cfg.out.empty()) {
    out << payload;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f.good()) fail(ErrorCode::Io, "cannot write file: ", cfg.out);
  f << payload;
  if (!f.good()) fail(ErrorCode::Io, "failed writing file: ", cfg.out);
}

inline BaseTile resolve_base(const std::string& name) {
  if (name == "simplex") return basic_simplex();
  if (name == "wall") return wall_tetrahedron();
  if (name == "cube") return unit_cube();
  if (name == "equilateral") return equilateral_triangle();
  if (name == "halfsquare") return half_square_triangle();
  if (name == "gww") return gww_triangle();
  if (name == "t306090") return t306090_triangle();
  return parse_base_tile(read_text_file(name));
}

inline FamilyPair resolve_family(const std::string& id) {
  for (const auto& known : catalog_family_ids())
    if (known == id) return catalog_family(id);
  std::ifstream probe(id);
  if (probe.good()) {
    std::ostringstream ss;
    ss << probe.rdbuf();
    return parse_gluing_file(ss.str());
  }
  fail(ErrorCode::UnknownFamily, "unknown family id or file: ", id);
}

inline const GluingGraph& pick_class(const FamilyPair& fam,
                                     const std::string& cls) {
  if (cls.empty() || cls == "A" || cls == "a") return fam.left;
  if (cls == "B" || cls == "b") return fam.right;
  fail(ErrorCode::Usage, "--class must be A or B, got: ", cls);
}

inline SignConvention pick_convention(const std::string& name) {
  auto conv = convention_from_name(name);
  if (!conv)
    fail(ErrorCode::Usage, "--convention must be dirichlet or neumann, got: ",
         name);
  return *conv;
}

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::string signature_string(const DecompositionSignature& sig) {
  if (!sig.counts) return "unknown";
  return "(" + std::to_string(sig.counts->first) + "," +
         std::to_string(sig.counts->second) + ")";
}

// Builds the assembly selected by the config (family class on base tile),
// extruding 2D bases into prisms when a height is set.
inline Assembly build_configured_assembly(const RunConfig& cfg,
                                          const GluingGraph& graph) {
  BaseTile base = resolve_base(cfg.base);
  Assembly a = build_assembly(graph, base);
  if (cfg.height > 0.0) {
    if (a.dimension != 2)
      fail(ErrorCode::Shape, "--height extrudes 2D assemblies only");
    a = extrude_prism(a, cfg.height);
  }
  return a;
}

inline Spectrum configured_spectrum(const RunConfig& cfg, const Assembly& a) {
  RasterDomain r = rasterize(a, cfg.h);
  DiscreteLaplacian L = assemble_laplacian(r);
  return lowest_eigenvalues(L, cfg.modes, cfg.tol, cfg.seed);
}

}  // namespace cli_detail

// families [--family id] — lists shipped families with their exact-algebra
// verification status.
inline void cmd_families(const RunConfig& cfg, std::ostream& out) {
  std::vector<std::string> ids;
  if (cfg.family.empty()) {
    ids = catalog_family_ids();
  } else {
    catalog_family(cfg.family);  // throws for unknown ids
    ids = {cfg.family};
  }
  out << "id      tiles  signature  verified\n";
  for (const auto& id : ids) {
    FamilyPair fam = catalog_family(id);
    SignConvention conv = cli_detail::pick_convention(cfg.convention);
    auto basis = solve_transplantation(to_signed_matrices(fam.left, conv),
                                       to_signed_matrices(fam.right, conv));
    bool ok = basis.dimension() >= 2;
    std::string sig = "-";
    if (ok) {
      auto s = decomposition_signature(basis);
      sig = cli_detail::signature_string(s);
      for (const auto& T : basis.basis) {
        auto rep = verify_transplantation(T, to_signed_matrices(fam.left, conv),
                                          to_signed_matrices(fam.right, conv));
        ok = ok && rep.all_zero;
      }
    }
    char line[128];
    std::snprintf(line, sizeof line, "%-7s %-6d %-10s %s\n", id.c_str(),
                  fam.left.n_tiles, sig.c_str(), ok ? "yes" : "NO");
    out << line;
  }
}

// transplant --family id [--convention ...] [--class A|B] — solves the
// intertwining system exactly and prints basis, signature, and residuals.
// Passing --class compares the chosen class against itself (the self-pair).
inline void cmd_transplant(const RunConfig& cfg, std::ostream& out) {
  if (cfg.family.empty()) fail(ErrorCode::Usage, "transplant needs --family");
  FamilyPair fam = cli_detail::resolve_family(cfg.family);
  SignConvention conv = cli_detail::pick_convention(cfg.convention);
  // A bare "transplant --family X" solves the A-vs-B pair; with --class, the
  // chosen class is tested against itself (self-pair).
  const GluingGraph* lhs = &fam.left;
  const GluingGraph* rhs = &fam.right;
  if (!cfg.domain_class.empty()) {
    const GluingGraph& g = cli_detail::pick_class(fam, cfg.domain_class);
    lhs = &g;
    rhs = &g;
  }
  MatrixTriple A = to_signed_matrices(*lhs, conv);
  MatrixTriple B = to_signed_matrices(*rhs, conv);
  auto basis = solve_transplantation(A, B);
  out << "family: " << cfg.family << "\n";
  out << "convention: " << cfg.convention << "\n";
  out << "dimension: " << basis.dimension() << "\n";
  if (basis.dimension() == 2) {
    auto sig = decomposition_signature(basis);
    out << "signature: " << cli_detail::signature_string(sig) << "\n";
  } else {
    out << "signature: n/a\n";
  }
  out << "nontrivial: " << (is_nontrivial(basis) ? "yes" : "no") << "\n";
  bool zero = true;
  for (const auto& T : basis.basis)
    zero = zero && verify_transplantation(T, A, B).all_zero;
  out << "residuals_zero: " << (zero ? "yes" : "no") << "\n";
  for (size_t k = 0; k < basis.basis.size(); ++k) {
    out << "T" << (k + 1) << "\n";
    out << serialize_matrix(basis.basis[k]);
  }
}

// unfold2d --family id --class A|B [--base ...] — plain vertex-loop listing
// of the planar unfolding, one line per tile.
inline void cmd_unfold2d(const RunConfig& cfg, std::ostream& out) {
  if (cfg.family.empty()) fail(ErrorCode::Usage, "unfold2d needs --family");
  FamilyPair fam = cli_detail::resolve_family(cfg.family);
  RunConfig local = cfg;
  if (local.base == "simplex") local.base = "equilateral";
  local.height = 0.0;
  BaseTile base = cli_detail::resolve_base(local.base);
  if (base.dimension != 2)
    fail(ErrorCode::Shape, "unfold2d needs a 2D base tile, got a 3D one");
  Assembly a =
      build_assembly(cli_detail::pick_class(fam, cfg.domain_class), base);
  std::ostringstream body;
  for (const Tile& t : a.tiles) {
    body << "tile " << t.index << ":";
    for (const Point3& v : t.vertices)
      body << " (" << cli_detail::fmt("%.10g", v.x()) << ","
           << cli_detail::fmt("%.10g", v.y()) << ")";
    body << "\n";
  }
  body << "tiles: " << a.tiles.size() << "\n";
  body << "glued_edges: " << a.glued_faces.size() << "\n";
  body << "boundary_edges: " << a.boundary_faces.size() << "\n";
  body << "coincident_pairs: " << a.coincident_faces.size() << "\n";
  body << "overlap: " << (a.has_overlap() ? "yes" : "no") << "\n";
  cli_detail::write_output(cfg, body.str(), out);
}

// build3d --family id --class A|B [--base simplex|wall|FILE] [--format
// obj|stl] [--out PATH] — builds the 3D model, writes the mesh, and prints
// the assembly summary.
inline void cmd_build3d(const RunConfig& cfg, std::ostream& out) {
  if (cfg.family.empty()) fail(ErrorCode::Usage, "build3d needs --family");
  FamilyPair fam = cli_detail::resolve_family(cfg.family);
  Assembly a = cli_detail::build_configured_assembly(
      cfg, cli_detail::pick_class(fam, cfg.domain_class));
  if (a.dimension != 3)
    fail(ErrorCode::Shape,
         "build3d needs a 3D base tile (or --height to extrude a 2D one)");
  std::string format = cfg.format.empty() ? "obj" : cfg.format;
  MeshFormat mf;
  if (format == "obj") {
    mf = MeshFormat::Obj;
  } else if (format == "stl") {
    mf = MeshFormat::Stl;
  } else {
    fail(ErrorCode::Format, "build3d --format must be obj or stl, got: ",
         format);
  }
  std::string mesh = export_mesh(a, mf);
  if (!cfg.out.empty()) {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f.good()) fail(ErrorCode::Io, "cannot write file: ", cfg.out);
    f << mesh;
  }
  out << "family: " << cfg.family << " class "
      << (cfg.domain_class.empty() ? "A" : cfg.domain_class) << "\n";
  out << "tiles: " << a.tiles.size() << "\n";
  out << "glued_faces: " << a.glued_faces.size() << "\n";
  out << "boundary_faces: " << a.boundary_faces.size() << "\n";
  out << "slit_pairs: " << a.coincident_faces.size() << "\n";
  out << "overlap: " << (a.has_overlap() ? "yes" : "no") << "\n";
  if (cfg.out.empty()) {
    out << "mesh: (no --out given; skipped)\n";
  } else {
    out << "mesh: " << cfg.out << " (" << format << ", "
        << a.boundary_faces.size() << " faces)\n";
  }
  out << "vertices:\n";
  for (const Tile& t : a.tiles) {
    out << "  tile " << t.index << ":";
    for (const Point3& v : t.vertices)
      out << " (" << cli_detail::fmt("%.10g", v.x()) << ","
          << cli_detail::fmt("%.10g", v.y()) << ","
          << cli_detail::fmt("%.10g", v.z()) << ")";
    out << "\n";
  }
}

// spectrum --family id --class A|B [--base --h --modes --tol --seed] — CSV
// of the lowest eigenvalues of one domain.
inline void cmd_spectrum(const RunConfig& cfg, std::ostream& out,
                         std::ostream& err) {
  if (cfg.family.empty()) fail(ErrorCode::Usage, "spectrum needs --family");
  FamilyPair fam = cli_detail::resolve_family(cfg.family);
  Assembly a = cli_detail::build_configured_assembly(
      cfg, cli_detail::pick_class(fam, cfg.domain_class));
  RasterDomain r = rasterize(a, cfg.h);
  if (r.off_lattice)
    err << "warning: base vertices are off the h-lattice; interior tests "
           "fall back to tolerance comparisons\n";
  Spectrum s = lowest_eigenvalues(assemble_laplacian(r), cfg.modes, cfg.tol,
                                  cfg.seed);
  err << "n_interior: " << r.n_interior << "\n";
  cli_detail::write_output(cfg, spectrum_csv(s, nullptr, cfg.modes), out);
}

// compare --family id [--base --h --modes ...] — spectra of class A and B
// side by side with per-mode differences.
inline void cmd_compare(const RunConfig& cfg, std::ostream& out,
                        std::ostream& err) {
  if (cfg.family.empty()) fail(ErrorCode::Usage, "compare needs --family");
  FamilyPair fam = cli_detail::resolve_family(cfg.family);
  Assembly a = cli_detail::build_configured_assembly(cfg, fam.left);
  Assembly b = cli_detail::build_configured_assembly(cfg, fam.right);
  RasterDomain ra = rasterize(a, cfg.h);
  RasterDomain rb = rasterize(b, cfg.h);
  err << "n_interior: A=" << ra.n_interior << " B=" << rb.n_interior << "\n";
  Spectrum sa = lowest_eigenvalues(assemble_laplacian(ra), cfg.modes, cfg.tol,
                                   cfg.seed);
  Spectrum sb = lowest_eigenvalues(assemble_laplacian(rb), cfg.modes, cfg.tol,
                                   cfg.seed);
  ComparisonReport rep = compare_spectra(sa, sb, cfg.modes);
  std::string csv = spectrum_csv(sa, &sb, cfg.modes);
  csv += "# max_abs_diff," + cli_detail::fmt("%.4e", rep.max_abs_diff) + "\n";
  csv += "# l2_diff," + cli_detail::fmt("%.4e", rep.l2_diff) + "\n";
  cli_detail::write_output(cfg, csv, out);
}

// report --table 1|2|3 [--h --modes] — rebuilds the table's pair on the
// shared 3D base and prints the comparison in the published layout.
inline void cmd_report(const RunConfig& cfg, std::ostream& out,
                       std::ostream& err) {
  if (cfg.table < 1 || cfg.table > 3)
    fail(ErrorCode::Usage, "--table must be 1, 2, or 3");
  RunConfig local = cfg;
  local.family = "7_" + std::to_string(cfg.table);
  FamilyPair fam = catalog_family(local.family);
  Assembly a = cli_detail::build_configured_assembly(local, fam.left);
  Assembly b = cli_detail::build_configured_assembly(local, fam.right);
  RasterDomain ra = rasterize(a, local.h);
  RasterDomain rb = rasterize(b, local.h);
  err << "n_interior: A=" << ra.n_interior << " B=" << rb.n_interior << "\n";
  Spectrum sa = lowest_eigenvalues(assemble_laplacian(ra), local.modes,
                                   local.tol, local.seed);
  Spectrum sb = lowest_eigenvalues(assemble_laplacian(rb), local.modes,
                                   local.tol, local.seed);
  ComparisonReport rep = compare_spectra(sa, sb, local.modes);
  std::ostringstream table;
  table << "  k       class A       class B    difference\n";
  for (int k = 0; k < local.modes; ++k) {
    char line[96];
    std::snprintf(line, sizeof line, "%3d  %12.4f  %12.4f  %12.4e\n", k + 1,
                  sa.eigenvalues[size_t(k)], sb.eigenvalues[size_t(k)],
                  rep.abs_diffs[size_t(k)]);
    table << line;
  }
  table << "max_abs_diff: " << cli_detail::fmt("%.4e", rep.max_abs_diff)
        << "\n";
  table << "l2_diff: " << cli_detail::fmt("%.4e", rep.l2_diff) << "\n";
  out << table.str();
  if (!cfg.out.empty()) {
    RunConfig csv_cfg = cfg;
    std::string csv = spectrum_csv(sa, &sb, local.modes);
    csv += "# max_abs_diff," + cli_detail::fmt("%.4e", rep.max_abs_diff) +
           "\n";
    csv += "# l2_diff," + cli_detail::fmt("%.4e", rep.l2_diff) + "\n";
    cli_detail::write_output(csv_cfg, csv, out);
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace isodrum
