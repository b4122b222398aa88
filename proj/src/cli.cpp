#include "isodrum/cli.hpp"

#include <CLI11.hpp>

namespace isodrum {

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{
      "workbench for isospectral domains built from 3-colored reflection "
      "rules: exact transplantation proofs, 2D/3D assemblies, and "
      "finite-difference Dirichlet spectra"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help and exit");

  RunConfig cfg;
  auto add_common = [&](CLI::App* sub) {
    sub->set_help_flag("--help", "print help and exit");
    sub->add_option("--family", cfg.family, "family id (e.g. 7_1) or file");
    sub->add_option("--class", cfg.domain_class, "domain class: A or B");
    sub->add_option("--base", cfg.base,
                    "base tile: simplex|wall|cube|equilateral|halfsquare|"
                    "gww|t306090 or a file path");
    sub->add_option("--h", cfg.h, "mesh size")->check(CLI::PositiveNumber);
    sub->add_option("--height", cfg.height,
                    "extrude a 2D assembly into a prism of this height");
    sub->add_option("--modes", cfg.modes, "number of eigenvalues")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol", cfg.tol, "relative eigensolver residual bound")
        ->check(CLI::PositiveNumber);
    sub->add_option("--convention", cfg.convention,
                    "boundary sign convention: dirichlet|neumann");
    sub->add_option("--seed", cfg.seed, "eigensolver starting-block seed");
    sub->add_option("--out", cfg.out, "output file path");
    sub->add_option("--format", cfg.format, "output format: obj|stl|csv");
    return sub;
  };

  add_common(app.add_subcommand("families", "list shipped families"));
  add_common(app.add_subcommand(
      "transplant", "solve the transplantation system exactly"));
  add_common(
      app.add_subcommand("unfold2d", "planar unfolding as vertex loops"));
  add_common(app.add_subcommand("build3d", "build a 3D model and mesh"));
  add_common(
      app.add_subcommand("spectrum", "lowest Dirichlet eigenvalues (CSV)"));
  add_common(app.add_subcommand("compare",
                                "spectra of class A vs class B side by side"));
  CLI::App* report =
      add_common(app.add_subcommand("report", "published table layout"));
  report->add_option("--table", cfg.table, "table number: 1, 2, or 3");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "E_USAGE: " << e.what() << "\n";
    return 1;
  }

  try {
    if (app.got_subcommand("families")) {
      cmd_families(cfg, out);
    } else if (app.got_subcommand("transplant")) {
      cmd_transplant(cfg, out);
    } else if (app.got_subcommand("unfold2d")) {
      cmd_unfold2d(cfg, out);
    } else if (app.got_subcommand("build3d")) {
      cmd_build3d(cfg, out);
    } else if (app.got_subcommand("spectrum")) {
      cmd_spectrum(cfg, out, err);
    } else if (app.got_subcommand("compare")) {
      cmd_compare(cfg, out, err);
    } else if (app.got_subcommand("report")) {
      cmd_report(cfg, out, err);
    }
  } catch (const Error& e) {
    err << e.render() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "E_INTERNAL: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace isodrum
