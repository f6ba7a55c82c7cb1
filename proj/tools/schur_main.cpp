#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "schur/config.hpp"
#include "schur/elliptic.hpp"
#include "schur/runner.hpp"
#include "schur/selftest.hpp"

namespace {

int default_jobs() {
  if (const char* env = std::getenv("SCHUR_JOBS")) {
    try {
      const int j = std::stoi(env);
      if (j >= 1) return j;
    } catch (const std::exception&) {
    }
    std::cerr << "ignoring SCHUR_JOBS='" << env << "'\n";
  }
  return 1;
}

void print_list(std::ostream& out) {
  out << "Geometries (mesh generators):\n"
         "  icosphere(rho)\n"
         "  ellipsoid(a, b, c)\n"
         "  torus(R, r)\n"
         "  perturbed_sphere(rho, eps, l), radius rho (1 + eps P_l(cos theta))\n"
         "  mesh_file(path), ASCII OFF or OBJ\n"
         "Geometries (periodic grids):\n"
         "  flat(n, L)\n"
         "  conformal(n, L, eps, factors), g = exp(2 eps prod factors) delta\n"
         "  product(n, L, eps), non-conformally-flat for n >= 3\n"
         "  torus3(R, r), torus of revolution in R^3\n"
         "  spun_torus4(R1, r, d), requires d > r\n"
         "\n"
         "Theorems (config id, variant):\n"
         "  thm-1.7 (ine-r1, ine-r2)      general-tensor, div T = c grad B, c != 1/n\n"
         "  thm-1.8 (ine-r3, ine-r4)      general-tensor, variant ricci-nonnegative\n"
         "  thm-1.9 (ine-rm1, ine-rm2)    hypersurface-r, 2 <= r <= n\n"
         "  thm-1.10 (ine-rm03, ine-rm4)  hypersurface-r, variant ricci-nonnegative\n"
         "  thm-1.11 (ine-ks1, ine-ks2)   k-scalar, locally conformally flat, 2 <= k <= n\n"
         "  thm-1.12 (ine-ks1, ine-ks2)   k-scalar, variant ricci-nonnegative\n"
         "  rem-4.3 (ine-rm5, ine-rm6)    perez-r1, surface meshes\n"
         "  cor-2.3 (li-yau)              li-yau, alpha(n, K, d) <= lambda1\n"
         "\n"
         "K conventions (m = minimum Ricci eigenvalue):\n";
  for (auto c : {schur::Convention::tensor_thm, schur::Convention::hypersurface_thm}) {
    out << "  " << schur::convention_name(c) << ": \"" << schur::convention_statement(c) << "\", K = "
        << (c == schur::Convention::tensor_thm ? "max(0, -m/(n-1))" : "max(0, -m)") << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of almost-Schur inequalities"};
  app.require_subcommand(1);

  auto* selftest = app.add_subcommand("selftest", "Run the tensor identity suite and analytic oracles");
  std::string filter;
  selftest->add_option("--filter", filter, "Run only properties whose group or name contains NAME")
      ->option_text("NAME");

  auto* verify = app.add_subcommand("verify", "Run the verifications described in a config file");
  verify->footer(schur::config_reference());
  std::string config_path;
  std::string out_dir;
  std::string format;
  int jobs = default_jobs();
  bool timings = false;
  verify->add_option("CONFIG", config_path, "JSON config file")->required();
  verify->add_option("--out", out_dir, "Output directory (overrides output.dir)");
  verify->add_option("--format", format, "Report format (overrides output.format)")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  verify->add_option("--jobs", jobs, "Worker threads (default: SCHUR_JOBS or 1)")->check(CLI::PositiveNumber);
  verify->add_flag("--timings", timings, "Fill the wall_ms column (makes output run-dependent)");

  auto* list = app.add_subcommand("list", "List geometries, theorems and K conventions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : schur::kExitSchema;
  }

  if (list->parsed()) {
    print_list(std::cout);
    return 0;
  }

  if (selftest->parsed()) {
    schur::SelftestOptions opts;
    opts.filter = filter;
    return schur::report_selftest(schur::run_selftest(opts), std::cout);
  }

  schur::RunConfig cfg;
  try {
    cfg = schur::load_config(config_path);
  } catch (const schur::SchemaError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return schur::kExitSchema;
  }
  if (!out_dir.empty()) cfg.output.dir = out_dir;
  if (!format.empty()) cfg.output.format = format;
  timings = timings || cfg.output.timings;

  schur::RunResult result;
  try {
    result = schur::run(cfg, {jobs, timings});
  } catch (const schur::SchemaError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return schur::kExitSchema;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return schur::kExitSolver;
  }
  for (const auto& err : result.errors) std::cerr << "solver failure: " << err << "\n";

  for (const auto& path : schur::write_reports(result.reports, cfg.output.dir, cfg.output.stem, cfg.output.format)) {
    std::cout << "wrote " << path << "\n";
  }
  size_t passing = 0;
  for (const auto& r : result.reports) {
    if (r.passes(cfg.tolerances.disc_tolerance)) ++passing;
  }
  std::cout << passing << "/" << result.reports.size() << " reports pass, exit " << result.exit_code << "\n";
  return result.exit_code;
}
