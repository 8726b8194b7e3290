// Command-line driver for the mixed eigenvalue experiments.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rrt/equivalence.hpp"
#include "rrt/error.hpp"
#include "rrt/experiment.hpp"

namespace {

struct CommonFlags {
  std::string case_name;
  std::string config_path;
  int levels = -1;
  int k = -1;
  double tol = -1.0;
  std::string out;
  std::string format;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--case", f.case_name, "Built-in case: a, b or c");
  app->add_option("--config", f.config_path, "JSON configuration file");
  app->add_option("--levels", f.levels, "Number of uniform refinements");
  app->add_option("--k", f.k, "Number of eigenpairs");
  app->add_option("--tol", f.tol, "Eigensolver tolerance");
  app->add_option("--out", f.out, "Output directory");
  app->add_option("--format", f.format, "Table format: csv, text or json")
      ->check(CLI::IsMember({"csv", "text", "json"}));
}

rrt::ExperimentConfig resolve(const CommonFlags& f) {
  rrt::ExperimentConfig c;
  if (!f.config_path.empty())
    c = rrt::load_config(f.config_path);
  else
    c = rrt::preset(f.case_name.empty() ? "a" : f.case_name);
  if (!f.config_path.empty() && !f.case_name.empty()) c.name = f.case_name;
  if (f.levels >= 0) c.levels = f.levels;
  if (f.k > 0) c.k = f.k;
  if (f.tol > 0) c.tol = f.tol;
  if (!f.out.empty()) c.out_dir = f.out;
  if (!f.format.empty()) c.format = f.format;
  c.validate();
  return c;
}

void print_failures(const std::vector<std::string>& failures) {
  nlohmann::ordered_json j;
  j["failures"] = failures;
  std::cerr << j.dump(2) << '\n';
}

int finish(const rrt::RunReport& report, bool write_files) {
  const std::string shown = report.config.format == "json" ? "json" : "text";
  for (const auto& t : rrt::build_tables(report)) {
    if (t.name == "figure") continue;
    std::cout << rrt::render_table(t, shown) << '\n';
  }
  if (write_files) {
    for (const auto& p : rrt::emit_tables(report, report.config.format, report.config.out_dir))
      std::cout << "wrote " << p.string() << '\n';
  }
  if (!report.ok()) {
    print_failures(report.failures());
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rectangular Raviart-Thomas eigenvalue experiments"};
  app.require_subcommand(1);

  CommonFlags run_flags, eigs_flags, equiv_flags;
  CLI::App* run = app.add_subcommand("run", "Full case: solve, analyze, write tables and report");
  add_common(run, run_flags);
  CLI::App* eigs = app.add_subcommand("eigs", "Solve only and print the eigenvalue table");
  add_common(eigs, eigs_flags);
  CLI::App* equiv = app.add_subcommand("equiv", "Compare the mixed and projected-EQ discretizations");
  add_common(equiv, equiv_flags);

  CLI::App* table = app.add_subcommand("table", "Re-render the tables of a stored report");
  std::string report_path;
  std::string table_format = "text";
  std::string table_out;
  table->add_option("--report", report_path, "Report JSON written by 'run'")->required();
  table->add_option("--format", table_format, "csv, text or json")->check(CLI::IsMember({"csv", "text", "json"}));
  table->add_option("--out", table_out, "Also write the table files into this directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      rrt::ExperimentConfig c = resolve(run_flags);
      return finish(rrt::run_case(c), true);
    }
    if (eigs->parsed()) {
      rrt::ExperimentConfig c = resolve(eigs_flags);
      c.analyses = {false, false, false, false, false, false, false};
      return finish(rrt::run_eigs(c), false);
    }
    if (equiv->parsed()) {
      const rrt::ExperimentConfig c = resolve(equiv_flags);
      rrt::TensorMesh mesh = rrt::build_mesh(c.x0, c.y0);
      std::printf("level  index  lambda_rrt          lambda_peq          lambda_rel  sigma_dist  u_dist\n");
      double worst = 0.0;
      for (int l = 0; l <= c.levels; ++l) {
        if (l > 0) mesh = rrt::uniform_refine(mesh);
        const rrt::EquivalenceReport r = rrt::verify_equivalence(mesh, c.k, c.tol);
        for (std::size_t i = 0; i < r.pairs.size(); ++i) {
          const auto& p = r.pairs[i];
          std::printf("%-5d  %-5zu  %-18.12f  %-18.12f  %.2e    %.2e    %.2e\n", l, i + 1, p.lambda_rrt,
                      p.lambda_peq, p.lambda_rel, p.sigma_dist, p.u_dist);
        }
        std::printf("level %d: max normal-flux jump %.2e, source problem flux distance %.2e\n", l, r.max_jump,
                    r.poisson_sigma_dist);
        worst = std::max({worst, r.worst_lambda(), r.worst_sigma(), r.worst_u()});
      }
      return worst <= 1e-8 ? 0 : 1;
    }
    if (table->parsed()) {
      std::ifstream in(report_path);
      if (!in) throw rrt::Error(rrt::ErrorKind::IoFailure, "cannot open " + report_path);
      std::ostringstream ss;
      ss << in.rdbuf();
      const rrt::RunReport report = rrt::report_from_json(ss.str());
      for (const auto& t : rrt::build_tables(report)) std::cout << rrt::render_table(t, table_format) << '\n';
      if (!table_out.empty()) rrt::emit_tables(report, table_format, table_out);
      return 0;
    }
  } catch (const rrt::Error& e) {
    print_failures({std::string(rrt::to_string(e.kind())) + ": " + e.what()});
    return 2;
  } catch (const std::exception& e) {
    print_failures({e.what()});
    return 2;
  }
  return 0;
}
