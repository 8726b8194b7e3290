#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rrt/analysis.hpp"
#include "rrt/exact.hpp"
#include "rrt/postprocess.hpp"

namespace rrt {

struct AnalysisSelection {
  bool residuals = true;
  bool supercloseness = true;
  bool postprocessing = true;
  bool extrapolation = true;
  bool equivalence = true;
  bool bounds = true;
  bool frequencies = true;
};

struct ExperimentConfig {
  std::string name = "custom";
  std::vector<double> x0;  // level-0 node vectors
  std::vector<double> y0;
  int levels = 4;  // number of refinements; levels 0..levels are solved
  int k = 6;
  double tol = 1e-11;
  std::uint64_t seed = 20240607;
  AnalysisSelection analyses;
  std::vector<int> residual_indices;  // 1-based; empty selects automatically
  int equivalence_levels = 2;         // equivalence runs on levels 0..this
  std::string out_dir = "out";
  std::string format = "csv";         // csv | text | json

  /// Throws ConfigError when a field is out of range; node vectors are
  /// checked by building the level-0 mesh.
  void validate() const;
  Rectangle domain() const;
};

/// Built-in cases "a", "b", "c". Throws ConfigError for other names.
ExperimentConfig preset(const std::string& name);

/// Parses a node value: a number, or a product/quotient of numbers and "pi"
/// such as "2*pi/3". Throws ConfigError.
double parse_number(const std::string& text);

/// JSON text with optional keys name, x_nodes, y_nodes, levels, k, tol, seed,
/// analyses, residual_indices, equivalence_levels, output.{dir, format}, and
/// "case" to start from a preset. Node vectors are either arrays of numbers
/// or expressions, or {"uniform": [start, end, count]}.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct PostprocessReport {
  double sigma_l2 = 0.0;  // ||I2h sigma_h - sigma||_0
  double sigma_h1 = 0.0;  // broken H1 seminorm
  double u_l2 = 0.0;      // ||J2h u_h - u||_0
  double u_h1 = 0.0;
};

struct EquivalenceSummary {
  double lambda_rel = 0.0;
  double sigma_dist = 0.0;
  double u_dist = 0.0;
  double max_jump = 0.0;
  double poisson_sigma_dist = 0.0;
};

struct LevelResult {
  int level = 0;
  double h = 0.0;
  int n_cell = 0;
  std::vector<double> lambdas;
  std::vector<double> solver_residuals;
  std::vector<ExpansionReport> expansions;  // one per residual index
  std::optional<SuperclosenessReport> superclose;
  std::optional<PostprocessReport> postprocess;
  std::optional<EquivalenceSummary> equivalence;
  std::optional<double> lower_margin;  // first eigenvalue
  std::vector<FrequencyAssignment> frequencies;
  std::vector<std::string> failures;
  double seconds = 0.0;  // wall clock, kept out of the structured report
};

struct RunReport {
  ExperimentConfig config;
  std::vector<double> exact;          // first k exact eigenvalues
  std::vector<int> residual_indices;  // 1-based
  std::vector<LevelResult> levels;

  bool ok() const;
  std::vector<std::string> failures() const;
};

/// Builds the level-0 mesh, refines it config.levels times, solves every
/// level and runs the selected analyses. Failures inside a level are
/// recorded in that level and the sweep continues.
RunReport run_case(const ExperimentConfig& config);

/// Solve-only sweep: eigenvalues per level, no analyses.
RunReport run_eigs(const ExperimentConfig& config);

/// A named table: header row plus data rows, all preformatted.
struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<Table> build_tables(const RunReport& report);

/// Renders one table as comma-separated, aligned text, or JSON.
std::string render_table(const Table& table, const std::string& format);

/// Writes the table files, the figure data, the structured report and the
/// timings file into config.out_dir. Returns the paths written. Throws
/// IoFailure.
std::vector<std::filesystem::path> emit_tables(const RunReport& report, const std::string& format,
                                               const std::filesystem::path& out_dir);

std::string report_to_json(const RunReport& report);
RunReport report_from_json(const std::string& json_text);

}  // namespace rrt
