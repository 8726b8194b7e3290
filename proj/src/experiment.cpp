#include "rrt/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "rrt/equivalence.hpp"
#include "rrt/error.hpp"

namespace rrt {

using json = nlohmann::ordered_json;

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_factor(const std::string& raw, const std::string& whole) {
  const std::string f = trim(raw);
  if (f == "pi") return std::numbers::pi;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(f, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (f.empty() || used != f.size()) throw Error(ErrorKind::ConfigError, "cannot parse number '" + whole + "'");
  return v;
}

std::vector<double> parse_nodes(const json& j) {
  std::vector<double> nodes;
  if (j.is_object()) {
    const json& u = j.at("uniform");
    if (!u.is_array() || u.size() != 3)
      throw Error(ErrorKind::ConfigError, "uniform node descriptor needs [start, end, count]");
    auto value = [](const json& v) { return v.is_string() ? parse_number(v.get<std::string>()) : v.get<double>(); };
    return uniform_nodes(value(u[0]), value(u[1]), u[2].get<int>());
  }
  if (!j.is_array()) throw Error(ErrorKind::ConfigError, "node vector must be an array or {\"uniform\": ...}");
  for (const json& v : j) nodes.push_back(v.is_string() ? parse_number(v.get<std::string>()) : v.get<double>());
  return nodes;
}

std::vector<int> auto_residual_indices(const ExperimentConfig& config, const std::vector<ExactEigenpair>& exact) {
  const TensorMesh mesh = build_mesh(config.x0, config.y0);
  std::vector<int> out;
  if (is_uniform(mesh) && config.domain().is_square()) {
    for (int i = 1; i <= std::min(config.k, 6); ++i) out.push_back(i);
    return out;
  }
  for (int i = 0; i < static_cast<int>(exact.size()) && out.size() < 3; ++i)
    if (exact[i].multiplicity == 1) out.push_back(i + 1);
  return out;
}

// Positions [first, last) of the discrete indices converging to exact[index].
std::pair<int, int> cluster_range(const std::vector<ExactEigenpair>& exact, int index) {
  int first = index;
  while (first > 0 && exact[first - 1].lambda == exact[index].lambda) --first;
  int last = index + 1;
  while (last < static_cast<int>(exact.size()) && exact[last].lambda == exact[index].lambda) ++last;
  return {first, last};
}

FieldSample residual_representative(const TensorMesh& mesh, const std::vector<MixedEigenpair>& pairs,
                                    const std::vector<ExactEigenpair>& exact, int index) {
  const ExactEigenpair& e = exact[index];
  if (e.multiplicity == 1) {
    const Frequency f = e.frequencies.front();
    return FieldSample::single(e.domain, f.m, f.n);
  }
  const auto [first, last] = cluster_range(exact, index);
  if (last - first == e.multiplicity && is_uniform(mesh) && e.domain.is_square()) {
    const std::vector<MixedEigenpair> cluster(pairs.begin() + first, pairs.begin() + last);
    const FrequencyMatch match = match_frequencies(cluster, e, mesh_size(mesh));
    const Frequency f = match.assignments[index - first].frequency;
    return FieldSample::single(e.domain, f.m, f.n);
  }
  return align_exact_representative(pairs[index], e, mesh);
}

template <class F>
void guarded(LevelResult& level, const std::string& what, F&& f) {
  try {
    f();
  } catch (const std::exception& ex) {
    level.failures.push_back(what + ": " + ex.what());
  }
}

std::string level_label(int l) { return "T_h" + std::to_string(l); }

json opt_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

void ExperimentConfig::validate() const {
  if (levels < 1) throw Error(ErrorKind::ConfigError, "levels must be >= 1");
  if (k < 1) throw Error(ErrorKind::ConfigError, "k must be >= 1");
  if (!(tol > 0.0 && tol < 1.0)) throw Error(ErrorKind::ConfigError, "tol must lie in (0, 1)");
  if (format != "csv" && format != "text" && format != "json")
    throw Error(ErrorKind::ConfigError, "format must be csv, text or json");
  for (int r : residual_indices)
    if (r < 1 || r > k) throw Error(ErrorKind::ConfigError, "residual index out of range 1..k");
  const TensorMesh mesh = build_mesh(x0, y0);
  if (k > mesh.num_cells()) throw Error(ErrorKind::ConfigError, "k exceeds the level-0 cell count");
}

Rectangle ExperimentConfig::domain() const {
  if (x0.size() < 2 || y0.size() < 2) throw Error(ErrorKind::ConfigError, "node vectors need two entries");
  return {x0.front(), x0.back(), y0.front(), y0.back()};
}

ExperimentConfig preset(const std::string& name) {
  const double pi = std::numbers::pi;
  ExperimentConfig c;
  c.name = name;
  if (name == "a") {
    c.x0 = uniform_nodes(0.0, pi, 9);
    c.y0 = uniform_nodes(0.0, pi, 9);
    c.k = 6;
  } else if (name == "b") {
    c.x0 = uniform_nodes(0.0, pi, 9);
    c.y0 = uniform_nodes(0.0, pi, 17);
    c.k = 12;
  } else if (name == "c") {
    c.x0 = {0.0, pi / 4, pi / 2, 2 * pi / 3, 5 * pi / 6, pi};
    c.y0 = {0.0, pi / 6, pi / 3, pi / 2, 3 * pi / 4, pi};
    c.k = 12;
  } else {
    throw Error(ErrorKind::ConfigError, "unknown case '" + name + "' (expected a, b or c)");
  }
  return c;
}

double parse_number(const std::string& text) {
  // factor (('*' | '/') factor)*
  double value = 1.0;
  char op = '*';
  std::size_t pos = 0;
  for (;;) {
    const std::size_t next = text.find_first_of("*/", pos);
    const double f = parse_factor(text.substr(pos, next - pos), text);
    value = op == '*' ? value * f : value / f;
    if (next == std::string::npos) break;
    op = text[next];
    pos = next + 1;
  }
  return value;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::ConfigError, "config must be a JSON object");
  try {
    ExperimentConfig c = j.contains("case") ? preset(j["case"].get<std::string>()) : ExperimentConfig{};
    if (j.contains("name")) c.name = j["name"].get<std::string>();
    if (j.contains("x_nodes")) c.x0 = parse_nodes(j["x_nodes"]);
    if (j.contains("y_nodes")) c.y0 = parse_nodes(j["y_nodes"]);
    if (j.contains("levels")) c.levels = j["levels"].get<int>();
    if (j.contains("k")) c.k = j["k"].get<int>();
    if (j.contains("tol")) c.tol = j["tol"].get<double>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("residual_indices")) c.residual_indices = j["residual_indices"].get<std::vector<int>>();
    if (j.contains("equivalence_levels")) c.equivalence_levels = j["equivalence_levels"].get<int>();
    if (j.contains("analyses")) {
      const json& a = j["analyses"];
      auto flag = [&](const char* key, bool& dst) {
        if (a.contains(key)) dst = a[key].get<bool>();
      };
      flag("residuals", c.analyses.residuals);
      flag("supercloseness", c.analyses.supercloseness);
      flag("postprocessing", c.analyses.postprocessing);
      flag("extrapolation", c.analyses.extrapolation);
      flag("equivalence", c.analyses.equivalence);
      flag("bounds", c.analyses.bounds);
      flag("frequencies", c.analyses.frequencies);
    }
    if (j.contains("output")) {
      const json& o = j["output"];
      if (o.contains("dir")) c.out_dir = o["dir"].get<std::string>();
      if (o.contains("format")) c.format = o["format"].get<std::string>();
    }
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("bad config field: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

bool RunReport::ok() const { return failures().empty(); }

std::vector<std::string> RunReport::failures() const {
  std::vector<std::string> out;
  for (const auto& l : levels)
    for (const auto& f : l.failures) out.push_back("level " + std::to_string(l.level) + ": " + f);
  return out;
}

namespace {

RunReport sweep(const ExperimentConfig& config, bool analyze) {
  config.validate();
  RunReport report;
  report.config = config;
  const Rectangle domain = config.domain();
  const std::vector<ExactEigenpair> exact = enumerate_exact(domain, config.k);
  for (const auto& e : exact) report.exact.push_back(e.lambda);
  report.residual_indices =
      config.residual_indices.empty() ? auto_residual_indices(config, exact) : config.residual_indices;

  SolveOptions opts;
  opts.k = config.k;
  opts.tol = config.tol;
  opts.seed = config.seed;

  TensorMesh mesh = build_mesh(config.x0, config.y0);
  for (int l = 0; l <= config.levels; ++l) {
    if (l > 0) mesh = uniform_refine(mesh);
    const auto t0 = std::chrono::steady_clock::now();
    LevelResult level;
    level.level = l;
    level.h = mesh_size(mesh);
    level.n_cell = mesh.num_cells();

    const MixedSystem system = assemble_mixed(mesh);
    std::vector<MixedEigenpair> pairs;
    guarded(level, "eigensolve", [&] {
      pairs = solve_mixed_eigs(system, opts);
      for (const auto& p : pairs) {
        level.lambdas.push_back(p.lambda_h);
        level.solver_residuals.push_back(p.residual_norm);
      }
    });

    if (analyze && !pairs.empty()) {
      if (config.analyses.residuals) {
        for (int idx : report.residual_indices) {
          guarded(level, "residual r" + std::to_string(idx), [&] {
            const FieldSample rep = residual_representative(mesh, pairs, exact, idx - 1);
            level.expansions.push_back(expansion_report(mesh, pairs[idx - 1].lambda_h, exact[idx - 1].lambda, rep));
          });
        }
      }
      if (config.analyses.frequencies && is_uniform(mesh) && domain.is_square()) {
        guarded(level, "frequency matching", [&] {
          for (int first = 0; first < config.k;) {
            const int last = cluster_range(exact, first).second;
            if (exact[first].multiplicity > 1 && last - first == exact[first].multiplicity) {
              const std::vector<MixedEigenpair> cluster(pairs.begin() + first, pairs.begin() + last);
              for (auto a : match_frequencies(cluster, exact[first], level.h).assignments) {
                a.index += first;
                level.frequencies.push_back(a);
              }
            }
            first = last;
          }
        });
      }
      if (config.analyses.supercloseness || config.analyses.postprocessing) {
        guarded(level, "supercloseness", [&] {
          const FieldSample rep = align_exact_representative(pairs[0], exact[0], mesh);
          if (config.analyses.supercloseness) {
            level.superclose = supercloseness_norms(system, pairs[0], rt_interpolate_exact(mesh, rep),
                                                    l2_project_exact(mesh, rep));
          }
          if (config.analyses.postprocessing && mesh.nx() % 2 == 0 && mesh.ny() % 2 == 0) {
            PostprocessReport p;
            const PostprocessedField fs = i2h_sigma(mesh, pairs[0].sigma_coeffs);
            const PostprocessedField fu = j2h_u(mesh, pairs[0].u_coeffs);
            p.sigma_l2 = error_norms_postprocessed(fs, rep, 0);
            p.sigma_h1 = error_norms_postprocessed(fs, rep, 1);
            p.u_l2 = error_norms_postprocessed(fu, rep, 0);
            p.u_h1 = error_norms_postprocessed(fu, rep, 1);
            level.postprocess = p;
          }
        });
      }
      if (config.analyses.bounds) {
        level.lower_margin =
            lower_bound_margin(pairs[0].lambda_h, exact[0].lambda, regularity_constant(mesh), level.h);
      }
      if (config.analyses.equivalence && l <= config.equivalence_levels) {
        guarded(level, "equivalence", [&] {
          const EquivalenceReport eq = verify_equivalence(mesh, config.k, config.tol);
          level.equivalence = EquivalenceSummary{eq.worst_lambda(), eq.worst_sigma(), eq.worst_u(),
                                                 eq.max_jump, eq.poisson_sigma_dist};
        });
      }
    }
    level.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.levels.push_back(std::move(level));
  }
  return report;
}

}  // namespace

RunReport run_case(const ExperimentConfig& config) { return sweep(config, true); }

RunReport run_eigs(const ExperimentConfig& config) { return sweep(config, false); }

std::vector<Table> build_tables(const RunReport& report) {
  const int nl = static_cast<int>(report.levels.size());
  std::vector<std::string> level_header{""};
  for (const auto& l : report.levels) level_header.push_back(level_label(l.level));
  std::vector<Table> tables;

  auto rate_cell = [](const std::vector<double>& values, double reference) -> std::string {
    if (values.size() < 2) return "-";
    try {
      return fmt("%.2f", rate(values, reference).finest());
    } catch (const Error&) {
      return "-";
    }
  };
  auto complete = [&](auto get) {
    // Values across all levels, or empty if any level lacks one.
    std::vector<double> v;
    for (const auto& l : report.levels) {
      const std::optional<double> x = get(l);
      if (!x) return std::vector<double>{};
      v.push_back(*x);
    }
    return v;
  };

  {
    Table t{"eigenvalues", level_header, {}};
    t.header.push_back("Trend");
    t.header.push_back("Rate");
    for (int i = 0; i < static_cast<int>(report.exact.size()); ++i) {
      std::vector<std::string> row{"lambda_" + std::to_string(i + 1)};
      for (const auto& l : report.levels)
        row.push_back(i < static_cast<int>(l.lambdas.size()) ? fmt("%.4f", l.lambdas[i]) : "failed");
      const auto v = complete([&](const LevelResult& l) -> std::optional<double> {
        if (i < static_cast<int>(l.lambdas.size())) return l.lambdas[i];
        return std::nullopt;
      });
      row.push_back(v.empty() ? "-" : trend(v));
      row.push_back(v.empty() ? "-" : rate_cell(v, report.exact[i]));
      t.rows.push_back(std::move(row));
    }
    tables.push_back(std::move(t));
  }

  {
    Table t{"residuals", level_header, {}};
    t.header.push_back("Rate");
    for (std::size_t r = 0; r < report.residual_indices.size(); ++r) {
      std::vector<std::string> row{"r_" + std::to_string(report.residual_indices[r])};
      for (const auto& l : report.levels)
        row.push_back(r < l.expansions.size() ? fmt("%.2e", l.expansions[r].r) : "failed");
      const auto v = complete([&](const LevelResult& l) -> std::optional<double> {
        if (r < l.expansions.size()) return l.expansions[r].r;
        return std::nullopt;
      });
      row.push_back(v.empty() ? "-" : rate_cell(v, 0.0));
      t.rows.push_back(std::move(row));
    }
    tables.push_back(std::move(t));
  }

  {
    Table t{"figure", {"h", "e1", "e2"}, {}};
    if (!report.residual_indices.empty() && report.residual_indices.front() == 1) {
      for (const auto& l : report.levels) {
        if (l.expansions.empty()) continue;
        t.rows.push_back({fmt("%.17g", l.h), fmt("%.17g", l.expansions[0].e1), fmt("%.17g", l.expansions[0].e2)});
      }
    }
    tables.push_back(std::move(t));
  }

  if (report.config.analyses.extrapolation && nl >= 2) {
    Table t{"extrapolation", {""}, {}};
    for (int l = 1; l < nl; ++l) t.header.push_back(level_label(report.levels[l].level));
    t.header.push_back("Rate");
    for (int i = 0; i < static_cast<int>(report.exact.size()); ++i) {
      std::vector<std::string> row{"lambda_" + std::to_string(i + 1)};
      std::vector<double> values;
      for (int l = 1; l < nl; ++l) {
        const auto& a = report.levels[l - 1].lambdas;
        const auto& b = report.levels[l].lambdas;
        if (i < static_cast<int>(a.size()) && i < static_cast<int>(b.size())) {
          const double x = extrapolate(a[i], b[i]);
          values.push_back(x);
          row.push_back(fmt("%.2e", std::abs(x - report.exact[i])));
        } else {
          row.push_back("failed");
        }
      }
      row.push_back(static_cast<int>(values.size()) == nl - 1 ? rate_cell(values, report.exact[i]) : "-");
      t.rows.push_back(std::move(row));
    }
    tables.push_back(std::move(t));
  }

  if (report.config.analyses.supercloseness || report.config.analyses.postprocessing) {
    Table t{"superconvergence", level_header, {}};
    t.header.push_back("Rate");
    using Get = std::optional<double> (*)(const LevelResult&);
    const std::vector<std::pair<std::string, Get>> quantities = {
        {"sigma_I-sigma_h", [](const LevelResult& l) -> std::optional<double> {
           if (l.superclose) return l.superclose->norm_sigma;
           return std::nullopt;
         }},
        {"div(sigma_I-sigma_h)", [](const LevelResult& l) -> std::optional<double> {
           if (l.superclose) return l.superclose->norm_div;
           return std::nullopt;
         }},
        {"Pi0u-u_h", [](const LevelResult& l) -> std::optional<double> {
           if (l.superclose) return l.superclose->norm_u;
           return std::nullopt;
         }},
        {"I2h_sigma_L2", [](const LevelResult& l) -> std::optional<double> {
           if (l.postprocess) return l.postprocess->sigma_l2;
           return std::nullopt;
         }},
        {"I2h_sigma_H1", [](const LevelResult& l) -> std::optional<double> {
           if (l.postprocess) return l.postprocess->sigma_h1;
           return std::nullopt;
         }},
        {"J2h_u_L2", [](const LevelResult& l) -> std::optional<double> {
           if (l.postprocess) return l.postprocess->u_l2;
           return std::nullopt;
         }},
        {"J2h_u_H1", [](const LevelResult& l) -> std::optional<double> {
           if (l.postprocess) return l.postprocess->u_h1;
           return std::nullopt;
         }},
    };
    for (const auto& [name, get] : quantities) {
      std::vector<std::string> row{name};
      std::vector<double> v;
      for (const auto& l : report.levels) {
        const auto x = get(l);
        row.push_back(x ? fmt("%.2e", *x) : "-");
        if (x) v.push_back(*x);
      }
      row.push_back(v.size() >= 2 ? rate_cell(v, 0.0) : "-");
      t.rows.push_back(std::move(row));
    }
    tables.push_back(std::move(t));
  }

  if (report.config.analyses.bounds) {
    Table t{"bounds", level_header, {}};
    std::vector<std::string> upper{"min(lambda_h-lambda)"};
    std::vector<std::string> violations{"upper_bound_violations"};
    std::vector<std::string> lower{"lower_margin_lambda_1"};
    for (const auto& l : report.levels) {
      const std::vector<double> ex(report.exact.begin(), report.exact.begin() + l.lambdas.size());
      const auto checks = check_upper_bound(l.lambdas, ex);
      double worst = checks.empty() ? 0.0 : checks.front().margin;
      int bad = 0;
      for (const auto& c : checks) {
        worst = std::min(worst, c.margin);
        bad += c.holds ? 0 : 1;
      }
      upper.push_back(checks.empty() ? "failed" : fmt("%.2e", worst));
      violations.push_back(std::to_string(bad));
      lower.push_back(l.lower_margin ? fmt("%.2e", *l.lower_margin) : "-");
    }
    t.rows = {upper, violations, lower};
    tables.push_back(std::move(t));
  }

  if (report.config.analyses.equivalence) {
    Table t{"equivalence", {"level", "lambda_rel", "sigma_dist", "u_dist", "max_jump", "poisson_sigma_dist"}, {}};
    for (const auto& l : report.levels) {
      if (!l.equivalence) continue;
      const auto& e = *l.equivalence;
      t.rows.push_back({std::to_string(l.level), fmt("%.2e", e.lambda_rel), fmt("%.2e", e.sigma_dist),
                        fmt("%.2e", e.u_dist), fmt("%.2e", e.max_jump), fmt("%.2e", e.poisson_sigma_dist)});
    }
    tables.push_back(std::move(t));
  }

  if (report.config.analyses.frequencies) {
    Table t{"frequencies", {"level", "index", "m", "n", "lambda_h", "predicted_shift", "observed_shift"}, {}};
    for (const auto& l : report.levels) {
      for (const auto& a : l.frequencies) {
        t.rows.push_back({std::to_string(l.level), std::to_string(a.index + 1), std::to_string(a.frequency.m),
                          std::to_string(a.frequency.n), fmt("%.10f", a.lambda_h), fmt("%.6e", a.predicted_shift),
                          fmt("%.6e", a.observed_shift)});
      }
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

std::string render_table(const Table& table, const std::string& format) {
  std::ostringstream os;
  if (format == "csv") {
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t c = 0; c < cells.size(); ++c) os << (c ? "," : "") << cells[c];
      os << '\n';
    };
    line(table.header);
    for (const auto& r : table.rows) line(r);
  } else if (format == "text") {
    // Display width, counting UTF-8 code points.
    auto width = [](const std::string& s) {
      return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char ch) { return (ch & 0xC0) != 0x80; }));
    };
    std::vector<std::size_t> w(table.header.size(), 0);
    auto grow = [&](const std::vector<std::string>& cells) {
      if (cells.size() > w.size()) w.resize(cells.size(), 0);
      for (std::size_t c = 0; c < cells.size(); ++c) w[c] = std::max(w[c], width(cells[c]));
    };
    grow(table.header);
    for (const auto& r : table.rows) grow(r);
    auto line = [&](const std::vector<std::string>& cells) {
      std::string s;
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (c) s += "  ";
        s += cells[c];
        if (c + 1 < cells.size()) s.append(w[c] - width(cells[c]), ' ');
      }
      os << s << '\n';
    };
    os << "# " << table.name << '\n';
    line(table.header);
    for (const auto& r : table.rows) line(r);
  } else if (format == "json") {
    json j;
    j["name"] = table.name;
    j["header"] = table.header;
    j["rows"] = table.rows;
    os << j.dump(2) << '\n';
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown format '" + format + "'");
  }
  return os.str();
}

std::string report_to_json(const RunReport& report) {
  const ExperimentConfig& c = report.config;
  json j;
  j["config"] = {{"name", c.name},
                 {"x_nodes", c.x0},
                 {"y_nodes", c.y0},
                 {"levels", c.levels},
                 {"k", c.k},
                 {"tol", c.tol},
                 {"seed", c.seed},
                 {"analyses",
                  {{"residuals", c.analyses.residuals},
                   {"supercloseness", c.analyses.supercloseness},
                   {"postprocessing", c.analyses.postprocessing},
                   {"extrapolation", c.analyses.extrapolation},
                   {"equivalence", c.analyses.equivalence},
                   {"bounds", c.analyses.bounds},
                   {"frequencies", c.analyses.frequencies}}},
                 {"residual_indices", c.residual_indices},
                 {"equivalence_levels", c.equivalence_levels},
                 {"output", {{"dir", c.out_dir}, {"format", c.format}}}};
  j["exact"] = report.exact;
  j["residual_indices"] = report.residual_indices;
  json levels = json::array();
  for (const auto& l : report.levels) {
    json e;
    e["level"] = l.level;
    e["h"] = l.h;
    e["n_cell"] = l.n_cell;
    e["lambdas"] = l.lambdas;
    e["solver_residuals"] = l.solver_residuals;
    json ex = json::array();
    for (const auto& x : l.expansions) ex.push_back({{"e1", x.e1}, {"e2", x.e2}, {"r", x.r}});
    e["expansions"] = ex;
    e["superclose"] = l.superclose ? json{{"sigma", l.superclose->norm_sigma},
                                          {"div", l.superclose->norm_div},
                                          {"u", l.superclose->norm_u}}
                                   : json(nullptr);
    e["postprocess"] = l.postprocess ? json{{"sigma_l2", l.postprocess->sigma_l2},
                                            {"sigma_h1", l.postprocess->sigma_h1},
                                            {"u_l2", l.postprocess->u_l2},
                                            {"u_h1", l.postprocess->u_h1}}
                                     : json(nullptr);
    e["equivalence"] = l.equivalence ? json{{"lambda_rel", l.equivalence->lambda_rel},
                                            {"sigma_dist", l.equivalence->sigma_dist},
                                            {"u_dist", l.equivalence->u_dist},
                                            {"max_jump", l.equivalence->max_jump},
                                            {"poisson_sigma_dist", l.equivalence->poisson_sigma_dist}}
                                     : json(nullptr);
    e["lower_margin"] = opt_number(l.lower_margin);
    json fr = json::array();
    for (const auto& a : l.frequencies) {
      fr.push_back({{"index", a.index},
                    {"m", a.frequency.m},
                    {"n", a.frequency.n},
                    {"lambda_h", a.lambda_h},
                    {"predicted_shift", a.predicted_shift},
                    {"observed_shift", a.observed_shift}});
    }
    e["frequencies"] = fr;
    e["failures"] = l.failures;
    levels.push_back(std::move(e));
  }
  j["levels"] = levels;
  j["failures"] = report.failures();
  return j.dump(2) + "\n";
}

RunReport report_from_json(const std::string& json_text) {
  try {
    const json j = json::parse(json_text);
    RunReport r;
    const json& c = j.at("config");
    r.config = parse_config(c.dump());
    r.exact = j.at("exact").get<std::vector<double>>();
    r.residual_indices = j.at("residual_indices").get<std::vector<int>>();
    for (const json& e : j.at("levels")) {
      LevelResult l;
      l.level = e.at("level").get<int>();
      l.h = e.at("h").get<double>();
      l.n_cell = e.at("n_cell").get<int>();
      l.lambdas = e.at("lambdas").get<std::vector<double>>();
      l.solver_residuals = e.at("solver_residuals").get<std::vector<double>>();
      for (const json& x : e.at("expansions")) {
        ExpansionReport er;
        er.e1 = x.at("e1").get<double>();
        er.e2 = x.at("e2").get<double>();
        er.r = x.at("r").get<double>();
        er.level = l.level;
        er.h = l.h;
        l.expansions.push_back(er);
      }
      if (!e.at("superclose").is_null()) {
        const json& s = e["superclose"];
        l.superclose = SuperclosenessReport{s.at("sigma").get<double>(), s.at("div").get<double>(),
                                            s.at("u").get<double>(), l.level, l.h};
      }
      if (!e.at("postprocess").is_null()) {
        const json& p = e["postprocess"];
        l.postprocess = PostprocessReport{p.at("sigma_l2").get<double>(), p.at("sigma_h1").get<double>(),
                                          p.at("u_l2").get<double>(), p.at("u_h1").get<double>()};
      }
      if (!e.at("equivalence").is_null()) {
        const json& q = e["equivalence"];
        l.equivalence = EquivalenceSummary{q.at("lambda_rel").get<double>(), q.at("sigma_dist").get<double>(),
                                           q.at("u_dist").get<double>(), q.at("max_jump").get<double>(),
                                           q.at("poisson_sigma_dist").get<double>()};
      }
      if (!e.at("lower_margin").is_null()) l.lower_margin = e["lower_margin"].get<double>();
      for (const json& a : e.at("frequencies")) {
        l.frequencies.push_back({a.at("index").get<int>(), a.at("lambda_h").get<double>(),
                                 Frequency{a.at("m").get<int>(), a.at("n").get<int>()},
                                 a.at("predicted_shift").get<double>(), a.at("observed_shift").get<double>()});
      }
      l.failures = e.at("failures").get<std::vector<std::string>>();
      r.levels.push_back(std::move(l));
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("malformed report: ") + e.what());
  }
}

std::vector<std::filesystem::path> emit_tables(const RunReport& report, const std::string& format,
                                               const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + out_dir.string() + ": " + ec.message());
  const std::string ext = format == "csv" ? ".csv" : format == "text" ? ".txt" : ".json";
  const std::string stem = report.config.name;
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
    out.close();
    if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + p.string());
    written.push_back(p);
  };

  for (const Table& t : build_tables(report)) {
    // Figure data is always plain columns for plotting tools.
    const std::string f = t.name == "figure" ? "csv" : format;
    write(out_dir / (stem + "_" + t.name + (t.name == "figure" ? ".csv" : ext)), render_table(t, f));
  }
  write(out_dir / (stem + "_report.json"), report_to_json(report));

  std::ostringstream timings;
  timings << "level seconds\n";
  for (const auto& l : report.levels) timings << l.level << ' ' << fmt("%.3f", l.seconds) << '\n';
  write(out_dir / (stem + "_timings.txt"), timings.str());
  return written;
}

}  // namespace rrt
