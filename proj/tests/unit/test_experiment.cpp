#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "rrt/error.hpp"
#include "rrt/experiment.hpp"

using namespace rrt;

namespace {

const double kPi = std::numbers::pi;

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

ExperimentConfig small() {
  ExperimentConfig c = preset("c");
  c.levels = 2;
  c.k = 6;
  c.equivalence_levels = 1;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("number expressions") {
  CHECK(parse_number("0.25") == 0.25);
  CHECK(parse_number("pi") == kPi);
  CHECK(parse_number("2*pi/3") == doctest::Approx(2 * kPi / 3));
  CHECK(parse_number(" 5 * pi / 6 ") == doctest::Approx(5 * kPi / 6));
  CHECK(parse_number("pi/4") == doctest::Approx(kPi / 4));
  CHECK(kind_of([] { parse_number("two"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_number(""); }) == ErrorKind::ConfigError);
}

TEST_CASE("presets") {
  const ExperimentConfig a = preset("a");
  CHECK(a.x0.size() == 9);
  CHECK(a.k == 6);
  CHECK(preset("b").y0.size() == 17);
  CHECK(preset("c").x0[3] == doctest::Approx(2 * kPi / 3));
  CHECK(kind_of([] { preset("d"); }) == ErrorKind::ConfigError);
  CHECK_NOTHROW(a.validate());
  CHECK(a.domain().is_square());
}

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(R"({
    "name": "strip",
    "x_nodes": {"uniform": [0, "pi", 5]},
    "y_nodes": [0, "pi/3", "2*pi/3", "pi"],
    "levels": 2, "k": 3, "tol": 1e-9,
    "analyses": {"equivalence": false},
    "residual_indices": [1, 2],
    "output": {"dir": "somewhere", "format": "text"}
  })");
  CHECK(c.name == "strip");
  CHECK(c.x0.size() == 5);
  CHECK(c.x0.back() == kPi);
  CHECK(c.y0[1] == doctest::Approx(kPi / 3));
  CHECK(c.levels == 2);
  CHECK(c.tol == 1e-9);
  CHECK_FALSE(c.analyses.equivalence);
  CHECK(c.analyses.residuals);
  CHECK(c.residual_indices == std::vector<int>{1, 2});
  CHECK(c.out_dir == "somewhere");
  CHECK(c.format == "text");

  const ExperimentConfig from_case = parse_config(R"({"case": "b", "levels": 1})");
  CHECK(from_case.y0.size() == 17);
  CHECK(from_case.levels == 1);

  CHECK(kind_of([] { parse_config("{"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_config("[1]"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_config(R"({"k": "six"})"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_config(R"({"x_nodes": {"uniform": [0, 1]}})"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { load_config("/nonexistent/config.json"); }) == ErrorKind::IoFailure);
}

TEST_CASE("config validation") {
  ExperimentConfig c = small();
  c.levels = 0;
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::ConfigError);
  c = small();
  c.k = 26;
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::ConfigError);
  c = small();
  c.format = "xml";
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::ConfigError);
  c = small();
  c.residual_indices = {7};
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::ConfigError);
  c = small();
  c.x0 = {0.0, 1.0, 1.0};
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("table rendering") {
  const Table t{"demo", {"", "level 0"}, {{"λ_1", "2.0258"}, {"x", "1"}}};
  CHECK(render_table(t, "csv") == ",level 0\nλ_1,2.0258\nx,1\n");
  const std::string text = render_table(t, "text");
  CHECK(text.find("λ_1  2.0258") != std::string::npos);
  const auto j = nlohmann::json::parse(render_table(t, "json"));
  CHECK(j["name"] == "demo");
  CHECK(j["rows"][0][1] == "2.0258");
  CHECK(kind_of([&] { render_table(t, "xml"); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("small sweep: analyses, determinism, report round trip") {
  const RunReport r = run_case(small());
  CHECK(r.ok());
  REQUIRE(r.levels.size() == 3);
  CHECK(r.residual_indices == std::vector<int>{1, 4});
  CHECK(r.levels[2].lambdas.size() == 6);
  CHECK(r.levels[2].n_cell == 400);
  CHECK(r.levels[1].superclose.has_value());
  CHECK(r.levels[1].postprocess.has_value());
  CHECK(r.levels[1].equivalence.has_value());
  CHECK_FALSE(r.levels[2].equivalence.has_value());

  const RunReport again = run_case(small());
  CHECK(report_to_json(r) == report_to_json(again));

  const RunReport back = report_from_json(report_to_json(r));
  CHECK(back.levels[2].lambdas == r.levels[2].lambdas);
  CHECK(back.levels[1].expansions[0].r == r.levels[1].expansions[0].r);
  CHECK(report_to_json(back) == report_to_json(r));

  const auto tables = build_tables(r);
  auto find = [&](const std::string& n) {
    for (const auto& t : tables)
      if (t.name == n) return t;
    FAIL("missing table " << n);
    return Table{};
  };
  const Table eig = find("eigenvalues");
  CHECK(eig.rows.size() == 6);
  CHECK(eig.rows[0][1] == "2.0750");
  CHECK(eig.rows[0][4] == "↘");
  CHECK(find("residuals").rows.size() == 2);

  const auto dir = std::filesystem::temp_directory_path() / "rrt_test_experiment";
  std::filesystem::remove_all(dir);
  const auto written = emit_tables(r, "csv", dir);
  CHECK(std::filesystem::exists(dir / "c_eigenvalues.csv"));
  CHECK(std::filesystem::exists(dir / "c_figure.csv"));
  CHECK(std::filesystem::exists(dir / "c_report.json"));
  CHECK(std::filesystem::exists(dir / "c_timings.txt"));
  const std::string first = slurp(dir / "c_report.json");
  emit_tables(again, "csv", dir);
  CHECK(slurp(dir / "c_report.json") == first);
  CHECK(slurp(dir / "c_eigenvalues.csv") == render_table(eig, "csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("solve-only sweep") {
  ExperimentConfig c = small();
  c.levels = 1;
  const RunReport r = run_eigs(c);
  CHECK(r.ok());
  CHECK(r.levels.size() == 2);
  CHECK(r.levels[0].expansions.empty());
  CHECK_FALSE(r.levels[0].superclose.has_value());
}
