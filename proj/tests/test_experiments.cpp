#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "heatbayes/config.hpp"
#include "heatbayes/errors.hpp"
#include "heatbayes/experiments.hpp"
#include "heatbayes/fem.hpp"

using namespace heatbayes;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "heatbayes_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig small_config(const fs::path& out) {
  auto c = parse_config(
      "domain = unit_square\ntruth = sin_square\nconductivity = unit\nmesh_h = 0.08\nJ = 8\n"
      "n_list = 40, 120\nseeds = 1, 2\nsigma = 0.02\nT = 0.01\n");
  c.output_dir = out.string();
  return c;
}

ExperimentConfig paper_config(const fs::path& out) {
  auto c = load_config(HEATBAYES_SOURCE_DIR "/configs/paper.cfg");
  c.output_dir = out.string();
  return c;
}

}  // namespace

TEST_CASE("ground truth and conductivity formulas") {
  CHECK(builtin_truth_f0({0.4, 0.2}) == 2.0);
  for (double d : {-0.1, -1e-3, 1e-3, 0.1}) CHECK(builtin_truth_f0({0.4, 0.2 + d}) < 2.0);
  CHECK(builtin_truth_f0({-0.9, -0.3}) == doctest::Approx(1.0 + std::exp(-6.5 * 6.5 - 2.5 * 2.5)));
  CHECK(builtin_truth_f0({-0.9, -0.3}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(builtin_conductivity({0.4, 0.2}) == 1.5);
  CHECK(builtin_conductivity({-0.9, -0.3}) == doctest::Approx(2.5).epsilon(1e-12));
  const Mesh mesh = generate_mesh(DomainSpec::paper_ellipse(), 0.05);
  for (const auto& p : mesh.vertices) {
    CHECK(builtin_conductivity(p) >= 1.5);
    CHECK(builtin_conductivity(p) <= 2.5);
  }
  CHECK(bump_psi({0.4, 0.2}) == doctest::Approx(1.0));
  CHECK(bump_psi({0.4 + 0.25, 0.2}) == 0.0);
  CHECK_THROWS_AS(lookup_truth("nope"), ConfigError);
  CHECK_THROWS_AS(lookup_psi("nope"), ConfigError);
}

TEST_CASE("table1 on a small problem is deterministic") {
  const auto dir = scratch("table1_small");
  const ExperimentContext context(small_config(dir));
  const auto table = run_table1(context);
  REQUIRE(table.rows.size() == 2);
  const std::string first = slurp(dir / "table1.csv");
  CHECK(first.rfind("# config_hash=", 0) == 0);
  const auto rows = read_csv(dir / "table1.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::vector<std::string>{"n", "mean_l2", "mean_rel", "std_l2", "seeds"});

  setenv("HEATBAYES_THREADS", "1", 1);
  run_table1(ExperimentContext(small_config(dir)));
  CHECK(slurp(dir / "table1.csv") == first);
  setenv("HEATBAYES_THREADS", "3", 1);
  run_table1(ExperimentContext(small_config(dir)));
  CHECK(slurp(dir / "table1.csv") == first);
  unsetenv("HEATBAYES_THREADS");

  for (const auto& row : table.rows) {
    CHECK(std::isfinite(row.mean_l2));
    CHECK(row.mean_rel > 0.0);
    CHECK(row.seeds == 2);
  }
  // The truth lies in the span of the first eigenfunction, so the error is small.
  CHECK(table.rows.back().mean_rel < 0.05);
}

TEST_CASE("single n and seed gives a one-row table") {
  const auto dir = scratch("table1_single");
  auto c = small_config(dir);
  c.n_list = {60};
  c.seeds = {9};
  const auto a = run_table1(ExperimentContext(c));
  const std::string first = slurp(dir / "table1.csv");
  const auto b = run_table1(ExperimentContext(c));
  CHECK(a.rows.size() == 1);
  CHECK(a.rows[0].mean_l2 == b.rows[0].mean_l2);
  CHECK(slurp(dir / "table1.csv") == first);
}

TEST_CASE("coverage needs enough replicates") {
  const auto dir = scratch("coverage_small");
  const ExperimentContext context(small_config(dir));
  CHECK_THROWS_AS(run_coverage(context, 49), PreconditionError);
  const auto report = run_coverage(context, 50);
  REQUIRE(report.rows.size() == 2);
  const auto rows = read_csv(dir / "coverage.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].front() == "gamma");
  for (const auto& row : report.rows) {
    CHECK(row.coverage >= 0.0);
    CHECK(row.coverage <= 1.0);
    CHECK(row.mean_radius > 0.0);
  }
}

TEST_CASE("cross-section schema") {
  const auto dir = scratch("cross_small");
  const ExperimentContext context(small_config(dir));
  CHECK_THROWS_AS(run_cross_section(context, 0), PreconditionError);
  run_cross_section(context, 1);
  const auto rows = read_csv(dir / "cross_section.csv");
  REQUIRE(rows.size() == 1 + 2 * 101);
  CHECK(rows[0] == std::vector<std::string>{"axis", "s", "f0", "fbar", "sample_1"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 5);
    for (std::size_t k = 1; k < 5; ++k) CHECK(std::isfinite(std::stod(rows[i][k])));
  }
}

TEST_CASE("exports") {
  const auto dir = scratch("exports_small");
  const ExperimentContext context(small_config(dir));
  run_mesh_export(context);
  run_eigen_export(context);
  run_posterior_export(context);
  std::ifstream mesh_in(dir / "mesh.txt");
  const Mesh back = read_mesh(mesh_in);
  CHECK(back.vertex_count() == context.mesh()->vertex_count());
  const auto eig = read_csv(dir / "eigenvalues.csv");
  CHECK(eig.size() == 1 + 8);
  CHECK(slurp(dir / "posterior.json").find("\"mean\"") != std::string::npos);
}

TEST_CASE("principal axes of the ellipse") {
  const auto spec = DomainSpec::paper_ellipse();
  const auto axes = principal_axes(spec, 0.01);
  REQUIRE(axes.size() == 202);
  for (const auto& a : axes) CHECK(contains(spec, a.point));
  CHECK(axes.front().axis == "major");
  CHECK(axes.back().axis == "minor");
  CHECK(axes.front().s == doctest::Approx(-0.99));
}

// The remaining cases run the full simulation-study settings.

TEST_CASE("study: coverage at level one half") {
  const auto dir = scratch("coverage_half");
  auto c = paper_config(dir);
  c.gamma = 0.5;
  c.n_list = {1000};
  const auto report = run_coverage(ExperimentContext(c), 200);
  REQUIRE(report.rows.size() == 1);
  MESSAGE("coverage at gamma = .5: " << report.rows[0].coverage);
  CHECK(report.rows[0].coverage >= 0.38);
  CHECK(report.rows[0].coverage <= 0.62);
}

TEST_CASE("study: vanishing noise leaves a bias that barely depends on n") {
  // Data come from the inference mesh here: with sigma this small, the
  // discretisation gap to a finer data mesh would dominate the error.
  const auto dir = scratch("table1_quiet");
  auto c = paper_config(dir);
  c.sigma = 1e-8;
  c.data_refinement = 1;
  c.seeds = {1};
  const auto table = run_table1(ExperimentContext(c));
  double lo = 1e300, hi = 0.0;
  for (const auto& row : table.rows) {
    MESSAGE("n = " << row.n << " relative error " << row.mean_rel);
    lo = std::min(lo, row.mean_rel);
    hi = std::max(hi, row.mean_rel);
  }
  CHECK(hi <= 1.25 * lo);
}

TEST_CASE("study: posterior mean stays inside the sample envelope") {
  const auto dir = scratch("cross_paper");
  const ExperimentContext context(paper_config(dir));
  run_cross_section(context, 1000);
  const auto rows = read_csv(dir / "cross_section.csv");
  REQUIRE(rows.size() == 1 + 202);
  REQUIRE(rows[0].size() == 4 + 1000);
  int inside = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double fbar = std::stod(rows[i][3]);
    double lo = 1e300, hi = -1e300;
    for (std::size_t k = 4; k < rows[i].size(); ++k) {
      const double v = std::stod(rows[i][k]);
      CHECK(std::isfinite(v));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    inside += (fbar >= lo && fbar <= hi) ? 1 : 0;
  }
  CHECK(inside >= 0.95 * 202);
}
