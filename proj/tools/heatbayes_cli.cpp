// heatbayes: command-line harness for the heat-equation initial-condition
// study. Each subcommand reads a flat key = value config and writes
// plot-ready artifacts into the output directory.
//
// Exit codes: 0 success, 1 usage or config error, 2 numerical failure.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "heatbayes/config.hpp"
#include "heatbayes/errors.hpp"
#include "heatbayes/experiments.hpp"

namespace {

constexpr const char* kVersion = "heatbayes 1.0.0";

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  int replicates = -1;
  int samples = -1;
};

heatbayes::ExperimentConfig load(const Options& opts) {
  auto config = heatbayes::load_config(opts.config_path);
  if (opts.seed) config.seeds = {*opts.seed};
  if (opts.out) config.output_dir = *opts.out;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian recovery of initial heat states with Gaussian series priors"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Options opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "experiment config file")->required();
    sub->add_option("--seed", opts.seed, "run with this single seed instead of the configured list");
    sub->add_option("--out", opts.out, "output directory");
  };
  auto* mesh = app.add_subcommand("mesh", "write the inference mesh to mesh.txt");
  auto* eigen = app.add_subcommand("eigen", "write Dirichlet-Laplacian eigenvalues to eigenvalues.csv");
  auto* table1 = app.add_subcommand("table1", "L2 error of the posterior mean for each n (table1.csv)");
  auto* coverage = app.add_subcommand("coverage", "frequentist coverage of credible intervals (coverage.csv)");
  auto* cross = app.add_subcommand("cross-section", "truth, posterior mean and draws along the principal axes");
  auto* posterior = app.add_subcommand("posterior", "posterior mean and covariance as posterior.json");
  for (auto* sub : {mesh, eigen, table1, coverage, cross, posterior}) add_common(sub);
  coverage->add_option("--replicates", opts.replicates, "override the configured replicate count");
  cross->add_option("--samples", opts.samples, "override the configured number of posterior draws");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    const auto config = load(opts);
    const heatbayes::ExperimentContext context(config);
    if (*mesh) {
      heatbayes::run_mesh_export(context);
    } else if (*eigen) {
      heatbayes::run_eigen_export(context);
    } else if (*table1) {
      const auto table = heatbayes::run_table1(context);
      for (const auto& row : table.rows) {
        std::cout << "n=" << row.n << " (grid " << row.n_actual << ", J=" << row.J << ")  L2 error " << row.mean_l2
                  << "  relative " << row.mean_rel << "\n";
      }
    } else if (*coverage) {
      const int replicates = opts.replicates > 0 ? opts.replicates : config.replicates;
      const auto report = heatbayes::run_coverage(context, replicates);
      for (const auto& row : report.rows) {
        std::cout << "n=" << row.n << "  coverage " << row.coverage << "  mean radius " << row.mean_radius << "\n";
      }
    } else if (*cross) {
      heatbayes::run_cross_section(context, opts.samples > 0 ? opts.samples : config.cross_section_samples);
    } else if (*posterior) {
      heatbayes::run_posterior_export(context);
    }
  } catch (const heatbayes::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const heatbayes::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
