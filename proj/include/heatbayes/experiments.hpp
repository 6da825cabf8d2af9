#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "heatbayes/config.hpp"
#include "heatbayes/eigen_basis.hpp"
#include "heatbayes/inference.hpp"

namespace heatbayes {

// 1 + exp(-(5x-2)^2 - (5y-1)^2)
double builtin_truth_f0(Point2 p);
// 2.5 - exp(-(5x-2)^2 - (2.5y-0.5)^2)
double builtin_conductivity(Point2 p);
// Smooth compactly supported bump exp(1 - 1/(1 - r^2/R^2)) at (0.4, 0.2), R = 0.25.
double bump_psi(Point2 p);

using AnalyticFunction = std::function<double(Point2)>;
// Registered ids; unknown ids raise ConfigError.
AnalyticFunction lookup_truth(const std::string& id);
AnalyticFunction lookup_conductivity(const std::string& id);
AnalyticFunction lookup_psi(const std::string& id);

// Meshes, fields and eigenbasis shared by every experiment of a config. The
// inference mesh carries the basis; data are generated on a mesh refined by
// data_refinement.
class ExperimentContext {
 public:
  explicit ExperimentContext(ExperimentConfig config);

  const ExperimentConfig& config() const { return config_; }
  const MeshPtr& mesh() const { return mesh_; }
  const MeshPtr& data_mesh() const { return data_mesh_; }
  const EigenBasis& basis() const { return *basis_; }
  const ScalarField& truth() const { return truth_; }
  const ScalarField& truth_on_data_mesh() const { return truth_data_; }
  const ScalarField& conductivity() const { return conductivity_; }
  const ScalarField& conductivity_on_data_mesh() const { return conductivity_data_; }
  const ScalarField& psi() const { return psi_; }
  int truncation(std::size_t n) const;
  int heat_steps() const { return steps_; }
  int data_heat_steps() const { return data_steps_; }
  // <f0, psi> computed on the data mesh.
  double true_functional() const { return true_functional_; }

  // Per-n objects: design, operator (truncated to J(n)), noiseless data.
  struct Problem {
    DesignGrid design;
    ForwardOperator op;
    Eigen::VectorXd clean;
    PriorCovariance prior;
    int J = 0;
  };
  Problem problem(std::size_t n_target) const;

 private:
  ExperimentConfig config_;
  MeshPtr mesh_;
  MeshPtr data_mesh_;
  std::unique_ptr<EigenBasis> basis_;
  ScalarField truth_;
  ScalarField truth_data_;
  ScalarField conductivity_;
  ScalarField conductivity_data_;
  ScalarField psi_;
  int steps_ = 0;
  int data_steps_ = 0;
  double true_functional_ = 0.0;
};

struct ErrorRow {
  std::size_t n = 0;         // requested sample size
  std::size_t n_actual = 0;  // design grid size
  int J = 0;
  double mean_l2 = 0.0;
  double mean_rel = 0.0;
  double std_l2 = 0.0;
  std::size_t seeds = 0;
};
struct ErrorTable {
  std::vector<ErrorRow> rows;
};

struct CoverageRow {
  double gamma = 0.0;
  std::size_t n = 0;
  std::size_t n_actual = 0;
  int replicates = 0;
  double coverage = 0.0;
  double mean_radius = 0.0;
  double mean_exact_radius = 0.0;
};
struct CoverageReport {
  double true_value = 0.0;
  std::vector<CoverageRow> rows;  // one per n in n_list
};

// Writes <output_dir>/table1.csv; rows are flushed as each n completes.
ErrorTable run_table1(const ExperimentContext& context);
// Writes <output_dir>/coverage.csv. Requires replicates >= 50.
CoverageReport run_coverage(const ExperimentContext& context, int replicates);
// Writes <output_dir>/cross_section.csv for the largest n and first seed.
void run_cross_section(const ExperimentContext& context, int m);
// Writes <output_dir>/posterior.json for the largest n and first seed.
void run_posterior_export(const ExperimentContext& context);
// Writes <output_dir>/mesh.txt and <output_dir>/eigenvalues.csv.
void run_mesh_export(const ExperimentContext& context);
void run_eigen_export(const ExperimentContext& context);

// RMS of the noiseless data divided by sigma.
double signal_to_noise(const ExperimentContext& context, std::size_t n_target);

// First line of every CSV artifact: "# config_hash=<hex> seeds=<list>".
std::string provenance_line(const ExperimentConfig& config);

// The two principal axes of the domain, sampled at 101 points each.
struct AxisSample {
  std::string axis;
  double s = 0.0;
  Point2 point;
};
std::vector<AxisSample> principal_axes(const DomainSpec& spec, double inset);

}  // namespace heatbayes
