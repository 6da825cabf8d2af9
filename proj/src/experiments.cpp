#include "heatbayes/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "heatbayes/errors.hpp"
#include "heatbayes/parallel.hpp"
#include "heatbayes/random.hpp"

namespace heatbayes {

namespace {

constexpr double kBumpRadius = 0.25;
constexpr Point2 kBumpCenter{0.4, 0.2};

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::ofstream open_output(const ExperimentConfig& config, const std::string& name) {
  const std::filesystem::path dir(config.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write output file: " + (dir / name).string());
  return out;
}

const ExperimentConfig& validated(const ExperimentConfig& config) {
  lookup_truth(config.truth);
  lookup_conductivity(config.conductivity);
  lookup_psi(config.psi);
  if (config.n_list.empty()) throw ConfigError("n_list must not be empty");
  if (config.seeds.empty()) throw ConfigError("seeds must not be empty");
  return config;
}

MeshPtr make_mesh(const DomainSpec& spec, double h) { return std::make_shared<const Mesh>(generate_mesh(spec, h)); }

}  // namespace

double builtin_truth_f0(Point2 p) {
  return 1.0 + std::exp(-std::pow(5.0 * p.x - 2.0, 2) - std::pow(5.0 * p.y - 1.0, 2));
}

double builtin_conductivity(Point2 p) {
  return 2.5 - std::exp(-std::pow(5.0 * p.x - 2.0, 2) - std::pow(2.5 * p.y - 0.5, 2));
}

double bump_psi(Point2 p) {
  const Point2 d = p - kBumpCenter;
  const double r2 = dot(d, d) / (kBumpRadius * kBumpRadius);
  if (r2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - r2));
}

AnalyticFunction lookup_truth(const std::string& id) {
  static const std::map<std::string, AnalyticFunction> registry{
      {"f0_paper", builtin_truth_f0},
      {"sin_square", [](Point2 p) { return std::sin(std::numbers::pi * p.x) * std::sin(std::numbers::pi * p.y); }},
  };
  if (auto it = registry.find(id); it != registry.end()) return it->second;
  throw ConfigError("unknown truth id '" + id + "'");
}

AnalyticFunction lookup_conductivity(const std::string& id) {
  static const std::map<std::string, AnalyticFunction> registry{
      {"s_paper", builtin_conductivity},
      {"unit", [](Point2) { return 1.0; }},
  };
  if (auto it = registry.find(id); it != registry.end()) return it->second;
  throw ConfigError("unknown conductivity id '" + id + "'");
}

AnalyticFunction lookup_psi(const std::string& id) {
  if (id == "bump_psi") return bump_psi;
  throw ConfigError("unknown psi id '" + id + "'");
}

ExperimentContext::ExperimentContext(ExperimentConfig config)
    : config_(validated(config)),
      mesh_(make_mesh(config_.domain, config_.mesh_h)),
      data_mesh_(make_mesh(config_.domain, config_.mesh_h / config_.data_refinement)),
      truth_(ScalarField::interpolate(mesh_, lookup_truth(config_.truth))),
      truth_data_(ScalarField::interpolate(data_mesh_, lookup_truth(config_.truth))),
      conductivity_(ScalarField::interpolate(mesh_, lookup_conductivity(config_.conductivity))),
      conductivity_data_(ScalarField::interpolate(data_mesh_, lookup_conductivity(config_.conductivity))),
      psi_(ScalarField::interpolate(mesh_, lookup_psi(config_.psi))) {
  int j_max = 0;
  for (auto n : config_.n_list) j_max = std::max(j_max, truncation(n));
  basis_ = std::make_unique<EigenBasis>(dirichlet_laplacian_basis(mesh_, j_max));
  steps_ = config_.heat_steps.value_or(default_heat_steps(config_.T, config_.mesh_h));
  data_steps_ = config_.heat_steps.value_or(default_heat_steps(config_.T, config_.mesh_h / config_.data_refinement));
  const ScalarField psi_data = ScalarField::interpolate(data_mesh_, lookup_psi(config_.psi));
  true_functional_ = l2_inner(truth_data_, psi_data);
}

int ExperimentContext::truncation(std::size_t n) const {
  return config_.J.value_or(default_truncation(n, config_.alpha, 2));
}

ExperimentContext::Problem ExperimentContext::problem(std::size_t n_target) const {
  Problem p;
  p.design = design_grid(config_.domain, n_target);
  p.J = truncation(n_target);
  const EigenBasis basis = basis_->truncated(p.J);
  p.op = build_forward_matrix(basis, conductivity_, config_.T, p.design, steps_);
  p.clean = noiseless_observations(truth_data_, conductivity_data_, config_.T, data_steps_, p.design);
  p.prior = prior_covariance(config_.alpha, basis_->eigenvalues(), p.J);
  return p;
}

std::string provenance_line(const ExperimentConfig& config) {
  std::ostringstream os;
  os << "# config_hash=" << config_hash(config) << " seeds=";
  for (std::size_t i = 0; i < config.seeds.size(); ++i) os << (i ? ";" : "") << config.seeds[i];
  return os.str();
}

ErrorTable run_table1(const ExperimentContext& context) {
  const auto& config = context.config();
  auto out = open_output(config, "table1.csv");
  out << provenance_line(config) << '\n' << "n,mean_l2,mean_rel,std_l2,seeds\n";
  out.flush();

  ErrorTable table;
  for (const auto n : config.n_list) {
    const auto problem = context.problem(n);
    const EigenBasis basis = context.basis().truncated(problem.J);
    std::vector<L2Error> errors(config.seeds.size());
    parallel_for(config.seeds.size(), [&](std::size_t s) {
      const Observation obs = add_noise(problem.clean, config.sigma, problem.design, derive_seed(config.seeds[s], n));
      const PosteriorGaussian post = compute_posterior(problem.op, obs, problem.prior);
      errors[s] = l2_error(posterior_mean_field(post, basis), context.truth());
    });
    ErrorRow row{n, problem.design.n(), problem.J, 0.0, 0.0, 0.0, errors.size()};
    for (const auto& e : errors) {
      row.mean_l2 += e.absolute / errors.size();
      row.mean_rel += e.relative / errors.size();
    }
    if (errors.size() > 1) {
      double ss = 0.0;
      for (const auto& e : errors) ss += (e.absolute - row.mean_l2) * (e.absolute - row.mean_l2);
      row.std_l2 = std::sqrt(ss / (errors.size() - 1));
    }
    table.rows.push_back(row);
    out << row.n << ',' << num(row.mean_l2) << ',' << num(row.mean_rel) << ',' << num(row.std_l2) << ','
        << row.seeds << '\n';
    out.flush();
  }
  return table;
}

CoverageReport run_coverage(const ExperimentContext& context, int replicates) {
  if (replicates < 50) throw PreconditionError("coverage study needs at least 50 replicates");
  const auto& config = context.config();
  auto out = open_output(config, "coverage.csv");
  out << provenance_line(config) << '\n'
      << "gamma,n,n_actual,replicates,coverage,mean_radius,mean_exact_radius,true_value\n";
  out.flush();

  CoverageReport report;
  report.true_value = context.true_functional();
  for (const auto n : config.n_list) {
    const auto problem = context.problem(n);
    const Eigen::VectorXd weights = functional_weights(context.psi(), context.basis()).head(problem.J);
    struct Outcome {
      bool covered;
      double radius;
      double exact;
    };
    std::vector<Outcome> outcomes(static_cast<std::size_t>(replicates));
    const std::uint64_t base = derive_seed(config.seeds.front(), n);
    parallel_for(outcomes.size(), [&](std::size_t r) {
      const std::uint64_t seed = derive_seed(base, r);
      const Observation obs = add_noise(problem.clean, config.sigma, problem.design, seed);
      const PosteriorGaussian post = compute_posterior(problem.op, obs, problem.prior);
      const CredibleInterval ci = credible_interval(post, weights, config.gamma, config.interval_draws,
                                                    derive_seed(seed, 1));
      outcomes[r] = {ci.contains(report.true_value), ci.radius, ci.exact_radius};
    });
    CoverageRow row{config.gamma, n, problem.design.n(), replicates, 0.0, 0.0, 0.0};
    for (const auto& o : outcomes) {
      row.coverage += o.covered ? 1.0 : 0.0;
      row.mean_radius += o.radius;
      row.mean_exact_radius += o.exact;
    }
    row.coverage /= replicates;
    row.mean_radius /= replicates;
    row.mean_exact_radius /= replicates;
    report.rows.push_back(row);
    out << num(row.gamma) << ',' << row.n << ',' << row.n_actual << ',' << row.replicates << ',' << num(row.coverage)
        << ',' << num(row.mean_radius) << ',' << num(row.mean_exact_radius) << ',' << num(report.true_value) << '\n';
    out.flush();
  }
  return report;
}

std::vector<AxisSample> principal_axes(const DomainSpec& spec, double inset) {
  Point2 center{0.0, 0.0};
  std::array<Point2, 2> dirs{Point2{1.0, 0.0}, Point2{0.0, 1.0}};
  std::array<double, 2> half{1.0, 1.0};
  if (auto* e = std::get_if<RotatedEllipse>(&spec.kind())) {
    dirs = {Point2{std::cos(e->theta), std::sin(e->theta)}, Point2{-std::sin(e->theta), std::cos(e->theta)}};
    half = {e->a, e->b};
  } else if (std::holds_alternative<UnitSquare>(spec.kind())) {
    center = {0.5, 0.5};
    half = {0.5, 0.5};
  } else if (!std::holds_alternative<UnitDisk>(spec.kind())) {
    // Polygons: axis-aligned lines through the bounding-box centre.
    const auto [lo, hi] = spec.bounding_box();
    center = spec.center();
    half = {0.5 * (hi.x - lo.x), 0.5 * (hi.y - lo.y)};
  }
  std::vector<AxisSample> out;
  const std::array<const char*, 2> names{"major", "minor"};
  for (int k = 0; k < 2; ++k) {
    const double reach = half[k] - inset;
    for (int i = 0; i <= 100; ++i) {
      const double s = -reach + 2.0 * reach * i / 100.0;
      out.push_back({names[k], s, center + s * dirs[k]});
    }
  }
  return out;
}

void run_cross_section(const ExperimentContext& context, int m) {
  if (m < 1) throw PreconditionError("cross section needs at least one posterior sample");
  const auto& config = context.config();
  const std::size_t n = config.n_list.back();
  const auto problem = context.problem(n);
  const std::uint64_t seed = derive_seed(config.seeds.front(), n);
  const Observation obs = add_noise(problem.clean, config.sigma, problem.design, seed);
  const PosteriorGaussian post = compute_posterior(problem.op, obs, problem.prior);
  const Eigen::MatrixXd draws = sample_posterior(post, m, derive_seed(seed, 2));

  const auto samples = principal_axes(config.domain, 0.5 * config.mesh_h);
  std::vector<Point2> points;
  for (const auto& s : samples) points.push_back(s.point);
  const PointLocator locator(context.mesh());
  const EvaluationMatrix eval = evaluation_matrix(locator, points);
  const Eigen::MatrixXd along = eval * context.basis().nodal().leftCols(problem.J);  // points x J
  const Eigen::VectorXd fbar = along * post.mean;
  const Eigen::MatrixXd fields = along * draws;
  const AnalyticFunction truth = lookup_truth(config.truth);

  auto out = open_output(config, "cross_section.csv");
  out << provenance_line(config) << '\n' << "axis,s,f0,fbar";
  for (int k = 1; k <= m; ++k) out << ",sample_" << k;
  out << '\n';
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    out << samples[i].axis << ',' << num(samples[i].s) << ',' << num(truth(samples[i].point)) << ','
        << num(fbar[row]);
    for (int k = 0; k < m; ++k) out << ',' << num(fields(row, k));
    out << '\n';
  }
}

void run_posterior_export(const ExperimentContext& context) {
  const auto& config = context.config();
  const std::size_t n = config.n_list.back();
  const auto problem = context.problem(n);
  const Observation obs = add_noise(problem.clean, config.sigma, problem.design, derive_seed(config.seeds.front(), n));
  const PosteriorGaussian post = compute_posterior(problem.op, obs, problem.prior);
  auto out = open_output(config, "posterior.json");
  out << posterior_to_json(post, {config.alpha, problem.J, config.sigma, config.T, problem.design.n()}) << '\n';
}

void run_mesh_export(const ExperimentContext& context) {
  auto out = open_output(context.config(), "mesh.txt");
  write_mesh(out, *context.mesh());
}

void run_eigen_export(const ExperimentContext& context) {
  auto out = open_output(context.config(), "eigenvalues.csv");
  out << provenance_line(context.config()) << '\n' << "j,lambda,lambda_over_j\n";
  const auto& lambdas = context.basis().eigenvalues();
  for (Eigen::Index j = 0; j < lambdas.size(); ++j) {
    out << (j + 1) << ',' << num(lambdas[j]) << ',' << num(lambdas[j] / static_cast<double>(j + 1)) << '\n';
  }
}

double signal_to_noise(const ExperimentContext& context, std::size_t n_target) {
  const auto& config = context.config();
  const DesignGrid design = design_grid(config.domain, n_target);
  const Eigen::VectorXd clean = noiseless_observations(context.truth_on_data_mesh(), context.conductivity_on_data_mesh(),
                                                       config.T, context.data_heat_steps(), design);
  return std::sqrt(clean.squaredNorm() / static_cast<double>(clean.size())) / config.sigma;
}

}  // namespace heatbayes
