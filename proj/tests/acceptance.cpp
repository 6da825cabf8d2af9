// Acceptance suite for the simulation study. Each criterion prints a single
// PASS/FAIL line; run with --criterion N for one of them, or without for all.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "heatbayes/config.hpp"
#include "heatbayes/eigen_basis.hpp"
#include "heatbayes/experiments.hpp"
#include "heatbayes/fem.hpp"
#include "heatbayes/inference.hpp"
#include "heatbayes/random.hpp"

using namespace heatbayes;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

enum class Verdict { kPass, kFail, kWarn };

struct Outcome {
  Verdict verdict;
  std::string detail;
};

struct Settings {
  std::string config_path;
  std::string cli;
  fs::path work;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

Outcome verdict(bool ok, std::string detail) { return {ok ? Verdict::kPass : Verdict::kFail, std::move(detail)}; }

ExperimentConfig paper(const Settings& s, const std::string& subdir) {
  auto c = load_config(s.config_path);
  c.output_dir = (s.work / subdir).string();
  return c;
}

const ExperimentContext& paper_context(const Settings& s) {
  static std::unique_ptr<ExperimentContext> context;
  if (!context) context = std::make_unique<ExperimentContext>(paper(s, "paper"));
  return *context;
}

Outcome ground_truth_norm(const Settings& s) {
  const double norm = l2_norm(paper_context(s).truth());
  const double rel = std::abs(norm - 1.288) / 1.288;
  return verdict(rel <= 0.01, "||f0||_2 = " + fmt(norm, 6) + " (target 1.288, deviation " + fmt(100 * rel, 3) + "%)");
}

Outcome table1(const Settings& s) {
  const auto table = run_table1(paper_context(s));
  std::string detail = "mean relative errors";
  bool decreasing = true;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    detail += " n=" + std::to_string(table.rows[i].n) + ":" + fmt(100 * table.rows[i].mean_rel, 4) + "%";
    if (i > 0 && !(table.rows[i].mean_rel < table.rows[i - 1].mean_rel)) decreasing = false;
  }
  const double first = table.rows.front().mean_rel;
  const double last = table.rows.back().mean_rel;
  const bool band = last >= 0.10 && last <= 0.28;
  const bool drop = first >= 1.25 * last;
  detail += std::string("; (a) decreasing ") + (decreasing ? "yes" : "no") + ", (b) n=1000 in [10%,28%] " +
            (band ? "yes" : "no") + ", (c) n=100 exceeds n=1000 by >=25% " + (drop ? "yes" : "no") +
            " (ratio " + fmt(first / last, 4) + ")";
  return verdict(decreasing && band && drop, detail);
}

double orthonormality_residual(const EigenBasis& basis) {
  const auto m = assemble_mass(*basis.mesh_ptr(), BoundaryTreatment::kNone);
  const Eigen::MatrixXd gram = basis.nodal().transpose() * (m.matrix * basis.nodal());
  return (gram - Eigen::MatrixXd::Identity(basis.count(), basis.count())).cwiseAbs().maxCoeff();
}

Outcome eigen_oracles(const Settings&) {
  const auto square = std::make_shared<const Mesh>(generate_mesh(DomainSpec(UnitSquare{}), 0.03));
  const auto disk = std::make_shared<const Mesh>(generate_mesh(DomainSpec(UnitDisk{}), 0.03));
  const auto bs = dirichlet_laplacian_basis(square, 3);
  const auto bd = dirichlet_laplacian_basis(disk, 1);
  const double j0 = 2.404825557695773;
  const double e1 = std::abs(bs.eigenvalue(0) / (2 * pi * pi) - 1);
  const double e2 = std::abs(bs.eigenvalue(1) / (5 * pi * pi) - 1);
  const double e3 = std::abs(bs.eigenvalue(2) / (5 * pi * pi) - 1);
  const double ed = std::abs(bd.eigenvalue(0) / (j0 * j0) - 1);
  const double orth = std::max(orthonormality_residual(bs), orthonormality_residual(bd));
  const bool ok = e1 < 0.01 && e2 < 0.01 && e3 < 0.01 && ed < 0.01 && orth < 1e-8;
  return verdict(ok, "square l1=" + fmt(bs.eigenvalue(0), 6) + " l2=" + fmt(bs.eigenvalue(1), 6) +
                         " l3=" + fmt(bs.eigenvalue(2), 6) + ", disk l1=" + fmt(bd.eigenvalue(0), 6) +
                         ", max relative error " + fmt(100 * std::max({e1, e2, e3, ed}), 3) +
                         "%, orthonormality residual " + fmt(orth, 3));
}

Outcome heat_oracle(const Settings&) {
  const auto mesh = std::make_shared<const Mesh>(generate_mesh(DomainSpec(UnitSquare{}), 0.02));
  auto mode = [](Point2 p) { return std::sin(pi * p.x) * std::sin(pi * p.y); };
  const auto f = ScalarField::interpolate(mesh, mode);
  const auto c = ScalarField::interpolate(mesh, [](Point2) { return 1.0; });
  const double T = 0.01;
  const auto u = solve_heat(c, f, T, 100);
  const Eigen::VectorXd expected = std::exp(-2 * pi * pi * T) * f.values();
  const double rel = (u.values() - expected).cwiseAbs().maxCoeff() / expected.cwiseAbs().maxCoeff();
  return verdict(rel < 1e-3, "max nodal relative error " + fmt(rel, 3) + " (h=.02, 100 steps)");
}

// Posterior moments by brute-force quadrature on a tensor grid.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> grid_posterior(const Eigen::MatrixXd& G, const Eigen::VectorXd& y,
                                                           double sigma, const Eigen::VectorXd& prior, int points) {
  const int J = static_cast<int>(G.cols());
  long total = 1;
  for (int j = 0; j < J; ++j) total *= points;
  std::vector<double> logw(total);
  double best = -1e300;
  auto node = [&](long idx) {
    Eigen::VectorXd f(J);
    for (int j = 0; j < J; ++j, idx /= points) f[j] = 8.0 * std::sqrt(prior[j]) * (-1.0 + 2.0 * (idx % points) / (points - 1));
    return f;
  };
  for (long idx = 0; idx < total; ++idx) {
    const Eigen::VectorXd f = node(idx);
    logw[idx] = -(y - G * f).squaredNorm() / (2 * sigma * sigma) - 0.5 * (f.array().square() / prior.array()).sum();
    best = std::max(best, logw[idx]);
  }
  double z = 0;
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(J);
  Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(J, J);
  for (long idx = 0; idx < total; ++idx) {
    const Eigen::VectorXd f = node(idx);
    const double w = std::exp(logw[idx] - best);
    z += w;
    m1 += w * f;
    m2 += w * f * f.transpose();
  }
  m1 /= z;
  m2 /= z;
  return {m1, m2 - m1 * m1.transpose()};
}

Outcome conjugacy(const Settings&) {
  std::mt19937_64 gen(20240521);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int J = 1 + static_cast<int>(ud(gen) * 3);
    const int n = 1 + static_cast<int>(ud(gen) * 5);
    Eigen::MatrixXd G(n, J);
    for (int i = 0; i < G.size(); ++i) G.data()[i] = nd(gen);
    Eigen::VectorXd prior(J), y(n);
    for (int j = 0; j < J; ++j) prior[j] = 0.2 + 1.8 * ud(gen);
    for (int i = 0; i < n; ++i) y[i] = 1.5 * nd(gen);
    const double sigma = 0.5 + 1.5 * ud(gen);
    const auto post = compute_posterior(G, y, sigma, prior);
    const auto [mean, cov] = grid_posterior(G, y, sigma, prior, J == 3 ? 101 : 201);
    worst = std::max({worst, (post.mean - mean).cwiseAbs().maxCoeff(), (post.covariance - cov).cwiseAbs().maxCoeff()});
  }
  return verdict(worst < 1e-2, "20 instances, max absolute deviation from grid quadrature " + fmt(worst, 3));
}

Outcome weyl(const Settings& s) {
  const auto& basis = paper_context(s).basis();
  const double area = paper_context(s).mesh()->total_area();
  const double constant = 4 * pi / area;
  double lo = 1e300, hi = 0.0, mean = 0.0;
  int worst_j = 0;
  double worst = 0.0;
  double sj = 0, sl = 0, sjj = 0, sjl = 0;
  for (int j = 40; j <= 84; ++j) {
    const double lam = basis.eigenvalue(j - 1);
    const double ratio = lam / j;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    mean += ratio / 45.0;
    if (std::abs(ratio / constant - 1) > worst) {
      worst = std::abs(ratio / constant - 1);
      worst_j = j;
    }
    sj += j;
    sl += lam;
    sjj += double(j) * j;
    sjl += j * lam;
  }
  const double slope = (45 * sjl - sj * sl) / (45 * sjj - sj * sj);
  return verdict(worst <= 0.15, "lambda_j/j over j in [40,84] spans [" + fmt(lo) + ", " + fmt(hi) + "] vs 4pi/|O| = " +
                                    fmt(constant) + "; worst j=" + std::to_string(worst_j) + " off by " +
                                    fmt(100 * worst, 3) + "%; mean ratio " + fmt(mean) + ", regression slope " +
                                    fmt(slope));
}

Outcome coverage(const Settings& s) {
  auto c = paper(s, "coverage");
  c.n_list = {1000};
  const auto report = run_coverage(ExperimentContext(c), 200);
  const double cov = report.rows.front().coverage;
  return verdict(cov >= 0.80 && cov <= 0.98, "empirical coverage of the 90% interval at n=1000 over 200 replicates: " +
                                                  fmt(cov) + " (mean radius " + fmt(report.rows.front().mean_radius) +
                                                  ")");
}

Outcome radius_shrinkage(const Settings& s) {
  const auto& context = paper_context(s);
  const auto& config = context.config();
  const Eigen::VectorXd weights = functional_weights(context.psi(), context.basis());
  auto mean_radius = [&](std::size_t n) {
    const auto problem = context.problem(n);
    double total = 0.0;
    for (const auto seed : config.seeds) {
      const std::uint64_t data_seed = derive_seed(seed, n);
      const auto obs = add_noise(problem.clean, config.sigma, problem.design, data_seed);
      const auto post = compute_posterior(problem.op, obs, problem.prior);
      total += credible_interval(post, weights.head(problem.J), 0.1, config.interval_draws, derive_seed(data_seed, 1))
                   .radius;
    }
    return total / static_cast<double>(config.seeds.size());
  };
  const double r250 = mean_radius(250);
  const double r1000 = mean_radius(1000);
  const double ratio = r250 / r1000;
  return verdict(ratio >= 1.6 && ratio <= 2.6, "R_250 = " + fmt(r250) + ", R_1000 = " + fmt(r1000) + ", ratio " +
                                                   fmt(ratio) + " (expected about 2)");
}

Outcome snr(const Settings& s) {
  const double value = signal_to_noise(paper_context(s), 1000);
  const double rel = std::abs(value / 14.43 - 1);
  Outcome out = verdict(rel <= 0.10, "RMS(G f0)/sigma at n=1000: " + fmt(value) + " (target 14.43, deviation " +
                                         fmt(100 * rel, 3) + "%)");
  if (out.verdict == Verdict::kFail) out.verdict = Verdict::kWarn;
  return out;
}

Outcome determinism(const Settings& s) {
  if (s.cli.empty()) return {Verdict::kFail, "no --cli binary given"};
  std::string bytes[2];
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = s.work / ("determinism_" + std::to_string(run));
    fs::remove_all(dir);
    const std::string cmd = "\"" + s.cli + "\" table1 --config \"" + s.config_path + "\" --out \"" + dir.string() +
                            "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {Verdict::kFail, "table1 run " + std::to_string(run + 1) + " failed"};
    std::ifstream in(dir / "table1.csv", std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    bytes[run] = ss.str();
  }
  const bool same = !bytes[0].empty() && bytes[0] == bytes[1];
  return verdict(same, same ? "two table1 runs produced identical table1.csv (" + std::to_string(bytes[0].size()) +
                                  " bytes)"
                            : "table1.csv differs between runs");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  Settings settings;
  int only = 0;
  std::string work = (fs::temp_directory_path() / "heatbayes_acceptance").string();
  app.add_option("--criterion", only, "run a single criterion (1-10); 0 runs all");
  app.add_option("--config", settings.config_path, "simulation-study config")->required();
  app.add_option("--cli", settings.cli, "heatbayes executable used for the determinism check");
  app.add_option("--work", work, "scratch directory for artifacts");
  CLI11_PARSE(app, argc, argv);
  settings.work = work;
  fs::create_directories(settings.work);

  const std::vector<std::pair<std::string, std::function<Outcome(const Settings&)>>> criteria{
      {"ground-truth norm", ground_truth_norm},
      {"table 1 reproduction", table1},
      {"eigensolver oracles", eigen_oracles},
      {"heat-solver oracle", heat_oracle},
      {"conjugacy oracle", conjugacy},
      {"Weyl slope", weyl},
      {"credible interval coverage", coverage},
      {"radius shrinkage", radius_shrinkage},
      {"signal-to-noise ratio", snr},
      {"determinism", determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && only != static_cast<int>(i + 1)) continue;
    Outcome out;
    try {
      out = criteria[i].second(settings);
    } catch (const std::exception& e) {
      out = {Verdict::kFail, std::string("exception: ") + e.what()};
    }
    const char* tag = out.verdict == Verdict::kPass ? "PASS" : out.verdict == Verdict::kWarn ? "WARN" : "FAIL";
    std::cout << "[" << tag << "] criterion " << (i + 1) << " (" << criteria[i].first << "): " << out.detail
              << std::endl;
    failures += out.verdict == Verdict::kFail ? 1 : 0;
  }
  return failures == 0 ? 0 : 1;
}
