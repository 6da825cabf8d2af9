#include "heatbayes/inference.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <json.hpp>
#include <vector>

#include "heatbayes/errors.hpp"
#include "heatbayes/parallel.hpp"
#include "heatbayes/random.hpp"

namespace heatbayes {

ForwardOperator build_forward_matrix(const EigenBasis& basis, const ScalarField& conductivity, double T,
                                     const DesignGrid& design, int steps) {
  if (conductivity.mesh_ptr() != basis.mesh_ptr()) throw MeshMismatch("conductivity and basis meshes differ");
  const HeatPropagator propagator(conductivity, T, steps);
  const PointLocator locator(basis.mesh_ptr());
  const EvaluationMatrix at_design = evaluation_matrix(locator, design.points);

  ForwardOperator op{Eigen::MatrixXd(static_cast<Eigen::Index>(design.n()), basis.count()), design, T, steps};
  parallel_for(static_cast<std::size_t>(basis.count()), [&](std::size_t j) {
    const ScalarField u = propagator.apply(basis.eigenfunction(static_cast<int>(j)));
    op.matrix.col(static_cast<Eigen::Index>(j)) = at_design * u.values();
  });
  return op;
}

Eigen::VectorXd noiseless_observations(const ScalarField& f_true, const ScalarField& conductivity, double T,
                                       int steps, const DesignGrid& design) {
  require_same_mesh(f_true, conductivity);
  const ScalarField u = HeatPropagator(conductivity, T, steps).apply(f_true);
  return evaluate(u, design.points);
}

Observation add_noise(const Eigen::VectorXd& clean, double sigma, const DesignGrid& design, std::uint64_t seed) {
  if (!(sigma > 0.0)) throw PreconditionError("noise level must be positive");
  if (static_cast<std::size_t>(clean.size()) != design.n()) throw PreconditionError("data length differs from design");
  NormalGenerator normal(seed);
  return {clean + sigma * normal.vector(clean.size()), sigma, design, seed};
}

Observation synthesize_data(const ForwardOperator& op, const ScalarField& f_true, const ScalarField& conductivity,
                            double sigma, std::uint64_t seed) {
  if (!(sigma > 0.0)) throw PreconditionError("noise level must be positive");
  return add_noise(noiseless_observations(f_true, conductivity, op.T, op.steps, op.design), sigma, op.design, seed);
}

PosteriorGaussian compute_posterior(const Eigen::MatrixXd& G, const Eigen::VectorXd& y, double sigma,
                                    const Eigen::VectorXd& prior_diag) {
  if (!(sigma > 0.0)) throw PreconditionError("noise level must be positive");
  if (G.rows() != y.size() || G.cols() != prior_diag.size()) {
    throw PreconditionError("forward matrix, data and prior dimensions disagree");
  }
  if ((prior_diag.array() <= 0.0).any()) throw PreconditionError("prior variances must be positive");
  const double inv_var = 1.0 / (sigma * sigma);
  Eigen::MatrixXd precision = inv_var * (G.transpose() * G);
  precision.diagonal() += prior_diag.cwiseInverse();

  const Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) throw SingularSystem("posterior precision is not positive definite");
  PosteriorGaussian post;
  post.mean = llt.solve(inv_var * (G.transpose() * y));
  post.covariance = llt.solve(Eigen::MatrixXd::Identity(G.cols(), G.cols()));
  post.covariance = 0.5 * (post.covariance + post.covariance.transpose()).eval();
  const Eigen::LLT<Eigen::MatrixXd> cov_llt(post.covariance);
  if (cov_llt.info() != Eigen::Success || !post.mean.allFinite()) {
    throw SingularSystem("posterior covariance factorisation failed");
  }
  post.cholesky = cov_llt.matrixL();
  return post;
}

PosteriorGaussian compute_posterior(const ForwardOperator& op, const Observation& obs, const PriorCovariance& prior) {
  return compute_posterior(op.matrix, obs.y, obs.sigma, prior.diag);
}

ScalarField posterior_mean_field(const PosteriorGaussian& post, const EigenBasis& basis) {
  return reconstruct_from_basis(post.mean, basis);
}

Eigen::MatrixXd sample_posterior(const PosteriorGaussian& post, int m, std::uint64_t seed) {
  if (m < 1) throw PreconditionError("posterior sample count must be >= 1");
  Eigen::MatrixXd draws(post.J(), m);
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t k) {
    NormalGenerator normal(derive_seed(seed, k));
    draws.col(static_cast<Eigen::Index>(k)) = post.mean + post.cholesky * normal.vector(post.J());
  });
  return draws;
}

Eigen::VectorXd functional_weights(const ScalarField& psi, const EigenBasis& basis) {
  return project_to_basis(psi, basis);
}

double functional_value(const Eigen::VectorXd& coeffs, const ScalarField& psi, const EigenBasis& basis) {
  const Eigen::VectorXd w = functional_weights(psi, basis);
  if (coeffs.size() > w.size()) throw TruncationTooLarge("more coefficients than basis functions");
  return coeffs.dot(w.head(coeffs.size()));
}

CredibleInterval credible_interval(const PosteriorGaussian& post, const Eigen::VectorXd& weights, double gamma,
                                   int m, std::uint64_t seed) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw PreconditionError("credible level gamma must lie in (0, 1)");
  if (m < 100) throw PreconditionError("credible interval needs at least 100 posterior draws");
  if (weights.size() != post.J()) throw PreconditionError("functional weights differ in length from posterior");
  CredibleInterval ci;
  ci.level = 1.0 - gamma;
  ci.center = weights.dot(post.mean);
  const double variance = weights.dot(post.covariance * weights);
  ci.exact_radius = normal_quantile(1.0 - gamma / 2.0) * std::sqrt(std::max(0.0, variance));

  // <w, mean + L z> - center = <L^T w, z>; same draw streams as sample_posterior.
  const Eigen::VectorXd projected = post.cholesky.transpose() * weights;
  std::vector<double> deviations(static_cast<std::size_t>(m));
  parallel_for(deviations.size(), [&](std::size_t k) {
    NormalGenerator normal(derive_seed(seed, k));
    deviations[k] = std::abs(projected.dot(normal.vector(post.J())));
  });
  ci.radius = quantile_type7(deviations, 1.0 - gamma);
  return ci;
}

CredibleInterval credible_interval(const PosteriorGaussian& post, const ScalarField& psi, const EigenBasis& basis,
                                   double gamma, int m, std::uint64_t seed) {
  Eigen::VectorXd w = functional_weights(psi, basis);
  if (w.size() < post.J()) throw TruncationTooLarge("posterior dimension exceeds basis size");
  return credible_interval(post, Eigen::VectorXd(w.head(post.J())), gamma, m, seed);
}

L2Error l2_error(const ScalarField& estimate, const ScalarField& f_true) {
  require_same_mesh(estimate, f_true);
  const ScalarField diff(estimate.mesh_ptr(), estimate.values() - f_true.values());
  L2Error err;
  err.absolute = l2_norm(diff);
  const double reference = l2_norm(f_true);
  err.relative = reference > 0.0 ? err.absolute / reference : std::numeric_limits<double>::infinity();
  return err;
}

double quantile_type7(std::span<const double> values, double p) {
  if (values.empty()) throw PreconditionError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("quantile level must lie in [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }

std::string posterior_to_json(const PosteriorGaussian& post, const PosteriorRecord& meta) {
  auto rows = [](const Eigen::MatrixXd& m) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      std::vector<double> row(m.cols());
      for (Eigen::Index j = 0; j < m.cols(); ++j) row[j] = m(i, j);
      out.push_back(row);
    }
    return out;
  };
  nlohmann::json doc;
  doc["alpha"] = meta.alpha;
  doc["J"] = meta.J;
  doc["sigma"] = meta.sigma;
  doc["T"] = meta.T;
  doc["n"] = meta.n;
  doc["mean"] = std::vector<double>(post.mean.data(), post.mean.data() + post.mean.size());
  doc["covariance"] = rows(post.covariance);
  doc["cholesky"] = rows(post.cholesky);
  return doc.dump(1);
}

}  // namespace heatbayes
