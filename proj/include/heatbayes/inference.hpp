#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "heatbayes/eigen_basis.hpp"
#include "heatbayes/mesh.hpp"
#include "heatbayes/prior.hpp"

namespace heatbayes {

// Discretised forward map: matrix(i, j) = (G e_j)(x_i), n rows by J columns.
struct ForwardOperator {
  Eigen::MatrixXd matrix;
  DesignGrid design;
  double T = 0.0;
  int steps = 0;

  Eigen::Index n() const { return matrix.rows(); }
  Eigen::Index J() const { return matrix.cols(); }
};

// Column j evaluates the heat solution started from e_j at the design points.
ForwardOperator build_forward_matrix(const EigenBasis& basis, const ScalarField& conductivity, double T,
                                     const DesignGrid& design, int steps);

struct Observation {
  Eigen::VectorXd y;
  double sigma = 0.0;
  DesignGrid design;
  std::optional<std::uint64_t> seed;  // empty for externally supplied data
};

// Gf(x_i): a full heat solve of f (no basis truncation), evaluated at the design.
Eigen::VectorXd noiseless_observations(const ScalarField& f_true, const ScalarField& conductivity, double T,
                                       int steps, const DesignGrid& design);

Observation add_noise(const Eigen::VectorXd& clean, double sigma, const DesignGrid& design, std::uint64_t seed);

// Y_i = Gf(x_i) + sigma W_i. f_true and conductivity may live on a finer mesh
// than the operator's basis; the heat solve uses op.T and op.steps.
Observation synthesize_data(const ForwardOperator& op, const ScalarField& f_true, const ScalarField& conductivity,
                            double sigma, std::uint64_t seed);

struct PosteriorGaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd cholesky;  // lower factor of covariance

  Eigen::Index J() const { return mean.size(); }
};

// Covariance C = (G^T G / sigma^2 + Lambda^{-1})^{-1} and mean
// C G^T y / sigma^2, through a Cholesky factorisation of the precision.
// Throws SingularSystem on numerical breakdown.
PosteriorGaussian compute_posterior(const Eigen::MatrixXd& G, const Eigen::VectorXd& y, double sigma,
                                    const Eigen::VectorXd& prior_diag);
PosteriorGaussian compute_posterior(const ForwardOperator& op, const Observation& obs, const PriorCovariance& prior);

ScalarField posterior_mean_field(const PosteriorGaussian& post, const EigenBasis& basis);

// m draws (one per column) of mean + L z. Draw k uses its own seed stream so
// the result does not depend on the worker count.
Eigen::MatrixXd sample_posterior(const PosteriorGaussian& post, int m, std::uint64_t seed);

// Coefficients <e_j, psi> for the linear functional f -> <f, psi>.
Eigen::VectorXd functional_weights(const ScalarField& psi, const EigenBasis& basis);
double functional_value(const Eigen::VectorXd& coeffs, const ScalarField& psi, const EigenBasis& basis);

struct CredibleInterval {
  double center = 0.0;
  double radius = 0.0;        // type-7 quantile of |<f,psi> - center| over posterior draws
  double exact_radius = 0.0;  // z_{1-gamma/2} * posterior sd of <f,psi>
  double level = 0.0;         // 1 - gamma

  bool contains(double z) const { return std::abs(z - center) <= radius; }
};

CredibleInterval credible_interval(const PosteriorGaussian& post, const Eigen::VectorXd& weights, double gamma,
                                   int m, std::uint64_t seed);
CredibleInterval credible_interval(const PosteriorGaussian& post, const ScalarField& psi, const EigenBasis& basis,
                                   double gamma, int m, std::uint64_t seed);

struct L2Error {
  double absolute = 0.0;
  double relative = 0.0;  // against ||f_true||
};

L2Error l2_error(const ScalarField& estimate, const ScalarField& f_true);

// Type-7 (linear interpolation) empirical quantile; sorts a copy.
double quantile_type7(std::span<const double> values, double p);
double normal_quantile(double p);

struct PosteriorRecord {
  double alpha = 0.0;
  int J = 0;
  double sigma = 0.0;
  double T = 0.0;
  std::size_t n = 0;
};

// JSON record {alpha, J, sigma, T, n, mean[], covariance[][], cholesky[][]}.
std::string posterior_to_json(const PosteriorGaussian& post, const PosteriorRecord& meta);

}  // namespace heatbayes
