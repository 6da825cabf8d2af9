#include "heatbayes/prior.hpp"

#include <cmath>

#include "heatbayes/errors.hpp"
#include "heatbayes/random.hpp"

namespace heatbayes {

PriorSpec::PriorSpec(double alpha_, int J_) : alpha(alpha_), J(J_) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw PreconditionError("prior regularity must be >= 0");
  if (J < 1) throw PreconditionError("prior truncation level must be >= 1");
}

PriorCovariance prior_covariance(double alpha, const Eigen::VectorXd& eigenvalues, int J) {
  if (J > eigenvalues.size()) throw TruncationTooLarge("truncation level exceeds the number of eigenpairs");
  if ((eigenvalues.head(J).array() <= 0.0).any()) throw PreconditionError("eigenvalues must be positive");
  return {eigenvalues.head(J).array().pow(-alpha).matrix()};
}

PriorCovariance prior_covariance(const PriorSpec& spec, const EigenBasis& basis) {
  return prior_covariance(spec.alpha, basis.eigenvalues(), spec.J);
}

int default_truncation(std::size_t n, double alpha, int dimension) {
  if (n < 1) throw PreconditionError("sample size must be >= 1");
  const double exponent = dimension / (2.0 * alpha + dimension);
  return std::max(1, static_cast<int>(std::lround(std::pow(static_cast<double>(n), exponent))));
}

PriorDraw sample_prior(const PriorSpec& spec, const EigenBasis& basis, std::uint64_t seed) {
  const PriorCovariance cov = prior_covariance(spec, basis);
  NormalGenerator normal(seed);
  Eigen::VectorXd coeffs = cov.diag.array().sqrt().matrix().cwiseProduct(normal.vector(spec.J));
  ScalarField field = reconstruct_from_basis(coeffs, basis);
  return {std::move(coeffs), std::move(field)};
}

}  // namespace heatbayes
