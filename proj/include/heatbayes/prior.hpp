#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "heatbayes/eigen_basis.hpp"

namespace heatbayes {

// Truncated Gaussian series prior: sum_j lambda_j^{-alpha/2} F_j e_j with
// F_j iid N(0, 1), j <= J.
struct PriorSpec {
  double alpha = 0.5;
  int J = 1;

  PriorSpec(double alpha, int J);
  // The posterior asymptotics assume alpha > d/2. Smaller values are allowed
  // and merely flagged.
  bool theory_condition_violated(int dimension = 2) const { return alpha <= dimension / 2.0; }
};

struct PriorCovariance {
  Eigen::VectorXd diag;  // lambda_j^{-alpha}, non-increasing
};

PriorCovariance prior_covariance(double alpha, const Eigen::VectorXd& eigenvalues, int J);
// Throws TruncationTooLarge when spec.J exceeds the basis size.
PriorCovariance prior_covariance(const PriorSpec& spec, const EigenBasis& basis);

// round(n^{d / (2 alpha + d)}), at least 1.
int default_truncation(std::size_t n, double alpha, int dimension = 2);

struct PriorDraw {
  Eigen::VectorXd coeffs;
  ScalarField field;
};

PriorDraw sample_prior(const PriorSpec& spec, const EigenBasis& basis, std::uint64_t seed);

}  // namespace heatbayes
