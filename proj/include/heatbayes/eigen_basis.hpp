#pragma once

#include <Eigen/Core>
#include <vector>

#include "heatbayes/fem.hpp"

namespace heatbayes {

// First J Dirichlet-Laplacian eigenpairs on a mesh: eigenvalues ascending,
// eigenfunctions L2-orthonormal and zero on the boundary.
class EigenBasis {
 public:
  EigenBasis(MeshPtr mesh, Eigen::VectorXd eigenvalues, Eigen::MatrixXd nodal);

  int count() const { return static_cast<int>(eigenvalues_.size()); }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  double eigenvalue(int j) const { return eigenvalues_[j]; }
  // Column j holds the nodal values of eigenfunction j (0-based).
  const Eigen::MatrixXd& nodal() const { return nodal_; }
  ScalarField eigenfunction(int j) const;
  const MeshPtr& mesh_ptr() const { return mesh_; }
  // Leading `count` pairs as a new basis.
  EigenBasis truncated(int count) const;

 private:
  MeshPtr mesh_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd nodal_;
};

struct EigenSolverOptions {
  double tolerance = 1e-8;  // on ||K v - lambda M v|| / (lambda ||M v||)
  int max_passes = 64;
};

// Smallest J generalized eigenpairs K v = lambda M v by shift-invert Lanczos
// (shift 0) with full reorthogonalisation and locking of converged pairs.
// Eigenvectors are M-orthonormal; each is signed so that its first entry
// above 1e-6 of its max-norm is positive. Throws EigenFailure when the
// iteration budget is exhausted.
EigenBasis solve_eigenpairs(const SparseSymMatrix& stiffness, const SparseSymMatrix& mass, int J,
                            MeshPtr mesh, const EigenSolverOptions& options = {});

// Assembles the c = 1 stiffness and the mass matrix and solves for J pairs.
EigenBasis dirichlet_laplacian_basis(MeshPtr mesh, int J, const EigenSolverOptions& options = {});

// Coefficients <field, e_j> for j < J.
Eigen::VectorXd project_to_basis(const ScalarField& field, const EigenBasis& basis);
// sum_j coeffs_j e_j; coeffs may be shorter than the basis.
ScalarField reconstruct_from_basis(const Eigen::VectorXd& coeffs, const EigenBasis& basis);

}  // namespace heatbayes
