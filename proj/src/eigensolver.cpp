#include "heatbayes/eigen_basis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>
#include <random>

#include "heatbayes/errors.hpp"

namespace heatbayes {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

struct RitzPair {
  double value;
  Eigen::VectorXd vector;
};

// M-orthogonalises w against the columns of basis (with mass_basis = M * basis).
void orthogonalize(Eigen::VectorXd& w, const Eigen::MatrixXd& basis, const Eigen::MatrixXd& mass_basis,
                   Eigen::Index cols) {
  if (cols == 0) return;
  for (int sweep = 0; sweep < 2; ++sweep) {
    const Eigen::VectorXd c = mass_basis.leftCols(cols).transpose() * w;
    w.noalias() -= basis.leftCols(cols) * c;
  }
}

class ShiftInvertLanczos {
 public:
  ShiftInvertLanczos(const SpMat& stiffness, const SpMat& mass, double tolerance)
      : stiffness_(stiffness), mass_(mass), tolerance_(tolerance) {
    solver_.compute(stiffness_);
    if (solver_.info() != Eigen::Success) throw EigenFailure("stiffness matrix is not positive definite");
  }

  // Runs `steps` Lanczos steps in the M-orthogonal complement of `locked`
  // and returns the leading run of converged Ritz pairs, ascending.
  std::vector<RitzPair> pass(int steps, std::uint64_t seed, const Eigen::MatrixXd& locked,
                             const Eigen::MatrixXd& mass_locked, Eigen::Index locked_count) const {
    const Eigen::Index n = stiffness_.rows();
    Eigen::MatrixXd v(n, steps + 1);
    Eigen::MatrixXd mv(n, steps + 1);
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(steps);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(steps);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w[i] = 1.0 + 0.5 * unif(rng);
    orthogonalize(w, locked, mass_locked, locked_count);
    Eigen::VectorXd mw = mass_ * w;
    w /= std::sqrt(w.dot(mw));
    v.col(0) = w;
    mv.col(0) = mass_ * w;

    int m = steps;
    for (int k = 0; k < steps; ++k) {
      w = solver_.solve(mv.col(k));
      alpha[k] = mv.col(k).dot(w);
      w -= alpha[k] * v.col(k);
      if (k > 0) w -= beta[k - 1] * v.col(k - 1);
      orthogonalize(w, locked, mass_locked, locked_count);
      orthogonalize(w, v, mv, k + 1);
      mw = mass_ * w;
      const double b = std::sqrt(std::max(0.0, w.dot(mw)));
      if (k + 1 == steps || b <= 1e-14 * std::abs(alpha[k])) {
        m = k + 1;
        beta[k] = b;
        break;
      }
      beta[k] = b;
      v.col(k + 1) = w / b;
      mv.col(k + 1) = mw / b;
    }

    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k < m; ++k) {
      tri(k, k) = alpha[k];
      if (k + 1 < m) tri(k, k + 1) = tri(k + 1, k) = beta[k];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(tri);
    if (eig.info() != Eigen::Success) throw EigenFailure("tridiagonal eigensolve failed");

    std::vector<RitzPair> out;
    // Largest theta of K^{-1} M is the smallest lambda; eigenvalues come ascending.
    for (int i = m - 1; i >= 0; --i) {
      const double theta = eig.eigenvalues()[i];
      if (!(theta > 0.0)) break;
      const double lambda = 1.0 / theta;
      Eigen::VectorXd x = v.leftCols(m) * eig.eigenvectors().col(i);
      const Eigen::VectorXd mx = mass_ * x;
      x /= std::sqrt(x.dot(mx));
      const Eigen::VectorXd residual = stiffness_ * x - lambda * (mass_ * x);
      const double rel = residual.norm() / (lambda * (mass_ * x).norm());
      if (rel >= tolerance_) break;
      out.push_back({lambda, std::move(x)});
    }
    return out;
  }

 private:
  const SpMat& stiffness_;
  const SpMat& mass_;
  double tolerance_;
  Eigen::SimplicialLLT<SpMat> solver_;
};

void fix_sign(Eigen::Ref<Eigen::VectorXd> x) {
  const double threshold = 1e-6 * x.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > threshold) {
      if (x[i] < 0) x = -x;
      return;
    }
  }
}

}  // namespace

EigenBasis::EigenBasis(MeshPtr mesh, Eigen::VectorXd eigenvalues, Eigen::MatrixXd nodal)
    : mesh_(std::move(mesh)), eigenvalues_(std::move(eigenvalues)), nodal_(std::move(nodal)) {
  if (nodal_.cols() != eigenvalues_.size() || static_cast<std::size_t>(nodal_.rows()) != mesh_->vertex_count()) {
    throw PreconditionError("eigenbasis dimensions are inconsistent");
  }
}

ScalarField EigenBasis::eigenfunction(int j) const { return ScalarField(mesh_, nodal_.col(j)); }

EigenBasis EigenBasis::truncated(int count) const {
  if (count < 1 || count > this->count()) throw TruncationTooLarge("truncation exceeds basis size");
  return EigenBasis(mesh_, eigenvalues_.head(count), nodal_.leftCols(count));
}

EigenBasis solve_eigenpairs(const SparseSymMatrix& stiffness, const SparseSymMatrix& mass, int J, MeshPtr mesh,
                            const EigenSolverOptions& options) {
  const Eigen::Index n = stiffness.dimension();
  if (mass.dimension() != n) throw PreconditionError("stiffness and mass dimensions differ");
  if (J < 1 || J > n) throw PreconditionError("requested eigenpair count must lie in [1, dimension]");
  if (stiffness.dofs.vertex_of_dof != mass.dofs.vertex_of_dof ||
      stiffness.dofs.dof_of_vertex.size() != mesh->vertex_count()) {
    throw MeshMismatch("matrices do not belong to the given mesh");
  }

  const SpMat k_col = stiffness.matrix;
  const SpMat m_col = mass.matrix;
  const ShiftInvertLanczos lanczos(k_col, m_col, options.tolerance);

  const Eigen::Index capacity = std::min<Eigen::Index>(n, 3 * J + 64);
  Eigen::MatrixXd locked(n, capacity);
  Eigen::MatrixXd mass_locked(n, capacity);
  std::vector<double> values;
  Eigen::Index count = 0;
  double growth = 1.0;

  for (int p = 0; p < options.max_passes; ++p) {
    const Eigen::Index free = n - count;
    if (free == 0) break;
    const Eigen::Index need = std::max<Eigen::Index>(J - count, 1);
    const auto steps =
        static_cast<int>(std::min<Eigen::Index>(free, static_cast<Eigen::Index>(growth * (2 * need + 30))));
    auto found = lanczos.pass(steps, 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(p), locked, mass_locked, count);
    if (found.empty()) {
      if (steps == free) throw EigenFailure("Lanczos iteration did not converge");
      growth *= 2.0;
      continue;
    }
    if (count >= J) {
      std::vector<double> sorted(values);
      std::sort(sorted.begin(), sorted.end());
      if (found.front().value >= sorted[J - 1]) break;
    }
    for (auto& pair : found) {
      if (count == capacity) break;
      locked.col(count) = pair.vector;
      mass_locked.col(count) = m_col * pair.vector;
      values.push_back(pair.value);
      ++count;
    }
    if (count == n) break;
  }
  if (count < J) throw EigenFailure("Lanczos iteration budget exhausted before J pairs converged");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });

  Eigen::VectorXd lambdas(J);
  Eigen::MatrixXd reduced(n, J);
  for (int j = 0; j < J; ++j) {
    lambdas[j] = values[order[j]];
    reduced.col(j) = locked.col(order[j]);
  }
  // Clean up M-orthonormality across passes.
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (int j = 0; j < J; ++j) {
      Eigen::VectorXd x = reduced.col(j);
      for (int i = 0; i < j; ++i) x -= (reduced.col(i).dot(m_col * x)) * reduced.col(i);
      x /= std::sqrt(x.dot(m_col * x));
      reduced.col(j) = x;
    }
  }
  Eigen::MatrixXd nodal = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(mesh->vertex_count()), J);
  for (int j = 0; j < J; ++j) {
    fix_sign(reduced.col(j));
    nodal.col(j) = stiffness.dofs.extend(reduced.col(j), mesh->vertex_count());
  }
  return EigenBasis(std::move(mesh), std::move(lambdas), std::move(nodal));
}

EigenBasis dirichlet_laplacian_basis(MeshPtr mesh, int J, const EigenSolverOptions& options) {
  const ScalarField one = ScalarField::interpolate(mesh, [](Point2) { return 1.0; });
  const auto k = assemble_stiffness(*mesh, one);
  const auto m = assemble_mass(*mesh);
  return solve_eigenpairs(k, m, J, std::move(mesh), options);
}

Eigen::VectorXd project_to_basis(const ScalarField& field, const EigenBasis& basis) {
  if (field.mesh_ptr() != basis.mesh_ptr()) throw MeshMismatch("field and basis live on different meshes");
  return basis.nodal().transpose() * mass_action(field);
}

ScalarField reconstruct_from_basis(const Eigen::VectorXd& coeffs, const EigenBasis& basis) {
  if (coeffs.size() > basis.count()) throw TruncationTooLarge("more coefficients than basis functions");
  return ScalarField(basis.mesh_ptr(), basis.nodal().leftCols(coeffs.size()) * coeffs);
}

}  // namespace heatbayes
