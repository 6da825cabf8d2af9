#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "heatbayes/mesh.hpp"

namespace heatbayes {

// Piecewise-linear function on a mesh, one coefficient per vertex.
class ScalarField {
 public:
  ScalarField(MeshPtr mesh, Eigen::VectorXd nodal_values);
  static ScalarField zeros(MeshPtr mesh);
  // Nodal interpolant of an analytic function.
  static ScalarField interpolate(MeshPtr mesh, const std::function<double(Point2)>& fn);

  const Mesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  const Eigen::VectorXd& values() const { return values_; }
  bool vanishes_on_boundary() const;

 private:
  MeshPtr mesh_;
  Eigen::VectorXd values_;
};

void require_same_mesh(const ScalarField& a, const ScalarField& b);

enum class BoundaryTreatment { kDirichlet, kNone };

// Maps mesh vertices to degrees of freedom. Under kDirichlet the boundary
// vertices are eliminated; under kNone every vertex is a degree of freedom.
struct DofMap {
  std::vector<int> dof_of_vertex;  // -1 for eliminated vertices
  std::vector<int> vertex_of_dof;

  static DofMap build(const Mesh& mesh, BoundaryTreatment treatment);
  std::size_t size() const { return vertex_of_dof.size(); }
  Eigen::VectorXd restrict(const Eigen::VectorXd& nodal) const;
  Eigen::VectorXd extend(const Eigen::VectorXd& reduced, std::size_t vertex_count) const;
};

// Symmetric sparse matrix in compressed sparse row layout over a DofMap.
struct SparseSymMatrix {
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
  DofMap dofs;

  Eigen::Index dimension() const { return matrix.rows(); }
  double coeff(Eigen::Index i, Eigen::Index j) const { return matrix.coeff(i, j); }
  // Largest |A_ij - A_ji| relative to the largest |A_ij|.
  double asymmetry() const;
};

using ElementMatrix = Eigen::Matrix3d;

// Element matrices for a single triangle with a constant coefficient.
ElementMatrix element_stiffness(Point2 a, Point2 b, Point2 c, double coefficient);
ElementMatrix element_mass(Point2 a, Point2 b, Point2 c);

// K_ij = integral of c grad(phi_i) . grad(phi_j). The coefficient is
// piecewise linear, so the per-element integral uses the mean nodal value.
// Throws NonPositiveCoefficient if any nodal value of c is <= 0.
SparseSymMatrix assemble_stiffness(const Mesh& mesh, const ScalarField& c,
                                   BoundaryTreatment treatment = BoundaryTreatment::kDirichlet);
// Consistent P1 mass matrix.
SparseSymMatrix assemble_mass(const Mesh& mesh,
                              BoundaryTreatment treatment = BoundaryTreatment::kDirichlet);

// L2 inner product through the unconstrained consistent mass matrix.
double l2_inner(const ScalarField& a, const ScalarField& b);
double l2_norm(const ScalarField& a);
// M a with the unconstrained mass matrix, computed element by element.
Eigen::VectorXd mass_action(const ScalarField& a);

// Uniform bucket grid over triangle bounding boxes for point location.
class PointLocator {
 public:
  explicit PointLocator(MeshPtr mesh);
  // Triangle containing p and its barycentric coordinates; throws PointOutsideMesh.
  std::pair<int, Eigen::Vector3d> locate(Point2 p) const;
  const Mesh& mesh() const { return *mesh_; }

 private:
  MeshPtr mesh_;
  Point2 lo_;
  double cell_ = 1.0;
  int nx_ = 1;
  int ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

// Row i interpolates a nodal vector at points[i] (barycentric weights).
using EvaluationMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
EvaluationMatrix evaluation_matrix(const PointLocator& locator, std::span<const Point2> points);

Eigen::VectorXd evaluate(const ScalarField& field, std::span<const Point2> points);

// Default Crank-Nicolson step count: max(100, ceil(T / h^2)) capped at 1e4.
int default_heat_steps(double T, double h);

// Crank-Nicolson propagator for M u' = -K u with homogeneous Dirichlet data.
// The factorisations are built once; apply() may be called concurrently.
class HeatPropagator {
 public:
  HeatPropagator(const ScalarField& conductivity, double T, int steps);

  // u(T) for initial state f. The initial state is the L2 projection of f
  // onto the finite element space with zero boundary values.
  ScalarField apply(const ScalarField& f) const;

  const Mesh& mesh() const { return *mesh_; }
  double final_time() const { return T_; }
  int steps() const { return steps_; }

 private:
  MeshPtr mesh_;
  double T_;
  int steps_;
  DofMap dofs_;
  Eigen::SparseMatrix<double> mass_full_rows_;  // interior rows, all vertex columns
  Eigen::SparseMatrix<double> explicit_part_;   // M - dt/2 K on interior dofs
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> implicit_;  // M + dt/2 K
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> mass_;
};

// Heat solution u(T, .) of du/dt = div(c grad u), u = 0 on the boundary,
// u(0) = f. Throws LinearSolveFailure when a step system is singular.
ScalarField solve_heat(const ScalarField& conductivity, const ScalarField& f, double T, int steps);

}  // namespace heatbayes
