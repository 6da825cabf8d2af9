#include "heatbayes/fem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "heatbayes/errors.hpp"

namespace heatbayes {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseSymMatrix from_triplets(const Triplets& triplets, DofMap dofs) {
  const auto n = static_cast<Eigen::Index>(dofs.size());
  SparseSymMatrix out{Eigen::SparseMatrix<double, Eigen::RowMajor>(n, n), std::move(dofs)};
  out.matrix.setFromTriplets(triplets.begin(), triplets.end());
  out.matrix.makeCompressed();
  return out;
}

void scatter(Triplets& triplets, const DofMap& dofs, const std::array<int, 3>& tri, const ElementMatrix& ke) {
  for (int i = 0; i < 3; ++i) {
    const int r = dofs.dof_of_vertex[tri[i]];
    if (r < 0) continue;
    for (int j = 0; j < 3; ++j) {
      const int c = dofs.dof_of_vertex[tri[j]];
      if (c >= 0) triplets.emplace_back(r, c, ke(i, j));
    }
  }
}

void require_positive(const ScalarField& c) {
  if ((c.values().array() <= 0.0).any() || !c.values().allFinite()) {
    throw NonPositiveCoefficient("conductivity must be strictly positive at every vertex");
  }
}

}  // namespace

ScalarField::ScalarField(MeshPtr mesh, Eigen::VectorXd nodal_values)
    : mesh_(std::move(mesh)), values_(std::move(nodal_values)) {
  if (!mesh_) throw PreconditionError("scalar field needs a mesh");
  if (static_cast<std::size_t>(values_.size()) != mesh_->vertex_count()) {
    throw PreconditionError("nodal value count differs from mesh vertex count");
  }
}

ScalarField ScalarField::zeros(MeshPtr mesh) {
  const auto n = static_cast<Eigen::Index>(mesh->vertex_count());
  return ScalarField(std::move(mesh), Eigen::VectorXd::Zero(n));
}

ScalarField ScalarField::interpolate(MeshPtr mesh, const std::function<double(Point2)>& fn) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(mesh->vertex_count()));
  for (std::size_t i = 0; i < mesh->vertex_count(); ++i) v[static_cast<Eigen::Index>(i)] = fn(mesh->vertices[i]);
  return ScalarField(std::move(mesh), std::move(v));
}

bool ScalarField::vanishes_on_boundary() const {
  for (std::size_t i = 0; i < mesh_->vertex_count(); ++i) {
    if (mesh_->boundary[i] && values_[static_cast<Eigen::Index>(i)] != 0.0) return false;
  }
  return true;
}

void require_same_mesh(const ScalarField& a, const ScalarField& b) {
  if (a.mesh_ptr() != b.mesh_ptr()) throw MeshMismatch("fields live on different meshes");
}

DofMap DofMap::build(const Mesh& mesh, BoundaryTreatment treatment) {
  DofMap map;
  map.dof_of_vertex.assign(mesh.vertex_count(), -1);
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    if (treatment == BoundaryTreatment::kDirichlet && mesh.boundary[v]) continue;
    map.dof_of_vertex[v] = static_cast<int>(map.vertex_of_dof.size());
    map.vertex_of_dof.push_back(static_cast<int>(v));
  }
  return map;
}

Eigen::VectorXd DofMap::restrict(const Eigen::VectorXd& nodal) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(size()));
  for (std::size_t d = 0; d < size(); ++d) out[static_cast<Eigen::Index>(d)] = nodal[vertex_of_dof[d]];
  return out;
}

Eigen::VectorXd DofMap::extend(const Eigen::VectorXd& reduced, std::size_t vertex_count) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vertex_count));
  for (std::size_t d = 0; d < size(); ++d) out[vertex_of_dof[d]] = reduced[static_cast<Eigen::Index>(d)];
  return out;
}

double SparseSymMatrix::asymmetry() const {
  const Eigen::SparseMatrix<double, Eigen::RowMajor> t = matrix.transpose();
  const double scale = matrix.coeffs().cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return Eigen::SparseMatrix<double, Eigen::RowMajor>(matrix - t).coeffs().cwiseAbs().maxCoeff() / scale;
}

ElementMatrix element_stiffness(Point2 a, Point2 b, Point2 c, double coefficient) {
  const std::array<Point2, 3> p{a, b, c};
  const double area = 0.5 * orient2d(a, b, c);
  Eigen::Vector3d gx, gy;
  for (int i = 0; i < 3; ++i) {
    const Point2 pj = p[(i + 1) % 3];
    const Point2 pk = p[(i + 2) % 3];
    gx[i] = pj.y - pk.y;
    gy[i] = pk.x - pj.x;
  }
  return coefficient / (4.0 * area) * (gx * gx.transpose() + gy * gy.transpose());
}

ElementMatrix element_mass(Point2 a, Point2 b, Point2 c) {
  const double area = 0.5 * orient2d(a, b, c);
  ElementMatrix m = ElementMatrix::Constant(1.0);
  m.diagonal().setConstant(2.0);
  return area / 12.0 * m;
}

SparseSymMatrix assemble_stiffness(const Mesh& mesh, const ScalarField& c, BoundaryTreatment treatment) {
  if (&c.mesh() != &mesh) throw MeshMismatch("conductivity lives on a different mesh");
  require_positive(c);
  DofMap dofs = DofMap::build(mesh, treatment);
  Triplets triplets;
  triplets.reserve(mesh.triangle_count() * 9);
  for (const auto& tri : mesh.triangles) {
    const double coef = (c.values()[tri[0]] + c.values()[tri[1]] + c.values()[tri[2]]) / 3.0;
    scatter(triplets, dofs, tri,
            element_stiffness(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]], coef));
  }
  return from_triplets(triplets, std::move(dofs));
}

SparseSymMatrix assemble_mass(const Mesh& mesh, BoundaryTreatment treatment) {
  DofMap dofs = DofMap::build(mesh, treatment);
  Triplets triplets;
  triplets.reserve(mesh.triangle_count() * 9);
  for (const auto& tri : mesh.triangles) {
    scatter(triplets, dofs, tri, element_mass(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]));
  }
  return from_triplets(triplets, std::move(dofs));
}

double l2_inner(const ScalarField& a, const ScalarField& b) {
  require_same_mesh(a, b);
  const Mesh& mesh = a.mesh();
  const auto& u = a.values();
  const auto& v = b.values();
  double total = 0.0;
  // a^T M_e b = area/12 * (sum_i a_i b_i + sum_i a_i * sum_j b_j)
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double su = u[tri[0]] + u[tri[1]] + u[tri[2]];
    const double sv = v[tri[0]] + v[tri[1]] + v[tri[2]];
    const double diag = u[tri[0]] * v[tri[0]] + u[tri[1]] * v[tri[1]] + u[tri[2]] * v[tri[2]];
    total += mesh.triangle_area(t) / 12.0 * (diag + su * sv);
  }
  return total;
}

Eigen::VectorXd mass_action(const ScalarField& a) {
  const Mesh& mesh = a.mesh();
  const auto& u = a.values();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(u.size());
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double w = mesh.triangle_area(t) / 12.0;
    const double su = u[tri[0]] + u[tri[1]] + u[tri[2]];
    for (int k = 0; k < 3; ++k) out[tri[k]] += w * (su + u[tri[k]]);
  }
  return out;
}

double l2_norm(const ScalarField& a) { return std::sqrt(std::max(0.0, l2_inner(a, a))); }

PointLocator::PointLocator(MeshPtr mesh) : mesh_(std::move(mesh)) {
  const auto& m = *mesh_;
  Point2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Point2 hi{-lo.x, -lo.y};
  for (const auto& p : m.vertices) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  const double area = std::max((hi.x - lo.x) * (hi.y - lo.y), 1e-300);
  cell_ = std::sqrt(area / std::max<double>(1.0, static_cast<double>(m.triangle_count()) / 2.0));
  lo_ = lo;
  nx_ = std::max(1, static_cast<int>(std::ceil((hi.x - lo.x) / cell_)) + 1);
  ny_ = std::max(1, static_cast<int>(std::ceil((hi.y - lo.y) / cell_)) + 1);
  buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    const auto& tri = m.triangles[t];
    double x0 = m.vertices[tri[0]].x, x1 = x0, y0 = m.vertices[tri[0]].y, y1 = y0;
    for (int k = 1; k < 3; ++k) {
      x0 = std::min(x0, m.vertices[tri[k]].x);
      x1 = std::max(x1, m.vertices[tri[k]].x);
      y0 = std::min(y0, m.vertices[tri[k]].y);
      y1 = std::max(y1, m.vertices[tri[k]].y);
    }
    const int i0 = std::clamp(static_cast<int>((x0 - lo_.x) / cell_), 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((x1 - lo_.x) / cell_), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((y0 - lo_.y) / cell_), 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>((y1 - lo_.y) / cell_), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<int>(t));
    }
  }
}

std::pair<int, Eigen::Vector3d> PointLocator::locate(Point2 p) const {
  constexpr double kTolerance = 1e-10;
  const int i = static_cast<int>(std::floor((p.x - lo_.x) / cell_));
  const int j = static_cast<int>(std::floor((p.y - lo_.y) / cell_));
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_ || !std::isfinite(p.x) || !std::isfinite(p.y)) {
    throw PointOutsideMesh("point lies outside the mesh");
  }
  const auto& m = *mesh_;
  int best = -1;
  double best_min = -std::numeric_limits<double>::infinity();
  Eigen::Vector3d best_bary;
  for (int t : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
    const auto& tri = m.triangles[t];
    const Point2 a = m.vertices[tri[0]];
    const Point2 b = m.vertices[tri[1]];
    const Point2 c = m.vertices[tri[2]];
    const double total = orient2d(a, b, c);
    const Eigen::Vector3d bary(orient2d(p, b, c) / total, orient2d(a, p, c) / total, orient2d(a, b, p) / total);
    const double lowest = bary.minCoeff();
    if (lowest > best_min) {
      best_min = lowest;
      best = t;
      best_bary = bary;
    }
  }
  if (best < 0 || best_min < -kTolerance) throw PointOutsideMesh("point lies outside the mesh");
  return {best, best_bary};
}

EvaluationMatrix evaluation_matrix(const PointLocator& locator, std::span<const Point2> points) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(points.size() * 3);
  for (std::size_t r = 0; r < points.size(); ++r) {
    const auto [t, bary] = locator.locate(points[r]);
    const auto& tri = locator.mesh().triangles[t];
    for (int k = 0; k < 3; ++k) triplets.emplace_back(static_cast<int>(r), tri[k], bary[k]);
  }
  EvaluationMatrix out(static_cast<Eigen::Index>(points.size()),
                       static_cast<Eigen::Index>(locator.mesh().vertex_count()));
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

Eigen::VectorXd evaluate(const ScalarField& field, std::span<const Point2> points) {
  const PointLocator locator(field.mesh_ptr());
  return evaluation_matrix(locator, points) * field.values();
}

int default_heat_steps(double T, double h) {
  const double by_mesh = std::ceil(T / (h * h));
  return static_cast<int>(std::min(1.0e4, std::max(100.0, by_mesh)));
}

HeatPropagator::HeatPropagator(const ScalarField& conductivity, double T, int steps)
    : mesh_(conductivity.mesh_ptr()), T_(T), steps_(steps) {
  if (!(T > 0.0)) throw PreconditionError("final time must be positive");
  if (steps < 1) throw PreconditionError("heat solver needs at least one step");
  const Mesh& mesh = *mesh_;
  require_positive(conductivity);
  dofs_ = DofMap::build(mesh, BoundaryTreatment::kDirichlet);
  const auto n = static_cast<Eigen::Index>(dofs_.size());
  if (n == 0) throw LinearSolveFailure("mesh has no interior degrees of freedom");

  Triplets kt, mt, mrows;
  for (const auto& tri : mesh.triangles) {
    const Point2 a = mesh.vertices[tri[0]];
    const Point2 b = mesh.vertices[tri[1]];
    const Point2 c = mesh.vertices[tri[2]];
    const auto& cv = conductivity.values();
    const ElementMatrix ke = element_stiffness(a, b, c, (cv[tri[0]] + cv[tri[1]] + cv[tri[2]]) / 3.0);
    const ElementMatrix me = element_mass(a, b, c);
    for (int i = 0; i < 3; ++i) {
      const int r = dofs_.dof_of_vertex[tri[i]];
      if (r < 0) continue;
      for (int j = 0; j < 3; ++j) {
        mrows.emplace_back(r, tri[j], me(i, j));
        const int col = dofs_.dof_of_vertex[tri[j]];
        if (col < 0) continue;
        kt.emplace_back(r, col, ke(i, j));
        mt.emplace_back(r, col, me(i, j));
      }
    }
  }
  Eigen::SparseMatrix<double> stiffness(n, n), mass(n, n);
  stiffness.setFromTriplets(kt.begin(), kt.end());
  mass.setFromTriplets(mt.begin(), mt.end());
  mass_full_rows_.resize(n, static_cast<Eigen::Index>(mesh.vertex_count()));
  mass_full_rows_.setFromTriplets(mrows.begin(), mrows.end());

  const double half_dt = 0.5 * T / steps;
  explicit_part_ = mass - half_dt * stiffness;
  const Eigen::SparseMatrix<double> implicit_matrix = mass + half_dt * stiffness;
  implicit_.compute(implicit_matrix);
  if (implicit_.info() != Eigen::Success) throw LinearSolveFailure("Crank-Nicolson system is singular");
  mass_.compute(mass);
  if (mass_.info() != Eigen::Success) throw LinearSolveFailure("mass matrix is singular");
}

ScalarField HeatPropagator::apply(const ScalarField& f) const {
  if (f.mesh_ptr() != mesh_) throw MeshMismatch("initial state lives on a different mesh");
  Eigen::VectorXd u = mass_.solve(mass_full_rows_ * f.values());
  for (int s = 0; s < steps_; ++s) u = implicit_.solve(explicit_part_ * u);
  if (!u.allFinite()) throw LinearSolveFailure("heat solve produced non-finite values");
  return ScalarField(mesh_, dofs_.extend(u, mesh_->vertex_count()));
}

ScalarField solve_heat(const ScalarField& conductivity, const ScalarField& f, double T, int steps) {
  require_same_mesh(conductivity, f);
  return HeatPropagator(conductivity, T, steps).apply(f);
}

}  // namespace heatbayes
