#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>

#include "heatbayes/eigen_basis.hpp"
#include "heatbayes/geometry.hpp"
#include "heatbayes/mesh.hpp"

namespace fixtures {

using namespace heatbayes;

inline DomainSpec square() { return DomainSpec(UnitSquare{}); }
inline DomainSpec disk() { return DomainSpec(UnitDisk{}); }
inline DomainSpec ellipse() { return DomainSpec::paper_ellipse(); }

// Meshes are expensive enough to share across test cases.
inline MeshPtr mesh(const DomainSpec& spec, double h) {
  static std::map<std::pair<int, long>, MeshPtr> cache;
  static std::mutex mutex;
  const auto key = std::make_pair(static_cast<int>(spec.kind().index()), std::lround(h * 1e6));
  std::lock_guard lock(mutex);
  auto& slot = cache[key];
  if (!slot) slot = std::make_shared<const Mesh>(generate_mesh(spec, h));
  return slot;
}

inline const EigenBasis& basis(const DomainSpec& spec, double h, int J) {
  static std::map<std::tuple<int, long, int>, std::unique_ptr<EigenBasis>> cache;
  const auto key = std::make_tuple(static_cast<int>(spec.kind().index()), std::lround(h * 1e6), J);
  auto& slot = cache[key];
  if (!slot) slot = std::make_unique<EigenBasis>(dirichlet_laplacian_basis(mesh(spec, h), J));
  return *slot;
}

// Integral of g over the ellipse x = R(theta) (a r cos phi, b r sin phi) by a
// tensor Gauss-Legendre rule in r and the trapezoidal rule in phi.
template <class Fn>
double ellipse_integral(const RotatedEllipse& e, Fn&& g, int nr = 64, int nphi = 512) {
  // 64-point Gauss-Legendre nodes via Newton on P_n.
  std::vector<double> x(nr), w(nr);
  for (int i = 0; i < nr; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (nr + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= nr; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = nr * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) {
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        break;
      }
      w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    x[i] = z;
  }
  const double c = std::cos(e.theta), s = std::sin(e.theta);
  double total = 0.0;
  for (int j = 0; j < nphi; ++j) {
    const double phi = 2.0 * std::numbers::pi * j / nphi;
    for (int i = 0; i < nr; ++i) {
      const double r = 0.5 * (x[i] + 1.0);
      const double u = e.a * r * std::cos(phi), v = e.b * r * std::sin(phi);
      const Point2 p{c * u - s * v, s * u + c * v};
      total += 0.5 * w[i] * g(p) * e.a * e.b * r;
    }
  }
  return total * 2.0 * std::numbers::pi / nphi;
}

}  // namespace fixtures
