#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "heatbayes/geometry.hpp"

namespace heatbayes {

// Conforming 2D triangulation. Triangles are counter-clockwise.
struct Mesh {
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<bool> boundary;  // per vertex
  double h = 0.0;              // target edge length used to build the mesh

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t triangle_count() const { return triangles.size(); }
  double triangle_area(std::size_t t) const;
  double total_area() const;
};

using MeshPtr = std::shared_ptr<const Mesh>;

struct MeshQuality {
  double min_angle_deg = 0.0;
  double min_edge = 0.0;
  double max_edge = 0.0;
};
MeshQuality mesh_quality(const Mesh& mesh);

// Boundary polygonisation at spacing <= h, a lattice interior of spacing h,
// Delaunay triangulation and Ruppert-style refinement to a 25 degree minimum
// angle. Throws MeshFailure when h is not in (0, diameter) or the quality
// bounds (edges in [h/3, 2h]) cannot be met.
Mesh generate_mesh(const DomainSpec& spec, double h);

// Checks orientation and conformity; returns a description of the first
// violation or an empty string.
std::string check_mesh(const Mesh& mesh);

// Plain text: "vertices V triangles T", V lines "x y flag", T lines "i j k".
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

struct DesignGrid {
  std::vector<Point2> points;
  double spacing = 0.0;
  std::size_t n() const { return points.size(); }
};

// Equilateral lattice clipped to the interior, keeping points at least half a
// lattice spacing from the boundary. The spacing and lattice offset are
// chosen deterministically so that the count is nearest to n_target.
DesignGrid design_grid(const DomainSpec& spec, std::size_t n_target);

}  // namespace heatbayes
