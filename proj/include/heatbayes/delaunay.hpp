#pragma once

#include <array>
#include <vector>

#include "heatbayes/geometry.hpp"

namespace heatbayes {

// Incremental Bowyer-Watson Delaunay triangulation inside a large enclosing
// triangle. Vertices 0..2 are the enclosing triangle; inserted points follow.
class DelaunayTriangulation {
 public:
  struct Triangle {
    std::array<int, 3> v{};   // counter-clockwise
    std::array<int, 3> nb{};  // nb[i] is across the edge opposite v[i], -1 if none
    bool alive = true;
  };

  DelaunayTriangulation(Point2 lo, Point2 hi);

  // Inserts p and returns its vertex index. Duplicate points are rejected with
  // MeshFailure.
  int insert(Point2 p);

  const std::vector<Point2>& points() const { return points_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  bool is_super_vertex(int v) const { return v < 3; }

  // Index of a live triangle containing p (closed), or -1.
  int locate(Point2 p) const;
  // True iff (a, b) is an edge of a live triangle.
  bool has_edge(int a, int b) const;
  // Live triangles incident to vertex v.
  std::vector<int> incident_triangles(int v) const;

 private:
  int walk(Point2 p, int start) const;

  std::vector<Point2> points_;
  std::vector<Triangle> triangles_;
  std::vector<int> vertex_triangle_;  // some live triangle incident to each vertex
  int last_ = 0;
};

// Positive iff d lies strictly inside the circumcircle of the
// counter-clockwise triangle (a, b, c).
double incircle(Point2 a, Point2 b, Point2 c, Point2 d);
Point2 circumcenter(Point2 a, Point2 b, Point2 c);

}  // namespace heatbayes
