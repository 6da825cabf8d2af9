#include "heatbayes/delaunay.hpp"

#include <algorithm>

#include "heatbayes/errors.hpp"

namespace heatbayes {

double incircle(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double adx = a.x - d.x;
  const double ady = a.y - d.y;
  const double bdx = b.x - d.x;
  const double bdy = b.y - d.y;
  const double cdx = c.x - d.x;
  const double cdy = c.y - d.y;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  return alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
         clift * (adx * bdy - bdx * ady);
}

Point2 circumcenter(Point2 a, Point2 b, Point2 c) {
  const Point2 ba = b - a;
  const Point2 ca = c - a;
  const double d = 2.0 * cross(ba, ca);
  const double bl = dot(ba, ba);
  const double cl = dot(ca, ca);
  return {a.x + (ca.y * bl - ba.y * cl) / d, a.y + (ba.x * cl - ca.x * bl) / d};
}

DelaunayTriangulation::DelaunayTriangulation(Point2 lo, Point2 hi) {
  const Point2 mid = 0.5 * (lo + hi);
  const double span = std::max({hi.x - lo.x, hi.y - lo.y, 1e-12});
  const double r = 200.0 * span;
  points_ = {{mid.x - 0.866 * r * 2, mid.y - r}, {mid.x + 0.866 * r * 2, mid.y - r}, {mid.x, mid.y + 2 * r}};
  triangles_.push_back({{0, 1, 2}, {-1, -1, -1}, true});
  vertex_triangle_ = {0, 0, 0};
}

int DelaunayTriangulation::walk(Point2 p, int start) const {
  int t = start;
  const auto limit = 4 * triangles_.size() + 16;
  for (std::size_t step = 0; step < limit; ++step) {
    const auto& tri = triangles_[t];
    bool moved = false;
    for (int j = 0; j < 3; ++j) {
      // rotate the starting edge to avoid cycling on degenerate walks
      const int k = static_cast<int>((j + step) % 3);
      const Point2 a = points_[tri.v[(k + 1) % 3]];
      const Point2 b = points_[tri.v[(k + 2) % 3]];
      if (orient2d(a, b, p) < 0.0) {
        if (tri.nb[k] < 0) return -1;
        t = tri.nb[k];
        moved = true;
        break;
      }
    }
    if (!moved) return t;
  }
  return -2;
}

int DelaunayTriangulation::locate(Point2 p) const {
  int start = last_;
  if (start < 0 || start >= static_cast<int>(triangles_.size()) || !triangles_[start].alive) {
    start = 0;
    while (!triangles_[start].alive) ++start;
  }
  const int t = walk(p, start);
  if (t != -2) return t;
  for (std::size_t i = 0; i < triangles_.size(); ++i) {
    const auto& tri = triangles_[i];
    if (!tri.alive) continue;
    if (orient2d(points_[tri.v[0]], points_[tri.v[1]], p) >= 0 &&
        orient2d(points_[tri.v[1]], points_[tri.v[2]], p) >= 0 &&
        orient2d(points_[tri.v[2]], points_[tri.v[0]], p) >= 0) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

int DelaunayTriangulation::insert(Point2 p) {
  const int t0 = locate(p);
  if (t0 < 0) throw MeshFailure("point lies outside the triangulation");
  for (int v : triangles_[t0].v) {
    if (points_[v] == p) throw MeshFailure("duplicate point inserted into triangulation");
  }

  std::vector<int> cavity{t0};
  std::vector<char> in_cavity(triangles_.size(), 0);
  in_cavity[t0] = 1;
  {
    const auto& tri = triangles_[t0];
    for (int k = 0; k < 3; ++k) {
      if (orient2d(points_[tri.v[(k + 1) % 3]], points_[tri.v[(k + 2) % 3]], p) == 0.0 && tri.nb[k] >= 0) {
        in_cavity[tri.nb[k]] = 1;
        cavity.push_back(tri.nb[k]);
      }
    }
  }
  std::vector<char> rejected(triangles_.size(), 0);
  for (std::size_t i = 0; i < cavity.size(); ++i) {
    const auto& tri = triangles_[cavity[i]];
    for (int n : tri.nb) {
      if (n < 0 || in_cavity[n] || rejected[n]) continue;
      const auto& nt = triangles_[n];
      if (incircle(points_[nt.v[0]], points_[nt.v[1]], points_[nt.v[2]], p) > 0.0) {
        in_cavity[n] = 1;
        cavity.push_back(n);
      } else {
        rejected[n] = 1;
      }
    }
  }

  struct Edge {
    int a, b, outer;
  };
  std::vector<Edge> rim;
  for (;;) {
    rim.clear();
    int grow = -1;
    for (int t : cavity) {
      const auto& tri = triangles_[t];
      for (int k = 0; k < 3; ++k) {
        const int n = tri.nb[k];
        if (n >= 0 && in_cavity[n]) continue;
        const int a = tri.v[(k + 1) % 3];
        const int b = tri.v[(k + 2) % 3];
        if (orient2d(points_[a], points_[b], p) <= 0.0) {
          if (n < 0) throw MeshFailure("degenerate insertion on the enclosing triangle");
          grow = n;
        }
        rim.push_back({a, b, n});
      }
    }
    if (grow < 0) break;
    // Rounding left the cavity non-star-shaped; absorb the offending neighbour.
    in_cavity[grow] = 1;
    cavity.push_back(grow);
  }

  const int pv = static_cast<int>(points_.size());
  points_.push_back(p);
  vertex_triangle_.push_back(-1);

  std::vector<int> ids(rim.size());
  for (std::size_t i = 0; i < rim.size(); ++i) {
    if (i < cavity.size()) {
      ids[i] = cavity[i];
    } else {
      ids[i] = static_cast<int>(triangles_.size());
      triangles_.emplace_back();
    }
  }
  for (std::size_t i = rim.size(); i < cavity.size(); ++i) triangles_[cavity[i]].alive = false;

  for (std::size_t i = 0; i < rim.size(); ++i) {
    const auto& e = rim[i];
    auto& tri = triangles_[ids[i]];
    tri.v = {e.a, e.b, pv};
    tri.nb = {-1, -1, e.outer};
    tri.alive = true;
    if (e.outer >= 0) {
      auto& out = triangles_[e.outer];
      for (int k = 0; k < 3; ++k) {
        if (out.v[(k + 1) % 3] == e.b && out.v[(k + 2) % 3] == e.a) out.nb[k] = ids[i];
      }
    }
  }
  for (std::size_t i = 0; i < rim.size(); ++i) {
    for (std::size_t j = 0; j < rim.size(); ++j) {
      if (rim[j].a == rim[i].b) triangles_[ids[i]].nb[0] = ids[j];
      if (rim[j].b == rim[i].a) triangles_[ids[i]].nb[1] = ids[j];
    }
    vertex_triangle_[rim[i].a] = ids[i];
    vertex_triangle_[rim[i].b] = ids[i];
  }
  vertex_triangle_[pv] = ids.front();
  last_ = ids.front();
  return pv;
}

std::vector<int> DelaunayTriangulation::incident_triangles(int v) const {
  std::vector<int> out;
  const int start = vertex_triangle_[v];
  if (start < 0) return out;
  auto index_of = [&](int t) {
    const auto& tv = triangles_[t].v;
    return static_cast<int>(std::find(tv.begin(), tv.end(), v) - tv.begin());
  };
  int t = start;
  do {
    out.push_back(t);
    t = triangles_[t].nb[(index_of(t) + 1) % 3];
  } while (t >= 0 && t != start);
  if (t < 0) {
    t = triangles_[start].nb[(index_of(start) + 2) % 3];
    while (t >= 0) {
      out.push_back(t);
      t = triangles_[t].nb[(index_of(t) + 2) % 3];
    }
  }
  return out;
}

bool DelaunayTriangulation::has_edge(int a, int b) const {
  for (int t : incident_triangles(a)) {
    for (int v : triangles_[t].v) {
      if (v == b) return true;
    }
  }
  return false;
}

}  // namespace heatbayes
