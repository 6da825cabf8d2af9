#include "heatbayes/mesh.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "heatbayes/delaunay.hpp"
#include "heatbayes/errors.hpp"

namespace heatbayes {

namespace {

constexpr double kMinAngleDeg = 25.0;
constexpr double kSqrt3 = 1.7320508075688772;

double min_angle_deg(Point2 a, Point2 b, Point2 c) {
  auto angle = [](Point2 p, Point2 q, Point2 r) {
    const Point2 u = q - p;
    const Point2 v = r - p;
    return std::atan2(std::abs(cross(u, v)), dot(u, v));
  };
  const double m = std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
  return m * 180.0 / std::numbers::pi;
}

double max_edge(Point2 a, Point2 b, Point2 c) {
  return std::max({distance(a, b), distance(b, c), distance(c, a)});
}

struct BoundaryNode {
  int vertex;
  double t;
};

// Mesh generator state: the triangulation plus the ordered boundary loop.
class Mesher {
 public:
  Mesher(const DomainSpec& spec, double h) : spec_(spec), h_(h), dt_(expanded_box(spec)) {}

  Mesh run() {
    std::vector<double> ts;
    const auto boundary = sample_boundary(spec_, h_, &ts);
    std::vector<Point2> interior = lattice_points();
    build(boundary, ts, interior);
    for (int round = 0; round < 4; ++round) {
      interior = smoothed_interior();
      dt_ = DelaunayTriangulation(expanded_box(spec_));
      build(boundary, ts, interior);
    }
    refine();
    return extract();
  }

 private:
  static DelaunayTriangulation expanded_box(const DomainSpec& spec) {
    const auto [lo, hi] = spec.bounding_box();
    return DelaunayTriangulation(lo, hi);
  }

  std::vector<Point2> lattice_points() const {
    const auto [lo, hi] = spec_.bounding_box();
    const Point2 c = spec_.center();
    const double dy = h_ * kSqrt3 / 2.0;
    const int rows = static_cast<int>(std::ceil((hi.y - lo.y) / dy)) + 1;
    const int cols = static_cast<int>(std::ceil((hi.x - lo.x) / h_)) + 1;
    std::vector<Point2> out;
    for (int j = -rows; j <= rows; ++j) {
      const double shift = (j % 2 == 0) ? 0.0 : 0.5;
      for (int i = -cols; i <= cols; ++i) {
        const Point2 p{c.x + (i + shift) * h_, c.y + j * dy};
        if (contains(spec_, p) && distance_to_boundary(spec_, p) >= 0.55 * h_) out.push_back(p);
      }
    }
    return out;
  }

  void build(const std::vector<Point2>& boundary, const std::vector<double>& ts,
             const std::vector<Point2>& interior) {
    loop_.clear();
    for (std::size_t i = 0; i < boundary.size(); ++i) {
      loop_.push_back({dt_.insert(boundary[i]), ts[i]});
    }
    first_interior_ = static_cast<int>(dt_.points().size());
    for (const auto& p : interior) dt_.insert(p);
    refresh_polygon();
  }

  void refresh_polygon() {
    polygon_.clear();
    for (const auto& node : loop_) polygon_.push_back(dt_.points()[node.vertex]);
  }

  // Laplacian smoothing of lattice vertices; moves that approach the boundary are rejected.
  std::vector<Point2> smoothed_interior() const {
    const auto& pts = dt_.points();
    std::vector<Point2> out;
    for (int v = first_interior_; v < static_cast<int>(pts.size()); ++v) {
      Point2 sum{0.0, 0.0};
      int count = 0;
      std::vector<int> seen;
      for (int t : dt_.incident_triangles(v)) {
        for (int w : dt_.triangles()[t].v) {
          if (w == v || dt_.is_super_vertex(w)) continue;
          if (std::find(seen.begin(), seen.end(), w) != seen.end()) continue;
          seen.push_back(w);
          sum = sum + pts[w];
          ++count;
        }
      }
      Point2 p = pts[v];
      if (count > 0) {
        const Point2 q = (1.0 / count) * sum;
        if (contains(spec_, q) && distance_to_boundary(spec_, q) >= 0.5 * h_) p = q;
      }
      out.push_back(p);
    }
    return out;
  }

  bool triangle_inside(const DelaunayTriangulation::Triangle& tri) const {
    for (int v : tri.v) {
      if (dt_.is_super_vertex(v)) return false;
    }
    const auto& p = dt_.points();
    const Point2 centroid = (1.0 / 3.0) * (p[tri.v[0]] + p[tri.v[1]] + p[tri.v[2]]);
    return polygon_contains(polygon_, centroid);
  }

  // A segment is encroached when some vertex sees it at an obtuse angle, or it
  // is missing from the triangulation altogether.
  bool segment_encroached(std::size_t i) const {
    const int a = loop_[i].vertex;
    const int b = loop_[(i + 1) % loop_.size()].vertex;
    const auto& p = dt_.points();
    bool present = false;
    for (int t : dt_.incident_triangles(a)) {
      const auto& tri = dt_.triangles()[t];
      if (std::find(tri.v.begin(), tri.v.end(), b) == tri.v.end()) continue;
      present = true;
      for (int c : tri.v) {
        if (c == a || c == b || dt_.is_super_vertex(c)) continue;
        if (dot(p[a] - p[c], p[b] - p[c]) < 0.0) return true;
      }
    }
    return !present;
  }

  bool point_encroaches(Point2 q, std::size_t i) const {
    const auto& p = dt_.points();
    const Point2 a = p[loop_[i].vertex];
    const Point2 b = p[loop_[(i + 1) % loop_.size()].vertex];
    return dot(a - q, b - q) < 0.0;
  }

  void split_segment(std::size_t i) {
    const std::size_t j = (i + 1) % loop_.size();
    const auto& p = dt_.points();
    double t_next = loop_[j].t;
    if (j == 0) t_next += 2.0 * std::numbers::pi;
    const double t_mid = 0.5 * (loop_[i].t + t_next);
    const Point2 q = spec_.is_curved() ? boundary_point(spec_, t_mid)
                                       : 0.5 * (p[loop_[i].vertex] + p[loop_[j].vertex]);
    const int v = dt_.insert(q);
    loop_.insert(loop_.begin() + static_cast<std::ptrdiff_t>(i + 1), BoundaryNode{v, t_mid});
    refresh_polygon();
    ++insertions_;
  }

  bool split_encroached_segments() {
    bool any = false;
    for (std::size_t i = 0; i < loop_.size();) {
      if (segment_encroached(i)) {
        check_budget();
        split_segment(i);
        any = true;
      } else {
        ++i;
      }
    }
    return any;
  }

  void check_budget() const {
    if (insertions_ > budget_) throw MeshFailure("mesh refinement did not terminate; h may be too large");
  }

  void refine() {
    budget_ = 2 * static_cast<int>(dt_.points().size()) + 1000;
    for (int pass = 0; pass < 200; ++pass) {
      split_encroached_segments();
      bool inserted = false;
      const auto& pts = dt_.points();
      const auto count = dt_.triangles().size();
      for (std::size_t t = 0; t < count; ++t) {
        const auto tri = dt_.triangles()[t];
        if (!tri.alive || !triangle_inside(tri)) continue;
        const Point2 a = pts[tri.v[0]];
        const Point2 b = pts[tri.v[1]];
        const Point2 c = pts[tri.v[2]];
        if (min_angle_deg(a, b, c) >= kMinAngleDeg && max_edge(a, b, c) <= 1.9 * h_) continue;
        const Point2 cc = circumcenter(a, b, c);
        std::vector<std::size_t> hit;
        for (std::size_t s = 0; s < loop_.size(); ++s) {
          if (point_encroaches(cc, s)) hit.push_back(s);
        }
        check_budget();
        if (!hit.empty()) {
          // split from the back so earlier loop indices stay valid
          for (auto it = hit.rbegin(); it != hit.rend(); ++it) split_segment(*it);
          inserted = true;
        } else if (polygon_contains(polygon_, cc)) {
          dt_.insert(cc);
          ++insertions_;
          inserted = true;
        }
      }
      if (!inserted) {
        if (split_encroached_segments()) continue;
        return;
      }
    }
    throw MeshFailure("mesh refinement exceeded its pass budget");
  }

  Mesh extract() const {
    const auto& pts = dt_.points();
    std::vector<int> remap(pts.size(), -1);
    Mesh mesh;
    mesh.h = h_;
    std::vector<char> on_boundary(pts.size(), 0);
    for (const auto& node : loop_) on_boundary[node.vertex] = 1;
    for (const auto& tri : dt_.triangles()) {
      if (!tri.alive || !triangle_inside(tri)) continue;
      std::array<int, 3> out{};
      for (int k = 0; k < 3; ++k) {
        int& r = remap[tri.v[k]];
        if (r < 0) {
          r = static_cast<int>(mesh.vertices.size());
          mesh.vertices.push_back(pts[tri.v[k]]);
          mesh.boundary.push_back(on_boundary[tri.v[k]] != 0);
        }
        out[k] = r;
      }
      mesh.triangles.push_back(out);
    }
    return mesh;
  }

  const DomainSpec& spec_;
  double h_;
  DelaunayTriangulation dt_;
  std::vector<BoundaryNode> loop_;
  std::vector<Point2> polygon_;
  int first_interior_ = 0;
  int insertions_ = 0;
  int budget_ = 0;
};

}  // namespace

double Mesh::triangle_area(std::size_t t) const {
  const auto& tri = triangles[t];
  return 0.5 * orient2d(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
}

double Mesh::total_area() const {
  double a = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) a += triangle_area(t);
  return a;
}

MeshQuality mesh_quality(const Mesh& mesh) {
  MeshQuality q{180.0, std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& tri : mesh.triangles) {
    const Point2 a = mesh.vertices[tri[0]];
    const Point2 b = mesh.vertices[tri[1]];
    const Point2 c = mesh.vertices[tri[2]];
    q.min_angle_deg = std::min(q.min_angle_deg, min_angle_deg(a, b, c));
    q.min_edge = std::min({q.min_edge, distance(a, b), distance(b, c), distance(c, a)});
    q.max_edge = std::max(q.max_edge, max_edge(a, b, c));
  }
  return q;
}

std::string check_mesh(const Mesh& mesh) {
  if (mesh.boundary.size() != mesh.vertices.size()) return "boundary flag count differs from vertex count";
  std::map<std::pair<int, int>, int> edge_count;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int v : tri) {
      if (v < 0 || v >= static_cast<int>(mesh.vertices.size())) return "triangle references a missing vertex";
    }
    if (!(mesh.triangle_area(t) > 0.0)) {
      std::ostringstream os;
      os << "triangle " << t << " has non-positive signed area";
      return os.str();
    }
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k];
      const int b = tri[(k + 1) % 3];
      ++edge_count[{std::min(a, b), std::max(a, b)}];
    }
  }
  for (const auto& [edge, count] : edge_count) {
    if (count > 2) return "edge shared by more than two triangles";
    if (count == 1 && !(mesh.boundary[edge.first] && mesh.boundary[edge.second])) {
      std::ostringstream os;
      os << "free edge (" << edge.first << ", " << edge.second << ") has an interior endpoint";
      return os.str();
    }
  }
  return {};
}

Mesh generate_mesh(const DomainSpec& spec, double h) {
  if (!(h > 0.0) || !(h < spec.diameter())) {
    throw MeshFailure("target edge length must lie in (0, domain diameter)");
  }
  if (spec.area() / (0.43 * h * h) > 4.0e6) throw MeshFailure("target edge length too small");
  Mesher mesher(spec, h);
  Mesh mesh = mesher.run();
  if (mesh.triangles.empty()) throw MeshFailure("triangulation produced no interior triangles");
  if (auto err = check_mesh(mesh); !err.empty()) throw MeshFailure("invalid triangulation: " + err);
  const auto quality = mesh_quality(mesh);
  if (quality.min_edge < h / 3.0 || quality.max_edge > 2.0 * h) {
    std::ostringstream os;
    os << "edge lengths [" << quality.min_edge << ", " << quality.max_edge << "] outside [h/3, 2h]";
    throw MeshFailure(os.str());
  }
  return mesh;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  const auto old = os.precision(17);
  os << "vertices " << mesh.vertices.size() << " triangles " << mesh.triangles.size() << '\n';
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    os << mesh.vertices[i].x << ' ' << mesh.vertices[i].y << ' ' << (mesh.boundary[i] ? 1 : 0) << '\n';
  }
  for (const auto& t : mesh.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  os.precision(old);
}

Mesh read_mesh(std::istream& is) {
  std::string w1, w2;
  std::size_t nv = 0, nt = 0;
  if (!(is >> w1 >> nv >> w2 >> nt) || w1 != "vertices" || w2 != "triangles") {
    throw PreconditionError("mesh file: malformed header");
  }
  Mesh mesh;
  mesh.vertices.resize(nv);
  mesh.boundary.resize(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    int flag = 0;
    if (!(is >> mesh.vertices[i].x >> mesh.vertices[i].y >> flag)) {
      throw PreconditionError("mesh file: truncated vertex list");
    }
    mesh.boundary[i] = flag != 0;
  }
  mesh.triangles.resize(nt);
  for (auto& t : mesh.triangles) {
    if (!(is >> t[0] >> t[1] >> t[2])) throw PreconditionError("mesh file: truncated triangle list");
  }
  if (auto err = check_mesh(mesh); !err.empty()) throw PreconditionError("mesh file: " + err);
  return mesh;
}

DesignGrid design_grid(const DomainSpec& spec, std::size_t n_target) {
  if (n_target < 1) throw PreconditionError("design grid needs n_target >= 1");
  const auto [lo, hi] = spec.bounding_box();
  const Point2 c = spec.center();
  const double base = std::sqrt(2.0 * spec.area() / (kSqrt3 * static_cast<double>(n_target)));
  // lattice offsets as fractions of (spacing, row height)
  constexpr std::array<std::pair<double, double>, 6> kOffsets{
      {{0.0, 0.0}, {0.25, 0.5}, {0.5, 0.0}, {0.0, 0.5}, {0.25, 0.0}, {0.5, 0.5}}};

  auto build = [&](double s, std::pair<double, double> off) {
    DesignGrid grid;
    grid.spacing = s;
    const double dy = s * kSqrt3 / 2.0;
    const int rows = static_cast<int>(std::ceil((hi.y - lo.y) / dy)) + 2;
    const int cols = static_cast<int>(std::ceil((hi.x - lo.x) / s)) + 2;
    for (int j = -rows; j <= rows; ++j) {
      const double shift = (((j % 2) + 2) % 2 == 0) ? 0.0 : 0.5;
      for (int i = -cols; i <= cols; ++i) {
        const Point2 p{c.x + (i + off.first + shift) * s, c.y + (j + off.second) * dy};
        if (contains(spec, p) && distance_to_boundary(spec, p) >= 0.5 * s) grid.points.push_back(p);
      }
    }
    return grid;
  };

  // Factors are visited in order of increasing distance from 1 (smaller
  // first on ties), so the first exact hit is also the least distorted one.
  DesignGrid best;
  std::size_t best_gap = std::numeric_limits<std::size_t>::max();
  for (int k = 0; k <= 400 && best_gap > 0; ++k) {
    const double factor = 1.0 + ((k % 2 == 1) ? -0.0025 : 0.0025) * ((k + 1) / 2);
    for (const auto& off : kOffsets) {
      DesignGrid g = build(base * factor, off);
      const std::size_t gap = g.n() > n_target ? g.n() - n_target : n_target - g.n();
      if (gap < best_gap) {
        best = std::move(g);
        best_gap = gap;
        if (gap == 0) break;
      }
    }
  }
  if (best.points.empty()) throw EmptyGrid("no lattice point falls inside the domain");
  return best;
}

}  // namespace heatbayes
