#include "heatbayes/geometry.hpp"

#include <algorithm>
#include <limits>

#include "heatbayes/errors.hpp"

namespace heatbayes {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const std::vector<Point2>& unit_square_vertices() {
  static const std::vector<Point2> v{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  return v;
}

bool segments_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
  const double d1 = orient2d(q1, q2, p1);
  const double d2 = orient2d(q1, q2, p2);
  const double d3 = orient2d(p1, p2, q1);
  const double d4 = orient2d(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  auto on_segment = [](Point2 a, Point2 b, Point2 c) {
    return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= c.y &&
           c.y <= std::max(a.y, b.y);
  };
  return (d1 == 0 && on_segment(q1, q2, p1)) || (d2 == 0 && on_segment(q1, q2, p2)) ||
         (d3 == 0 && on_segment(p1, p2, q1)) || (d4 == 0 && on_segment(p1, p2, q2));
}

void validate_polygon(const std::vector<Point2>& v) {
  const std::size_t n = v.size();
  if (n < 3) throw PreconditionError("polygon needs at least 3 vertices");
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] == v[(i + 1) % n]) throw PreconditionError("polygon has a repeated vertex");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // adjacent edges share a vertex by construction
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) {
        throw PreconditionError("polygon boundary is self-intersecting");
      }
    }
  }
  if (std::abs(polygon_signed_area(v)) <= 0.0) throw PreconditionError("polygon has zero area");
}

const std::vector<Point2>* polygon_vertices(const DomainSpec& spec) {
  if (std::holds_alternative<UnitSquare>(spec.kind())) return &unit_square_vertices();
  if (auto* p = std::get_if<Polygon>(&spec.kind())) return &p->vertices;
  return nullptr;
}

double polyline_perimeter(const std::vector<Point2>& v) {
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) total += distance(v[i], v[(i + 1) % v.size()]);
  return total;
}

Point2 polygon_boundary_point(const std::vector<Point2>& v, double perimeter, double t) {
  double s = std::clamp(t / kTwoPi, 0.0, 1.0) * perimeter;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2 a = v[i];
    const Point2 b = v[(i + 1) % v.size()];
    const double len = distance(a, b);
    if (s <= len || i + 1 == v.size()) {
      const double u = std::clamp(s / len, 0.0, 1.0);
      if (u == 0.0) return a;
      return a + u * (b - a);
    }
    s -= len;
  }
  return v.front();
}

// Distance from (x, y) with x, y >= 0 to the axis-aligned ellipse with
// semi-axes e0 >= e1 (robust bisection on the Lagrange multiplier).
double ellipse_distance_first_quadrant(double e0, double e1, double y0, double y1) {
  auto get_root = [](double r0, double z0, double z1, double g) {
    const double n0 = r0 * z0;
    double s0 = z1 - 1.0;
    double s1 = g < 0 ? 0.0 : std::hypot(n0, z1) - 1.0;
    double s = 0.0;
    for (int i = 0; i < 200; ++i) {
      s = 0.5 * (s0 + s1);
      if (s == s0 || s == s1) break;
      const double ratio0 = n0 / (s + r0);
      const double ratio1 = z1 / (s + 1.0);
      const double gs = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
      if (gs > 0) {
        s0 = s;
      } else if (gs < 0) {
        s1 = s;
      } else {
        break;
      }
    }
    return s;
  };
  double x0 = 0.0;
  double x1 = 0.0;
  if (y1 > 0) {
    if (y0 > 0) {
      const double z0 = y0 / e0;
      const double z1 = y1 / e1;
      const double g = z0 * z0 + z1 * z1 - 1.0;
      if (g != 0) {
        const double r0 = (e0 / e1) * (e0 / e1);
        const double sbar = get_root(r0, z0, z1, g);
        x0 = r0 * y0 / (sbar + r0);
        x1 = y1 / (sbar + 1.0);
      } else {
        x0 = y0;
        x1 = y1;
      }
    } else {
      x0 = 0.0;
      x1 = e1;
    }
  } else {
    const double numer0 = e0 * y0;
    const double denom0 = e0 * e0 - e1 * e1;
    if (numer0 < denom0) {
      const double xde0 = numer0 / denom0;
      x0 = e0 * xde0;
      x1 = e1 * std::sqrt(std::max(0.0, 1.0 - xde0 * xde0));
    } else {
      x0 = e0;
      x1 = 0.0;
    }
  }
  return std::hypot(x0 - y0, x1 - y1);
}

Point2 to_ellipse_frame(const RotatedEllipse& e, Point2 p) {
  const double c = std::cos(e.theta);
  const double s = std::sin(e.theta);
  return {c * p.x + s * p.y, -s * p.x + c * p.y};
}

}  // namespace

double distance_to_segment(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double u = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + u * ab);
}

double polygon_signed_area(std::span<const Point2> polygon) {
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    twice += cross(polygon[i], polygon[(i + 1) % polygon.size()]);
  }
  return 0.5 * twice;
}

bool polygon_contains(std::span<const Point2> polygon, Point2 p) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = polygon[i];
    const Point2 b = polygon[j];
    if (orient2d(a, b, p) == 0.0 && std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
        std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y)) {
      return false;
    }
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
      inside = !inside;
    }
  }
  return inside;
}

DomainSpec::DomainSpec(Kind kind) : kind_(std::move(kind)) {
  if (auto* e = std::get_if<RotatedEllipse>(&kind_)) {
    if (!(e->a > 0) || !(e->b > 0)) throw PreconditionError("ellipse semi-axes must be positive");
    if (!(e->theta >= 0 && e->theta < kTwoPi)) {
      throw PreconditionError("ellipse rotation angle must lie in [0, 2pi)");
    }
    // Ramanujan's second approximation; only used for sizing.
    const double h = std::pow(e->a - e->b, 2) / std::pow(e->a + e->b, 2);
    perimeter_ = std::numbers::pi * (e->a + e->b) * (1 + 3 * h / (10 + std::sqrt(4 - 3 * h)));
  } else if (std::holds_alternative<UnitDisk>(kind_)) {
    perimeter_ = kTwoPi;
  } else {
    if (auto* p = std::get_if<Polygon>(&kind_)) validate_polygon(p->vertices);
    perimeter_ = polyline_perimeter(*polygon_vertices(*this));
  }
}

bool DomainSpec::is_curved() const {
  return std::holds_alternative<RotatedEllipse>(kind_) || std::holds_alternative<UnitDisk>(kind_);
}

double DomainSpec::area() const {
  if (auto* e = std::get_if<RotatedEllipse>(&kind_)) return std::numbers::pi * e->a * e->b;
  if (std::holds_alternative<UnitDisk>(kind_)) return std::numbers::pi;
  return std::abs(polygon_signed_area(*polygon_vertices(*this)));
}

double DomainSpec::perimeter() const { return perimeter_; }

double DomainSpec::diameter() const {
  if (auto* e = std::get_if<RotatedEllipse>(&kind_)) return 2.0 * std::max(e->a, e->b);
  if (std::holds_alternative<UnitDisk>(kind_)) return 2.0;
  const auto& v = *polygon_vertices(*this);
  double d = 0.0;
  for (const auto& p : v) {
    for (const auto& q : v) d = std::max(d, distance(p, q));
  }
  return d;
}

std::pair<Point2, Point2> DomainSpec::bounding_box() const {
  if (auto* e = std::get_if<RotatedEllipse>(&kind_)) {
    const double c = std::cos(e->theta);
    const double s = std::sin(e->theta);
    const double hx = std::hypot(e->a * c, e->b * s);
    const double hy = std::hypot(e->a * s, e->b * c);
    return {{-hx, -hy}, {hx, hy}};
  }
  if (std::holds_alternative<UnitDisk>(kind_)) return {{-1.0, -1.0}, {1.0, 1.0}};
  const auto& v = *polygon_vertices(*this);
  Point2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Point2 hi{-lo.x, -lo.y};
  for (const auto& p : v) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  return {lo, hi};
}

Point2 DomainSpec::center() const {
  const auto [lo, hi] = bounding_box();
  return 0.5 * (lo + hi);
}

Point2 boundary_point(const DomainSpec& spec, double t) {
  if (auto* e = std::get_if<RotatedEllipse>(&spec.kind())) {
    const double ct = std::cos(t);
    const double st = std::sin(t);
    const double c = std::cos(e->theta);
    const double s = std::sin(e->theta);
    return {e->a * ct * c - e->b * st * s, e->b * st * c + e->a * ct * s};
  }
  if (std::holds_alternative<UnitDisk>(spec.kind())) return {std::cos(t), std::sin(t)};
  return polygon_boundary_point(*polygon_vertices(spec), spec.perimeter(), t);
}

bool contains(const DomainSpec& spec, Point2 p) {
  if (auto* e = std::get_if<RotatedEllipse>(&spec.kind())) {
    const Point2 q = to_ellipse_frame(*e, p);
    return (q.x / e->a) * (q.x / e->a) + (q.y / e->b) * (q.y / e->b) < 1.0;
  }
  if (std::holds_alternative<UnitDisk>(spec.kind())) return p.x * p.x + p.y * p.y < 1.0;
  if (std::holds_alternative<UnitSquare>(spec.kind())) {
    return p.x > 0.0 && p.x < 1.0 && p.y > 0.0 && p.y < 1.0;
  }
  return polygon_contains(*polygon_vertices(spec), p);
}

double distance_to_boundary(const DomainSpec& spec, Point2 p) {
  if (auto* e = std::get_if<RotatedEllipse>(&spec.kind())) {
    const Point2 q = to_ellipse_frame(*e, p);
    if (e->a >= e->b) return ellipse_distance_first_quadrant(e->a, e->b, std::abs(q.x), std::abs(q.y));
    return ellipse_distance_first_quadrant(e->b, e->a, std::abs(q.y), std::abs(q.x));
  }
  if (std::holds_alternative<UnitDisk>(spec.kind())) return std::abs(1.0 - norm(p));
  const auto& v = *polygon_vertices(spec);
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    d = std::min(d, distance_to_segment(p, v[i], v[(i + 1) % v.size()]));
  }
  return d;
}

std::vector<Point2> sample_boundary(const DomainSpec& spec, double max_spacing,
                                    std::vector<double>* params) {
  std::vector<Point2> out;
  std::vector<double> ts;
  if (const auto* v = polygon_vertices(spec)) {
    double walked = 0.0;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const Point2 a = (*v)[i];
      const Point2 b = (*v)[(i + 1) % v->size()];
      const double len = distance(a, b);
      const auto pieces = static_cast<int>(std::ceil(len / max_spacing - 1e-12));
      for (int k = 0; k < pieces; ++k) {
        const double u = static_cast<double>(k) / pieces;
        out.push_back(k == 0 ? a : a + u * (b - a));
        ts.push_back(kTwoPi * (walked + u * len) / spec.perimeter());
      }
      walked += len;
    }
  } else {
    // Cumulative chord length over a dense parameter table approximates arclength.
    constexpr int kTable = 16384;
    std::vector<double> arc(kTable + 1, 0.0);
    Point2 prev = boundary_point(spec, 0.0);
    for (int i = 1; i <= kTable; ++i) {
      const Point2 cur = boundary_point(spec, kTwoPi * i / kTable);
      arc[i] = arc[i - 1] + distance(prev, cur);
      prev = cur;
    }
    const double total = arc.back();
    const auto count = std::max(3, static_cast<int>(std::ceil(total / max_spacing)));
    for (int k = 0; k < count; ++k) {
      const double s = total * k / count;
      const auto it = std::upper_bound(arc.begin(), arc.end(), s);
      const auto i = static_cast<int>(std::distance(arc.begin(), it)) - 1;
      const double frac = (s - arc[i]) / (arc[i + 1] - arc[i]);
      const double t = kTwoPi * (i + frac) / kTable;
      out.push_back(boundary_point(spec, t));
      ts.push_back(t);
    }
  }
  if (params) *params = std::move(ts);
  return out;
}

}  // namespace heatbayes
