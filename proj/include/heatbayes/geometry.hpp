#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <variant>
#include <vector>

namespace heatbayes {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

// Twice the signed area of (a, b, c); positive for counter-clockwise order.
inline double orient2d(Point2 a, Point2 b, Point2 c) { return cross(b - a, c - a); }

double distance_to_segment(Point2 p, Point2 a, Point2 b);

struct RotatedEllipse {
  double a = 1.0;
  double b = 0.75;
  double theta = std::numbers::pi / 6.0;
};
struct UnitSquare {};
struct UnitDisk {};
struct Polygon {
  std::vector<Point2> vertices;  // counter-clockwise or clockwise, implicitly closed
};

// Computational domain described by its parametric boundary.
class DomainSpec {
 public:
  using Kind = std::variant<RotatedEllipse, UnitSquare, UnitDisk, Polygon>;

  // Validates the invariants of each kind; throws PreconditionError.
  explicit DomainSpec(Kind kind);

  static DomainSpec paper_ellipse() { return DomainSpec(RotatedEllipse{}); }

  const Kind& kind() const { return kind_; }
  bool is_curved() const;
  double area() const;
  double diameter() const;
  double perimeter() const;
  // Axis-aligned bounding box as {min, max}.
  std::pair<Point2, Point2> bounding_box() const;
  // Interior point used as the origin for lattice constructions.
  Point2 center() const;

 private:
  Kind kind_;
  double perimeter_ = 0.0;
};

// Canonical boundary parametrisation over t in [0, 2pi). Polygons and the
// unit square are traversed at constant speed starting from their first vertex.
Point2 boundary_point(const DomainSpec& spec, double t);

// True iff p lies strictly inside the domain.
bool contains(const DomainSpec& spec, Point2 p);

// Unsigned distance from p to the boundary curve.
double distance_to_boundary(const DomainSpec& spec, Point2 p);

// Closed polygonal approximation of the boundary. For curved domains the
// vertices are equispaced in arclength and at most `max_spacing` apart.
// Polygonal domains keep every corner and subdivide each edge uniformly.
// `params` receives the boundary parameter t of each returned vertex.
std::vector<Point2> sample_boundary(const DomainSpec& spec, double max_spacing,
                                    std::vector<double>* params = nullptr);

// Even-odd point-in-polygon test; points on the boundary count as outside.
bool polygon_contains(std::span<const Point2> polygon, Point2 p);
double polygon_signed_area(std::span<const Point2> polygon);

}  // namespace heatbayes
