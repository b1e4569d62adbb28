#pragma once

// Planar polygonal geometry: simple polygons, oriented squares, finite
// polygonal partitions with their interface graph, and ear-clipping
// triangulation used by the area quadratures.

#include "prlab/linalg.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace prlab {

using Point2 = Vec2;
using Triangle = std::array<Point2, 3>;

enum class Location { kInside, kBoundary, kOutside };

/// Simple polygon with counterclockwise vertex order.
class Polygon {
 public:
  Polygon() = default;
  /// Throws std::invalid_argument unless the vertex list describes a simple,
  /// counterclockwise polygon with at least three distinct vertices.
  explicit Polygon(std::vector<Point2> vertices);

  /// Accepts either orientation and reverses clockwise input.
  static Polygon from_any_orientation(std::vector<Point2> vertices);
  static Polygon rectangle(double x0, double y0, double x1, double y1);

  const std::vector<Point2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Point2& operator[](std::size_t k) const { return vertices_[k]; }
  const Point2& next(std::size_t k) const { return vertices_[(k + 1) % vertices_.size()]; }

  double signed_area() const;
  double area() const { return signed_area(); }
  double perimeter() const;
  double diameter() const;
  Point2 centroid() const;
  bool is_convex() const;

  /// Classifies p against the closed polygon; points within tol of an edge
  /// are on the boundary.
  Location locate(const Point2& p, double tol) const;
  double distance_to_boundary(const Point2& p) const;

  template <class F>
  Polygon transformed(F&& map) const {
    std::vector<Point2> out;
    out.reserve(vertices_.size());
    for (const auto& v : vertices_) out.push_back(map(v));
    return from_any_orientation(std::move(out));
  }

 private:
  std::vector<Point2> vertices_;
};

double segment_point_distance(const Point2& a, const Point2& b, const Point2& p);

/// Parameter intervals [s0, s1] ⊂ [0, 1] of the segment a + s(b − a) lying in
/// the open interior of poly. Pieces running along the boundary are dropped.
std::vector<std::pair<double, double>> clip_segment(const Point2& a, const Point2& b,
                                                    const Polygon& poly, double tol);

/// Sutherland–Hodgman clip of an arbitrary vertex loop by a convex polygon.
/// The result may be empty or degenerate.
std::vector<Point2> clip_by_convex(const std::vector<Point2>& subject, const Polygon& convex);

/// Q_ρ^ν: square of side ρ centered at center with two faces orthogonal to ν.
struct OrientedSquare {
  Vec2 normal{0.0, 1.0};
  double side = 1.0;
  Point2 center{0.0, 0.0};

  OrientedSquare() = default;
  OrientedSquare(Vec2 normal, double side, Point2 center);

  /// Tangent τ with (τ, ν) positively oriented; τ = e₁ for ν = e₂.
  Vec2 tangent() const { return {normal.y(), -normal.x()}; }
  /// Maps local coordinates (along τ, along ν) to the plane.
  Point2 to_world(const Vec2& local) const { return center + local.x() * tangent() + local.y() * normal; }
  Vec2 to_local(const Point2& p) const {
    const Vec2 d = p - center;
    return {d.dot(tangent()), d.dot(normal)};
  }
  Polygon polygon() const;
};

/// Throws std::invalid_argument for non-unit ν (|ν| − 1 beyond 1e−12) or ρ ≤ 0.
Polygon make_oriented_square(const Vec2& normal, double side, const Point2& center);

/// Shared piece of boundary between two cells. The normal points from
/// right_cell into left_cell, and left_cell lies to the left of a → b.
struct Interface {
  Point2 a;
  Point2 b;
  int left_cell = -1;
  int right_cell = -1;
  Vec2 normal;

  double length() const { return (b - a).norm(); }
  Vec2 direction() const { return (b - a) / length(); }
  Interface flipped() const { return {b, a, right_cell, left_cell, -normal}; }
};

class PolygonalPartition {
 public:
  PolygonalPartition() = default;
  /// Extracts the interfaces by matching collinear, oppositely oriented
  /// edge overlaps; T-junctions are supported. Does not validate; see
  /// validate_partition.
  PolygonalPartition(std::vector<Polygon> cells, Polygon domain);

  const std::vector<Polygon>& cells() const { return cells_; }
  const Polygon& domain() const { return domain_; }
  const std::vector<Interface>& interfaces() const { return interfaces_; }
  std::size_t num_cells() const { return cells_.size(); }
  /// Vertex matching tolerance: 1e−9 · domain diameter.
  double tolerance() const { return tol_; }

  /// Index of the cell containing p in its interior, or -1 when p lies within
  /// tolerance of a cell boundary or outside every cell.
  int cell_containing(const Point2& p) const;
  /// Same partition with every interface's (left, right, normal) reversed.
  PolygonalPartition with_flipped_interfaces() const;

 private:
  std::vector<Polygon> cells_;
  Polygon domain_;
  std::vector<Interface> interfaces_;
  double tol_ = 0.0;
};

struct UnmatchedEdge {
  int cell = -1;
  int edge = -1;
  double uncovered_length = 0.0;
};

struct PartitionReport {
  bool ok = true;
  double area_defect = 0.0;  // |Σ cell areas − domain area| / domain area
  std::vector<UnmatchedEdge> unmatched;
  std::vector<std::pair<int, int>> overlapping;
  std::vector<int> outside_domain;
  std::size_t interface_count = 0;
  std::vector<std::string> messages;
};

PartitionReport validate_partition(const PolygonalPartition& p);

/// Ear clipping; returns size() − 2 triangles. Throws on degenerate input.
std::vector<Triangle> triangulate(const Polygon& poly);

double triangle_area(const Triangle& t);

// JSON: polygons are [[x,y],...]; partitions {"cells":[...],"domain":[...]}.
nlohmann::json to_json(const Polygon& p);
Polygon polygon_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PolygonalPartition& p);
PolygonalPartition partition_from_json(const nlohmann::json& j);

}  // namespace prlab
