#include "prlab/geometry2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace prlab {
namespace {

struct Box {
  double x0, y0, x1, y1;
  bool overlaps(const Box& o, double tol) const {
    return x0 <= o.x1 + tol && o.x0 <= x1 + tol && y0 <= o.y1 + tol && o.y0 <= y1 + tol;
  }
};

Box bounding_box(const Polygon& p) {
  Box b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
        -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& v : p.vertices()) {
    b.x0 = std::min(b.x0, v.x());
    b.y0 = std::min(b.y0, v.y());
    b.x1 = std::max(b.x1, v.x());
    b.y1 = std::max(b.y1, v.y());
  }
  return b;
}

double loop_signed_area(const std::vector<Point2>& v) {
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) s += cross(v[k], v[(k + 1) % v.size()]);
  return 0.5 * s;
}

double loop_diameter(const std::vector<Point2>& v) {
  double d = 0.0;
  for (std::size_t a = 0; a < v.size(); ++a)
    for (std::size_t b = a + 1; b < v.size(); ++b) d = std::max(d, (v[a] - v[b]).norm());
  return d;
}

// Closed segments [a,b] and [c,d] share a point (within tol).
bool segments_touch(const Point2& a, const Point2& b, const Point2& c, const Point2& d, double tol) {
  if (segment_point_distance(a, b, c) <= tol || segment_point_distance(a, b, d) <= tol ||
      segment_point_distance(c, d, a) <= tol || segment_point_distance(c, d, b) <= tol)
    return true;
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
         d4 != 0;
}

// Proper crossing: interiors intersect in a single point away from endpoints.
bool segments_cross(const Point2& a, const Point2& b, const Point2& c, const Point2& d, double tol) {
  const double lab = (b - a).norm(), lcd = (d - c).norm();
  const double d1 = cross(b - a, c - a) / lab, d2 = cross(b - a, d - a) / lab;
  const double d3 = cross(d - c, a - c) / lcd, d4 = cross(d - c, b - c) / lcd;
  return ((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) &&
         ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol));
}

// Overlap of the collinear segment c→d with the line segment p→q, in arclength
// along p→q. Returns false unless collinear within tol.
bool collinear_overlap(const Point2& p, const Point2& q, const Point2& c, const Point2& d, double tol,
                       double& lo, double& hi, double& dir_dot) {
  const double len = (q - p).norm();
  const Vec2 u = (q - p) / len;
  if (std::abs(cross(u, c - p)) > tol || std::abs(cross(u, d - p)) > tol) return false;
  const double tc = u.dot(c - p), td = u.dot(d - p);
  lo = std::max(0.0, std::min(tc, td));
  hi = std::min(len, std::max(tc, td));
  dir_dot = u.dot(d - c);
  return hi - lo > tol;
}

double union_length(std::vector<std::pair<double, double>> iv) {
  if (iv.empty()) return 0.0;
  std::sort(iv.begin(), iv.end());
  double total = 0.0, lo = iv[0].first, hi = iv[0].second;
  for (std::size_t k = 1; k < iv.size(); ++k) {
    if (iv[k].first > hi) {
      total += hi - lo;
      lo = iv[k].first;
      hi = iv[k].second;
    } else {
      hi = std::max(hi, iv[k].second);
    }
  }
  return total + (hi - lo);
}

}  // namespace

double segment_point_distance(const Point2& a, const Point2& b, const Point2& p) {
  const Vec2 ab = b - a;
  const double l2 = ab.squaredNorm();
  if (l2 == 0.0) return (p - a).norm();
  const double s = std::clamp((p - a).dot(ab) / l2, 0.0, 1.0);
  return (a + s * ab - p).norm();
}

Polygon::Polygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  for (const auto& v : vertices_)
    if (!std::isfinite(v.x()) || !std::isfinite(v.y()))
      throw std::invalid_argument("polygon vertex is not finite");
  const double diam = loop_diameter(vertices_);
  if (!(diam > 0.0)) throw std::invalid_argument("degenerate polygon");
  const double tol = 1e-9 * diam;
  for (std::size_t k = 0; k < n; ++k) {
    if ((vertices_[k] - vertices_[(k + 1) % n]).norm() < tol)
      throw std::invalid_argument("repeated consecutive polygon vertices");
  }
  if (!(loop_signed_area(vertices_) > 1e-14 * diam * diam))
    throw std::invalid_argument("polygon is not counterclockwise or has zero area");
  for (std::size_t k = 0; k < n; ++k) {
    const Point2& prev = vertices_[(k + n - 1) % n];
    const Point2& cur = vertices_[k];
    const Point2& nxt = vertices_[(k + 1) % n];
    const Vec2 e0 = (cur - prev).normalized(), e1 = (nxt - cur).normalized();
    if (std::abs(cross(e0, e1)) < 1e-12 && e0.dot(e1) < 0.0)
      throw std::invalid_argument("polygon folds back on itself");
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 2; b < n; ++b) {
      if (a == 0 && b == n - 1) continue;
      if (segments_touch(vertices_[a], vertices_[(a + 1) % n], vertices_[b], vertices_[(b + 1) % n], tol))
        throw std::invalid_argument("polygon is not simple");
    }
  }
}

Polygon Polygon::from_any_orientation(std::vector<Point2> vertices) {
  if (vertices.size() >= 3 && loop_signed_area(vertices) < 0.0) std::reverse(vertices.begin(), vertices.end());
  return Polygon(std::move(vertices));
}

Polygon Polygon::rectangle(double x0, double y0, double x1, double y1) {
  return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

double Polygon::signed_area() const { return loop_signed_area(vertices_); }

double Polygon::perimeter() const {
  double s = 0.0;
  for (std::size_t k = 0; k < size(); ++k) s += (next(k) - vertices_[k]).norm();
  return s;
}

double Polygon::diameter() const { return loop_diameter(vertices_); }

Point2 Polygon::centroid() const {
  Point2 c(0.0, 0.0);
  for (std::size_t k = 0; k < size(); ++k) {
    const double w = cross(vertices_[k], next(k));
    c += w * (vertices_[k] + next(k));
  }
  return c / (6.0 * signed_area());
}

bool Polygon::is_convex() const {
  const double tol = 1e-12 * diameter() * diameter();
  for (std::size_t k = 0; k < size(); ++k) {
    const Point2& a = vertices_[k];
    const Point2& b = next(k);
    const Point2& c = vertices_[(k + 2) % size()];
    if (cross(b - a, c - b) < -tol) return false;
  }
  return true;
}

Location Polygon::locate(const Point2& p, double tol) const {
  bool inside = false;
  for (std::size_t k = 0; k < size(); ++k) {
    const Point2& a = vertices_[k];
    const Point2& b = next(k);
    if (segment_point_distance(a, b, p) <= tol) return Location::kBoundary;
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside ? Location::kInside : Location::kOutside;
}

double Polygon::distance_to_boundary(const Point2& p) const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < size(); ++k) d = std::min(d, segment_point_distance(vertices_[k], next(k), p));
  return d;
}

std::vector<std::pair<double, double>> clip_segment(const Point2& a, const Point2& b, const Polygon& poly,
                                                    double tol) {
  const Vec2 ab = b - a;
  const double len = ab.norm();
  std::vector<double> cuts{0.0, 1.0};
  if (len == 0.0) return {};
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Point2& c = poly[k];
    const Point2& d = poly.next(k);
    // Polygon vertices on the segment bound collinear runs.
    if (segment_point_distance(a, b, c) <= tol) cuts.push_back(std::clamp((c - a).dot(ab) / (len * len), 0.0, 1.0));
    const Vec2 cd = d - c;
    const double den = cross(ab, cd);
    if (std::abs(den) > 1e-15 * len * cd.norm()) {
      const double s = cross(c - a, cd) / den;
      const double t = cross(c - a, ab) / den;
      if (s > 0.0 && s < 1.0 && t >= 0.0 && t <= 1.0) cuts.push_back(s);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double s0 = cuts[k], s1 = cuts[k + 1];
    if ((s1 - s0) * len <= tol) continue;
    if (poly.locate(a + 0.5 * (s0 + s1) * ab, tol) != Location::kInside) continue;
    if (!out.empty() && std::abs(out.back().second - s0) * len <= tol)
      out.back().second = s1;
    else
      out.emplace_back(s0, s1);
  }
  return out;
}

std::vector<Point2> clip_by_convex(const std::vector<Point2>& subject, const Polygon& convex) {
  std::vector<Point2> out = subject;
  for (std::size_t k = 0; k < convex.size() && !out.empty(); ++k) {
    const Point2& c = convex[k];
    const Vec2 e = convex.next(k) - c;
    std::vector<Point2> in;
    in.swap(out);
    for (std::size_t m = 0; m < in.size(); ++m) {
      const Point2& p = in[m];
      const Point2& q = in[(m + 1) % in.size()];
      const double sp = cross(e, p - c), sq = cross(e, q - c);
      if (sp >= 0.0) out.push_back(p);
      if ((sp >= 0.0) != (sq >= 0.0)) out.push_back(p + (sp / (sp - sq)) * (q - p));
    }
  }
  return out;
}

OrientedSquare::OrientedSquare(Vec2 n, double s, Point2 c) : normal(std::move(n)), side(s), center(std::move(c)) {
  if (std::abs(normal.norm() - 1.0) > 1e-12) throw std::invalid_argument("square normal must be a unit vector");
  if (!(side > 0.0)) throw std::invalid_argument("square side must be positive");
}

Polygon OrientedSquare::polygon() const {
  const double h = 0.5 * side;
  return Polygon({to_world({-h, -h}), to_world({h, -h}), to_world({h, h}), to_world({-h, h})});
}

Polygon make_oriented_square(const Vec2& normal, double side, const Point2& center) {
  return OrientedSquare(normal, side, center).polygon();
}

PolygonalPartition::PolygonalPartition(std::vector<Polygon> cells, Polygon domain)
    : cells_(std::move(cells)), domain_(std::move(domain)) {
  tol_ = 1e-9 * domain_.diameter();
  std::vector<Box> boxes;
  boxes.reserve(cells_.size());
  for (const auto& c : cells_) boxes.push_back(bounding_box(c));
  for (std::size_t a = 0; a < cells_.size(); ++a) {
    for (std::size_t b = a + 1; b < cells_.size(); ++b) {
      if (!boxes[a].overlaps(boxes[b], tol_)) continue;
      const Polygon& pa = cells_[a];
      const Polygon& pb = cells_[b];
      for (std::size_t ea = 0; ea < pa.size(); ++ea) {
        const Point2& p = pa[ea];
        const Point2& q = pa.next(ea);
        const Vec2 u = (q - p).normalized();
        for (std::size_t eb = 0; eb < pb.size(); ++eb) {
          double lo = 0, hi = 0, dd = 0;
          if (!collinear_overlap(p, q, pb[eb], pb.next(eb), tol_, lo, hi, dd) || dd >= 0.0) continue;
          interfaces_.push_back({p + lo * u, p + hi * u, static_cast<int>(a), static_cast<int>(b), perp(u)});
        }
      }
    }
  }
}

int PolygonalPartition::cell_containing(const Point2& p) const {
  for (std::size_t k = 0; k < cells_.size(); ++k) {
    switch (cells_[k].locate(p, tol_)) {
      case Location::kInside:
        return static_cast<int>(k);
      case Location::kBoundary:
        return -1;
      case Location::kOutside:
        break;
    }
  }
  return -1;
}

PolygonalPartition PolygonalPartition::with_flipped_interfaces() const {
  PolygonalPartition out = *this;
  for (auto& i : out.interfaces_) i = i.flipped();
  return out;
}

PartitionReport validate_partition(const PolygonalPartition& p) {
  PartitionReport r;
  const double tol = p.tolerance();
  const auto& cells = p.cells();
  const Polygon& dom = p.domain();
  r.interface_count = p.interfaces().size();

  double sum = 0.0;
  for (const auto& c : cells) sum += c.area();
  r.area_defect = std::abs(sum - dom.area()) / dom.area();
  if (r.area_defect > 1e-9) r.messages.push_back("cell areas do not add up to the domain area");

  for (std::size_t a = 0; a < cells.size(); ++a) {
    for (const auto& v : cells[a].vertices()) {
      if (dom.locate(v, tol) == Location::kOutside) {
        r.outside_domain.push_back(static_cast<int>(a));
        r.messages.push_back("cell " + std::to_string(a) + " leaves the domain");
        break;
      }
    }
  }

  // Every edge must be covered by oppositely oriented neighbours or by the
  // domain boundary running the same way.
  for (std::size_t a = 0; a < cells.size(); ++a) {
    const Polygon& pa = cells[a];
    for (std::size_t ea = 0; ea < pa.size(); ++ea) {
      const Point2& s = pa[ea];
      const Point2& t = pa.next(ea);
      std::vector<std::pair<double, double>> cover;
      for (std::size_t b = 0; b < cells.size(); ++b) {
        if (b == a) continue;
        for (std::size_t eb = 0; eb < cells[b].size(); ++eb) {
          double lo = 0, hi = 0, dd = 0;
          if (collinear_overlap(s, t, cells[b][eb], cells[b].next(eb), tol, lo, hi, dd) && dd < 0.0)
            cover.emplace_back(lo, hi);
        }
      }
      for (std::size_t ed = 0; ed < dom.size(); ++ed) {
        double lo = 0, hi = 0, dd = 0;
        if (collinear_overlap(s, t, dom[ed], dom.next(ed), tol, lo, hi, dd) && dd > 0.0) cover.emplace_back(lo, hi);
      }
      const double gap = (t - s).norm() - union_length(cover);
      if (gap > 10.0 * tol) {
        r.unmatched.push_back({static_cast<int>(a), static_cast<int>(ea), gap});
        r.messages.push_back("cell " + std::to_string(a) + " edge " + std::to_string(ea) + " is unmatched");
      }
    }
  }

  for (std::size_t a = 0; a < cells.size(); ++a) {
    const Box ba = bounding_box(cells[a]);
    for (std::size_t b = a + 1; b < cells.size(); ++b) {
      if (!ba.overlaps(bounding_box(cells[b]), tol)) continue;
      const Polygon& pa = cells[a];
      const Polygon& pb = cells[b];
      bool overlap = false;
      for (std::size_t ea = 0; ea < pa.size() && !overlap; ++ea) {
        for (std::size_t eb = 0; eb < pb.size() && !overlap; ++eb) {
          double lo = 0, hi = 0, dd = 0;
          if (segments_cross(pa[ea], pa.next(ea), pb[eb], pb.next(eb), tol)) overlap = true;
          else if (collinear_overlap(pa[ea], pa.next(ea), pb[eb], pb.next(eb), tol, lo, hi, dd) && dd > 0.0)
            overlap = true;
        }
      }
      for (int pass = 0; pass < 2 && !overlap; ++pass) {
        const Polygon& inner = pass == 0 ? pa : pb;
        const Polygon& outer = pass == 0 ? pb : pa;
        for (const auto& tri : triangulate(inner)) {
          const Point2 c = (tri[0] + tri[1] + tri[2]) / 3.0;
          if (outer.locate(c, tol) == Location::kInside) {
            overlap = true;
            break;
          }
        }
      }
      if (overlap) {
        r.overlapping.emplace_back(static_cast<int>(a), static_cast<int>(b));
        r.messages.push_back("cells " + std::to_string(a) + " and " + std::to_string(b) + " overlap");
      }
    }
  }

  r.ok = r.area_defect <= 1e-9 && r.unmatched.empty() && r.overlapping.empty() && r.outside_domain.empty();
  return r;
}

double triangle_area(const Triangle& t) { return 0.5 * cross(t[1] - t[0], t[2] - t[0]); }

std::vector<Triangle> triangulate(const Polygon& poly) {
  std::vector<Point2> v = poly.vertices();
  const double diam = poly.diameter();
  const double eps = 1e-14 * diam * diam;
  std::vector<Triangle> out;
  out.reserve(v.size());
  while (v.size() > 3) {
    const std::size_t n = v.size();
    bool clipped = false;
    for (std::size_t k = 0; k < n && !clipped; ++k) {
      const Point2& a = v[(k + n - 1) % n];
      const Point2& b = v[k];
      const Point2& c = v[(k + 1) % n];
      if (cross(b - a, c - b) <= eps) continue;
      bool ear = true;
      for (std::size_t m = 0; m < n && ear; ++m) {
        if (m == k || m == (k + 1) % n || m == (k + n - 1) % n) continue;
        const Point2& p = v[m];
        if ((p - a).norm() < 1e-12 * diam || (p - c).norm() < 1e-12 * diam) continue;
        // Reject vertices inside or on the candidate triangle.
        if (cross(b - a, p - a) >= -eps && cross(c - b, p - b) >= -eps && cross(a - c, p - c) >= -eps) ear = false;
      }
      if (!ear) continue;
      out.push_back({a, b, c});
      v.erase(v.begin() + static_cast<std::ptrdiff_t>(k));
      clipped = true;
    }
    if (!clipped) {
      // Only flat vertices remain clippable; dropping one loses no area.
      bool dropped = false;
      for (std::size_t k = 0; k < n; ++k) {
        const Point2& a = v[(k + n - 1) % n];
        const Point2& b = v[k];
        const Point2& c = v[(k + 1) % n];
        if (std::abs(cross(b - a, c - b)) <= eps) {
          v.erase(v.begin() + static_cast<std::ptrdiff_t>(k));
          dropped = true;
          break;
        }
      }
      if (!dropped) throw std::invalid_argument("triangulate: degenerate polygon");
    }
  }
  if (std::abs(cross(v[1] - v[0], v[2] - v[1])) <= eps) {
    if (out.empty()) throw std::invalid_argument("triangulate: degenerate polygon");
  } else {
    out.push_back({v[0], v[1], v[2]});
  }
  return out;
}

nlohmann::json to_json(const Polygon& p) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& v : p.vertices()) j.push_back({v.x(), v.y()});
  return j;
}

Polygon polygon_from_json(const nlohmann::json& j) {
  std::vector<Point2> v;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) throw std::invalid_argument("polygon vertex must be [x, y]");
    v.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return Polygon(std::move(v));
}

nlohmann::json to_json(const PolygonalPartition& p) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : p.cells()) cells.push_back(to_json(c));
  return {{"cells", cells}, {"domain", to_json(p.domain())}};
}

PolygonalPartition partition_from_json(const nlohmann::json& j) {
  std::vector<Polygon> cells;
  for (const auto& c : j.at("cells")) cells.push_back(polygon_from_json(c));
  return PolygonalPartition(std::move(cells), polygon_from_json(j.at("domain")));
}

}  // namespace prlab
