#include "prlab/pr_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace prlab {

SkewMatrix::SkewMatrix(double omega) : m_(2, 2) { m_ << 0.0, omega, -omega, 0.0; }

SkewMatrix::SkewMatrix(const Mat& a) : m_(a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("skew matrix must be square");
  if (!(a.transpose() == -a)) throw std::invalid_argument("matrix is not antisymmetric");
}

double SkewMatrix::omega() const {
  if (dim() != 2) throw std::logic_error("omega is only defined in the plane");
  return m_(0, 1);
}

AffinePiece AffinePiece::rigid(double omega, const Vec2& b) {
  AffinePiece p;
  p.A << 0.0, omega, -omega, 0.0;
  p.b = b;
  return p;
}

AffinePiece AffinePiece::general(const Mat2& A, const Vec2& b) {
  if (!A.allFinite() || !b.allFinite()) throw std::invalid_argument("affine piece must be finite");
  AffinePiece p;
  p.A = A;
  p.b = b;
  return p;
}

PiecewiseAffine::PiecewiseAffine(PolygonalPartition partition, std::vector<AffinePiece> pieces)
    : partition_(std::move(partition)), pieces_(std::move(pieces)) {
  if (pieces_.size() != partition_.num_cells())
    throw std::invalid_argument("need exactly one affine piece per cell");
}

bool PiecewiseAffine::is_rigid() const {
  return std::all_of(pieces_.begin(), pieces_.end(), [](const AffinePiece& p) { return p.is_rigid(); });
}

PiecewiseRigid::PiecewiseRigid(PolygonalPartition partition, std::vector<AffinePiece> pieces)
    : PiecewiseRigid(PiecewiseAffine(std::move(partition), std::move(pieces))) {}

PiecewiseRigid::PiecewiseRigid(PiecewiseAffine f) : f_(std::move(f)) {
  if (!f_.is_rigid()) throw std::invalid_argument("piecewise rigid function has a non-skew piece");
}

EvalResult eval(const PiecewiseAffine& u, const Point2& x) {
  const auto& part = u.partition();
  if (part.domain().locate(x, part.tolerance()) == Location::kOutside)
    throw std::out_of_range("point outside the domain");
  const int k = part.cell_containing(x);
  if (k < 0) return {};
  return {u.piece(static_cast<std::size_t>(k))(x), k};
}

JumpSegment JumpSegment::sub(double t0, double t1) const {
  JumpSegment s = *this;
  s.a = point(t0);
  s.b = point(t1);
  s.length = t1 - t0;
  s.plus_value = trace_plus(t0);
  s.minus_value = trace_minus(t0);
  return s;
}

std::vector<JumpSegment> jump_segments(const PiecewiseAffine& u) {
  std::vector<JumpSegment> out;
  for (const auto& itf : u.partition().interfaces()) {
    const AffinePiece& plus = u.piece(static_cast<std::size_t>(itf.left_cell));
    const AffinePiece& minus = u.piece(static_cast<std::size_t>(itf.right_cell));
    if (plus == minus) continue;
    JumpSegment s;
    s.a = itf.a;
    s.b = itf.b;
    s.normal = itf.normal;
    s.length = itf.length();
    const Vec2 dir = itf.direction();
    s.plus_value = plus(itf.a);
    s.plus_slope = plus.A * dir;
    s.minus_value = minus(itf.a);
    s.minus_slope = minus.A * dir;
    s.plus_cell = itf.left_cell;
    s.minus_cell = itf.right_cell;
    // Distinct rigid motions can still agree along their coincidence line.
    const double scale = 1.0 + s.plus_value.norm() + s.minus_value.norm() +
                         s.length * (s.plus_slope.norm() + s.minus_slope.norm());
    const double tol = 1e-13 * scale;
    if (s.jump(0.0).norm() <= tol && s.jump(0.5 * s.length).norm() <= tol && s.jump(s.length).norm() <= tol)
      continue;
    out.push_back(s);
  }
  return out;
}

PiecewiseRigid make_elementary(const Vec2& i, const Vec2& j, const OrientedSquare& q, PlusSide side) {
  if (i == j) throw std::invalid_argument("elementary jump needs i != j");
  const double h = 0.5 * q.side;
  Polygon upper({q.to_world({-h, 0.0}), q.to_world({h, 0.0}), q.to_world({h, h}), q.to_world({-h, h})});
  Polygon lower({q.to_world({-h, -h}), q.to_world({h, -h}), q.to_world({h, 0.0}), q.to_world({-h, 0.0})});
  PolygonalPartition part({std::move(upper), std::move(lower)}, q.polygon());
  const Vec2& up = side == PlusSide::kPositive ? i : j;
  const Vec2& down = side == PlusSide::kPositive ? j : i;
  return PiecewiseRigid(std::move(part), {AffinePiece::constant(up), AffinePiece::constant(down)});
}

namespace {

bool same_domain(const Polygon& a, const Polygon& b, double tol) {
  if (std::abs(a.area() - b.area()) > tol * (a.diameter() + 1.0)) return false;
  for (const auto& v : a.vertices())
    if (b.locate(v, tol) != Location::kBoundary) return false;
  for (const auto& v : b.vertices())
    if (a.locate(v, tol) != Location::kBoundary) return false;
  return true;
}

bool agrees_on_cell(const PiecewiseAffine& u, const Polygon& cell, const AffinePiece& piece) {
  const auto& part = u.partition();
  for (const auto& tri : triangulate(cell)) {
    const Point2 c = (tri[0] + tri[1] + tri[2]) / 3.0;
    std::vector<Point2> samples{c};
    for (const auto& v : tri) samples.push_back(0.6 * c + 0.4 * v);
    for (const auto& p : samples) {
      const int k = part.cell_containing(p);
      if (k < 0) continue;
      const AffinePiece& other = u.piece(static_cast<std::size_t>(k));
      if (other == piece) continue;
      const Vec2 d = other(p) - piece(p);
      if (d.norm() > 1e-12 * (1.0 + piece(p).norm())) return false;
      // Values may coincide at a single point; compare the linear parts too.
      if (!(other.A - piece.A).isZero(1e-12)) return false;
    }
  }
  return true;
}

}  // namespace

bool compact_deviation(const PiecewiseAffine& u, const PiecewiseAffine& v, double margin) {
  const Polygon& dom = v.partition().domain();
  if (!same_domain(u.partition().domain(), dom, v.partition().tolerance()))
    throw std::invalid_argument("compact_deviation: functions live on different domains");
  const auto& cells = v.partition().cells();
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (agrees_on_cell(u, cells[k], v.piece(k))) continue;
    for (const auto& p : cells[k].vertices())
      if (dom.distance_to_boundary(p) < margin) return false;
  }
  return true;
}

Mat2 symmetrized_gradient(const PiecewiseAffine& u, std::size_t cell) {
  const Mat2& A = u.piece(cell).A;
  return 0.5 * (A + A.transpose());
}

nlohmann::json to_json(const PiecewiseAffine& u) {
  nlohmann::json pieces = nlohmann::json::array();
  for (const auto& p : u.pieces()) {
    if (p.is_rigid())
      pieces.push_back({{"omega", p.A(0, 1)}, {"b", {p.b.x(), p.b.y()}}});
    else
      pieces.push_back({{"A", {{p.A(0, 0), p.A(0, 1)}, {p.A(1, 0), p.A(1, 1)}}}, {"b", {p.b.x(), p.b.y()}}});
  }
  return {{"partition", to_json(u.partition())}, {"pieces", pieces}};
}

PiecewiseAffine function_from_json(const nlohmann::json& j) {
  PolygonalPartition part = partition_from_json(j.at("partition"));
  std::vector<AffinePiece> pieces;
  for (const auto& p : j.at("pieces")) {
    const Vec2 b(p.at("b").at(0).get<double>(), p.at("b").at(1).get<double>());
    if (p.contains("omega")) {
      pieces.push_back(AffinePiece::rigid(p.at("omega").get<double>(), b));
    } else {
      Mat2 A;
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) A(r, c) = p.at("A").at(r).at(c).get<double>();
      pieces.push_back(AffinePiece::general(A, b));
    }
  }
  return PiecewiseAffine(std::move(part), std::move(pieces));
}

}  // namespace prlab
