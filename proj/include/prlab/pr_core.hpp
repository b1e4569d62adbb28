#pragma once

// Piecewise rigid and piecewise affine functions on polygonal partitions.

#include "prlab/geometry2d.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <vector>

namespace prlab {

/// Antisymmetric matrix. In the plane a single scalar ω encodes
/// Q = ω(e₁⊗e₂ − e₂⊗e₁); in general dimension the full array is stored.
class SkewMatrix {
 public:
  explicit SkewMatrix(double omega);
  /// Throws unless a is exactly antisymmetric.
  explicit SkewMatrix(const Mat& a);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }
  /// Planar rotation rate; throws for d ≠ 2.
  double omega() const;

 private:
  Mat m_;
};

/// x ↦ A x + b on one cell.
struct AffinePiece {
  Mat2 A = Mat2::Zero();
  Vec2 b = Vec2::Zero();

  static AffinePiece rigid(double omega, const Vec2& b);
  static AffinePiece constant(const Vec2& b) { return rigid(0.0, b); }
  static AffinePiece general(const Mat2& A, const Vec2& b);

  /// A antisymmetric, exactly.
  bool is_rigid() const { return A(0, 0) == 0.0 && A(1, 1) == 0.0 && A(0, 1) == -A(1, 0); }
  Vec2 operator()(const Point2& x) const { return A * x + b; }
  bool operator==(const AffinePiece& o) const { return A == o.A && b == o.b; }
};

/// One affine piece per cell of a polygonal partition.
class PiecewiseAffine {
 public:
  PiecewiseAffine() = default;
  PiecewiseAffine(PolygonalPartition partition, std::vector<AffinePiece> pieces);

  const PolygonalPartition& partition() const { return partition_; }
  const std::vector<AffinePiece>& pieces() const { return pieces_; }
  const AffinePiece& piece(std::size_t cell) const { return pieces_.at(cell); }
  bool is_rigid() const;

 private:
  PolygonalPartition partition_;
  std::vector<AffinePiece> pieces_;
};

/// Piecewise affine function whose pieces are all infinitesimal rigid motions.
class PiecewiseRigid {
 public:
  PiecewiseRigid() = default;
  PiecewiseRigid(PolygonalPartition partition, std::vector<AffinePiece> pieces);
  explicit PiecewiseRigid(PiecewiseAffine f);

  const PiecewiseAffine& affine() const { return f_; }
  operator const PiecewiseAffine&() const { return f_; }
  const PolygonalPartition& partition() const { return f_.partition(); }
  const std::vector<AffinePiece>& pieces() const { return f_.pieces(); }
  const AffinePiece& piece(std::size_t cell) const { return f_.piece(cell); }

 private:
  PiecewiseAffine f_;
};

struct EvalResult {
  std::optional<Vec2> value;  // empty when x lies on an interface
  int cell = -1;
  bool on_interface() const { return !value.has_value(); }
};

/// Throws std::out_of_range when x is outside the domain.
EvalResult eval(const PiecewiseAffine& u, const Point2& x);

/// Jump piece with affine traces in arclength t ∈ [0, L]:
/// trace(t) = value + t · slope. The normal points towards the plus side.
struct JumpSegment {
  Point2 a;
  Point2 b;
  Vec2 normal;
  double length = 0.0;
  Vec2 plus_value, plus_slope;
  Vec2 minus_value, minus_slope;
  int plus_cell = -1;
  int minus_cell = -1;

  Point2 point(double t) const { return a + (t / length) * (b - a); }
  Vec2 trace_plus(double t) const { return plus_value + t * plus_slope; }
  Vec2 trace_minus(double t) const { return minus_value + t * minus_slope; }
  Vec2 jump(double t) const { return trace_plus(t) - trace_minus(t); }
  bool constant_traces() const { return plus_slope.isZero(0.0) && minus_slope.isZero(0.0); }
  /// Restriction to the arclength window [t0, t1].
  JumpSegment sub(double t0, double t1) const;
};

/// One segment per interface across which the adjacent pieces differ.
/// Identical parameters drop the interface; otherwise the traces are compared
/// at both endpoints and the midpoint to catch coincidence lines.
std::vector<JumpSegment> jump_segments(const PiecewiseAffine& u);

enum class PlusSide {
  kPositive,  // first value on {⟨x − c, ν⟩ > 0}
  kNegative,  // first value on {⟨x − c, ν⟩ < 0}
};

/// Elementary jump u_{i,j,ν} on the square, split by the diameter orthogonal
/// to ν. Cell 0 is always the +ν half, so the interface normal equals ν.
PiecewiseRigid make_elementary(const Vec2& i, const Vec2& j, const OrientedSquare& square,
                               PlusSide side = PlusSide::kPositive);

/// True iff every cell of v on which v differs from u stays at distance ≥
/// margin from the domain boundary. Throws if the domains differ.
bool compact_deviation(const PiecewiseAffine& u, const PiecewiseAffine& v, double margin);

/// e(u) = ½(A + Aᵀ) on the given cell.
Mat2 symmetrized_gradient(const PiecewiseAffine& u, std::size_t cell);

nlohmann::json to_json(const PiecewiseAffine& u);
PiecewiseAffine function_from_json(const nlohmann::json& j);

}  // namespace prlab
