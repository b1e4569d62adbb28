#pragma once

// Small dense algebra shared by every module. Values of piecewise rigid
// functions live in R^d; the plane geometry is fixed to d = 2, but densities
// and conservative fields accept any d up to kMaxDim without heap traffic.

#include <Eigen/Dense>

#include <cmath>
#include <initializer_list>

namespace prlab {

inline constexpr int kMaxDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline Vec make_vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v(k++) = x;
  return v;
}

inline Vec to_vec(const Vec2& p) {
  Vec v(2);
  v << p.x(), p.y();
  return v;
}

inline Vec2 to_vec2(const Vec& v) { return {v(0), v(1)}; }

/// a ⊙ b = ½(a⊗b + b⊗a)
inline Mat sym_product(const Vec& a, const Vec& b) {
  Mat m = 0.5 * (a * b.transpose() + b * a.transpose());
  return m;
}

/// |a ⊙ b|_F via |a⊙b|² = ½(|a|²|b|² + ⟨a,b⟩²).
inline double sym_product_norm(const Vec& a, const Vec& b) {
  const double ab = a.dot(b);
  return std::sqrt(0.5 * (a.squaredNorm() * b.squaredNorm() + ab * ab));
}

inline Mat sym_part(const Mat& a) { return 0.5 * (a + a.transpose()); }

/// Largest singular value.
inline double operator_norm(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

/// Counterclockwise quarter turn: (x, y) ↦ (−y, x).
inline Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

inline double sign(double t) { return (t > 0.0) - (t < 0.0); }

}  // namespace prlab
