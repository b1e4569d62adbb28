#pragma once

// Gauss–Legendre rules, adaptive line quadrature with breakpoints, and
// Duffy-mapped tensor rules on triangles with uniform refinement.

#include "prlab/geometry2d.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <type_traits>
#include <vector>

namespace prlab {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long segments_evaluated = 0;

  QuadratureResult& operator+=(const QuadratureResult& o) {
    value += o.value;
    error_estimate += o.error_estimate;
    segments_evaluated += o.segments_evaluated;
    return *this;
  }
};

/// n-point rule on [−1, 1]; nodes by Newton iteration on P_n. Cached.
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};
const GaussRule& gauss_legendre(int n);
/// n-point rule with both endpoints as nodes, exact to degree 2n − 3. Cached.
const GaussRule& gauss_lobatto(int n);

struct LineQuadOptions {
  double tol = 1e-10;  // absolute, for the whole interval
  int order = 15;
  int max_depth = 40;
};

/// ∫_a^b f by bisection: an interval is accepted when the sum over its halves
/// agrees with both the Gauss and the Lobatto rule on it within its share of
/// tol, or within the roundoff floor 64·ε·Σ|w f|. Breakpoints inside (a, b)
/// split the interval first.
QuadratureResult adaptive_gauss_legendre(const std::function<double(double)>& f, double a, double b,
                                         const LineQuadOptions& opt, std::vector<double> breakpoints = {});

// T{} leaves Eigen fixed-size vectors uninitialized.
template <class T>
T zero_of() {
  if constexpr (std::is_arithmetic_v<T>)
    return T(0);
  else
    return T::Zero();
}

/// Duffy map of [0, 1]² onto t with an order² tensor Gauss rule.
template <class T, class F>
T triangle_rule(const F& f, const Triangle& t, int order) {
  const GaussRule& g = gauss_legendre(order);
  const double area2 = std::abs(cross(t[1] - t[0], t[2] - t[0]));
  T sum = zero_of<T>();
  for (std::size_t a = 0; a < g.x.size(); ++a) {
    const double s = 0.5 * (g.x[a] + 1.0);
    for (std::size_t b = 0; b < g.x.size(); ++b) {
      const double r = 0.5 * (g.x[b] + 1.0);
      const Point2 p = t[0] + s * (t[1] - t[0]) + s * r * (t[2] - t[1]);
      const double w = 0.25 * g.w[a] * g.w[b] * s * area2;
      sum += w * f(p);
    }
  }
  return sum;
}

/// Midpoint subdivision into four congruent triangles.
std::vector<Triangle> refine(const std::vector<Triangle>& tris);

template <class T>
struct AreaQuadResult {
  T value = zero_of<T>();
  double error_estimate = 0.0;
  int level = 0;
};

/// Uniform refinement of a triangle list until two successive levels agree
/// within tol (estimate = their difference). T is double or a fixed Eigen vector.
template <class T, class F>
AreaQuadResult<T> adaptive_area(const F& f, std::vector<Triangle> tris, double tol, int order, int max_level = 6) {
  auto sum_level = [&](const std::vector<Triangle>& ts) {
    T s = zero_of<T>();
    for (const auto& t : ts) s += triangle_rule<T>(f, t, order);
    return s;
  };
  auto norm = [](const T& v) {
    if constexpr (std::is_arithmetic_v<T>)
      return std::abs(v);
    else
      return v.cwiseAbs().maxCoeff();
  };
  AreaQuadResult<T> out;
  if (tris.empty()) return out;
  T prev = sum_level(tris);
  for (int level = 1; level <= max_level; ++level) {
    tris = refine(tris);
    const T cur = sum_level(tris);
    const double est = norm(T(cur - prev));
    out.value = cur;
    out.error_estimate = est;
    out.level = level;
    if (est < tol) break;
    prev = cur;
  }
  return out;
}

}  // namespace prlab
