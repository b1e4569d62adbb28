#include "prlab/quadrature.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace prlab {

namespace {

GaussRule compute_rule(int n) {
  GaussRule r;
  r.x.resize(static_cast<std::size_t>(n));
  r.w.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < (n + 1) / 2; ++k) {
    double x = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int m = 2; m <= n; ++m) {
        const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int m = 2; m <= n; ++m) {
      const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(k), hi = static_cast<std::size_t>(n - 1 - k);
    r.x[lo] = -x;
    r.x[hi] = x;
    r.w[lo] = w;
    r.w[hi] = w;
  }
  if (n % 2 == 1) r.x[static_cast<std::size_t>(n / 2)] = 0.0;
  return r;
}

// Roots of P'_{n−1} plus the endpoints.
GaussRule compute_lobatto(int n) {
  GaussRule r;
  r.x.assign(static_cast<std::size_t>(n), 0.0);
  r.w.assign(static_cast<std::size_t>(n), 0.0);
  const int m = n - 1;
  auto legendre = [m](double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= m; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    p = p1;
    dp = m * (x * p1 - p0) / (x * x - 1.0);
  };
  r.x[0] = -1.0;
  r.x[static_cast<std::size_t>(m)] = 1.0;
  for (int k = 1; k < m; ++k) {
    double x = -std::cos(std::numbers::pi * k / m);
    for (int it = 0; it < 100; ++it) {
      double p, dp;
      legendre(x, p, dp);
      const double d2p = (2.0 * x * dp - m * (m + 1.0) * p) / (1.0 - x * x);
      const double dx = dp / d2p;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.x[static_cast<std::size_t>(k)] = x;
  }
  for (int k = 0; k <= m; ++k) {
    double p = 1.0, dp;
    if (k > 0 && k < m)
      legendre(r.x[static_cast<std::size_t>(k)], p, dp);
    r.w[static_cast<std::size_t>(k)] = 2.0 / (m * (m + 1.0) * p * p);
  }
  return r;
}

}  // namespace

const GaussRule& gauss_lobatto(int n) {
  if (n < 3 || n > 200) throw std::invalid_argument("Gauss–Lobatto order must be in 3..200");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(compute_lobatto(n));
  return *slot;
}

const GaussRule& gauss_legendre(int n) {
  if (n < 1 || n > 200) throw std::invalid_argument("Gauss–Legendre order must be in 1..200");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(compute_rule(n));
  return *slot;
}

namespace {

struct Panel {
  double value;
  double abs_sum;  // Σ|w f|, for the roundoff floor
};

Panel apply(const std::function<double(double)>& f, double a, double b, const GaussRule& g) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  Panel p{0.0, 0.0};
  for (std::size_t k = 0; k < g.x.size(); ++k) {
    const double v = g.w[k] * f(c + h * g.x[k]);
    p.value += v;
    p.abs_sum += std::abs(v);
  }
  p.value *= h;
  p.abs_sum *= std::abs(h);
  return p;
}

void bisect(const std::function<double(double)>& f, double a, double b, double tol, const Panel& whole,
            const GaussRule& g, const GaussRule& lob, int depth, int max_depth, QuadratureResult& out) {
  const double m = 0.5 * (a + b);
  const Panel l = apply(f, a, m, g), r = apply(f, m, b, g);
  const double halves = l.value + r.value;
  // Open rules cannot see a kink lying closer to a panel end than the first
  // node; the Lobatto rule samples the ends.
  const double err = std::max(std::abs(halves - whole.value), std::abs(halves - apply(f, a, b, lob).value));
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * (l.abs_sum + r.abs_sum);
  if (err <= std::max(tol, floor) || depth >= max_depth) {
    out.value += halves;
    out.error_estimate += err;
    out.segments_evaluated += 2;
    return;
  }
  bisect(f, a, m, 0.5 * tol, l, g, lob, depth + 1, max_depth, out);
  bisect(f, m, b, 0.5 * tol, r, g, lob, depth + 1, max_depth, out);
}

}  // namespace

QuadratureResult adaptive_gauss_legendre(const std::function<double(double)>& f, double a, double b,
                                         const LineQuadOptions& opt, std::vector<double> breakpoints) {
  QuadratureResult out;
  if (!(b > a)) return out;
  const GaussRule& g = gauss_legendre(opt.order);
  const GaussRule& lob = gauss_lobatto(std::max(opt.order, 3));
  std::vector<double> pts{a};
  std::sort(breakpoints.begin(), breakpoints.end());
  const double gap = 1e-14 * (b - a);
  for (double t : breakpoints)
    if (t > a + gap && t < b - gap && t > pts.back() + gap) pts.push_back(t);
  pts.push_back(b);
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double lo = pts[k], hi = pts[k + 1];
    const double tol = opt.tol * (hi - lo) / (b - a);
    bisect(f, lo, hi, tol, apply(f, lo, hi, g), g, lob, 0, opt.max_depth, out);
  }
  return out;
}

std::vector<Triangle> refine(const std::vector<Triangle>& tris) {
  std::vector<Triangle> out;
  out.reserve(4 * tris.size());
  for (const auto& t : tris) {
    const Point2 m01 = 0.5 * (t[0] + t[1]), m12 = 0.5 * (t[1] + t[2]), m20 = 0.5 * (t[2] + t[0]);
    out.push_back({t[0], m01, m20});
    out.push_back({m01, t[1], m12});
    out.push_back({m20, m12, t[2]});
    out.push_back({m01, m12, m20});
  }
  return out;
}

}  // namespace prlab
