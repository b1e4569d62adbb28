#include "prlab/energy.hpp"

#include "prlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace prlab {

std::vector<JumpSegment> clipped_jumps(const PiecewiseAffine& u, const Polygon& region) {
  std::vector<JumpSegment> out;
  const double tol = u.partition().tolerance();
  for (const auto& s : jump_segments(u)) {
    const auto parts = clip_segment(s.a, s.b, region, tol);
    if (parts.size() == 1 && parts[0].first == 0.0 && parts[0].second == 1.0) {
      out.push_back(s);
      continue;
    }
    for (const auto& [s0, s1] : parts) out.push_back(s.sub(s0 * s.length, s1 * s.length));
  }
  return out;
}

std::vector<double> jump_roots(const JumpSegment& s) {
  std::vector<double> roots;
  const Vec2 j0 = s.plus_value - s.minus_value;
  const Vec2 j1 = s.plus_slope - s.minus_slope;
  for (int k = 0; k < 2; ++k) {
    if (j1(k) == 0.0) continue;
    const double t = -j0(k) / j1(k);
    if (t > 0.0 && t < s.length) roots.push_back(t);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

namespace {

double total_length(const std::vector<JumpSegment>& segs) {
  double l = 0.0;
  for (const auto& s : segs) l += s.length;
  return l;
}

template <class Body>
std::vector<QuadratureResult> per_segment(const std::vector<JumpSegment>& segs, bool parallel, Body&& body) {
  std::vector<QuadratureResult> out(segs.size());
  auto run = [&](std::size_t k) { out[k] = body(segs[k]); };
  if (parallel && segs.size() > 4)
    parallel_for(segs.size(), run);
  else
    for (std::size_t k = 0; k < segs.size(); ++k) run(k);
  return out;
}

QuadratureResult sum(const std::vector<QuadratureResult>& parts) {
  QuadratureResult r;
  for (const auto& p : parts) r += p;
  return r;
}

LineQuadOptions line_options(const EnergyOptions& opt, double share) {
  LineQuadOptions l;
  l.tol = opt.tol * share;
  l.order = opt.order;
  l.max_depth = opt.max_depth;
  return l;
}

}  // namespace

std::vector<SegmentEnergy> segment_energies(const PiecewiseAffine& u, const Density& f, const Polygon& region,
                                            const EnergyOptions& opt) {
  const auto segs = clipped_jumps(u, region);
  const double total = total_length(segs);
  const auto results = per_segment(segs, opt.parallel, [&](const JumpSegment& s) {
    const Vec nu = to_vec(s.normal);
    if (s.constant_traces()) {
      QuadratureResult r;
      r.value = s.length * f(to_vec(s.plus_value), to_vec(s.minus_value), nu);
      r.segments_evaluated = 1;
      return r;
    }
    auto integrand = [&](double t) { return f(to_vec(s.trace_plus(t)), to_vec(s.trace_minus(t)), nu); };
    return adaptive_gauss_legendre(integrand, 0.0, s.length, line_options(opt, s.length / total), jump_roots(s));
  });
  std::vector<SegmentEnergy> out;
  out.reserve(segs.size());
  for (std::size_t k = 0; k < segs.size(); ++k) out.push_back({segs[k], results[k]});
  return out;
}

QuadratureResult surface_energy(const PiecewiseAffine& u, const Density& f, const Polygon& region,
                                const EnergyOptions& opt) {
  QuadratureResult r;
  for (const auto& s : segment_energies(u, f, region, opt)) r += s.result;
  return r;
}

QuadratureResult surface_energy(const PiecewiseAffine& u, const Density& f, const EnergyOptions& opt) {
  return surface_energy(u, f, u.partition().domain(), opt);
}

QuadratureResult jump_flux(const PiecewiseAffine& u, const ConservativeField& g, const Polygon& region,
                           const EnergyOptions& opt) {
  const auto segs = clipped_jumps(u, region);
  const double total = total_length(segs);
  return sum(per_segment(segs, opt.parallel, [&](const JumpSegment& s) {
    const Vec2 nu = s.normal;
    if (s.constant_traces()) {
      QuadratureResult r;
      r.value = s.length * (g(s.plus_value) - g(s.minus_value)).dot(nu);
      r.segments_evaluated = 1;
      return r;
    }
    auto integrand = [&](double t) { return (g(s.trace_plus(t)) - g(s.trace_minus(t))).dot(nu); };
    return adaptive_gauss_legendre(integrand, 0.0, s.length, line_options(opt, s.length / total), jump_roots(s));
  }));
}

QuadratureResult jump_flux(const PiecewiseAffine& u, const ConservativeField& g, const EnergyOptions& opt) {
  return jump_flux(u, g, u.partition().domain(), opt);
}

double divergence_identity_residual(const PiecewiseRigid& v, const PiecewiseRigid& u_ref, const ConservativeField& g,
                                    const EnergyOptions& opt) {
  const double margin = 10.0 * v.partition().tolerance();
  if (!compact_deviation(u_ref, v, margin))
    throw std::invalid_argument("divergence identity: deviation is not compactly contained");
  return std::abs(jump_flux(v, g, opt).value - jump_flux(u_ref, g, opt).value);
}

// ---------------------------------------------------------------------------
// Test functions

TestFunction::TestFunction(Polygon region, int power) : region_(std::move(region)), power_(power) {
  if (power_ < 2) throw std::invalid_argument("test function needs power ≥ 2 to be C¹");
  if (!region_.is_convex()) throw std::invalid_argument("test function region must be convex");
  for (std::size_t k = 0; k < region_.size(); ++k) {
    const Vec2 e = region_.next(k) - region_[k];
    const Vec2 n = perp(e) / e.norm();
    normals_.push_back(n);
    offsets_.push_back(n.dot(region_[k]));
  }
  const double c = raw(region_.centroid());
  if (!(c > 0.0)) throw std::invalid_argument("test function vanishes at the centroid");
  scale_ = 1.0 / c;
}

double TestFunction::raw(const Point2& x) const {
  double p = 1.0;
  for (std::size_t k = 0; k < normals_.size(); ++k) {
    const double l = normals_[k].dot(x) - offsets_[k];
    if (l <= 0.0) return 0.0;
    p *= std::pow(l, power_);
  }
  return p;
}

double TestFunction::operator()(const Point2& x) const { return scale_ * raw(x); }

Vec2 TestFunction::gradient(const Point2& x) const {
  const std::size_t n = normals_.size();
  std::vector<double> l(n);
  for (std::size_t k = 0; k < n; ++k) {
    l[k] = normals_[k].dot(x) - offsets_[k];
    if (l[k] <= 0.0) return Vec2::Zero();
  }
  Vec2 g = Vec2::Zero();
  for (std::size_t k = 0; k < n; ++k) {
    double others = 1.0;
    for (std::size_t m = 0; m < n; ++m)
      if (m != k) others *= std::pow(l[m], power_);
    g += power_ * std::pow(l[k], power_ - 1) * others * normals_[k];
  }
  return scale_ * g;
}

// ---------------------------------------------------------------------------
// Integration by parts

namespace {

std::vector<Triangle> clipped_triangles(const Polygon& cell, const Polygon& region) {
  std::vector<Triangle> out;
  const double scale = region.diameter();
  for (const auto& t : triangulate(cell)) {
    const auto poly = clip_by_convex({t[0], t[1], t[2]}, region);
    if (poly.size() < 3) continue;
    for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
      Triangle tri{poly[0], poly[k], poly[k + 1]};
      if (triangle_area(tri) > 1e-14 * scale * scale) out.push_back(tri);
    }
  }
  return out;
}

}  // namespace

IbpReport integration_by_parts(const PiecewiseAffine& u, const ConservativeField& G, const TestFunction& phi,
                               const IbpOptions& opt) {
  const Polygon& region = phi.region();
  const auto& part = u.partition();
  for (const auto& v : region.vertices())
    if (part.domain().locate(v, part.tolerance()) == Location::kOutside)
      throw std::invalid_argument("test function support leaves the domain");
  if (G.dim() != 2) throw std::invalid_argument("integration by parts is planar");

  IbpReport rep;
  rep.unbounded_field = !G.bounded();

  // Jump term.
  const auto segs = clipped_jumps(u, region);
  const double total = total_length(segs);
  for (const auto& s : segs) {
    LineQuadOptions lo;
    lo.tol = opt.tol * s.length / total;
    lo.order = opt.line_order;
    auto integrand = [&](double t) {
      return (G(s.trace_plus(t)) - G(s.trace_minus(t))).dot(s.normal) * phi(s.point(t));
    };
    const auto r = adaptive_gauss_legendre(integrand, 0.0, s.length, lo, jump_roots(s));
    rep.jump_term += r.value;
    rep.error_estimate += r.error_estimate;
  }

  // Volume terms, cell by cell in index order.
  const std::size_t n = part.num_cells();
  std::vector<AreaQuadResult<Vec2>> cells(n);
  parallel_for(n, [&](std::size_t k) {
    const AffinePiece& piece = u.piece(k);
    const Mat2 e = 0.5 * (piece.A + piece.A.transpose());
    auto integrand = [&](const Point2& x) -> Vec2 {
      const Vec2 y = piece(x);
      const double bulk = e.isZero(0.0) ? 0.0 : (G.jacobian(y).cwiseProduct(e)).sum() * phi(x);
      const double flux = G(y).dot(phi.gradient(x));
      return {bulk, flux};
    };
    cells[k] = adaptive_area<Vec2>(integrand, clipped_triangles(part.cells()[k], region), opt.tol, opt.area_order,
                                   opt.max_level);
  });
  for (const auto& c : cells) {
    rep.bulk_term += c.value.x();
    rep.flux_term += c.value.y();
    rep.error_estimate += c.error_estimate;
  }
  rep.residual = std::abs(rep.jump_term + rep.bulk_term + rep.flux_term);
  return rep;
}

double integration_by_parts_residual(const PiecewiseAffine& u, const ConservativeField& G, const TestFunction& phi,
                                     const IbpOptions& opt) {
  return integration_by_parts(u, G, phi, opt).residual;
}

Mat2 symmetric_jump_measure(const PiecewiseAffine& u, const Polygon& region) {
  Mat2 m = Mat2::Zero();
  for (const auto& s : clipped_jumps(u, region)) {
    const Vec2 mean = s.jump(0.5 * s.length);
    m += 0.5 * s.length * (mean * s.normal.transpose() + s.normal * mean.transpose());
  }
  return m;
}

Mat2 symmetric_jump_measure(const PiecewiseAffine& u) { return symmetric_jump_measure(u, u.partition().domain()); }

}  // namespace prlab
