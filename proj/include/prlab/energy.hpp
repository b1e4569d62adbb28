#pragma once

// Surface energies along polygonal jump sets, jump fluxes of conservative
// fields, and residuals of the divergence and integration-by-parts identities.

#include "prlab/conservative_fields.hpp"
#include "prlab/integrands.hpp"
#include "prlab/pr_core.hpp"
#include "prlab/quadrature.hpp"

#include <vector>

namespace prlab {

struct EnergyOptions {
  double tol = 1e-10;  // absolute, for the whole jump set
  int order = 15;
  int max_depth = 40;
  bool parallel = true;

  /// Same tolerance, twice the Gauss order.
  EnergyOptions doubled() const {
    EnergyOptions o = *this;
    o.order *= 2;
    return o;
  }
};

/// Part of one jump segment inside a region.
struct SegmentEnergy {
  JumpSegment segment;  // already restricted to the region
  QuadratureResult result;
};

/// Jump segments of u clipped to the open region (pieces on ∂region dropped).
std::vector<JumpSegment> clipped_jumps(const PiecewiseAffine& u, const Polygon& region);
/// Arclength roots in (0, L) of each component of the affine jump.
std::vector<double> jump_roots(const JumpSegment& s);

std::vector<SegmentEnergy> segment_energies(const PiecewiseAffine& u, const Density& f, const Polygon& region,
                                            const EnergyOptions& opt = {});
/// ∫_{J_u ∩ region} f(u⁺, u⁻, ν_u) dH¹. Constant traces use L · f exactly.
QuadratureResult surface_energy(const PiecewiseAffine& u, const Density& f, const Polygon& region,
                                const EnergyOptions& opt = {});
QuadratureResult surface_energy(const PiecewiseAffine& u, const Density& f, const EnergyOptions& opt = {});

/// ∫_{J_u ∩ region} ⟨g(u⁺) − g(u⁻), ν_u⟩ dH¹.
QuadratureResult jump_flux(const PiecewiseAffine& u, const ConservativeField& g, const Polygon& region,
                           const EnergyOptions& opt = {});
QuadratureResult jump_flux(const PiecewiseAffine& u, const ConservativeField& g, const EnergyOptions& opt = {});

/// |flux(v) − flux(u_ref)| over the square. Throws unless v deviates from
/// u_ref only on cells away from the boundary.
double divergence_identity_residual(const PiecewiseRigid& v, const PiecewiseRigid& u_ref,
                                    const ConservativeField& g, const EnergyOptions& opt = {});

/// φ(x) = c · Π_k ℓ_k(x)^p over a convex region, ℓ_k the inward distance to
/// the k-th edge line; φ and ∇φ vanish on the boundary for p ≥ 2.
class TestFunction {
 public:
  /// c normalizes φ(centroid) = 1.
  explicit TestFunction(Polygon region, int power = 2);

  double operator()(const Point2& x) const;
  Vec2 gradient(const Point2& x) const;
  const Polygon& region() const { return region_; }
  int power() const { return power_; }

 private:
  double raw(const Point2& x) const;
  Polygon region_;
  int power_;
  std::vector<Vec2> normals_;  // inward unit normals
  std::vector<double> offsets_;
  double scale_ = 1.0;
};

struct IbpOptions {
  double tol = 1e-9;   // absolute, per volume term and for the jump term
  int line_order = 15;
  int area_order = 8;
  int max_level = 6;

  IbpOptions doubled() const {
    IbpOptions o = *this;
    o.line_order *= 2;
    o.area_order *= 2;
    return o;
  }
};

struct IbpReport {
  double jump_term = 0.0;  // ∫_J ⟨G(u⁺) − G(u⁻), ν⟩ φ
  double bulk_term = 0.0;  // ∫ (∇G(u) : e(u)) φ
  double flux_term = 0.0;  // ∫ ⟨G(u), ∇φ⟩
  double residual = 0.0;   // |jump + bulk + flux|
  double error_estimate = 0.0;
  bool unbounded_field = false;  // outside the bounded-field hypothesis
};

/// Three-term identity on region = φ.region(). Throws unless the region lies
/// inside the domain of u.
IbpReport integration_by_parts(const PiecewiseAffine& u, const ConservativeField& G, const TestFunction& phi,
                               const IbpOptions& opt = {});
double integration_by_parts_residual(const PiecewiseAffine& u, const ConservativeField& G, const TestFunction& phi,
                                     const IbpOptions& opt = {});

/// ∫_{J_u ∩ region} [u] ⊙ ν_u dH¹, exact (the integrand is affine).
Mat2 symmetric_jump_measure(const PiecewiseAffine& u, const Polygon& region);
Mat2 symmetric_jump_measure(const PiecewiseAffine& u);

}  // namespace prlab
