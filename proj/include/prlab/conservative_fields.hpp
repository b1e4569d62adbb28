#pragma once

// Conservative vector fields g = ∇G and the families whose pointwise
// supremum ⟨g_h(i) − g_h(j), ν⟩ represents a surface density.

#include "prlab/integrands.hpp"
#include "prlab/linalg.hpp"
#include "prlab/profiles.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace prlab {

class ConservativeField {
 public:
  using VecFn = std::function<Vec(const Vec&)>;
  using ScalarFn = std::function<double(const Vec&)>;
  using MatFn = std::function<Mat(const Vec&)>;

  ConservativeField() = default;
  /// jacobian may be empty; central differences are used then.
  ConservativeField(std::string name, int dim, VecFn g, ScalarFn potential, MatFn jacobian, bool bounded,
                    nlohmann::json params = {});

  Vec operator()(const Vec& w) const;
  Vec2 operator()(const Vec2& w) const { return to_vec2((*this)(to_vec(w))); }
  double potential(const Vec& w) const;
  double potential(const Vec2& w) const { return potential(to_vec(w)); }
  Mat jacobian(const Vec& w) const;
  Mat2 jacobian(const Vec2& w) const;
  bool has_analytic_jacobian() const { return static_cast<bool>(jac_); }

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  bool bounded() const { return bounded_; }
  /// Parameter record; field_from_json(params()) rebuilds the field.
  const nlohmann::json& params() const { return params_; }

 private:
  std::string name_;
  int dim_ = 2;
  VecFn g_;
  ScalarFn pot_;
  MatFn jac_;
  bool bounded_ = false;
  nlohmann::json params_;
};

/// Columns of basis must be orthonormal within 1e−12.
void require_orthonormal(const Mat& basis);

/// g(w) = Σ h_k(⟨w, ξ_k⟩)ξ_k, potential Σ H_k(⟨w, ξ_k⟩). Basis vectors are columns.
ConservativeField prototype_field(const Mat& basis, std::vector<ScalarProfile> h);

/// Symmetric B with an explicit orthonormal eigenbasis (columns) and eigenvalues.
struct SymmetricMap {
  Mat B;
  Mat basis;
  Vec lambda;
};

/// Symmetric B with ‖B‖ = 1 and Bu = v. For u = ±v this is ±Id. In the plane
/// B = [[cos γ, sin γ], [sin γ, −cos γ]] with γ = α + β the sum of the polar
/// angles; in higher dimension the same reflection acts on span{u, v} and B
/// vanishes on the orthogonal complement.
Mat map_unit_vectors(const Vec& u, const Vec& v);
/// Same map with its eigen decomposition.
SymmetricMap map_unit_vectors_eigen(const Vec& u, const Vec& v);
/// Eigen decomposition of an arbitrary symmetric matrix with ‖B‖ ≤ 1.
SymmetricMap symmetric_map(const Mat& B);

struct GbmcParams {
  SymmetricMap map;
  Vec mu;  // unit vector of coefficients in map.basis
  Vec c;
};

/// g(w) = Σ λ_k μ_k η_M(a(⟨w, ξ_k⟩/μ_k − c_k)) ξ_k; addends with μ_k = 0 vanish.
ConservativeField gbmc_field(const GbmcParams& p, double M, double a);
/// Parameters with ⟨g(i) − g(j), ν⟩ = min{a|i − j|, M}|ν| for every M, a.
GbmcParams optimal_gbmc_params(const Vec& i, const Vec& j, const Vec& nu);

struct DalmotParams {
  Vec p;      // |p| ≤ 1
  Vec q;
  Vec sigma;  // entries ±1
  Mat basis;  // orthonormal columns ξ_k
};

/// g(w) = Σ σ_k⟨p, ξ_k⟩θ_k(⟨w − q, ξ_k⟩)ξ_k.
ConservativeField dalmot_field(const DalmotParams& p, std::vector<ScalarProfile> theta);
/// σ_k = sign⟨ν, ξ_k⟩, q = j, p = μ/|μ| with μ = Σ θ_k(⟨i − j, ξ_k⟩)|⟨ν, ξ_k⟩|ξ_k.
DalmotParams optimal_dalmot_params(const std::vector<ScalarProfile>& theta, const Vec& i, const Vec& j,
                                   const Vec& nu, const Mat& basis);
/// Planar rotation basis ξ₁ = (cos φ, sin φ), ξ₂ = (−sin φ, cos φ).
Mat rotation_basis(double phi);

/// g(w) = θ_h(⟨w − p, q⟩)q with θ_h(y) = min{h|y|, 1}.
ConservativeField normal_only_field(const Vec2& p, const Vec2& q, double h);

struct NormalOnlyParams {
  Vec2 p, q;
  double h = 1.0;
};

/// p = j, q a point of K within eps·|ν| of the support value with
/// ⟨q, i − j⟩ ≠ 0, and h large enough that θ_h saturates.
NormalOnlyParams optimal_normal_only_params(const SupportPolytope& k, const Vec2& i, const Vec2& j,
                                            const Vec2& nu, double eps = 1e-12);

/// g(w) = Σ λ_k τ_M(⟨w, ξ_k⟩)ξ_k over the eigenpairs of Z_sym = ½(Z + Zᵀ).
ConservativeField biconvex_truncated_field(const Mat& Z, double M);

/// Rebuilds a field from its parameter record.
ConservativeField field_from_json(const nlohmann::json& j);

struct ConservativeCheck {
  double max_asymmetry = 0.0;          // max |∂_a g_b − ∂_b g_a|
  double max_potential_residual = 0.0; // max |∇G − g| by central differences
  double max_analytic_jacobian_error = 0.0;
  bool pass = false;                   // both below 1e−6 relative
};

/// Finite-difference Jacobian of an arbitrary vector field (step h).
Mat fd_jacobian(const std::function<Vec(const Vec&)>& g, const Vec& w, double h = 1e-5);
/// Max |J_ab − J_ba| of the finite-difference Jacobian at w.
double jacobian_asymmetry(const std::function<Vec(const Vec&)>& g, const Vec& w, double h = 1e-5);

/// Samples w in [−3, 3]^d; step 1e−5; thresholds 1e−6 · (1 + scale).
ConservativeCheck check_conservative(const ConservativeField& g, int samples, std::uint64_t seed);

struct FieldFamily {
  std::vector<ConservativeField> fields;
};

/// max_h ⟨g_h(i) − g_h(j), ν⟩; the lowest index wins ties. Throws on an empty family.
double sup_representation(const FieldFamily& fam, const Vec& i, const Vec& j, const Vec& nu,
                          std::size_t* argmax = nullptr);

nlohmann::json to_json(const FieldFamily& fam);
FieldFamily family_from_json(const nlohmann::json& j);

/// Fixed fields of every constructor kind, used by the identity suites.
std::vector<ConservativeField> catalog_fields();

/// Seeded random members of one kind: "gbmc", "dalmot", "normal",
/// "biconvex", "prototype". Every member is bounded.
FieldFamily random_family(const std::string& kind, int n, std::uint64_t seed);

}  // namespace prlab
