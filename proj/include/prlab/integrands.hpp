#pragma once

// Surface densities f(i, j, ν) with structural metadata, and sampled checks
// of the necessary conditions for ellipticity.

#include "prlab/linalg.hpp"
#include "prlab/profiles.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace prlab {

enum class DensityClass { kSymmetricJointlyConvex, kBDElliptic, kBVEllipticOnly, kUnknown };

std::string to_string(DensityClass c);

struct DensityFlags {
  bool symmetric = true;
  bool one_homogeneous_in_nu = true;
  bool bounded = false;
  bool translational_invariant = true;
  DensityClass claimed = DensityClass::kUnknown;
};

/// f(i, j, ν) ≥ 0, extended 1-homogeneously to any nonzero ν.
/// Diagonal values f(i, i, ν) are 0 by convention.
class Density {
 public:
  using Evaluator = std::function<double(const Vec& i, const Vec& j, const Vec& nu)>;

  Density() = default;
  Density(std::string id, Evaluator f, DensityFlags flags);

  /// Throws std::domain_error on non-finite or negative output.
  double operator()(const Vec& i, const Vec& j, const Vec& nu) const;
  double operator()(const Vec2& i, const Vec2& j, const Vec2& nu) const {
    return (*this)(to_vec(i), to_vec(j), to_vec(nu));
  }

  const std::string& id() const { return id_; }
  const DensityFlags& flags() const { return flags_; }
  /// t · f, for t > 0.
  Density scaled(double t) const;

 private:
  std::string id_;
  Evaluator f_;
  DensityFlags flags_;
};

/// Increasing g on [0, ∞) with g(t)/t nonincreasing.
class SubadditiveProfile {
 public:
  enum class Kind { kConstant, kTruncated, kIdentity, kSqrt, kTable };

  static SubadditiveProfile constant(double c);
  static SubadditiveProfile truncated(double a, double M);  // min{at, M}
  static SubadditiveProfile identity();
  static SubadditiveProfile sqrt();
  /// Piecewise linear through (t_k, g_k), constant after the last node; the
  /// first node must be t = 0. Validated on a log-spaced grid.
  static SubadditiveProfile table(std::vector<std::pair<double, double>> nodes);

  double operator()(double t) const;
  Kind kind() const { return kind_; }
  bool bounded() const { return kind_ == Kind::kConstant || kind_ == Kind::kTruncated || kind_ == Kind::kTable; }
  const std::string& name() const { return name_; }

 private:
  SubadditiveProfile(Kind k, std::string name) : kind_(k), name_(std::move(name)) {}
  void validate() const;

  Kind kind_;
  std::string name_;
  double a_ = 1.0, M_ = 1.0;
  std::vector<std::pair<double, double>> nodes_;
};

/// Origin-symmetric convex polygon given by its vertices; ψ(ν) = max_q ⟨ν, q⟩.
class SupportPolytope {
 public:
  /// Throws unless the vertex set is symmetric within 1e−12 and spans the plane.
  explicit SupportPolytope(std::vector<Vec2> vertices);
  static SupportPolytope square();  // vertices (±1, 0), (0, ±1)
  static SupportPolytope regular(int n);
  /// Default anisotropic hexagon (±1, 0), (±½, ±0.8).
  static SupportPolytope default_k();

  double support(const Vec2& nu) const;
  /// Vertex attaining the support value.
  const Vec2& argmax(const Vec2& nu) const;
  const std::vector<Vec2>& vertices() const { return vertices_; }

 private:
  std::vector<Vec2> vertices_;
};

Density density_isotropic(const SubadditiveProfile& g);
/// f = θ(i, j) ψ(ν).
Density density_product(std::string id, std::function<double(const Vec&, const Vec&)> theta,
                        std::function<double(const Vec&)> psi);
/// |i − j| ψ(ν) with ψ(ν) = √(ε²ν₁² + ν₂²), so ψ(e₁) = ε and ψ(e₂) = 1.
Density density_aniso_normal(double eps);
/// ψ(i − j)|ν| with ψ(x) = √(x₁² + εx₂²).
Density density_aniso_jump(double eps);

struct DalmotOptions {
  int basis_budget = 720;
  double angular_tol = 1e-10;
};

/// Value of the single-basis DalMOT expression for the basis at angle φ.
double dalmot_basis_value(const std::vector<ScalarProfile>& theta, const Vec2& d, const Vec2& nu, double phi);
/// Planar only. Sup over bases ξ₁ = (cos φ, sin φ), ξ₂ = (−sin φ, cos φ).
Density density_dalmot(std::vector<ScalarProfile> theta, DalmotOptions opt = {});
/// Maximizing angle and value, exposed for field construction.
std::pair<double, double> dalmot_sup(const std::vector<ScalarProfile>& theta, const Vec2& d, const Vec2& nu,
                                     DalmotOptions opt = {});
/// |(i − j) ⊙ ν| in closed form.
Density density_frobenius();
Density density_normal_only(SupportPolytope k, std::string id = "normal");
/// g(i − j)|ν|; g must be even and bounded with sup g ≤ 2 inf g, checked on samples.
Density density_mild(std::function<double(const Vec&)> g, std::string id = "mild", int samples = 4096,
                     std::uint64_t seed = 1);
/// Default mild trace function g(w) = 1 + min{|w|, 1}·w₁²/|w|², range [1, 2].
double mild_default_g(const Vec& w);

struct SampleCheck {
  double max_violation = -1e300;
  std::vector<Vec> witness;  // (i, j, k, ρ) or (i, j, ρ₁, ρ₂)
  int samples = 0;
};

/// max of f(i, j, ρ) − f(i, k, ρ) − f(k, j, ρ) over samples.
SampleCheck check_subadditivity(const Density& f, int samples, std::uint64_t seed, int dim = 2);
/// max of f(i, j, (ρ₁+ρ₂)/2) − ½f(i, j, ρ₁) − ½f(i, j, ρ₂) over samples.
SampleCheck check_convexity_in_nu(const Density& f, int samples, std::uint64_t seed, int dim = 2);
/// max |f(i, j, ν) − f(j, i, −ν)| over samples.
double check_symmetry(const Density& f, int samples, std::uint64_t seed, int dim = 2);

/// Parsed "name:sub:k=v,k=v" identifier.
struct CatalogId {
  std::vector<std::string> path;
  std::map<std::string, double> params;

  static CatalogId parse(const std::string& id);
  double get(const std::string& key, double fallback) const;
  std::string head() const { return path.empty() ? std::string() : path.front(); }
};

/// Throws std::invalid_argument for unknown ids.
Density make_density(const std::string& id);
/// Ids accepted by make_density (with default parameters).
std::vector<std::string> density_catalog();

}  // namespace prlab
