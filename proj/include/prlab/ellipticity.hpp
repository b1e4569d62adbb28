#pragma once

// Competitors for the BD-ellipticity inequality: the two explicit
// counterexample configurations, the tiling construction, parametrized
// competitor families, and a derivative-free falsifier built on them.

#include "prlab/energy.hpp"
#include "prlab/integrands.hpp"
#include "prlab/pr_core.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace prlab {

/// Jump anisotropy in the normal: Q₆ with the rigid insert on Q₂,
/// i = (0, 0) below and j = (2λ, 2λ) above the chord {x₂ = 0}.
PiecewiseRigid counterexample1_competitor(double lambda);
/// Jump anisotropy in the trace: the insert lives on R_δ = (−1, 1) × (−δ, δ),
/// δ = ε^{1/4}. Throws unless 0 < ε < 1.
PiecewiseRigid counterexample2_competitor(double lambda, double eps);
/// The elementary jump both counterexamples deviate from (i below the chord).
PiecewiseRigid counterexample_reference(double lambda);

/// Polygons of the two U-shaped cells around the rectangular hole
/// [−a, a] × [−b, b] in the square [−H, H]², in local coordinates of q
/// scaled by `scale` (upper cell first).
std::pair<Polygon, Polygon> u_cells(const OrientedSquare& q, double scale, double H, double a, double b);

struct Tiling {
  PiecewiseRigid u;              // on the doubled square
  OrientedSquare big;            // Q_{2ρ}
  OrientedSquare unit;           // Q_ρ, the square of v
  std::vector<Polygon> tiles;    // the h tiles of side ρ/h
  int h = 1;
};

/// u_h equal to the elementary jump outside the strip {0 < ⟨x − c, ν⟩ < ρ/h}
/// of the central column, with h copies x ↦ v(c + h(x − x_n)) in the strip.
/// v must live on `square` and agree with u_{i,j,ν} (i on the +ν side) near
/// its boundary. Throws for h < 1.
Tiling tile_construction(const PiecewiseRigid& v, const OrientedSquare& square, int h);

struct TilingEnergy {
  double interior = 0.0;  // inside the open tiles
  double boundary = 0.0;  // on tile and column boundaries
  double outside = 0.0;   // lateral columns
  double total = 0.0;
  double error_estimate = 0.0;
};

TilingEnergy tiling_energy(const Tiling& t, const Density& f, const EnergyOptions& opt = {});

/// Reference configuration u_{i,j,ν} on a square: value `plus` on the +ν side.
struct ReferenceJump {
  Vec2 plus;
  Vec2 minus;
  OrientedSquare square;

  PiecewiseRigid function() const;
};

/// Parametrized competitors authored on the unit square in the local frame
/// (τ, ν) and mapped onto the reference square, so normalized energies are
/// scale free. Parameters live in a box; optimizers work in [0, 1]^n.
class CompetitorFamily {
 public:
  virtual ~CompetitorFamily() = default;
  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  virtual std::vector<double> lower() const = 0;
  virtual std::vector<double> upper() const = 0;
  /// Parameters reproducing the explicit construction of the family.
  virtual std::vector<double> nominal() const = 0;
  /// Throws std::invalid_argument for parameters outside the box.
  virtual PiecewiseRigid generate(const std::vector<double>& params, const ReferenceJump& ref) const = 0;
};

using FamilyPtr = std::shared_ptr<const CompetitorFamily>;

/// (a) rigid insert on a centered square: (side, δω, δb₁, δb₂).
FamilyPtr family_square_insert();
/// (b) rigid insert on a flat rectangle: (width, log₁₀ height, δω, δb₁, δb₂).
FamilyPtr family_rect_insert();
/// (c) 2×2 checkerboard of constants on Q_{1/3}: eight values.
FamilyPtr family_checkerboard();
/// (d) two nested squares with their own rigid motions.
FamilyPtr family_nested_squares();
std::vector<FamilyPtr> builtin_families();
/// Throws for unknown names.
FamilyPtr family_by_name(const std::string& name);

enum class VerdictStatus { kViolation, kNoViolationWithinBudget };
std::string to_string(VerdictStatus s);

struct FalsifyOptions {
  long budget = 2000;  // objective evaluations per family
  int restarts = 8;    // Latin-hypercube starts besides the nominal one
  std::uint64_t seed = 1;
  double search_tol = 1e-9;  // absolute quadrature tolerance, normalized units
  double certify_tol = 1e-11;
  PlusSide side = PlusSide::kPositive;
  double square_side = 1.0;
  bool parallel = true;
};

struct FamilyOutcome {
  std::string family;
  double best = 0.0;  // normalized energy
  std::vector<double> params;
  long evaluations = 0;
  bool certified = false;
  int restart = -1;
};

struct EllipticityVerdict {
  VerdictStatus status = VerdictStatus::kNoViolationWithinBudget;
  double reference = 0.0;       // f(i, j, ν), normalized
  double best = 0.0;            // best normalized competitor energy
  double margin = 0.0;          // reference − best
  double error_estimate = 0.0;  // normalized, of the best energy
  double energy_default = 0.0;  // certificate: unnormalized, default order
  double energy_doubled = 0.0;  // certificate: unnormalized, doubled order
  std::string family;
  std::vector<double> params;
  PiecewiseRigid competitor;
  long evaluations = 0;
  std::vector<FamilyOutcome> families;
};

/// Nelder–Mead per family from the nominal start and `restarts` seeded
/// Latin-hypercube starts. VIOLATION iff best < f − 10·err and the default and
/// doubled-order energies of the best competitor agree within 1e−9·max(1, |E|).
EllipticityVerdict falsify(const Density& f, const Vec2& i, const Vec2& j, const Vec2& nu,
                           const std::vector<FamilyPtr>& families, const FalsifyOptions& opt);

struct RelaxationEstimate {
  double value = 0.0;  // min(f, certified competitor energy)
  EllipticityVerdict verdict;
};

RelaxationEstimate relaxation_estimate(const Density& f, const Vec2& i, const Vec2& j, const Vec2& nu,
                                       const std::vector<FamilyPtr>& families, const FalsifyOptions& opt);

struct BvNecessaryReport {
  SampleCheck subadditivity;
  SampleCheck convexity;
  bool necessary_pass = false;
  bool falsified = false;
  std::string label;
};

/// Sampled subadditivity and ν-convexity plus a falsification run on the
/// canonical triple i = (0, 0), j = (2, 2), ν = e₂.
BvNecessaryReport bv_necessary_report(const Density& f, int samples, std::uint64_t seed,
                                      const FalsifyOptions& opt = {});

nlohmann::json to_json(const EllipticityVerdict& v);

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  long evaluations = 0;
};

/// Minimizes over the unit box (points are clamped) with at most max_evals calls.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             double step, long max_evals);

}  // namespace prlab
