#pragma once

// Scalar profiles t ↦ h(t) with an analytic primitive and derivative. They
// feed the prototype fields h_k(⟨w, ξ_k⟩)ξ_k and the DalMOT densities.

#include <functional>
#include <string>

namespace prlab {

struct ScalarProfile {
  std::string name;
  std::string kind;    // constructor tag, used for serialization
  double param = 0.0;  // the constructor's single parameter
  std::function<double(double)> value;
  std::function<double(double)> primitive;   // H with H' = value, H(0) = 0
  std::function<double(double)> derivative;  // one-sided at kinks
  bool bounded = false;

  double operator()(double t) const { return value(t); }
};

/// η_M(t) = min{|t|, M}.
double eta(double M, double t);
/// Odd primitive of η_M: sign(t)t²/2 for |t| ≤ M, sign(t)(M|t| − M²/2) beyond.
double big_theta(double M, double t);

ScalarProfile zero_profile();
ScalarProfile abs_profile();                // |t|, unbounded
ScalarProfile eta_profile(double M);        // min{|t|, M}
ScalarProfile clamp_profile(double M);      // τ_M(t) = max(−M, min(t, M))
ScalarProfile theta_h_profile(double h);    // min{h|t|, 1}
ScalarProfile sin_profile(double k = 1.0);  // sin(kt)
ScalarProfile tanh_profile(double k = 1.0);
ScalarProfile linear_profile(double c);     // ct, unbounded
/// s · h(t) with the primitive and derivative scaled alike. Not serializable.
ScalarProfile scaled(const ScalarProfile& h, double s);
/// Inverse of (kind, param); throws std::invalid_argument for unknown kinds.
ScalarProfile profile_from_kind(const std::string& kind, double param);

}  // namespace prlab
