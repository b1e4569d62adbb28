#include "prlab/profiles.hpp"

#include "prlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace prlab {

namespace {

void require_positive(double M, const char* what) {
  if (!(M > 0.0) || !std::isfinite(M)) throw std::invalid_argument(std::string(what) + " must be positive");
}

std::string tag(const std::string& kind, double param) {
  std::ostringstream os;
  os << kind << ':' << param;
  return os.str();
}

double unit_sign(double t) { return t >= 0.0 ? 1.0 : -1.0; }

}  // namespace

double eta(double M, double t) { return std::min(std::abs(t), M); }

double big_theta(double M, double t) {
  const double a = std::abs(t);
  const double mag = a <= M ? 0.5 * a * a : M * a - 0.5 * M * M;
  return sign(t) * mag;
}

ScalarProfile zero_profile() {
  auto z = [](double) { return 0.0; };
  return {"zero", "zero", 0.0, z, z, z, true};
}

ScalarProfile abs_profile() {
  return {"abs", "abs", 0.0, [](double t) { return std::abs(t); }, [](double t) { return 0.5 * t * std::abs(t); },
          unit_sign, false};
}

ScalarProfile eta_profile(double M) {
  require_positive(M, "truncation level M");
  return {tag("eta", M), "eta", M, [M](double t) { return eta(M, t); }, [M](double t) { return big_theta(M, t); },
          [M](double t) { return std::abs(t) < M ? unit_sign(t) : 0.0; }, true};
}

ScalarProfile clamp_profile(double M) {
  require_positive(M, "truncation level M");
  return {tag("clamp", M), "clamp", M, [M](double t) { return std::clamp(t, -M, M); },
          [M](double t) {
            const double a = std::abs(t);
            return a <= M ? 0.5 * t * t : M * a - 0.5 * M * M;
          },
          [M](double t) { return std::abs(t) < M ? 1.0 : 0.0; }, true};
}

ScalarProfile theta_h_profile(double h) {
  require_positive(h, "slope h");
  // min{h|t|, 1} = η₁(ht)
  return {tag("theta_h", h), "theta_h", h, [h](double t) { return eta(1.0, h * t); },
          [h](double t) { return big_theta(1.0, h * t) / h; },
          [h](double t) { return std::abs(h * t) < 1.0 ? h * unit_sign(t) : 0.0; }, true};
}

ScalarProfile sin_profile(double k) {
  require_positive(k, "frequency");
  return {tag("sin", k), "sin", k, [k](double t) { return std::sin(k * t); },
          [k](double t) { return (1.0 - std::cos(k * t)) / k; }, [k](double t) { return k * std::cos(k * t); }, true};
}

ScalarProfile tanh_profile(double k) {
  require_positive(k, "steepness");
  return {tag("tanh", k), "tanh", k, [k](double t) { return std::tanh(k * t); },
          [k](double t) {
            const double a = std::abs(k * t);
            return (a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0)) / k;
          },
          [k](double t) {
            const double c = std::cosh(k * t);
            return k / (c * c);
          },
          true};
}

ScalarProfile linear_profile(double c) {
  return {tag("linear", c), "linear", c, [c](double t) { return c * t; }, [c](double t) { return 0.5 * c * t * t; },
          [c](double) { return c; }, c == 0.0};
}

ScalarProfile scaled(const ScalarProfile& h, double s) {
  return {tag(h.name + "*", s), "", 0.0, [h, s](double t) { return s * h.value(t); },
          [h, s](double t) { return s * h.primitive(t); }, [h, s](double t) { return s * h.derivative(t); },
          h.bounded};
}

ScalarProfile profile_from_kind(const std::string& kind, double param) {
  if (kind == "zero") return zero_profile();
  if (kind == "abs") return abs_profile();
  if (kind == "eta") return eta_profile(param);
  if (kind == "clamp") return clamp_profile(param);
  if (kind == "theta_h") return theta_h_profile(param);
  if (kind == "sin") return sin_profile(param);
  if (kind == "tanh") return tanh_profile(param);
  if (kind == "linear") return linear_profile(param);
  throw std::invalid_argument("unknown profile kind '" + kind + "'");
}

}  // namespace prlab
