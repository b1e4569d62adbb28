#include "prlab/conservative_fields.hpp"

#include "prlab/json_util.hpp"
#include "prlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace prlab {

using nlohmann::json;

ConservativeField::ConservativeField(std::string name, int dim, VecFn g, ScalarFn potential, MatFn jacobian,
                                     bool bounded, json params)
    : name_(std::move(name)),
      dim_(dim),
      g_(std::move(g)),
      pot_(std::move(potential)),
      jac_(std::move(jacobian)),
      bounded_(bounded),
      params_(std::move(params)) {
  if (dim_ < 1 || dim_ > kMaxDim) throw std::invalid_argument("field dimension out of range");
  if (!g_ || !pot_) throw std::invalid_argument("field needs an evaluator and a potential");
}

namespace {
void check_dim(const Vec& w, int dim) {
  if (w.size() != dim) throw std::invalid_argument("field evaluated with a vector of the wrong dimension");
}
}  // namespace

Vec ConservativeField::operator()(const Vec& w) const {
  check_dim(w, dim_);
  return g_(w);
}

double ConservativeField::potential(const Vec& w) const {
  check_dim(w, dim_);
  return pot_(w);
}

Mat ConservativeField::jacobian(const Vec& w) const {
  check_dim(w, dim_);
  if (jac_) return jac_(w);
  return fd_jacobian(g_, w);
}

Mat2 ConservativeField::jacobian(const Vec2& w) const {
  const Mat m = jacobian(to_vec(w));
  Mat2 out;
  out << m(0, 0), m(0, 1), m(1, 0), m(1, 1);
  return out;
}

void require_orthonormal(const Mat& basis) {
  if (basis.rows() != basis.cols()) throw std::invalid_argument("basis must be square");
  const Mat gram = basis.transpose() * basis;
  const Mat id = Mat::Identity(basis.rows(), basis.cols());
  if ((gram - id).cwiseAbs().maxCoeff() > 1e-12) throw std::invalid_argument("basis is not orthonormal");
}

namespace {

json profiles_to_json(const std::vector<ScalarProfile>& h) {
  json out = json::array();
  for (const auto& p : h) out.push_back({{"kind", p.kind}, {"param", p.param}});
  return out;
}

std::vector<ScalarProfile> profiles_from_json(const json& j) {
  std::vector<ScalarProfile> out;
  for (const auto& p : j) out.push_back(profile_from_kind(p.at("kind").get<std::string>(), p.value("param", 0.0)));
  return out;
}

/// Σ_k s_k · h_k(⟨w − q, ξ_k⟩)ξ_k and its potential / Jacobian; the common
/// shape of every field in this module.
struct Separable {
  Mat basis;
  Vec coef;
  Vec shift;  // q
  std::vector<ScalarProfile> h;

  Vec value(const Vec& w) const {
    Vec out = Vec::Zero(w.size());
    const Vec x = basis.transpose() * (w - shift);
    for (int k = 0; k < basis.cols(); ++k)
      if (coef(k) != 0.0) out += coef(k) * h[static_cast<std::size_t>(k)](x(k)) * basis.col(k);
    return out;
  }
  double potential(const Vec& w) const {
    const Vec x = basis.transpose() * (w - shift);
    double out = 0.0;
    for (int k = 0; k < basis.cols(); ++k)
      if (coef(k) != 0.0) out += coef(k) * h[static_cast<std::size_t>(k)].primitive(x(k));
    return out;
  }
  Mat jacobian(const Vec& w) const {
    Mat out = Mat::Zero(w.size(), w.size());
    const Vec x = basis.transpose() * (w - shift);
    for (int k = 0; k < basis.cols(); ++k)
      if (coef(k) != 0.0)
        out += coef(k) * h[static_cast<std::size_t>(k)].derivative(x(k)) * basis.col(k) * basis.col(k).transpose();
    return out;
  }
};

ConservativeField make_separable(std::string name, Separable s, bool bounded, json params) {
  const int d = static_cast<int>(s.basis.rows());
  auto sp = std::make_shared<const Separable>(std::move(s));
  return ConservativeField(
      std::move(name), d, [sp](const Vec& w) { return sp->value(w); },
      [sp](const Vec& w) { return sp->potential(w); }, [sp](const Vec& w) { return sp->jacobian(w); }, bounded,
      std::move(params));
}

}  // namespace

ConservativeField prototype_field(const Mat& basis, std::vector<ScalarProfile> h) {
  require_orthonormal(basis);
  if (static_cast<int>(h.size()) != basis.cols()) throw std::invalid_argument("need one profile per basis vector");
  const bool bounded = std::all_of(h.begin(), h.end(), [](const ScalarProfile& p) { return p.bounded; });
  json params = {{"kind", "prototype"}, {"basis", mat_to_json(basis)}, {"profiles", profiles_to_json(h)}};
  Separable s{basis, Vec::Ones(basis.cols()), Vec::Zero(basis.rows()), std::move(h)};
  return make_separable("prototype", std::move(s), bounded, std::move(params));
}

// ---------------------------------------------------------------------------
// Symmetric maps with Bu = v

namespace {

void require_unit(const Vec& u, const char* what) {
  if (!u.allFinite() || std::abs(u.norm() - 1.0) > 1e-12) throw std::invalid_argument(std::string(what) + " must be a unit vector");
}

/// Orthonormal completion of the first columns of q (full QR).
Mat complete_basis(const Mat& first) {
  Eigen::HouseholderQR<Mat> qr(first);
  Mat q = qr.householderQ() * Mat::Identity(first.rows(), first.rows());
  q.leftCols(first.cols()) = first;
  return q;
}

}  // namespace

SymmetricMap map_unit_vectors_eigen(const Vec& u, const Vec& v) {
  require_unit(u, "u");
  require_unit(v, "v");
  if (u.size() != v.size()) throw std::invalid_argument("u and v differ in dimension");
  const int d = static_cast<int>(u.size());
  SymmetricMap out;
  const double s = (u - v).norm() <= 1e-15 ? 1.0 : (u + v).norm() <= 1e-15 ? -1.0 : 0.0;
  if (s != 0.0) {
    out.B = s * Mat::Identity(d, d);
    out.basis = Mat::Identity(d, d);
    out.lambda = Vec::Constant(d, s);
    return out;
  }
  // Orthonormal frame (ξ₁, ξ₂) of span{u, v}; the plane uses the standard one.
  Vec x1(d), x2(d);
  if (d == 2) {
    x1 << 1.0, 0.0;
    x2 << 0.0, 1.0;
  } else {
    x1 = u;
    Vec w = v - v.dot(u) * u;
    x2 = w / w.norm();
  }
  const double alpha = std::atan2(u.dot(x2), u.dot(x1));
  const double beta = std::atan2(v.dot(x2), v.dot(x1));
  const double g = alpha + beta;
  const double cg = std::cos(g), sg = std::sin(g);
  Mat B = cg * (x1 * x1.transpose() - x2 * x2.transpose()) + sg * (x1 * x2.transpose() + x2 * x1.transpose());
  for (int r = 0; r < d; ++r)
    for (int c = r + 1; c < d; ++c) B(c, r) = B(r, c);
  out.B = B;
  // Eigenvectors of the reflection: +1 along angle γ/2, −1 orthogonal to it.
  const double ch = std::cos(0.5 * g), sh = std::sin(0.5 * g);
  Mat first(d, 2);
  first.col(0) = ch * x1 + sh * x2;
  first.col(1) = sh * x1 - ch * x2;
  out.basis = d == 2 ? first : complete_basis(first);
  out.lambda = Vec::Zero(d);
  out.lambda(0) = 1.0;
  out.lambda(1) = -1.0;
  return out;
}

Mat map_unit_vectors(const Vec& u, const Vec& v) { return map_unit_vectors_eigen(u, v).B; }

SymmetricMap symmetric_map(const Mat& B) {
  if (B.rows() != B.cols()) throw std::invalid_argument("B must be square");
  if (!B.allFinite() || (B - B.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("B must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(B);
  if (es.eigenvalues().cwiseAbs().maxCoeff() > 1.0 + 1e-12) throw std::invalid_argument("B must have norm ≤ 1");
  return {B, es.eigenvectors(), es.eigenvalues()};
}

// ---------------------------------------------------------------------------
// g_{B,μ,c}

ConservativeField gbmc_field(const GbmcParams& p, double M, double a) {
  if (!(M > 0.0) || !(a > 0.0)) throw std::invalid_argument("gbmc field needs M, a > 0");
  const Mat& xi = p.map.basis;
  const int d = static_cast<int>(xi.rows());
  require_orthonormal(xi);
  if (p.map.lambda.size() != d || p.mu.size() != d || p.c.size() != d)
    throw std::invalid_argument("gbmc parameters differ in dimension");
  if (p.map.lambda.cwiseAbs().maxCoeff() > 1.0 + 1e-12) throw std::invalid_argument("gbmc: ‖B‖ > 1");
  if (std::abs(p.mu.norm() - 1.0) > 1e-10) throw std::invalid_argument("gbmc: μ must be a unit vector");
  if ((xi * p.map.lambda.asDiagonal() * xi.transpose() - p.map.B).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("gbmc: eigen decomposition does not match B");

  struct Gbmc {
    Mat xi;
    Vec lambda, mu, c;
    double M, a;
  };
  auto g = std::make_shared<const Gbmc>(Gbmc{xi, p.map.lambda, p.mu, p.c, M, a});
  auto value = [g](const Vec& w) {
    Vec out = Vec::Zero(w.size());
    for (int k = 0; k < g->xi.cols(); ++k) {
      if (g->mu(k) == 0.0 || g->lambda(k) == 0.0) continue;
      const double arg = g->a * (w.dot(g->xi.col(k)) / g->mu(k) - g->c(k));
      out += g->lambda(k) * g->mu(k) * eta(g->M, arg) * g->xi.col(k);
    }
    return out;
  };
  auto potential = [g](const Vec& w) {
    double out = 0.0;
    for (int k = 0; k < g->xi.cols(); ++k) {
      if (g->mu(k) == 0.0 || g->lambda(k) == 0.0) continue;
      const double arg = g->a * (w.dot(g->xi.col(k)) / g->mu(k) - g->c(k));
      out += g->lambda(k) * g->mu(k) * g->mu(k) / g->a * big_theta(g->M, arg);
    }
    return out;
  };
  auto jacobian = [g](const Vec& w) {
    Mat out = Mat::Zero(w.size(), w.size());
    for (int k = 0; k < g->xi.cols(); ++k) {
      if (g->mu(k) == 0.0 || g->lambda(k) == 0.0) continue;
      const double arg = g->a * (w.dot(g->xi.col(k)) / g->mu(k) - g->c(k));
      if (std::abs(arg) >= g->M) continue;
      out += g->lambda(k) * g->a * sign(arg) * g->xi.col(k) * g->xi.col(k).transpose();
    }
    return out;
  };
  json params = {{"kind", "gbmc"},          {"B", mat_to_json(p.map.B)}, {"basis", mat_to_json(xi)},
                 {"lambda", vec_to_json(p.map.lambda)}, {"mu", vec_to_json(p.mu)}, {"c", vec_to_json(p.c)},
                 {"M", M},                  {"a", a}};
  return ConservativeField("gbmc", d, value, potential, jacobian, true, std::move(params));
}

GbmcParams optimal_gbmc_params(const Vec& i, const Vec& j, const Vec& nu) {
  if (i.size() != j.size() || i.size() != nu.size()) throw std::invalid_argument("dimension mismatch");
  const Vec d = i - j;
  const double nd = d.norm();
  if (nd == 0.0) throw std::invalid_argument("optimal gbmc parameters need i != j");
  const double nn = nu.norm();
  if (nn == 0.0) throw std::invalid_argument("optimal gbmc parameters need ν != 0");
  GbmcParams p;
  p.map = map_unit_vectors_eigen(d / nd, nu / nn);
  const int n = static_cast<int>(d.size());
  p.mu = Vec(n);
  p.c = Vec(n);
  for (int k = 0; k < n; ++k) {
    p.mu(k) = d.dot(p.map.basis.col(k)) / nd;
    p.c(k) = p.mu(k) == 0.0 ? 0.0 : j.dot(p.map.basis.col(k)) / p.mu(k);
  }
  p.mu /= p.mu.norm();
  return p;
}

// ---------------------------------------------------------------------------
// DalMOT fields

Mat rotation_basis(double phi) {
  Mat b(2, 2);
  b << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return b;
}

ConservativeField dalmot_field(const DalmotParams& p, std::vector<ScalarProfile> theta) {
  require_orthonormal(p.basis);
  const int d = static_cast<int>(p.basis.rows());
  if (p.p.size() != d || p.q.size() != d || p.sigma.size() != d || static_cast<int>(theta.size()) != d)
    throw std::invalid_argument("dalmot parameters differ in dimension");
  if (p.p.norm() > 1.0 + 1e-12) throw std::invalid_argument("dalmot field needs |p| ≤ 1");
  for (int k = 0; k < d; ++k)
    if (std::abs(p.sigma(k)) != 1.0) throw std::invalid_argument("dalmot signs must be ±1");
  const bool bounded = std::all_of(theta.begin(), theta.end(), [](const ScalarProfile& h) { return h.bounded; });
  Vec coef(d);
  for (int k = 0; k < d; ++k) coef(k) = p.sigma(k) * p.p.dot(p.basis.col(k));
  json params = {{"kind", "dalmot"},           {"p", vec_to_json(p.p)},        {"q", vec_to_json(p.q)},
                 {"sigma", vec_to_json(p.sigma)}, {"basis", mat_to_json(p.basis)}, {"profiles", profiles_to_json(theta)}};
  Separable s{p.basis, coef, p.q, std::move(theta)};
  return make_separable("dalmot", std::move(s), bounded, std::move(params));
}

DalmotParams optimal_dalmot_params(const std::vector<ScalarProfile>& theta, const Vec& i, const Vec& j,
                                   const Vec& nu, const Mat& basis) {
  require_orthonormal(basis);
  const int d = static_cast<int>(basis.rows());
  if (static_cast<int>(theta.size()) != d) throw std::invalid_argument("need one profile per basis vector");
  DalmotParams p;
  p.basis = basis;
  p.q = j;
  p.sigma = Vec(d);
  Vec mu = Vec::Zero(d);
  for (int k = 0; k < d; ++k) {
    const double nk = nu.dot(basis.col(k));
    p.sigma(k) = nk >= 0.0 ? 1.0 : -1.0;
    mu += theta[static_cast<std::size_t>(k)]((i - j).dot(basis.col(k))) * std::abs(nk) * basis.col(k);
  }
  const double m = mu.norm();
  p.p = m > 0.0 ? Vec(mu / m) : Vec(Vec::Zero(d));
  return p;
}

// ---------------------------------------------------------------------------
// Normal-only and biconvex fields

ConservativeField normal_only_field(const Vec2& p, const Vec2& q, double h) {
  if (q.isZero(0.0)) throw std::invalid_argument("normal-only field needs q != 0");
  if (!(h >= 1.0)) throw std::invalid_argument("normal-only field needs h ≥ 1");
  const ScalarProfile th = theta_h_profile(h);
  Mat basis(2, 2);
  const Vec2 e = q / q.norm();
  basis << e.x(), -e.y(), e.y(), e.x();
  // θ_h(⟨w − p, q⟩)q = |q| θ_h(|q|⟨w − p, e⟩) e, so rescale the profile.
  const double s = q.norm();
  ScalarProfile hs{th.name, th.kind, th.param, [th, s](double t) { return th(s * t); },
                   [th, s](double t) { return th.primitive(s * t) / s; },
                   [th, s](double t) { return s * th.derivative(s * t); }, true};
  Vec coef(2);
  coef << s, 0.0;
  json params = {{"kind", "normal"}, {"p", vec_to_json(p)}, {"q", vec_to_json(q)}, {"h", h}};
  Separable sep{basis, coef, to_vec(p), {hs, zero_profile()}};
  return make_separable("normal", std::move(sep), true, std::move(params));
}

NormalOnlyParams optimal_normal_only_params(const SupportPolytope& k, const Vec2& i, const Vec2& j,
                                            const Vec2& nu, double eps) {
  const Vec2 d = i - j;
  if (d.isZero(0.0)) throw std::invalid_argument("normal-only parameters need i != j");
  NormalOnlyParams out;
  out.p = j;
  out.q = k.argmax(nu);
  const double scale = out.q.norm() * d.norm();
  if (std::abs(out.q.dot(d)) <= 1e-12 * scale) {
    // Slide towards the vertex most aligned with i − j, losing at most eps|ν|.
    const Vec2* best = &k.vertices().front();
    for (const auto& r : k.vertices())
      if (std::abs(r.dot(d)) > std::abs(best->dot(d))) best = &r;
    const double t = std::min(0.5, eps / std::max((out.q - *best).norm(), 1e-300));
    out.q = (1.0 - t) * out.q + t * *best;
  }
  out.h = std::max(1.0, std::ceil(2.0 / std::abs(out.q.dot(d))));
  return out;
}

ConservativeField biconvex_truncated_field(const Mat& Z, double M) {
  if (!(M > 0.0)) throw std::invalid_argument("biconvex field needs M > 0");
  if (Z.rows() != Z.cols() || !Z.allFinite()) throw std::invalid_argument("Z must be a finite square matrix");
  const Mat zs = sym_part(Z);
  Eigen::SelfAdjointEigenSolver<Mat> es(zs);
  const int d = static_cast<int>(Z.rows());
  std::vector<ScalarProfile> h(static_cast<std::size_t>(d), clamp_profile(M));
  json params = {{"kind", "biconvex"}, {"Z", mat_to_json(Z)}, {"M", M}};
  Separable s{es.eigenvectors(), es.eigenvalues(), Vec::Zero(d), std::move(h)};
  return make_separable("biconvex", std::move(s), true, std::move(params));
}

ConservativeField field_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "prototype") return prototype_field(mat_from_json(j.at("basis")), profiles_from_json(j.at("profiles")));
  if (kind == "gbmc") {
    GbmcParams p{{mat_from_json(j.at("B")), mat_from_json(j.at("basis")), vec_from_json(j.at("lambda"))},
                 vec_from_json(j.at("mu")),
                 vec_from_json(j.at("c"))};
    return gbmc_field(p, j.at("M").get<double>(), j.at("a").get<double>());
  }
  if (kind == "dalmot") {
    DalmotParams p{vec_from_json(j.at("p")), vec_from_json(j.at("q")), vec_from_json(j.at("sigma")),
                   mat_from_json(j.at("basis"))};
    return dalmot_field(p, profiles_from_json(j.at("profiles")));
  }
  if (kind == "normal")
    return normal_only_field(vec2_from_json(j.at("p")), vec2_from_json(j.at("q")), j.at("h").get<double>());
  if (kind == "biconvex") return biconvex_truncated_field(mat_from_json(j.at("Z")), j.at("M").get<double>());
  throw std::invalid_argument("unknown field kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Checks

Mat fd_jacobian(const std::function<Vec(const Vec&)>& g, const Vec& w, double h) {
  const int d = static_cast<int>(w.size());
  Mat J(d, d);
  for (int b = 0; b < d; ++b) {
    Vec wp = w, wm = w;
    wp(b) += h;
    wm(b) -= h;
    J.col(b) = (g(wp) - g(wm)) / (2.0 * h);  // J(a, b) = ∂_b g_a
  }
  return J;
}

double jacobian_asymmetry(const std::function<Vec(const Vec&)>& g, const Vec& w, double h) {
  const Mat J = fd_jacobian(g, w, h);
  return (J - J.transpose()).cwiseAbs().maxCoeff();
}

namespace {

struct PointCheck {
  double asym, pot, jac, scale;
};

PointCheck check_point(const ConservativeField& f, const Vec& w, double h) {
  const auto g = [&f](const Vec& x) { return f(x); };
  const Mat J = fd_jacobian(g, w, h);
  const Vec gw = f(w);
  Vec grad(w.size());
  for (int b = 0; b < w.size(); ++b) {
    Vec wp = w, wm = w;
    wp(b) += h;
    wm(b) -= h;
    grad(b) = (f.potential(wp) - f.potential(wm)) / (2.0 * h);
  }
  PointCheck pc;
  pc.asym = (J - J.transpose()).cwiseAbs().maxCoeff();
  pc.pot = (grad - gw).cwiseAbs().maxCoeff();
  pc.jac = f.has_analytic_jacobian() ? (f.jacobian(w) - J).cwiseAbs().maxCoeff() : 0.0;
  pc.scale = 1.0 + std::max(J.cwiseAbs().maxCoeff(), gw.cwiseAbs().maxCoeff());
  return pc;
}

}  // namespace

ConservativeCheck check_conservative(const ConservativeField& f, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-3.0, 3.0);
  ConservativeCheck out;
  bool ok = true;
  for (int s = 0; s < samples; ++s) {
    Vec w(f.dim());
    for (int k = 0; k < f.dim(); ++k) w(k) = box(rng);
    PointCheck pc = check_point(f, w, 1e-5);
    const double tol = 1e-6 * pc.scale;
    // A sample closer than the step to a kink of a truncation is re-examined
    // with a smaller step before it counts.
    if (pc.asym > tol || pc.pot > tol) pc = check_point(f, w, 1e-7);
    out.max_asymmetry = std::max(out.max_asymmetry, pc.asym);
    out.max_potential_residual = std::max(out.max_potential_residual, pc.pot);
    out.max_analytic_jacobian_error = std::max(out.max_analytic_jacobian_error, pc.jac);
    ok = ok && pc.asym <= 1e-6 * pc.scale && pc.pot <= 1e-6 * pc.scale;
  }
  out.pass = ok;
  return out;
}

// ---------------------------------------------------------------------------
// Families

double sup_representation(const FieldFamily& fam, const Vec& i, const Vec& j, const Vec& nu, std::size_t* argmax) {
  if (fam.fields.empty()) throw std::invalid_argument("sup_representation needs a nonempty family");
  std::vector<double> vals(fam.fields.size());
  auto eval = [&](std::size_t k) { vals[k] = (fam.fields[k](i) - fam.fields[k](j)).dot(nu); };
  if (fam.fields.size() >= 256)
    parallel_for(fam.fields.size(), eval);
  else
    for (std::size_t k = 0; k < vals.size(); ++k) eval(k);
  std::size_t best = 0;
  for (std::size_t k = 1; k < vals.size(); ++k)
    if (vals[k] > vals[best]) best = k;
  if (argmax) *argmax = best;
  return vals[best];
}

json to_json(const FieldFamily& fam) {
  json arr = json::array();
  for (const auto& f : fam.fields) {
    if (f.params().is_null()) throw std::invalid_argument("field '" + f.name() + "' has no parameter record");
    arr.push_back(f.params());
  }
  return {{"fields", arr}};
}

FieldFamily family_from_json(const json& j) {
  FieldFamily fam;
  for (const auto& f : j.at("fields")) fam.fields.push_back(field_from_json(f));
  return fam;
}

std::vector<ConservativeField> catalog_fields() {
  std::vector<ConservativeField> out;
  out.push_back(prototype_field(rotation_basis(0.0), {eta_profile(1.0), eta_profile(1.0)}));
  out.push_back(prototype_field(rotation_basis(0.3), {sin_profile(1.3), tanh_profile(0.7)}));
  GbmcParams gp;
  gp.map = map_unit_vectors_eigen(make_vec({1.0, 0.0}), make_vec({std::sqrt(0.5), std::sqrt(0.5)}));
  gp.mu = make_vec({0.6, 0.8});
  gp.c = make_vec({0.3, -0.2});
  out.push_back(gbmc_field(gp, 1.0, 1.5));
  DalmotParams dp{make_vec({0.54, 0.72}), make_vec({0.5, -0.5}), make_vec({1.0, -1.0}), rotation_basis(0.4)};
  out.push_back(dalmot_field(dp, {eta_profile(1.0), eta_profile(2.0)}));
  out.push_back(normal_only_field({0.2, 0.1}, {0.5, 0.8}, 3.0));
  Mat z(2, 2);
  z << 1.0, 2.0, 0.0, -1.0;
  out.push_back(biconvex_truncated_field(z, 1.5));
  return out;
}

FieldFamily random_family(const std::string& kind, int n, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("family size must be nonnegative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto unit = [&] {
    Vec v(2);
    do v << n01(rng), n01(rng);
    while (v.norm() < 1e-6);
    return Vec(v / v.norm());
  };
  auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, u01(rng)); };
  FieldFamily fam;
  for (int s = 0; s < n; ++s) {
    if (kind == "gbmc") {
      GbmcParams p;
      if (s % 2 == 0) {
        p.map = map_unit_vectors_eigen(unit(), unit());
      } else {
        Mat a(2, 2);
        a << n01(rng), n01(rng), n01(rng), n01(rng);
        Mat b = sym_part(a);
        b *= (0.5 + 0.5 * u01(rng)) / operator_norm(b);
        p.map = symmetric_map(b);
      }
      p.mu = unit();
      p.c = make_vec({2.0 * n01(rng), 2.0 * n01(rng)});
      fam.fields.push_back(gbmc_field(p, log_uniform(0.1, 10.0), log_uniform(0.1, 10.0)));
    } else if (kind == "dalmot") {
      DalmotParams p{unit() * std::sqrt(u01(rng)), make_vec({n01(rng), n01(rng)}),
                     make_vec({u01(rng) < 0.5 ? -1.0 : 1.0, u01(rng) < 0.5 ? -1.0 : 1.0}),
                     rotation_basis(std::numbers::pi * u01(rng))};
      fam.fields.push_back(dalmot_field(p, {eta_profile(log_uniform(0.2, 5.0)), eta_profile(log_uniform(0.2, 5.0))}));
    } else if (kind == "normal") {
      const auto k = SupportPolytope::default_k();
      Vec2 q = Vec2::Zero();
      double total = 0.0;
      for (const auto& v : k.vertices()) {
        const double w = u01(rng);
        q += w * v;
        total += w;
      }
      q /= total;
      if (q.isZero(0.0)) q = k.vertices().front();
      fam.fields.push_back(normal_only_field({n01(rng), n01(rng)}, q, 1.0 + std::floor(10.0 * u01(rng))));
    } else if (kind == "biconvex") {
      Mat z(2, 2);
      z << n01(rng), n01(rng), n01(rng), n01(rng);
      z /= z.norm();
      fam.fields.push_back(biconvex_truncated_field(z, log_uniform(0.5, 5.0)));
    } else if (kind == "prototype") {
      std::vector<ScalarProfile> h;
      for (int k = 0; k < 2; ++k) {
        const double r = u01(rng);
        h.push_back(r < 0.25   ? eta_profile(log_uniform(0.2, 5.0))
                    : r < 0.5  ? sin_profile(log_uniform(0.2, 5.0))
                    : r < 0.75 ? tanh_profile(log_uniform(0.2, 5.0))
                               : clamp_profile(log_uniform(0.2, 5.0)));
      }
      fam.fields.push_back(prototype_field(rotation_basis(std::numbers::pi * u01(rng)), std::move(h)));
    } else {
      throw std::invalid_argument("unknown field family kind '" + kind + "'");
    }
  }
  return fam;
}

}  // namespace prlab
