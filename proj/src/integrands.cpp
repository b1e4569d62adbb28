#include "prlab/integrands.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace prlab {

std::string to_string(DensityClass c) {
  switch (c) {
    case DensityClass::kSymmetricJointlyConvex: return "symmetric-jointly-convex";
    case DensityClass::kBDElliptic: return "BD-elliptic";
    case DensityClass::kBVEllipticOnly: return "BV-elliptic-only";
    case DensityClass::kUnknown: break;
  }
  return "unknown";
}

Density::Density(std::string id, Evaluator f, DensityFlags flags)
    : id_(std::move(id)), f_(std::move(f)), flags_(flags) {}

double Density::operator()(const Vec& i, const Vec& j, const Vec& nu) const {
  if (i == j) return 0.0;
  const double v = f_(i, j, nu);
  if (!std::isfinite(v) || v < 0.0) {
    std::ostringstream os;
    os << "density " << id_ << " returned " << v;
    throw std::domain_error(os.str());
  }
  return v;
}

Density Density::scaled(double t) const {
  if (!(t > 0.0)) throw std::invalid_argument("density scale must be positive");
  std::ostringstream os;
  os << id_ << "*" << t;
  Evaluator f = f_;
  return Density(os.str(), [f, t](const Vec& i, const Vec& j, const Vec& nu) { return t * f(i, j, nu); }, flags_);
}

// ---------------------------------------------------------------------------
// Subadditive profiles

SubadditiveProfile SubadditiveProfile::constant(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("constant profile must be positive");
  SubadditiveProfile p(Kind::kConstant, "const");
  p.M_ = c;
  return p;
}

SubadditiveProfile SubadditiveProfile::truncated(double a, double M) {
  if (!(a > 0.0) || !(M > 0.0)) throw std::invalid_argument("truncated profile needs a, M > 0");
  SubadditiveProfile p(Kind::kTruncated, "trunc");
  p.a_ = a;
  p.M_ = M;
  return p;
}

SubadditiveProfile SubadditiveProfile::identity() { return SubadditiveProfile(Kind::kIdentity, "id"); }

SubadditiveProfile SubadditiveProfile::sqrt() { return SubadditiveProfile(Kind::kSqrt, "sqrt"); }

SubadditiveProfile SubadditiveProfile::table(std::vector<std::pair<double, double>> nodes) {
  if (nodes.size() < 2) throw std::invalid_argument("profile table needs at least two nodes");
  if (nodes.front().first != 0.0) throw std::invalid_argument("profile table must start at t = 0");
  for (std::size_t k = 1; k < nodes.size(); ++k)
    if (!(nodes[k].first > nodes[k - 1].first)) throw std::invalid_argument("profile table nodes must increase");
  SubadditiveProfile p(Kind::kTable, "table");
  p.nodes_ = std::move(nodes);
  p.validate();
  return p;
}

double SubadditiveProfile::operator()(double t) const {
  if (t < 0.0) throw std::invalid_argument("profile evaluated at negative t");
  switch (kind_) {
    case Kind::kConstant: return M_;
    case Kind::kTruncated: return std::min(a_ * t, M_);
    case Kind::kIdentity: return t;
    case Kind::kSqrt: return std::sqrt(t);
    case Kind::kTable: break;
  }
  if (t >= nodes_.back().first) return nodes_.back().second;
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t,
                             [](double x, const std::pair<double, double>& n) { return x < n.first; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double s = (t - lo.first) / (hi.first - lo.first);
  return lo.second + s * (hi.second - lo.second);
}

void SubadditiveProfile::validate() const {
  constexpr int kGrid = 600;
  double prev_g = (*this)(0.0);
  if (prev_g < 0.0) throw std::invalid_argument("profile must be nonnegative");
  double prev_ratio = INFINITY;
  for (int k = 0; k < kGrid; ++k) {
    const double t = std::pow(10.0, -6.0 + 12.0 * k / (kGrid - 1));
    const double g = (*this)(t);
    const double slack = 1e-12 * (1.0 + std::abs(g));
    if (g < prev_g - slack) throw std::invalid_argument("profile is not increasing near t = " + std::to_string(t));
    const double ratio = g / t;
    if (ratio > prev_ratio + 1e-12 * (1.0 + ratio))
      throw std::invalid_argument("g(t)/t increases near t = " + std::to_string(t));
    prev_g = g;
    prev_ratio = ratio;
  }
}

// ---------------------------------------------------------------------------
// Support polytopes

SupportPolytope::SupportPolytope(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 2) throw std::invalid_argument("support polytope needs vertices");
  double scale = 0.0;
  for (const auto& q : vertices_) {
    if (!q.allFinite()) throw std::invalid_argument("support polytope vertex is not finite");
    scale = std::max(scale, q.norm());
  }
  for (const auto& q : vertices_) {
    const bool mirrored = std::any_of(vertices_.begin(), vertices_.end(),
                                      [&](const Vec2& r) { return (q + r).norm() <= 1e-12 * (1.0 + scale); });
    if (!mirrored) throw std::invalid_argument("support polytope is not origin-symmetric");
  }
  bool spans = false;
  for (std::size_t a = 0; a < vertices_.size() && !spans; ++a)
    for (std::size_t b = a + 1; b < vertices_.size() && !spans; ++b)
      spans = std::abs(cross(vertices_[a], vertices_[b])) > 1e-12 * scale * scale;
  if (!spans) throw std::invalid_argument("support polytope is degenerate");
}

SupportPolytope SupportPolytope::square() { return SupportPolytope({{1, 0}, {0, 1}, {-1, 0}, {0, -1}}); }

SupportPolytope SupportPolytope::regular(int n) {
  if (n < 4 || n % 2 != 0) throw std::invalid_argument("regular polytope needs an even vertex count ≥ 4");
  std::vector<Vec2> v;
  for (int k = 0; k < n / 2; ++k) {
    const double a = 2.0 * std::numbers::pi * k / n;
    v.emplace_back(std::cos(a), std::sin(a));
  }
  for (int k = 0; k < n / 2; ++k) v.push_back(-v[static_cast<std::size_t>(k)]);
  return SupportPolytope(std::move(v));
}

SupportPolytope SupportPolytope::default_k() {
  return SupportPolytope({{1.0, 0.0}, {0.5, 0.8}, {-0.5, 0.8}, {-1.0, 0.0}, {-0.5, -0.8}, {0.5, -0.8}});
}

const Vec2& SupportPolytope::argmax(const Vec2& nu) const {
  return *std::max_element(vertices_.begin(), vertices_.end(),
                           [&](const Vec2& a, const Vec2& b) { return a.dot(nu) < b.dot(nu); });
}

double SupportPolytope::support(const Vec2& nu) const { return argmax(nu).dot(nu); }

// ---------------------------------------------------------------------------
// Catalog constructors

Density density_isotropic(const SubadditiveProfile& g) {
  DensityFlags fl;
  fl.bounded = g.bounded();
  fl.claimed = DensityClass::kSymmetricJointlyConvex;
  return Density("isotropic:" + g.name(),
                 [g](const Vec& i, const Vec& j, const Vec& nu) { return g((i - j).norm()) * nu.norm(); }, fl);
}

Density density_product(std::string id, std::function<double(const Vec&, const Vec&)> theta,
                        std::function<double(const Vec&)> psi) {
  DensityFlags fl;
  fl.claimed = DensityClass::kBVEllipticOnly;
  return Density(std::move(id),
                 [theta = std::move(theta), psi = std::move(psi)](const Vec& i, const Vec& j, const Vec& nu) {
                   return theta(i, j) * psi(nu);
                 },
                 fl);
}

Density density_aniso_normal(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  std::ostringstream id;
  id << "product:aniso1:eps=" << eps;
  return density_product(
      id.str(), [](const Vec& i, const Vec& j) { return (i - j).norm(); },
      [eps](const Vec& nu) { return std::hypot(eps * nu(0), nu(1)); });
}

Density density_aniso_jump(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  std::ostringstream id;
  id << "aniso2:eps=" << eps;
  return density_product(
      id.str(),
      [eps](const Vec& i, const Vec& j) {
        const Vec d = i - j;
        return std::sqrt(d(0) * d(0) + eps * d(1) * d(1));
      },
      [](const Vec& nu) { return nu.norm(); });
}

double dalmot_basis_value(const std::vector<ScalarProfile>& theta, const Vec2& d, const Vec2& nu, double phi) {
  const Vec2 x1(std::cos(phi), std::sin(phi));
  const Vec2 x2(-x1.y(), x1.x());
  const double t1 = theta[0](d.dot(x1)) * nu.dot(x1);
  const double t2 = theta[1](d.dot(x2)) * nu.dot(x2);
  return std::sqrt(t1 * t1 + t2 * t2);
}

std::pair<double, double> dalmot_sup(const std::vector<ScalarProfile>& theta, const Vec2& d, const Vec2& nu,
                                     DalmotOptions opt) {
  if (theta.size() != 2) throw std::invalid_argument("planar DalMOT needs two profiles");
  if (opt.basis_budget < 8) throw std::invalid_argument("basis budget too small");
  const double period = std::numbers::pi;
  const double step = period / opt.basis_budget;
  int best = 0;
  double best_v = -1.0;
  for (int k = 0; k < opt.basis_budget; ++k) {
    const double v = dalmot_basis_value(theta, d, nu, k * step);
    if (v > best_v) {
      best_v = v;
      best = k;
    }
  }
  // Golden-section refinement on the bracket around the best grid angle.
  double lo = (best - 1) * step, hi = (best + 1) * step;
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = dalmot_basis_value(theta, d, nu, x1), f2 = dalmot_basis_value(theta, d, nu, x2);
  while (hi - lo > opt.angular_tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = dalmot_basis_value(theta, d, nu, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = dalmot_basis_value(theta, d, nu, x1);
    }
  }
  double phi = best * step, v = best_v;
  for (double x : {x1, x2, 0.5 * (lo + hi)}) {
    const double fx = dalmot_basis_value(theta, d, nu, x);
    if (fx > v) {
      v = fx;
      phi = x;
    }
  }
  return {phi, v};
}

Density density_dalmot(std::vector<ScalarProfile> theta, DalmotOptions opt) {
  if (theta.size() != 2) throw std::invalid_argument("planar DalMOT needs two profiles");
  for (const auto& t : theta)
    if (t(0.0) != 0.0) throw std::invalid_argument("DalMOT profiles must vanish at 0");
  DensityFlags fl;
  fl.bounded = theta[0].bounded && theta[1].bounded;
  fl.claimed = DensityClass::kSymmetricJointlyConvex;
  std::string id = "dalmot:" + theta[0].name + "," + theta[1].name;
  return Density(std::move(id),
                 [theta = std::move(theta), opt](const Vec& i, const Vec& j, const Vec& nu) {
                   if (i.size() != 2) throw std::invalid_argument("DalMOT density is planar");
                   return dalmot_sup(theta, to_vec2(i - j), to_vec2(nu), opt).second;
                 },
                 fl);
}

Density density_frobenius() {
  DensityFlags fl;
  fl.claimed = DensityClass::kSymmetricJointlyConvex;
  return Density("frobenius", [](const Vec& i, const Vec& j, const Vec& nu) { return sym_product_norm(i - j, nu); },
                 fl);
}

Density density_normal_only(SupportPolytope k, std::string id) {
  DensityFlags fl;
  fl.bounded = true;
  fl.claimed = DensityClass::kSymmetricJointlyConvex;
  return Density(std::move(id),
                 [k = std::move(k)](const Vec&, const Vec&, const Vec& nu) {
                   if (nu.size() != 2) throw std::invalid_argument("polytope densities are planar");
                   return k.support(to_vec2(nu));
                 },
                 fl);
}

double mild_default_g(const Vec& w) {
  const double n2 = w.squaredNorm();
  if (n2 == 0.0) return 1.0;
  return 1.0 + std::min(std::sqrt(n2), 1.0) * w(0) * w(0) / n2;
}

Density density_mild(std::function<double(const Vec&)> g, std::string id, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> rad(-8.0, 2.0);
  double lo = INFINITY, hi = -INFINITY;
  for (int s = 0; s < samples; ++s) {
    Vec w(2);
    w << n01(rng), n01(rng);
    w *= std::pow(10.0, rad(rng)) / w.norm();
    const double a = g(w), b = g(-w);
    if (!std::isfinite(a) || a < 0.0) throw std::invalid_argument("mild trace function must be finite and ≥ 0");
    if (std::abs(a - b) > 1e-12 * (1.0 + std::abs(a))) throw std::invalid_argument("mild trace function must be even");
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  if (hi > 2.0 * lo) {
    std::ostringstream os;
    os << "mild trace function violates sup g <= 2 inf g (observed range [" << lo << ", " << hi << "])";
    throw std::invalid_argument(os.str());
  }
  DensityFlags fl;
  fl.bounded = true;
  fl.claimed = DensityClass::kBDElliptic;
  return Density(std::move(id), [g = std::move(g)](const Vec& i, const Vec& j, const Vec& nu) {
    return g(i - j) * nu.norm();
  }, fl);
}

// ---------------------------------------------------------------------------
// Sampled necessary conditions

namespace {

struct Sampler {
  std::mt19937_64 rng;
  std::uniform_real_distribution<double> box{-3.0, 3.0};
  std::normal_distribution<double> n01;
  int dim;

  Sampler(std::uint64_t seed, int d) : rng(seed), dim(d) {}

  Vec point() {
    Vec v(dim);
    for (int k = 0; k < dim; ++k) v(k) = box(rng);
    return v;
  }
  Vec direction() {
    Vec v(dim);
    do {
      for (int k = 0; k < dim; ++k) v(k) = n01(rng);
    } while (v.norm() < 1e-3);
    return v / v.norm() * std::exp(0.5 * n01(rng));
  }
};

}  // namespace

SampleCheck check_subadditivity(const Density& f, int samples, std::uint64_t seed, int dim) {
  Sampler s(seed, dim);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  SampleCheck out;
  out.samples = samples;
  for (int n = 0; n < samples; ++n) {
    const Vec i = s.point(), j = s.point();
    // Every other intermediate value sits on the segment [i, j].
    const Vec k = n % 2 == 0 ? s.point() : Vec(i + u01(s.rng) * (j - i));
    const Vec rho = s.direction();
    const double v = f(i, j, rho) - f(i, k, rho) - f(k, j, rho);
    if (v > out.max_violation) {
      out.max_violation = v;
      out.witness = {i, j, k, rho};
    }
  }
  return out;
}

SampleCheck check_convexity_in_nu(const Density& f, int samples, std::uint64_t seed, int dim) {
  Sampler s(seed, dim);
  SampleCheck out;
  out.samples = samples;
  for (int n = 0; n < samples; ++n) {
    const Vec i = s.point(), j = s.point();
    const Vec r1 = s.direction(), r2 = s.direction();
    const Vec mid = 0.5 * (r1 + r2);
    if (mid.norm() < 1e-9) continue;
    const double v = f(i, j, mid) - 0.5 * f(i, j, r1) - 0.5 * f(i, j, r2);
    if (v > out.max_violation) {
      out.max_violation = v;
      out.witness = {i, j, r1, r2};
    }
  }
  return out;
}

double check_symmetry(const Density& f, int samples, std::uint64_t seed, int dim) {
  Sampler s(seed, dim);
  double worst = 0.0;
  for (int n = 0; n < samples; ++n) {
    const Vec i = s.point(), j = s.point(), nu = s.direction();
    worst = std::max(worst, std::abs(f(i, j, nu) - f(j, i, Vec(-nu))));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Catalog

CatalogId CatalogId::parse(const std::string& id) {
  if (id.empty()) throw std::invalid_argument("empty catalog id");
  CatalogId out;
  std::stringstream ss(id);
  std::string tok;
  while (std::getline(ss, tok, ':')) {
    if (tok.find('=') == std::string::npos) {
      if (!out.params.empty()) throw std::invalid_argument("catalog id '" + id + "': parameters must come last");
      if (tok.empty()) throw std::invalid_argument("catalog id '" + id + "' has an empty component");
      out.path.push_back(tok);
      continue;
    }
    std::stringstream ps(tok);
    std::string kv;
    while (std::getline(ps, kv, ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw std::invalid_argument("bad parameter '" + kv + "' in " + id);
      const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(val, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != val.size() || val.empty()) throw std::invalid_argument("bad number '" + val + "' in " + id);
      out.params[key] = x;
    }
  }
  if (out.path.empty()) throw std::invalid_argument("catalog id '" + id + "' has no name");
  return out;
}

double CatalogId::get(const std::string& key, double fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

namespace {

[[noreturn]] void unknown(const std::string& id) { throw std::invalid_argument("unknown density id '" + id + "'"); }

void expect_path(const CatalogId& c, std::size_t n, const std::string& id) {
  if (c.path.size() != n) unknown(id);
}

Density renamed(Density d, const std::string& id) {
  auto flags = d.flags();
  return Density(id, [d](const Vec& i, const Vec& j, const Vec& nu) { return d(i, j, nu); }, flags);
}

}  // namespace

Density make_density(const std::string& id) {
  const CatalogId c = CatalogId::parse(id);
  const std::string& h = c.head();
  if (h == "isotropic") {
    if (c.path.size() != 2) unknown(id);
    const std::string& sub = c.path[1];
    if (sub == "id") return renamed(density_isotropic(SubadditiveProfile::identity()), id);
    if (sub == "trunc")
      return renamed(density_isotropic(SubadditiveProfile::truncated(c.get("a", 1.0), c.get("M", 1.0))), id);
    if (sub == "const") return renamed(density_isotropic(SubadditiveProfile::constant(c.get("c", 1.0))), id);
    if (sub == "sqrt") return renamed(density_isotropic(SubadditiveProfile::sqrt()), id);
    unknown(id);
  }
  if (h == "product") {
    if (c.path.size() != 2 || c.path[1] != "aniso1") unknown(id);
    return renamed(density_aniso_normal(c.get("eps", 0.01)), id);
  }
  if (h == "aniso2") {
    expect_path(c, 1, id);
    return renamed(density_aniso_jump(c.get("eps", 1e-4)), id);
  }
  if (h == "dalmot") {
    DalmotOptions opt;
    opt.basis_budget = static_cast<int>(c.get("budget", 720));
    if (c.path.size() == 2 && c.path[1] == "abs") return renamed(density_dalmot({abs_profile(), abs_profile()}, opt), id);
    if (c.path.size() == 2 && c.path[1] == "trunc") {
      const double M = c.get("M", 1.0);
      return renamed(density_dalmot({eta_profile(M), eta_profile(M)}, opt), id);
    }
    unknown(id);
  }
  if (h == "frobenius") {
    if (c.path.size() == 1) return density_frobenius();
    if (c.path.size() == 2 && c.path[1] == "trunc") {
      const double M = c.get("M", 1.0);
      return renamed(density_dalmot({eta_profile(M), eta_profile(M)}), id);
    }
    unknown(id);
  }
  if (h == "normal") {
    if (c.path.size() != 2) unknown(id);
    const std::string& sub = c.path[1];
    if (sub == "polytopeK") return density_normal_only(SupportPolytope::default_k(), id);
    if (sub == "square") return density_normal_only(SupportPolytope::square(), id);
    if (sub == "ngon") return density_normal_only(SupportPolytope::regular(static_cast<int>(c.get("n", 64))), id);
    unknown(id);
  }
  if (h == "mild") {
    if (c.path.size() != 2 || c.path[1] != "g") unknown(id);
    return density_mild(mild_default_g, id);
  }
  if (h == "sqdist") {
    expect_path(c, 1, id);
    return Density(id, [](const Vec& i, const Vec& j, const Vec& nu) { return (i - j).squaredNorm() * nu.norm(); }, {});
  }
  if (h == "const") {
    expect_path(c, 1, id);
    return renamed(density_isotropic(SubadditiveProfile::constant(c.get("c", 1.0))), id);
  }
  if (h == "lp") {
    // |i − j|(|ν₁|^p + |ν₂|^p)^{1/p}; not convex in ν for p < 1.
    expect_path(c, 1, id);
    const double p = c.get("p", 0.5);
    if (!(p > 0.0)) unknown(id);
    return Density(id,
                   [p](const Vec& i, const Vec& j, const Vec& nu) {
                     double s = 0.0;
                     for (int k = 0; k < nu.size(); ++k) s += std::pow(std::abs(nu(k)), p);
                     return (i - j).norm() * std::pow(s, 1.0 / p);
                   },
                   {});
  }
  unknown(id);
}

std::vector<std::string> density_catalog() {
  return {"isotropic:id",       "isotropic:trunc:a=1,M=1", "isotropic:const", "isotropic:sqrt",
          "product:aniso1:eps=0.01", "aniso2:eps=1e-4",  "dalmot:abs",      "dalmot:trunc:M=1",
          "frobenius",          "frobenius:trunc:M=1",     "normal:polytopeK", "normal:square",
          "normal:ngon:n=64",   "mild:g",                  "sqdist",          "const:c=1",
          "lp:p=0.5"};
}

}  // namespace prlab
