#include "prlab/ellipticity.hpp"

#include "prlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>

namespace prlab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

Polygon local_polygon(const OrientedSquare& q, double scale, std::vector<Vec2> pts) {
  std::vector<Point2> w;
  w.reserve(pts.size());
  for (const auto& p : pts) w.push_back(q.to_world(scale * p));
  return Polygon(std::move(w));
}

Polygon local_rect(const OrientedSquare& q, double scale, double t0, double s0, double t1, double s1) {
  return local_polygon(q, scale, {{t0, s0}, {t1, s0}, {t1, s1}, {t0, s1}});
}

// Rigid motion given in the local frame of q on coordinates y = (x − c)/scale,
// with values expressed in the frame (τ, ν).
AffinePiece local_rigid(const OrientedSquare& q, double scale, double omega_hat, const Vec2& b_hat) {
  const Vec2 tau = q.tangent();
  const Vec2 b = b_hat.x() * tau + b_hat.y() * q.normal;
  const double omega = omega_hat / scale;
  const Vec2 jc{q.center.y(), -q.center.x()};
  return AffinePiece::rigid(omega, b - omega * jc);
}

Vec2 to_frame(const OrientedSquare& q, const Vec2& v) { return {v.dot(q.tangent()), v.dot(q.normal)}; }

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::pair<Polygon, Polygon> u_cells(const OrientedSquare& q, double scale, double H, double a, double b) {
  if (!(a > 0.0 && b > 0.0 && a < H && b < H)) throw std::invalid_argument("hole must lie inside the square");
  Polygon upper = local_polygon(q, scale, {{-H, 0.0}, {-a, 0.0}, {-a, b}, {a, b}, {a, 0.0}, {H, 0.0}, {H, H}, {-H, H}});
  Polygon lower =
      local_polygon(q, scale, {{-H, -H}, {H, -H}, {H, 0.0}, {a, 0.0}, {a, -b}, {-a, -b}, {-a, 0.0}, {-H, 0.0}});
  return {std::move(upper), std::move(lower)};
}

// ---------------------------------------------------------------------------
// Explicit counterexamples

namespace {

const OrientedSquare& q6() {
  static const OrientedSquare q(Vec2(0.0, 1.0), 6.0, Point2(0.0, 0.0));
  return q;
}

PiecewiseRigid insert_competitor(double half_height, double lambda, double omega, const Vec2& b) {
  const auto& q = q6();
  auto [upper, lower] = u_cells(q, 1.0, 3.0, 1.0, half_height);
  Polygon inner = local_rect(q, 1.0, -1.0, -half_height, 1.0, half_height);
  PolygonalPartition part({std::move(upper), std::move(lower), std::move(inner)}, q.polygon());
  return PiecewiseRigid(std::move(part), {AffinePiece::constant({2.0 * lambda, 2.0 * lambda}),
                                          AffinePiece::constant({0.0, 0.0}), AffinePiece::rigid(omega, b)});
}

}  // namespace

PiecewiseRigid counterexample1_competitor(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("λ must be positive");
  return insert_competitor(1.0, lambda, lambda, {lambda, lambda});
}

PiecewiseRigid counterexample2_competitor(double lambda, double eps) {
  if (!(lambda > 0.0)) throw std::invalid_argument("λ must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("ε must lie in (0, 1)");
  const double delta = std::pow(eps, 0.25);
  return insert_competitor(delta, lambda, lambda / delta, {lambda, lambda / delta});
}

PiecewiseRigid counterexample_reference(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("λ must be positive");
  return make_elementary({0.0, 0.0}, {2.0 * lambda, 2.0 * lambda}, q6(), PlusSide::kNegative);
}

// ---------------------------------------------------------------------------
// Tiling

namespace {

Vec2 outer_value(const PiecewiseRigid& v, const Point2& p) {
  const int k = v.partition().cell_containing(p);
  if (k < 0) throw std::invalid_argument("tiling: cannot read the boundary value of v");
  const AffinePiece& piece = v.piece(static_cast<std::size_t>(k));
  if (!piece.A.isZero(0.0)) throw std::invalid_argument("tiling: v is not constant near the boundary");
  return piece.b;
}

}  // namespace

Tiling tile_construction(const PiecewiseRigid& v, const OrientedSquare& square, int h) {
  if (h < 1) throw std::invalid_argument("tiling needs h ≥ 1");
  const double rho = square.side;
  const Vec2 plus = outer_value(v, square.to_world({0.0, 0.49 * rho}));
  const Vec2 minus = outer_value(v, square.to_world({0.0, -0.49 * rho}));
  if (plus == minus) throw std::invalid_argument("tiling: v has no boundary jump");

  Tiling t;
  t.h = h;
  t.unit = square;
  t.big = OrientedSquare(square.normal, 2.0 * rho, square.center);
  const double hd = static_cast<double>(h);
  const double w = rho / hd;

  std::vector<Polygon> cells;
  std::vector<AffinePiece> pieces;
  for (int n = 0; n < h; ++n) {
    const Point2 xn = square.to_world({-0.5 * rho + (n + 0.5) * w, 0.5 * w});
    auto map = [&](const Point2& x) -> Point2 { return xn + (x - square.center) / hd; };
    for (std::size_t k = 0; k < v.partition().num_cells(); ++k) {
      cells.push_back(v.partition().cells()[k].transformed(map));
      const AffinePiece& p = v.piece(k);
      AffinePiece s;
      s.A = hd * p.A;
      s.b = p.A.isZero(0.0) ? p.b : Vec2(p.b + p.A * (square.center - hd * xn));
      pieces.push_back(s);
    }
    t.tiles.push_back(local_rect(square, 1.0, -0.5 * rho + n * w, 0.0, -0.5 * rho + (n + 1) * w, w));
  }
  auto add = [&](Polygon p, const Vec2& value) {
    cells.push_back(std::move(p));
    pieces.push_back(AffinePiece::constant(value));
  };
  if (h > 1) add(local_rect(square, 1.0, -0.5 * rho, w, 0.5 * rho, rho), plus);
  add(local_rect(square, 1.0, -0.5 * rho, -rho, 0.5 * rho, 0.0), minus);
  add(local_rect(square, 1.0, -rho, 0.0, -0.5 * rho, rho), plus);
  add(local_rect(square, 1.0, -rho, -rho, -0.5 * rho, 0.0), minus);
  add(local_rect(square, 1.0, 0.5 * rho, 0.0, rho, rho), plus);
  add(local_rect(square, 1.0, 0.5 * rho, -rho, rho, 0.0), minus);

  t.u = PiecewiseRigid(PolygonalPartition(std::move(cells), t.big.polygon()), std::move(pieces));
  return t;
}

TilingEnergy tiling_energy(const Tiling& t, const Density& f, const EnergyOptions& opt) {
  TilingEnergy e;
  const double tol = t.u.partition().tolerance();
  const double half = 0.5 * t.unit.side;
  for (const auto& s : segment_energies(t.u, f, t.big.polygon(), opt)) {
    const Point2 mid = s.segment.point(0.5 * s.segment.length);
    const double v = s.result.value;
    e.total += v;
    e.error_estimate += s.result.error_estimate;
    const bool in_tile = std::any_of(t.tiles.begin(), t.tiles.end(),
                                     [&](const Polygon& p) { return p.locate(mid, tol) == Location::kInside; });
    if (in_tile)
      e.interior += v;
    else if (std::abs(t.unit.to_local(mid).x()) > half + tol)
      e.outside += v;
    else
      e.boundary += v;
  }
  return e;
}

// ---------------------------------------------------------------------------
// Competitor families

PiecewiseRigid ReferenceJump::function() const { return make_elementary(plus, minus, square, PlusSide::kPositive); }

namespace {

void check_box(const CompetitorFamily& fam, const std::vector<double>& p) {
  if (static_cast<int>(p.size()) != fam.dim()) throw std::invalid_argument(fam.name() + ": wrong parameter count");
  const auto lo = fam.lower(), hi = fam.upper();
  for (std::size_t k = 0; k < p.size(); ++k)
    if (!(p[k] >= lo[k] && p[k] <= hi[k])) throw std::invalid_argument(fam.name() + ": parameter outside the box");
}

struct LocalJump {
  Vec2 L, U;  // values below and above, in the local frame
  double delta;
};

LocalJump local_jump(const ReferenceJump& ref) {
  LocalJump j{to_frame(ref.square, ref.minus), to_frame(ref.square, ref.plus), (ref.plus - ref.minus).norm()};
  return j;
}

// Insert [−a, a] × [−b, b] whose first component matches the outer values on
// the horizontal edges and whose second component matches L at the corner (a, −b).
struct Insert {
  double omega;
  Vec2 b;
};

Insert nominal_insert(const LocalJump& j, double a, double b) {
  Insert in;
  in.omega = (j.U.x() - j.L.x()) / (2.0 * b);
  in.b = {0.5 * (j.L.x() + j.U.x()), j.L.y() + in.omega * a};
  return in;
}

PiecewiseRigid assemble(const ReferenceJump& ref, std::vector<Polygon> inner_cells, std::vector<AffinePiece> inner,
                        double a, double b) {
  const double S = ref.square.side;
  auto [upper, lower] = u_cells(ref.square, S, 0.5, a, b);
  std::vector<Polygon> cells{std::move(upper), std::move(lower)};
  std::vector<AffinePiece> pieces{AffinePiece::constant(ref.plus), AffinePiece::constant(ref.minus)};
  for (auto& c : inner_cells) cells.push_back(std::move(c));
  for (auto& p : inner) pieces.push_back(p);
  return PiecewiseRigid(PolygonalPartition(std::move(cells), ref.square.polygon()), std::move(pieces));
}

class SquareInsert final : public CompetitorFamily {
 public:
  std::string name() const override { return "square-insert"; }
  int dim() const override { return 4; }
  std::vector<double> lower() const override { return {0.05, -4.0, -1.0, -1.0}; }
  std::vector<double> upper() const override { return {0.9, 4.0, 1.0, 1.0}; }
  std::vector<double> nominal() const override { return {1.0 / 3.0, 0.0, 0.0, 0.0}; }
  PiecewiseRigid generate(const std::vector<double>& p, const ReferenceJump& ref) const override {
    check_box(*this, p);
    const LocalJump j = local_jump(ref);
    const double h = 0.5 * p[0];
    Insert in = nominal_insert(j, h, h);
    in.omega += p[1] * j.delta;
    in.b += j.delta * Vec2(p[2], p[3]);
    const double S = ref.square.side;
    return assemble(ref, {local_rect(ref.square, S, -h, -h, h, h)}, {local_rigid(ref.square, S, in.omega, in.b)}, h,
                    h);
  }
};

class RectInsert final : public CompetitorFamily {
 public:
  std::string name() const override { return "rect-insert"; }
  int dim() const override { return 5; }
  std::vector<double> lower() const override { return {0.05, -4.0, -1.0, -1.0, -1.0}; }
  std::vector<double> upper() const override { return {0.9, std::log10(0.45), 1.0, 1.0, 1.0}; }
  std::vector<double> nominal() const override { return {1.0 / 3.0, std::log10(1.0 / 60.0), 0.0, 0.0, 0.0}; }
  PiecewiseRigid generate(const std::vector<double>& p, const ReferenceJump& ref) const override {
    check_box(*this, p);
    const LocalJump j = local_jump(ref);
    const double a = 0.5 * p[0], b = std::pow(10.0, p[1]);
    Insert in = nominal_insert(j, a, b);
    const double swing = j.delta / b;
    in.omega += p[2] * swing;
    in.b += Vec2(p[3] * j.delta, p[4] * swing * a);
    const double S = ref.square.side;
    return assemble(ref, {local_rect(ref.square, S, -a, -b, a, b)}, {local_rigid(ref.square, S, in.omega, in.b)}, a,
                    b);
  }
};

class Checkerboard final : public CompetitorFamily {
 public:
  std::string name() const override { return "checkerboard"; }
  int dim() const override { return 8; }
  std::vector<double> lower() const override { return std::vector<double>(8, -1.0); }
  std::vector<double> upper() const override { return std::vector<double>(8, 1.0); }
  std::vector<double> nominal() const override { return std::vector<double>(8, 0.0); }
  PiecewiseRigid generate(const std::vector<double>& p, const ReferenceJump& ref) const override {
    check_box(*this, p);
    const LocalJump j = local_jump(ref);
    const double S = ref.square.side, a = 1.0 / 6.0;
    std::vector<Polygon> cells{local_rect(ref.square, S, -a, 0.0, 0.0, a), local_rect(ref.square, S, 0.0, 0.0, a, a),
                               local_rect(ref.square, S, -a, -a, 0.0, 0.0), local_rect(ref.square, S, 0.0, -a, a, 0.0)};
    std::vector<AffinePiece> pieces;
    for (int k = 0; k < 4; ++k) {
      const Vec2 base = k < 2 ? j.U : j.L;
      pieces.push_back(local_rigid(ref.square, S, 0.0, base + j.delta * Vec2(p[2 * k], p[2 * k + 1])));
    }
    return assemble(ref, std::move(cells), std::move(pieces), a, a);
  }
};

class NestedSquares final : public CompetitorFamily {
 public:
  std::string name() const override { return "nested-squares"; }
  int dim() const override { return 8; }
  std::vector<double> lower() const override { return {0.1, 0.1, -4.0, -1.0, -1.0, -4.0, -1.0, -1.0}; }
  std::vector<double> upper() const override { return {0.9, 0.9, 4.0, 1.0, 1.0, 4.0, 1.0, 1.0}; }
  std::vector<double> nominal() const override { return {1.0 / 3.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}; }
  PiecewiseRigid generate(const std::vector<double>& p, const ReferenceJump& ref) const override {
    check_box(*this, p);
    const LocalJump j = local_jump(ref);
    const double S = ref.square.side;
    const double h1 = 0.5 * p[0], h2 = h1 * p[1];
    Insert outer = nominal_insert(j, h1, h1);
    outer.omega += p[2] * j.delta;
    outer.b += j.delta * Vec2(p[3], p[4]);
    const Insert inner{outer.omega + p[5] * j.delta, outer.b + j.delta * Vec2(p[6], p[7])};
    auto [mid_up, mid_low] = u_cells(ref.square, S, h1, h2, h2);
    const AffinePiece po = local_rigid(ref.square, S, outer.omega, outer.b);
    return assemble(ref, {std::move(mid_up), std::move(mid_low), local_rect(ref.square, S, -h2, -h2, h2, h2)},
                    {po, po, local_rigid(ref.square, S, inner.omega, inner.b)}, h1, h1);
  }
};

}  // namespace

FamilyPtr family_square_insert() { return std::make_shared<SquareInsert>(); }
FamilyPtr family_rect_insert() { return std::make_shared<RectInsert>(); }
FamilyPtr family_checkerboard() { return std::make_shared<Checkerboard>(); }
FamilyPtr family_nested_squares() { return std::make_shared<NestedSquares>(); }

std::vector<FamilyPtr> builtin_families() {
  return {family_square_insert(), family_rect_insert(), family_checkerboard(), family_nested_squares()};
}

FamilyPtr family_by_name(const std::string& name) {
  for (auto& f : builtin_families())
    if (f->name() == name) return f;
  throw std::invalid_argument("unknown competitor family: " + name);
}

std::string to_string(VerdictStatus s) {
  return s == VerdictStatus::kViolation ? "VIOLATION" : "NO-VIOLATION-WITHIN-BUDGET";
}

// ---------------------------------------------------------------------------
// Nelder–Mead on the unit box

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             double step, long max_evals) {
  const std::size_t n = x0.size();
  auto clamp = [](std::vector<double> x) {
    for (auto& v : x) v = std::clamp(v, 0.0, 1.0);
    return x;
  };
  NelderMeadResult out;
  auto eval = [&](const std::vector<double>& x) {
    ++out.evaluations;
    return f(x);
  };
  std::vector<std::vector<double>> s{clamp(x0)};
  for (std::size_t k = 0; k < n; ++k) {
    auto x = s[0];
    x[k] += x[k] + step <= 1.0 ? step : -step;
    s.push_back(clamp(x));
  }
  std::vector<double> fs;
  for (const auto& x : s) fs.push_back(eval(x));

  std::vector<std::size_t> order(n + 1);
  while (out.evaluations < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
    double size = 0.0;
    for (const auto& x : s)
      for (std::size_t k = 0; k < n; ++k) size = std::max(size, std::abs(x[k] - s[best][k]));
    if (size < 1e-10) break;

    std::vector<double> c(n, 0.0);
    for (std::size_t m = 0; m <= n; ++m)
      if (m != worst)
        for (std::size_t k = 0; k < n; ++k) c[k] += s[m][k] / static_cast<double>(n);
    auto along = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t k = 0; k < n; ++k) x[k] = c[k] + t * (s[worst][k] - c[k]);
      return clamp(x);
    };
    const auto xr = along(-1.0);
    const double fr = eval(xr);
    if (fr < fs[best]) {
      const auto xe = along(-2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        s[worst] = xe;
        fs[worst] = fe;
      } else {
        s[worst] = xr;
        fs[worst] = fr;
      }
      continue;
    }
    if (fr < fs[second]) {
      s[worst] = xr;
      fs[worst] = fr;
      continue;
    }
    const bool outside = fr < fs[worst];
    const auto xc = along(outside ? -0.5 : 0.5);
    const double fc = eval(xc);
    if (fc < (outside ? fr : fs[worst])) {
      s[worst] = xc;
      fs[worst] = fc;
      continue;
    }
    for (std::size_t m = 0; m <= n; ++m) {
      if (m == best) continue;
      for (std::size_t k = 0; k < n; ++k) s[m][k] = s[best][k] + 0.5 * (s[m][k] - s[best][k]);
      fs[m] = eval(s[m]);
    }
  }
  const auto it = std::min_element(fs.begin(), fs.end());
  out.x = s[static_cast<std::size_t>(it - fs.begin())];
  out.value = *it;
  return out;
}

// ---------------------------------------------------------------------------
// Falsification

namespace {

std::vector<double> from_unit(const CompetitorFamily& fam, const std::vector<double>& z) {
  const auto lo = fam.lower(), hi = fam.upper();
  std::vector<double> p(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) p[k] = std::clamp(lo[k] + z[k] * (hi[k] - lo[k]), lo[k], hi[k]);
  return p;
}

std::vector<double> to_unit(const CompetitorFamily& fam, const std::vector<double>& p) {
  const auto lo = fam.lower(), hi = fam.upper();
  std::vector<double> z(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) z[k] = (p[k] - lo[k]) / (hi[k] - lo[k]);
  return z;
}

std::vector<std::vector<double>> latin_hypercube(int count, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(count), std::vector<double>(dim));
  for (int d = 0; d < dim; ++d) {
    std::vector<int> perm(static_cast<std::size_t>(count));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int r = 0; r < count; ++r) pts[r][d] = (perm[r] + u(rng)) / count;
  }
  return pts;
}

struct Task {
  std::size_t family;
  int restart;
  std::vector<double> start;
};

struct Certificate {
  double e_default = 0.0, e_doubled = 0.0, error = 0.0;
  bool agree = false;
};

Certificate certify(const PiecewiseRigid& v, const Density& f, const FalsifyOptions& opt) {
  EnergyOptions eo;
  eo.tol = opt.certify_tol * opt.square_side;
  eo.parallel = opt.parallel;
  const auto segs = segment_energies(v, f, v.partition().domain(), eo);
  Certificate c;
  double abs_sum = 0.0;
  for (const auto& s : segs) {
    c.e_default += s.result.value;
    c.error += s.result.error_estimate;
    abs_sum += std::abs(s.result.value);
  }
  // Roundoff of the per-segment closed forms and of the summation.
  c.error += 64.0 * kEps * abs_sum * static_cast<double>(segs.size() + 1);
  c.e_doubled = surface_energy(v, f, eo.doubled()).value;
  c.agree = std::abs(c.e_default - c.e_doubled) <= 1e-9 * std::max(1.0, std::abs(c.e_default));
  return c;
}

}  // namespace

EllipticityVerdict falsify(const Density& f, const Vec2& i, const Vec2& j, const Vec2& nu,
                           const std::vector<FamilyPtr>& families, const FalsifyOptions& opt) {
  if (families.empty()) throw std::invalid_argument("falsify needs at least one competitor family");
  if (i == j) throw std::invalid_argument("falsify needs i != j");
  if (!(nu.norm() > 0.0)) throw std::invalid_argument("ν must be nonzero");
  if (opt.budget < 1 || opt.restarts < 0) throw std::invalid_argument("invalid search budget");

  ReferenceJump ref;
  ref.square = OrientedSquare(nu / nu.norm(), opt.square_side, Point2(0.0, 0.0));
  ref.plus = opt.side == PlusSide::kPositive ? i : j;
  ref.minus = opt.side == PlusSide::kPositive ? j : i;
  const double S = opt.square_side;

  EllipticityVerdict verdict;
  verdict.reference = surface_energy(ref.function(), f).value / S;

  std::vector<Task> tasks;
  for (std::size_t k = 0; k < families.size(); ++k) {
    const auto& fam = *families[k];
    tasks.push_back({k, 0, to_unit(fam, fam.nominal())});
    const auto starts = latin_hypercube(opt.restarts, fam.dim(), fnv1a(fam.name(), opt.seed * 0x9E3779B97F4A7C15ULL + 1));
    for (int r = 0; r < opt.restarts; ++r) tasks.push_back({k, r + 1, starts[r]});
  }
  const long per_restart = std::max<long>(opt.budget / (opt.restarts + 1), 1);

  std::vector<NelderMeadResult> results(tasks.size());
  auto run = [&](std::size_t t) {
    const Task& task = tasks[t];
    const auto& fam = *families[task.family];
    EnergyOptions eo;
    eo.tol = opt.search_tol * S;
    eo.parallel = false;
    auto objective = [&](const std::vector<double>& z) {
      try {
        return surface_energy(fam.generate(from_unit(fam, z), ref), f, eo).value / S;
      } catch (const std::invalid_argument&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    results[t] = nelder_mead(objective, task.start, task.restart == 0 ? 0.1 : 0.2, per_restart);
  };
  if (opt.parallel)
    parallel_for(tasks.size(), run);
  else
    for (std::size_t t = 0; t < tasks.size(); ++t) run(t);

  // Deterministic reduction: (value, restart) within a family, families in index order.
  for (std::size_t k = 0; k < families.size(); ++k) {
    FamilyOutcome o;
    o.family = families[k]->name();
    o.best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      if (tasks[t].family != k) continue;
      o.evaluations += results[t].evaluations;
      if (results[t].value < o.best) {
        o.best = results[t].value;
        o.params = from_unit(*families[k], results[t].x);
        o.restart = tasks[t].restart;
      }
    }
    verdict.evaluations += o.evaluations;
    verdict.families.push_back(o);
  }

  struct Pick {
    std::size_t family;
    Certificate cert;
    PiecewiseRigid v;
  };
  std::optional<Pick> certified, fallback;
  for (std::size_t k = 0; k < families.size(); ++k) {
    FamilyOutcome& o = verdict.families[k];
    if (!std::isfinite(o.best)) continue;
    PiecewiseRigid v = families[k]->generate(o.params, ref);
    const Certificate c = certify(v, f, opt);
    o.best = c.e_default / S;
    o.certified = c.agree && o.best < verdict.reference - 10.0 * c.error / S;
    if (o.certified && (!certified || o.best < verdict.families[certified->family].best))
      certified = Pick{k, c, v};
    if (!fallback || o.best < verdict.families[fallback->family].best) fallback = Pick{k, c, v};
  }
  const auto& pick = certified ? certified : fallback;
  if (!pick) {
    verdict.best = std::numeric_limits<double>::infinity();
    verdict.margin = -std::numeric_limits<double>::infinity();
    return verdict;
  }
  const FamilyOutcome& o = verdict.families[pick->family];
  verdict.status = certified ? VerdictStatus::kViolation : VerdictStatus::kNoViolationWithinBudget;
  verdict.best = o.best;
  verdict.margin = verdict.reference - o.best;
  verdict.error_estimate = pick->cert.error / S;
  verdict.energy_default = pick->cert.e_default;
  verdict.energy_doubled = pick->cert.e_doubled;
  verdict.family = o.family;
  verdict.params = o.params;
  verdict.competitor = pick->v;
  return verdict;
}

RelaxationEstimate relaxation_estimate(const Density& f, const Vec2& i, const Vec2& j, const Vec2& nu,
                                       const std::vector<FamilyPtr>& families, const FalsifyOptions& opt) {
  RelaxationEstimate r;
  r.verdict = falsify(f, i, j, nu, families, opt);
  r.value = r.verdict.status == VerdictStatus::kViolation ? std::min(r.verdict.reference, r.verdict.best)
                                                          : r.verdict.reference;
  return r;
}

BvNecessaryReport bv_necessary_report(const Density& f, int samples, std::uint64_t seed, const FalsifyOptions& opt) {
  BvNecessaryReport r;
  r.subadditivity = check_subadditivity(f, samples, seed);
  r.convexity = check_convexity_in_nu(f, samples, seed + 1);
  r.necessary_pass = r.subadditivity.max_violation <= 1e-10 && r.convexity.max_violation <= 1e-10;
  const auto v = falsify(f, {0.0, 0.0}, {2.0, 2.0}, {0.0, 1.0}, builtin_families(), opt);
  r.falsified = v.status == VerdictStatus::kViolation;
  if (!r.necessary_pass)
    r.label = "BV-type-necessary-fail";
  else
    r.label = r.falsified ? "BV-type-necessary-pass / BD-falsified" : "BV-type-necessary-pass / not-falsified";
  return r;
}

nlohmann::json to_json(const EllipticityVerdict& v) {
  nlohmann::json fams = nlohmann::json::array();
  for (const auto& o : v.families)
    fams.push_back({{"family", o.family},
                    {"best", o.best},
                    {"params", o.params},
                    {"evaluations", o.evaluations},
                    {"certified", o.certified},
                    {"restart", o.restart}});
  nlohmann::json j{{"status", to_string(v.status)},
                   {"reference", v.reference},
                   {"best", v.best},
                   {"margin", v.margin},
                   {"error_estimate", v.error_estimate},
                   {"family", v.family},
                   {"params", v.params},
                   {"evaluations", v.evaluations},
                   {"families", fams},
                   {"certificate",
                    {{"energy_default", v.energy_default},
                     {"energy_doubled", v.energy_doubled},
                     {"agreement_tolerance", 1e-9},
                     {"margin_factor", 10.0}}}};
  if (v.competitor.partition().num_cells() > 0) j["competitor"] = to_json(v.competitor.affine());
  return j;
}

}  // namespace prlab
