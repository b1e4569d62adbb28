#include <doctest.h>

#include "prlab/ellipticity.hpp"

#include <cmath>
#include <random>

using namespace prlab;

namespace {
const OrientedSquare kQ6(Vec2(0, 1), 6.0, Point2(0, 0));

FalsifyOptions quick(std::uint64_t seed, long budget = 400) {
  FalsifyOptions o;
  o.seed = seed;
  o.budget = budget;
  return o;
}
}  // namespace

TEST_CASE("Nelder-Mead on the unit box") {
  auto f = [](const std::vector<double>& x) { return std::pow(x[0] - 0.3, 2) + 2 * std::pow(x[1] - 0.7, 2); };
  const auto r = nelder_mead(f, {0.5, 0.5}, 0.1, 2000);
  CHECK(r.x[0] == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(r.evaluations <= 2000);
  // Minimizer outside the box: clamped to the face.
  const auto c = nelder_mead([](const std::vector<double>& x) { return x[0]; }, {0.5}, 0.1, 500);
  CHECK(c.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("counterexample 2 rejects ε ≥ 1") {
  CHECK_THROWS(counterexample2_competitor(1.0, 1.0));
  CHECK_THROWS(counterexample1_competitor(0.0));
  const auto v = counterexample2_competitor(1.0, 1e-4);
  // Bottom edge trace (0, 10(1 − t)).
  const auto w = eval(v, {0.5, -0.1 + 1e-6});
  REQUIRE(w.value);
  CHECK(w.value->isApprox(Vec2(1e-5, 5), 1e-9));
}

TEST_CASE("tiling bookkeeping") {
  const auto f = density_aniso_normal(0.01);
  const auto v = counterexample1_competitor(1.0);
  const double F = surface_energy(v, f).value;
  double prev_boundary = 0.0;
  for (int h : {1, 2, 4, 8}) {
    CAPTURE(h);
    const auto t = tile_construction(v, kQ6, h);
    CHECK(validate_partition(t.u.partition()).ok);
    CHECK(t.tiles.size() == static_cast<std::size_t>(h));
    CHECK(t.u.affine().is_rigid());
    const auto e = tiling_energy(t, f);
    CHECK(std::abs(e.interior - F) <= 1e-9 * F);
    CHECK(e.total == doctest::Approx(e.interior + e.boundary + e.outside));
    // Outside Q₆: the chord of length 6 on the lateral columns.
    CHECK(e.outside == doctest::Approx(6.0 * 2 * std::sqrt(2.0)));
    // Two lateral segments of length 3/h with jump (2, 2) and normal ±e₁.
    CHECK(e.boundary == doctest::Approx(2 * (3.0 / h) * 0.01 * 2 * std::sqrt(2.0)).epsilon(1e-12));
    if (h > 1) CHECK(prev_boundary / e.boundary == doctest::Approx(2.0));
    prev_boundary = e.boundary;
    const auto ref = make_elementary({2, 2}, {0, 0}, t.big);
    CHECK(compact_deviation(ref, t.u, 1.0));
  }
  CHECK_THROWS(tile_construction(v, kQ6, 0));
}

TEST_CASE("families generate admissible competitors") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (const auto& fam : builtin_families()) {
    CAPTURE(fam->name());
    CHECK_THROWS(fam->generate(std::vector<double>(fam->dim() + 1, 0.0), ReferenceJump{}));
    for (int n = 0; n < 20; ++n) {
      for (double side : {1.0, 6.0}) {
        const Vec2 nu = Vec2(u(rng) - 0.5, u(rng) - 0.5).normalized();
        ReferenceJump ref{Vec2(u(rng), u(rng)), Vec2(2 + u(rng), u(rng)), OrientedSquare(nu, side, Point2(0.3, -0.2))};
        auto lo = fam->lower(), hi = fam->upper();
        std::vector<double> p(lo.size());
        for (std::size_t k = 0; k < p.size(); ++k) p[k] = lo[k] + u(rng) * (hi[k] - lo[k]);
        if (n == 0) p = fam->nominal();
        const auto v = fam->generate(p, ref);
        CHECK(v.affine().is_rigid());
        CHECK(validate_partition(v.partition()).ok);
        CHECK(compact_deviation(ref.function(), v, 1e-3 * side));
      }
    }
  }
  CHECK_THROWS(family_by_name("nope"));
}

TEST_CASE("normalized energies are scale free") {
  const auto f = density_aniso_normal(0.01);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (const auto& fam : builtin_families()) {
    auto lo = fam->lower(), hi = fam->upper();
    std::vector<double> p(lo.size());
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = lo[k] + u(rng) * (hi[k] - lo[k]);
    const Vec2 nu = Vec2(0.6, 0.8);
    ReferenceJump a{Vec2(0, 0), Vec2(2, 2), OrientedSquare(nu, 1.0, Point2(0, 0))};
    ReferenceJump b{Vec2(0, 0), Vec2(2, 2), OrientedSquare(nu, 6.0, Point2(0, 0))};
    const double ea = surface_energy(fam->generate(p, a), f).value / 1.0;
    const double eb = surface_energy(fam->generate(p, b), f).value / 6.0;
    CHECK(std::abs(ea - eb) < 1e-9);
  }
}

TEST_CASE("family a nominal matches counterexample 1") {
  const auto f = density_aniso_normal(0.01);
  ReferenceJump ref{Vec2(2, 2), Vec2(0, 0), kQ6};
  const auto v = family_square_insert()->generate(family_square_insert()->nominal(), ref);
  CHECK(surface_energy(v, f).value == doctest::Approx(surface_energy(counterexample1_competitor(1.0), f).value));
}

TEST_CASE("falsify finds the counterexample violations") {
  auto o = quick(7, 1000);
  o.square_side = 6.0;
  const auto v1 = falsify(density_aniso_normal(0.01), {0, 0}, {2, 2}, {0, 1}, builtin_families(), o);
  CHECK(v1.status == VerdictStatus::kViolation);
  CHECK(v1.margin * 6.0 > 1.5);
  CHECK(v1.margin > 10 * v1.error_estimate);
  CHECK(std::abs(v1.energy_default - v1.energy_doubled) <= 1e-9 * std::max(1.0, v1.energy_default));
  CHECK(v1.reference == doctest::Approx(2 * std::sqrt(2.0)));
  CHECK(compact_deviation(ReferenceJump{Vec2(0, 0), Vec2(2, 2), kQ6}.function(), v1.competitor, 6e-3));
  const auto j = to_json(v1);
  CHECK(j.at("status") == "VIOLATION");
  CHECK(j.contains("competitor"));
  CHECK(j.at("certificate").contains("energy_doubled"));

  const auto v2 = falsify(density_aniso_jump(1e-4), {0, 0}, {2, 2}, {0, 1}, builtin_families(), quick(8, 1000));
  CHECK(v2.status == VerdictStatus::kViolation);
  CHECK(v2.best < 2 * std::sqrt(1 + 1e-4));
}

TEST_CASE("no violation for jointly convex densities") {
  for (const char* id : {"isotropic:id", "const:c=1", "frobenius", "isotropic:sqrt"}) {
    CAPTURE(id);
    const auto v = falsify(make_density(id), {0, 0}, {1, 0.5}, {0.6, 0.8}, builtin_families(), quick(9));
    CHECK(v.status == VerdictStatus::kNoViolationWithinBudget);
    CHECK(v.best >= v.reference - 1e-12);
  }
  CHECK_THROWS(falsify(make_density("frobenius"), {0, 0}, {1, 0}, {0, 1}, {}, quick(1)));
  CHECK_THROWS(falsify(make_density("frobenius"), {1, 0}, {1, 0}, {0, 1}, builtin_families(), quick(1)));
}

TEST_CASE("determinism, monotonicity and linearity") {
  const auto f = density_aniso_normal(0.05);
  auto serial = quick(11);
  serial.parallel = false;
  const auto a = falsify(f, {0, 0}, {1, 2}, {0.6, 0.8}, builtin_families(), serial);
  const auto b = falsify(f, {0, 0}, {1, 2}, {0.6, 0.8}, builtin_families(), serial);
  const auto c = falsify(f, {0, 0}, {1, 2}, {0.6, 0.8}, builtin_families(), quick(11));
  CHECK(a.best == b.best);
  CHECK(a.params == b.params);
  CHECK(std::abs(a.best - c.best) <= 1e-12);

  const auto few = relaxation_estimate(f, {0, 0}, {2, 2}, {0, 1}, {family_checkerboard()}, quick(12));
  const auto more = relaxation_estimate(f, {0, 0}, {2, 2}, {0, 1}, {family_checkerboard(), family_square_insert()},
                                        quick(12));
  CHECK(more.value <= few.value);
  CHECK(few.value == doctest::Approx(few.verdict.reference));

  const auto t3 = relaxation_estimate(f.scaled(3.0), {0, 0}, {2, 2}, {0, 1}, builtin_families(), quick(12));
  const auto t1 = relaxation_estimate(f, {0, 0}, {2, 2}, {0, 1}, builtin_families(), quick(12));
  CHECK(t3.value == doctest::Approx(3.0 * t1.value).epsilon(1e-9));
}

TEST_CASE("BV necessary report separates the classes") {
  const auto o = quick(13);
  const auto ce = bv_necessary_report(density_aniso_normal(0.01), 1000, 1, o);
  CHECK(ce.label == "BV-type-necessary-pass / BD-falsified");
  const auto iso = bv_necessary_report(make_density("isotropic:id"), 1000, 1, o);
  CHECK(iso.label == "BV-type-necessary-pass / not-falsified");
  const auto sq = bv_necessary_report(make_density("sqdist"), 1000, 1, o);
  CHECK(sq.label == "BV-type-necessary-fail");
}
