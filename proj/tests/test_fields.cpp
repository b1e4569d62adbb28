#include <doctest.h>

#include "prlab/conservative_fields.hpp"
#include "prlab/integrands.hpp"

#include <cmath>
#include <random>

using namespace prlab;

namespace {
Vec v2(double a, double b) { return to_vec(Vec2(a, b)); }
Vec unit(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n;
  Vec v(d);
  for (int k = 0; k < d; ++k) v(k) = n(rng);
  return v / v.norm();
}
double pairing(const ConservativeField& g, const Vec& i, const Vec& j, const Vec& nu) {
  return (g(i) - g(j)).dot(nu);
}
}  // namespace

TEST_CASE("Bu = v in the plane") {
  const Mat b = map_unit_vectors(v2(1, 0), v2(0, 1));
  CHECK(b.isApprox((Mat(2, 2) << 0, 1, 1, 0).finished()));
  const auto e = map_unit_vectors_eigen(v2(1, 0), v2(0, 1));
  // +1 eigenvector (1, 1)/√2, −1 eigenvector (1, −1)/√2 up to sign.
  for (int k = 0; k < 2; ++k) {
    const Vec x = e.basis.col(k);
    CHECK((b * x - e.lambda(k) * x).norm() < 1e-15);
    CHECK(std::abs(std::abs(x(0)) - std::sqrt(0.5)) < 1e-15);
  }
  const Vec u = v2(0.6, 0.8);
  CHECK((map_unit_vectors(u, u) - Mat::Identity(2, 2)).norm() < 1e-15);
  CHECK((map_unit_vectors(u, -u) + Mat::Identity(2, 2)).norm() < 1e-15);
}

TEST_CASE("Bu = v in general dimension") {
  std::mt19937_64 rng(4);
  for (int d : {2, 3, 5}) {
    for (int n = 0; n < 200; ++n) {
      const Vec u = unit(rng, d), v = unit(rng, d);
      const Mat b = map_unit_vectors(u, v);
      CHECK(b == b.transpose());
      CHECK((b * u - v).norm() < 1e-10);
      CHECK(operator_norm(b) == doctest::Approx(1.0).epsilon(1e-10));
      if (d > 2) {
        // Zero on the complement of span{u, v}.
        Vec w = unit(rng, d);
        const Mat q = Eigen::HouseholderQR<Mat>((Mat(d, 2) << u, v).finished()).householderQ();
        w -= q.leftCols(2) * (q.leftCols(2).transpose() * w);
        CHECK((b * w).norm() < 1e-10 * (1 + w.norm()));
      }
    }
  }
}

TEST_CASE("gbmc optimal parameters attain the truncated norm") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2, 2), m(0.1, 10);
  for (int n = 0; n < 100; ++n) {
    const Vec i = v2(u(rng), u(rng)), j = v2(u(rng), u(rng)), nu = v2(u(rng), u(rng));
    const double M = m(rng), a = m(rng);
    const auto g = gbmc_field(optimal_gbmc_params(i, j, nu), M, a);
    const double target = std::min(a * (i - j).norm(), M) * nu.norm();
    CHECK(pairing(g, i, j, nu) == doctest::Approx(target).epsilon(1e-10));
  }
}

TEST_CASE("random gbmc fields stay below the truncated norm") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-2, 2);
  const auto fam = random_family("gbmc", 50, 3);
  for (int n = 0; n < 50; ++n) {
    const Vec i = v2(u(rng), u(rng)), j = v2(u(rng), u(rng)), nu = v2(u(rng), u(rng));
    for (const auto& g : fam.fields) {
      const double M = g.params().at("M").get<double>(), a = g.params().at("a").get<double>();
      CHECK(pairing(g, i, j, nu) <= std::min(a * (i - j).norm(), M) * nu.norm() + 1e-10);
    }
  }
}

TEST_CASE("DalMOT optimal field attains the sup") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-2, 2);
  const std::vector<ScalarProfile> th{eta_profile(1.0), eta_profile(2.0)};
  for (int n = 0; n < 50; ++n) {
    const Vec2 i(u(rng), u(rng)), j(u(rng), u(rng)), nu(u(rng), u(rng));
    const auto [phi, value] = dalmot_sup(th, i - j, nu);
    const auto g = dalmot_field(optimal_dalmot_params(th, to_vec(i), to_vec(j), to_vec(nu), rotation_basis(phi)), th);
    CHECK(pairing(g, to_vec(i), to_vec(j), to_vec(nu)) == doctest::Approx(value).epsilon(1e-10));
    CHECK(value == doctest::Approx(dalmot_basis_value(th, i - j, nu, phi)));
  }
}

TEST_CASE("normal-only fields reproduce the support function") {
  const auto k = SupportPolytope::default_k();
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int n = 0; n < 100; ++n) {
    const Vec2 i(u(rng), u(rng)), j(u(rng), u(rng)), nu(u(rng), u(rng));
    const auto p = optimal_normal_only_params(k, i, j, nu);
    const auto g = normal_only_field(p.p, p.q, p.h);
    CHECK(pairing(g, to_vec(i), to_vec(j), to_vec(nu)) == doctest::Approx(k.support(nu)).epsilon(1e-9));
  }
}

TEST_CASE("biconvex truncated field") {
  const Vec2 i(0.2, -0.1), j(-0.1, 0.3), nu(0.6, 0.8);
  const Vec2 d = i - j;
  Mat F(2, 2);
  F = 0.5 * (to_vec(d) * to_vec(nu).transpose() + to_vec(nu) * to_vec(d).transpose());
  const auto g = biconvex_truncated_field(F / F.norm(), 10.0);
  CHECK(pairing(g, to_vec(i), to_vec(j), to_vec(nu)) == doctest::Approx(F.norm()).epsilon(1e-12));
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n = 0; n < 100; ++n) {
    Mat z(2, 2);
    z << u(rng), u(rng), u(rng), u(rng);
    z /= std::max(1.0, z.norm());
    const auto h = biconvex_truncated_field(z, 0.5);
    CHECK(pairing(h, to_vec(i), to_vec(j), to_vec(nu)) <= F.norm() + 1e-12);
  }
}

TEST_CASE("conservativity checks") {
  for (const auto& g : catalog_fields()) {
    CAPTURE(g.name());
    const auto c = check_conservative(g, 100, 1);
    CHECK(c.pass);
    CHECK(c.max_asymmetry < 1e-6);
    const auto back = field_from_json(g.params());
    const Vec w = v2(0.3, -0.7);
    CHECK((back(w) - g(w)).norm() < 1e-14);
  }
  for (const char* kind : {"gbmc", "dalmot", "normal", "biconvex", "prototype"}) {
    CAPTURE(kind);
    for (const auto& g : random_family(kind, 5, 21).fields) CHECK(check_conservative(g, 50, 2).pass);
  }
  ConservativeField rot("rotation", 2, [](const Vec& w) { return v2(-w(1), w(0)); },
                        [](const Vec&) { return 0.0; }, {}, false);
  CHECK_FALSE(check_conservative(rot, 20, 3).pass);
  CHECK(jacobian_asymmetry([](const Vec& w) { return v2(-w(1), w(0)); }, v2(0.1, 0.2)) ==
        doctest::Approx(2.0));
}

TEST_CASE("sup representation ties pick the lowest index") {
  FieldFamily fam;
  const auto g = catalog_fields()[0];
  fam.fields = {g, g};
  std::size_t arg = 99;
  sup_representation(fam, v2(1, 0), v2(0, 0), v2(1, 0), &arg);
  CHECK(arg == 0);
  CHECK_THROWS(sup_representation(FieldFamily{}, v2(1, 0), v2(0, 0), v2(1, 0)));
  const auto back = family_from_json(to_json(fam));
  CHECK(back.fields.size() == 2);
}
