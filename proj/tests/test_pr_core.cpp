#include <doctest.h>

#include "prlab/ellipticity.hpp"
#include "prlab/pr_core.hpp"

using namespace prlab;

TEST_CASE("rigid pieces are skew exactly") {
  const auto p = AffinePiece::rigid(2.0, {1, 0});
  CHECK(p.is_rigid());
  CHECK(p({1, 0}).isApprox(Vec2(1, -2)));
  CHECK_FALSE(AffinePiece::general(Mat2::Identity(), Vec2::Zero()).is_rigid());
  CHECK(SkewMatrix(3.0).omega() == 3.0);
  Mat a(2, 2);
  a << 0, 1, -1.0000001, 0;
  CHECK_THROWS(SkewMatrix{a});
  PolygonalPartition part({Polygon::rectangle(0, 0, 1, 1)}, Polygon::rectangle(0, 0, 1, 1));
  CHECK_THROWS(PiecewiseRigid(part, {AffinePiece::general(Mat2::Identity(), Vec2::Zero())}));
}

TEST_CASE("elementary jump and evaluation") {
  const OrientedSquare q(Vec2(0, 1), 2.0, Point2(0, 0));
  const auto u = make_elementary({1, 0}, {0, 3}, q);
  CHECK(eval(u, {0.2, 0.5}).value->isApprox(Vec2(1, 0)));
  CHECK(eval(u, {0.2, -0.5}).value->isApprox(Vec2(0, 3)));
  CHECK(eval(u, {0.2, 0.0}).on_interface());
  CHECK_THROWS_AS(eval(u, {5, 0}), std::out_of_range);
  const auto segs = jump_segments(u);
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].normal.isApprox(Vec2(0, 1)));
  CHECK(segs[0].jump(0.3).isApprox(Vec2(1, -3)));
  CHECK(segs[0].length == doctest::Approx(2.0));
  const auto v = make_elementary({1, 0}, {0, 3}, q, PlusSide::kNegative);
  CHECK(eval(v, {0.2, 0.5}).value->isApprox(Vec2(0, 3)));
  CHECK_THROWS(make_elementary({1, 0}, {1, 0}, q));
}

TEST_CASE("counterexample 1 traces") {
  const auto v = counterexample1_competitor(1.0);
  CHECK(v.partition().num_cells() == 3);
  CHECK(validate_partition(v.partition()).ok);
  // Bottom edge of Q2: inner trace (0, 1 − t); the outside is 0 there.
  const auto r = eval(v, {0.25, -0.999999});
  CHECK(r.value->isApprox(Vec2(1e-6, 0.75), 1e-5));
  int horizontal = 0, vertical = 0;
  double hlen = 0.0;
  for (const auto& s : jump_segments(v)) {
    if (std::abs(s.normal.y()) > 0.5) {
      ++horizontal;
      hlen += s.length;
    } else {
      ++vertical;
    }
  }
  CHECK(horizontal == 4);
  CHECK(hlen == doctest::Approx(8.0));
  CHECK(vertical == 4);  // the vertical sides, split at the chord
  CHECK(compact_deviation(counterexample_reference(1.0), v, 1.9));
  CHECK_FALSE(compact_deviation(counterexample_reference(1.0), v, 2.1));
}

TEST_CASE("coincident traces drop the interface") {
  // Two rigid pieces that agree along x2 = 0 only on the line: (ω, b) vs (0, b).
  PolygonalPartition part({Polygon::rectangle(-1, 0, 1, 1), Polygon::rectangle(-1, -1, 1, 0)},
                          Polygon::rectangle(-1, -1, 1, 1));
  // ω x2 vanishes on the chord, the first component agrees; the second is −ω x1 vs 0.
  PiecewiseRigid u(part, {AffinePiece::rigid(1.0, {0, 0}), AffinePiece::constant({0, 0})});
  const auto s = jump_segments(u);
  REQUIRE(s.size() == 1);
  CHECK(s[0].jump(0.0).norm() == doctest::Approx(1.0));
  PiecewiseAffine w(part, {AffinePiece::general((Mat2() << 0, 1, 0, 0).finished(), {0, 0}),
                           AffinePiece::constant({0, 0})});
  CHECK(jump_segments(w).empty());
}

TEST_CASE("symmetrized gradient and json round trip") {
  PolygonalPartition part({Polygon::rectangle(0, 0, 1, 1)}, Polygon::rectangle(0, 0, 1, 1));
  PiecewiseAffine u(part, {AffinePiece::general((Mat2() << 1, 2, 0, 3).finished(), {1, 1})});
  CHECK(symmetrized_gradient(u, 0).isApprox((Mat2() << 1, 1, 1, 3).finished()));
  const auto v = counterexample2_competitor(1.0, 1e-4);
  const auto back = function_from_json(to_json(v.affine()));
  CHECK(to_json(back) == to_json(v.affine()));
}
