#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "ppfit/losses.hpp"
#include "ppfit/piecewise_poly.hpp"
#include "test_util.hpp"

using namespace ppfit;

TEST_CASE("segment_index follows the half-open convention") {
  const Breakpoints bp({0.0, 1.0, 2.0});
  CHECK(bp.segment_index(0.5) == 0);
  CHECK(bp.segment_index(1.0) == 1);   // interior knot belongs right
  CHECK(bp.segment_index(2.0) == 1);   // right endpoint closed
  CHECK(bp.segment_index(0.0) == 0);
  CHECK_THROWS_AS(bp.segment_index(-0.1), std::domain_error);
  CHECK_THROWS_AS(bp.segment_index(2.1), std::domain_error);
}

TEST_CASE("segment_index is monotone in x") {
  const Breakpoints bp({0.0, 0.2, 0.35, 0.9, 1.0});
  std::size_t prev = 0;
  for (int i = 0; i <= 1000; ++i) {
    const std::size_t s = bp.segment_index(i / 1000.0);
    CHECK(s >= prev);
    prev = s;
  }
}

TEST_CASE("evaluate: direct values and derivatives") {
  const PiecewisePolynomial pp(Breakpoints({0.0, 1.0}), 2, {1.0, 2.0, 3.0});
  CHECK(evaluate(pp, 0.5, 0) == doctest::Approx(2.75));
  CHECK(evaluate(pp, 0.5, 1) == doctest::Approx(5.0));
  CHECK(evaluate(pp, 0.5, 3) == 0.0);
  CHECK_THROWS_AS(evaluate(pp, 1.5, 0), std::domain_error);
}

TEST_CASE("evaluate matches direct monomial summation inside a segment") {
  test_util::Rng rng(11);
  const auto pp = test_util::random_model(rng, 1, 7);
  for (int i = 0; i <= 50; ++i) {
    const double x = i / 50.0;
    double direct = 0.0;
    for (int j = 0; j <= 7; ++j) direct += pp.coeff(0, j) * std::pow(x, j);
    CHECK(evaluate(pp, x) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("derivative of order degree is d! * leading coefficient") {
  test_util::Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = rng.int_in(1, 7);
    const auto pp = test_util::random_model(rng, 3, d);
    const double x = rng.uniform(0.0, 1.0);
    const std::size_t seg = pp.breakpoints().segment_index(x);
    double dfact = 1.0;
    for (int t = 2; t <= d; ++t) dfact *= t;
    CHECK(evaluate(pp, x, d) ==
          doctest::Approx(dfact * pp.coeff(seg, d)).epsilon(1e-12));
  }
}

TEST_CASE("boundary_value evaluates the segment's own polynomial") {
  // p1 = x on [0,1], p2 = 2x - 1 on [1,2]
  const PiecewisePolynomial pp(Breakpoints({0.0, 1.0, 2.0}), 1,
                               {0.0, 1.0, -1.0, 2.0});
  CHECK(boundary_value(pp, 0, Side::right, 0) == doctest::Approx(1.0));
  CHECK(boundary_value(pp, 1, Side::left, 1) == doctest::Approx(2.0));
  CHECK(boundary_value(pp, 0, Side::right, 2) == 0.0);
  CHECK_THROWS_AS(boundary_value(pp, 2, Side::left, 0), std::out_of_range);
}

TEST_CASE("boundary mismatch equals -Delta") {
  test_util::Rng rng(17);
  const auto pp = test_util::random_model(rng, 4, 5);
  const ContinuityMode mode{ContinuityMode::Kind::open, 3};
  for (std::size_t knot = 1; knot <= 3; ++knot) {
    for (int r = 0; r <= 3; ++r) {
      const double lhs = boundary_value(pp, knot - 1, Side::right, r) -
                         boundary_value(pp, knot, Side::left, r);
      CHECK(lhs ==
            doctest::Approx(-discontinuity(pp, knot, r, mode)).epsilon(1e-12));
    }
  }
}

TEST_CASE("dense_sample covers every segment with both endpoints") {
  SUBCASE("identity on one segment") {
    const PiecewisePolynomial pp(Breakpoints({0.0, 1.0}), 1, {0.0, 1.0});
    const auto rows = dense_sample(pp, 2);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].x == 0.0);
    CHECK(rows[0].f == 0.0);
    CHECK(rows[0].f1 == 1.0);
    CHECK(rows[0].f2 == 0.0);
    CHECK(rows[1].x == 1.0);
    CHECK(rows[1].f == doctest::Approx(1.0));
  }
  SUBCASE("two segments, shared knots duplicated, x non-decreasing") {
    test_util::Rng rng(19);
    const auto pp = test_util::random_model(rng, 2, 3);
    const auto rows = dense_sample(pp, 2);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 1; i < rows.size(); ++i)
      CHECK(rows[i].x >= rows[i - 1].x);
  }
  SUBCASE("x^2 midpoint carries first and second derivative") {
    const PiecewisePolynomial pp(Breakpoints({0.0, 1.0}), 2, {0.0, 0.0, 1.0});
    const auto rows = dense_sample(pp, 3);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].x == doctest::Approx(0.5));
    CHECK(rows[1].f == doctest::Approx(0.25));
    CHECK(rows[1].f1 == doctest::Approx(1.0));
    CHECK(rows[1].f2 == doctest::Approx(2.0));
  }
  SUBCASE("count below 2 is rejected") {
    const PiecewisePolynomial pp(Breakpoints({0.0, 1.0}), 1, {0.0, 1.0});
    CHECK_THROWS_AS(dense_sample(pp, 1), std::invalid_argument);
  }
}

TEST_CASE("construction validates invariants") {
  CHECK_THROWS_AS(Breakpoints({0.0}), std::invalid_argument);
  CHECK_THROWS_AS(Breakpoints({0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(Breakpoints({1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewisePolynomial(Breakpoints({0.0, 1.0}), 1, {1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      PiecewisePolynomial(Breakpoints({0.0, 1.0}), 0,
                          {std::numeric_limits<double>::quiet_NaN()}),
      std::invalid_argument);
  CHECK_THROWS_AS(Dataset({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(Dataset({1.0, 0.0}, {0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(Dataset({0.0}, {0.0, 1.0}), std::invalid_argument);
}
