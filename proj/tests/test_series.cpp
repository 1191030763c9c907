#include <doctest.h>

#include "connexion/series.hpp"

using namespace connexion;

namespace {

bool close(const Real& a, const Real& b, const char* tol) { return abs(a - b) <= Real(tol); }

}  // namespace

TEST_CASE("eval_P basics") {
  const CoeffTable t3 = compute_coeffs(3);
  CHECK(eval_P(Real(0), compute_coeffs(50)).value == 0);
  CHECK(close(eval_P(Real(1), t3).value, to_real(BigRational(-9, 40)), "1e-45"));
  CHECK(eval_P_exact(BigRational(1), t3) == BigRational(-9, 40));
  CHECK_THROWS_AS(eval_P(Real("1.0001"), t3), std::domain_error);

  // P(h) = -h + O(h^2)
  const CoeffTable t = compute_coeffs(30);
  for (const char* h : {"1e-3", "1e-5", "1e-7"}) {
    const Real hr(h);
    CHECK(abs((eval_P(hr, t).value + hr) / (hr * hr)) < 1);
  }
}

TEST_CASE("eval_P agrees with exact partial sums at rational points") {
  const CoeffTable t = compute_coeffs(150);
  for (const BigRational& z : {BigRational(1, 3), BigRational(7, 10), BigRational(-1, 2), BigRational(1)}) {
    const Real exact = to_real(eval_P_exact(z, t));
    CHECK(close(eval_P(to_real(z), t).value, exact, "1e-45"));
  }
}

TEST_CASE("series estimate of a*") {
  CHECK(*astar_series(compute_coeffs(2)).exact == BigRational(1, 4));
  CHECK(*astar_series(compute_coeffs(3)).exact == BigRational(9, 40));
  CHECK(*astar_series(compute_coeffs(4)).exact == BigRational(67, 320));
}

TEST_CASE("truncation 2 gives exactly 1/4 and later ones stay below") {
  const CoeffTable t = compute_coeffs(300);
  for (std::size_t n = 3; n <= t.size(); ++n) CHECK(*astar_series(t.truncated(n)).exact < BigRational(1, 4));
}

TEST_CASE("square-root formula and its degenerate cases") {
  const SeriesEval n1 = astar_sqrt(compute_coeffs(1));
  CHECK(*n1.radicand == BigRational(-1, 2));
  CHECK(n1.domain_signal.has_value());
  CHECK(boost::multiprecision::isnan(n1.value));

  const SeriesEval n2 = astar_sqrt(compute_coeffs(2));
  CHECK(*n2.radicand == BigRational(0));
  CHECK(n2.value == 0);
  CHECK_FALSE(n2.domain_signal.has_value());

  const SeriesEval n3 = astar_sqrt(compute_coeffs(3));
  CHECK(*n3.radicand == BigRational(1, 80));
  CHECK(close(n3.value, Real("0.11180339887498948482045868343656381177203"), "1e-40"));
}

TEST_CASE("bracket examples") {
  const CoeffTable t = compute_coeffs(5);
  const AStarBracket a = astar_bounds(t, 3, 2);
  CHECK(close(a.lower, Real("0.1118033988749894848"), "1e-18"));
  CHECK(a.upper == BigRational(1, 4));

  const AStarBracket b = astar_bounds(t, 2, 1);
  CHECK(a.lower_sq == BigRational(1, 80));
  CHECK(b.lower == 0);
  CHECK(b.upper == BigRational(1));

  const AStarBracket c = astar_bounds(t, 3, 3);
  CHECK(c.upper == BigRational(9, 40));

  CHECK_THROWS_AS(astar_bounds(t, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(astar_bounds(t, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS(astar_bounds(t, 6, 2), std::invalid_argument);
}

TEST_CASE("bracket endpoints round outward") {
  const AStarBracket b = astar_bounds(compute_coeffs(40), 40, 40);
  CHECK(b.lower * b.lower <= to_real(b.lower_sq));
  CHECK(b.upper_real >= to_real(b.upper));
  CHECK(b.lower < b.upper_real);
}

TEST_CASE("bracket monotone in n1 and n2, valid for every pair") {
  const CoeffTable t = compute_coeffs(60);
  for (std::size_t n = 2; n < t.size(); ++n) {
    const AStarBracket lo = astar_bounds(t, n, n);
    const AStarBracket hi = astar_bounds(t, n + 1, n + 1);
    CHECK(hi.upper <= lo.upper);
    CHECK(hi.lower_sq >= lo.lower_sq);
  }
  for (std::size_t n1 = 2; n1 <= t.size(); n1 += 7) {
    for (std::size_t n2 = 1; n2 <= t.size(); n2 += 5) {
      const AStarBracket b = astar_bounds(t, n1, n2);
      CHECK(b.lower_sq < b.upper * b.upper);
    }
  }
}

TEST_CASE("series and sqrt estimates converge together") {
  const CoeffTable t = compute_coeffs(400);
  Real previous = 1;
  for (std::size_t n : {10u, 25u, 50u, 100u, 200u, 400u}) {
    const CoeffTable tn = t.truncated(n);
    const Real gap = abs(astar_series(tn).value - astar_sqrt(tn).value);
    CHECK(gap < previous);
    previous = gap;
  }
  CHECK(previous < Real("1e-18"));
}

TEST_CASE("radius estimate") {
  const CoeffTable t = compute_coeffs(400);
  const RadiusEstimate r = radius_estimate(t);
  REQUIRE(r.ratios.size() == t.size() - 2);
  CHECK(close(r.ratios[1], Real("1.6"), "1e-45"));
  CHECK(close(r.ratios[2], to_real(BigRational(50, 33)), "1e-45"));
  CHECK(r.estimate > 1);
  CHECK(r.window == kDefaultRadiusWindow);
  CHECK_THROWS_AS(radius_estimate(t.truncated(10)), std::invalid_argument);
}

TEST_CASE("tail estimate is finite only with a ratio bound below one") {
  const SeriesEval big = astar_series(compute_coeffs(300));
  CHECK(big.tail_finite());
  CHECK(big.est_tail >= 0);
  CHECK_FALSE(astar_series(compute_coeffs(1)).tail_finite());
}

TEST_CASE("integral residual") {
  CHECK(integral_residual(compute_coeffs(10), Real(0)) == 0);
  const Real half("0.5");
  CHECK(abs(integral_residual(compute_coeffs(5), half)) < abs(integral_residual(compute_coeffs(3), half)));
  const CoeffTable t = compute_coeffs(300);
  Real previous = 1;
  for (std::size_t n : {20u, 50u, 100u, 300u}) {
    const Real r = abs(integral_residual(t.truncated(n), Real(1)));
    CHECK(r < previous);
    previous = r;
  }
  CHECK(previous < Real("1e-6"));
}

TEST_CASE("first-order slope field") {
  const CoeffTable t3 = compute_coeffs(3);
  CHECK(first_order_rhs(Real(1), t3) == 0);
  CHECK(close(first_order_rhs(Real("0.5"), t3), Real("0.309375"), "1e-45"));
  const CoeffTable t = compute_coeffs(100);
  CHECK(close(first_order_rhs(Real(0), t), astar_series(t).value, "1e-45"));
}
