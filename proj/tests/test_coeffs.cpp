#include <doctest.h>

#include "connexion/coeffs.hpp"

using namespace connexion;

namespace {

std::vector<BigRational> values(const CoeffTable& t) { return {t.begin(), t.end()}; }

}  // namespace

TEST_CASE("hand-checked leading coefficients") {
  CHECK(values(compute_coeffs(1)) == std::vector<BigRational>{BigRational(-1)});
  CHECK(values(compute_coeffs(3)) == std::vector<BigRational>{BigRational(-1), BigRational(3, 4), BigRational(1, 40)});
  CHECK(compute_coeffs(4).b(4) == BigRational(1, 64));
  CHECK(compute_coeffs(5).b(5) == BigRational(33, 3200));
  CHECK(compute_coeffs(10).b(10) == BigRational::parse("23853407/11059200000"));
}

TEST_CASE("table indexing is one-based and bounds-checked") {
  const CoeffTable t = compute_coeffs(5);
  CHECK(t.size() == 5);
  CHECK(t[1] == BigRational(-1));
  CHECK_THROWS_AS(t.b(0), std::out_of_range);
  CHECK_THROWS_AS(t.b(6), std::out_of_range);
  CHECK(t.truncated(3).size() == 3);
  CHECK_THROWS_AS(compute_coeffs(0), std::invalid_argument);
}

TEST_CASE("multimodular engine matches direct rational arithmetic") {
  const CoeffTable fast = compute_coeffs(300);
  const CoeffTable slow = compute_coeffs_direct(300);
  REQUIRE(fast.size() == slow.size());
  for (std::size_t n = 1; n <= fast.size(); ++n) {
    CHECK(fast.b(n) == slow.b(n));
    CHECK(fast.b(n).is_canonical());
  }
}

TEST_CASE("recomputation is bit-identical") {
  const CoeffTable a = compute_coeffs(250);
  const CoeffTable b = compute_coeffs(250);
  for (std::size_t n = 1; n <= 250; ++n) CHECK(a.b(n).to_string() == b.b(n).to_string());
}

TEST_CASE("positivity and recursion identity hold exactly") {
  const CoeffTable t = compute_coeffs(400);
  for (std::size_t n = 2; n <= t.size(); ++n) REQUIRE(t.b(n).sign() > 0);
  for (std::size_t n = 4; n <= t.size(); ++n) {
    REQUIRE(BigRational(static_cast<long>(n + 2)) * t.b(n) == convolution_sum(t, n));
  }
}

TEST_CASE("convolution sum does not depend on summation order") {
  const CoeffTable t = compute_coeffs(120);
  for (std::size_t n = 4; n <= t.size(); ++n) {
    CHECK(convolution_sum(t, n, SumOrder::Forward) == convolution_sum(t, n, SumOrder::Backward));
  }
}

TEST_CASE("verify_recursion accepts genuine tables and rejects corrupted ones") {
  CHECK(verify_recursion(compute_coeffs(100)));
  CHECK(verify_recursion(CoeffTable({BigRational(-1)}, "manual")));
  const CoeffTable base = compute_coeffs(260);

  const RecursionCheck seed = check_recursion(base.with_replaced(2, BigRational(3, 5)));
  CHECK_FALSE(seed.ok);
  CHECK(seed.first_bad == 2);

  const RecursionCheck early = check_recursion(base.with_replaced(50, base.b(50) * BigRational(2)));
  CHECK_FALSE(early.ok);
  CHECK(early.first_bad == 50);

  // Past the direct-check limit the table is compared with a fresh run.
  const RecursionCheck late = check_recursion(base.with_replaced(240, base.b(240) + BigRational(1, 1000000)));
  CHECK_FALSE(late.ok);
  CHECK(late.first_bad == 240);

  CHECK_FALSE(verify_recursion(base.with_replaced(7, -base.b(7))));
}

TEST_CASE("series ODE residual vanishes for genuine tables") {
  for (const BigRational& c : series_ode_residual_coeffs(compute_coeffs(3))) CHECK(c.is_zero());
  const auto one = series_ode_residual_coeffs(compute_coeffs(1));
  REQUIRE(one.size() == 1);
  CHECK(one[0].is_zero());
  for (const BigRational& c : series_ode_residual_coeffs(compute_coeffs(60))) CHECK(c.is_zero());

  const CoeffTable bad = compute_coeffs(3).with_replaced(3, BigRational(1, 30));
  const auto r = series_ode_residual_coeffs(bad);
  REQUIRE(r.size() == 3);
  CHECK(r[0].is_zero());
  CHECK(r[1].is_zero());
  CHECK_FALSE(r[2].is_zero());
}
