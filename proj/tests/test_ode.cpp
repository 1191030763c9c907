#include <doctest.h>

#include <cmath>

#include "connexion/ode.hpp"
#include "connexion/series.hpp"

using namespace connexion;

namespace {

double series_astar() { return astar_series(compute_coeffs(1000)).value.convert_to<double>(); }

}  // namespace

TEST_CASE("zero slope stays on the equilibrium") {
  const Trajectory t = integrate_second_order(0.0, 10, 1e-10);
  CHECK(t.reached_end());
  for (const Sample& s : t.samples) {
    CHECK(s.y == 0);
    CHECK(s.yp == 0);
  }
}

TEST_CASE("samples land on the stride grid") {
  const Trajectory t = integrate_second_order(0.1, 2, 1e-10, OdeOptions{0.05, std::nullopt});
  REQUIRE(t.samples.size() == 41);
  for (std::size_t i = 1; i < t.samples.size(); ++i) {
    CHECK(t.samples[i].x > t.samples[i - 1].x);
    CHECK(t.samples[i].x - t.samples[i - 1].x <= 0.05 + 1e-12);
  }
  CHECK(t.samples.back().x == 2.0);
}

TEST_CASE("tiny slopes follow the linearized solution") {
  const double a = 1e-6;
  const Trajectory t = integrate_second_order(a, 0.1, 1e-12, OdeOptions{0.001, std::nullopt});
  const double w = std::sqrt(3.0) / 2;
  for (const Sample& s : t.samples) {
    if (s.x == 0) continue;
    const double lin = a * std::exp(s.x / 2) * (2 / std::sqrt(3.0)) * std::sin(w * s.x);
    CHECK(std::abs(s.y - lin) <= 0.01 * std::abs(lin));
  }
}

TEST_CASE("classifier on the seeds and near a*") {
  // Without event stops the overshooting branch blows up in finite x.
  const OdeOptions stop{0.01, kDefaultMargin};
  CHECK(classify(integrate_second_order(1.0, kDefaultXMax, 1e-10, stop)).kind == ShotKind::Overshoot);
  CHECK(classify(integrate_second_order(0.01, kDefaultXMax, 1e-10, stop)).kind == ShotKind::Undershoot);

  // Near a* the shot hovers at y = 1 long enough to classify as converged on
  // a shorter window.
  const double a = series_astar();
  const ShotOutcome near = classify(integrate_second_order(a, 12, 1e-10, stop));
  CHECK(near.kind == ShotKind::Converged);
  CHECK(std::abs(near.y_event - 1) <= kDefaultMargin);
}

TEST_CASE("classification is monotone across the seed bracket") {
  std::vector<ShotKind> kinds;
  for (int i = 0; i <= 24; ++i) {
    const double a = kSeedLo + (kSeedHi - kSeedLo) * i / 24.0;
    kinds.push_back(classify(integrate_second_order(a, kDefaultXMax, 1e-10, OdeOptions{0.01, kDefaultMargin})).kind);
  }
  std::size_t switches = 0;
  for (std::size_t i = 1; i < kinds.size(); ++i) {
    CHECK_FALSE((kinds[i - 1] == ShotKind::Overshoot && kinds[i] == ShotKind::Undershoot));
    switches += kinds[i] != kinds[i - 1] ? 1 : 0;
  }
  CHECK(kinds.front() == ShotKind::Undershoot);
  CHECK(kinds.back() == ShotKind::Overshoot);
  CHECK(switches == 1);
}

TEST_CASE("shooting bracket") {
  const ShootResult r = shoot();
  CHECK(r.width() <= 1e-9);
  CHECK(r.a_lo > std::sqrt(1.0 / 80));
  CHECK(r.a_hi < 0.25);
  CHECK(std::abs(r.midpoint() - series_astar()) <= 1e-6);
  double previous = kSeedHi - kSeedLo;
  for (const BisectionStep& s : r.history) {
    CHECK((s.hi - s.lo) == doctest::Approx(previous / 2).epsilon(1e-12));
    previous = s.hi - s.lo;
  }
}

TEST_CASE("halving the bisection tolerance moves the estimate by less than the old width") {
  ShootOptions coarse;
  coarse.tol = 1e-8;
  ShootOptions fine;
  fine.tol = 5e-9;
  const ShootResult a = shoot(coarse);
  const ShootResult b = shoot(fine);
  CHECK(std::abs(a.midpoint() - b.midpoint()) < a.width());
}

TEST_CASE("misclassified seeds are rejected") {
  ShootOptions opts;
  opts.lo = 0.5;
  CHECK_THROWS_AS(shoot(opts), SeedBracketError);
}

TEST_CASE("the near-critical solution rises monotonically below 1") {
  const Trajectory t = integrate_second_order(series_astar(), 8, 1e-10, OdeOptions{0.01, kDefaultMargin});
  REQUIRE(t.reached_end());
  for (const Sample& s : t.samples) {
    if (s.x == 0) continue;
    CHECK(s.y > 0);
    CHECK(s.y < 1);
    CHECK(s.yp > 0);
  }
}

TEST_CASE("first-order equation") {
  const CoeffTable table = compute_coeffs(400);
  const Trajectory still = integrate_first_order(table, 1 - 1e-12, 10, 1e-10);
  for (const Sample& s : still.samples) CHECK(std::abs(s.y - 1) <= 1e-10);

  const FirstOrderRhs rhs(table);
  CHECK(rhs(0.0) == doctest::Approx(astar_series(table).value.convert_to<double>()).epsilon(1e-14));
  CHECK(rhs(1.0) == 0.0);
  CHECK_THROWS_AS(integrate_first_order(table, 0.0, 1, 1e-10), std::invalid_argument);
  CHECK_THROWS_AS(integrate_first_order(table, 1.0, 1, 1e-10), std::invalid_argument);
}

TEST_CASE("first-order and second-order trajectories agree after alignment") {
  const CoeffTable table = compute_coeffs(1000);
  const double a = astar_series(table).value.convert_to<double>();
  const Trajectory second = integrate_second_order(a, 8, 1e-10, OdeOptions{0.01, kDefaultMargin});
  const auto x1 = first_crossing(second, 0.5);
  REQUIRE(x1.has_value());
  const Trajectory first = integrate_first_order(table, 0.5, 4, 1e-10);
  for (const Sample& s : first.samples) CHECK(std::abs(s.y - sample_at(second, s.x + *x1)) < 1e-8);
}

TEST_CASE("r-domain residual") {
  Trajectory zero;
  Trajectory one;
  for (int i = 0; i <= 200; ++i) {
    zero.samples.push_back({i * 0.01, 0, 0});
    one.samples.push_back({i * 0.01, 1, 0});
  }
  CHECK(f_residual(zero) == 0);
  CHECK(f_residual(one) == 0);
  Trajectory tiny;
  tiny.samples = {{0, 0, 0}, {0.1, 0, 0}};
  CHECK_THROWS_AS(f_residual(tiny), std::invalid_argument);

  const double a = shoot().midpoint();
  const Real coarse = f_residual(integrate_second_order(a, 10, 1e-10, OdeOptions{0.02, std::nullopt}));
  const Real fine = f_residual(integrate_second_order(a, 10, 1e-10, OdeOptions{0.01, std::nullopt}));
  const double ratio = (coarse / fine).convert_to<double>();
  CHECK(ratio == doctest::Approx(4).epsilon(0.1));
}

TEST_CASE("step underflow is reported with its location") {
  try {
    integrate_second_order(1.0, 30, 1e-10);
    FAIL("expected blow-up");
  } catch (const IntegrationError& e) {
    CHECK(e.x() > 0);
    CHECK(e.x() < 30);
  }
}
