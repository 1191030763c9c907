#include <doctest.h>

#include <cmath>
#include <complex>

#include "connexion/picard.hpp"

using namespace connexion;

TEST_CASE("configuration inequalities") {
  const PicardConfig cfg = make_config(10, 0.01);
  CHECK(cfg.gamma == doctest::Approx(10.0 / 27.0).epsilon(1e-14));
  CHECK(cfg.eps == 0.01);
  CHECK(make_config(10, 1e-9).gamma == doctest::Approx(1.0 / 3.0).epsilon(1e-7));

  try {
    make_config(10, 0.5);
    FAIL("expected rejection");
  } catch (const ConfigError& e) {
    CHECK(e.constraint() == "M*eps0 < 2/3");
  }
  CHECK_THROWS_AS(make_config(3, 0.01), ConfigError);
}

TEST_CASE("first iterate has the closed form") {
  const PicardConfig cfg = make_config();
  const auto q0 = initial_iterate<double>(cfg, NodeSet::Interval);
  const auto q1 = picard_step(q0, cfg);
  CHECK(q1(0.0) == 1.0);
  CHECK(q1(0.01) == doctest::Approx(std::sqrt(0.98005)).epsilon(1e-14));
  CHECK(q1(0.01) == doctest::Approx(0.9899747).epsilon(1e-7));
  for (Eigen::Index j = 0; j < q1.nodes.size(); ++j) {
    const double z = q1.nodes[j];
    CHECK(q1.values[j] == doctest::Approx(std::sqrt(1 - 2 * z + z * z / 2)).epsilon(1e-14));
  }
}

TEST_CASE("iterates obey the pointwise bound and contract") {
  const PicardConfig cfg = make_config();
  const PicardRun<double> run = run_picard(cfg, 20);
  REQUIRE(run.iterates.size() == 21);
  CHECK(run.ok);
  for (std::size_t n = 1; n < run.iterates.size(); ++n) {
    const auto& q = run.iterates[n];
    CHECK(q(0.0) == 1.0);
    for (Eigen::Index j = 0; j < q.nodes.size(); ++j) {
      CHECK(std::abs(q.values[j] - 1) <= cfg.M * q.nodes[j]);
      CHECK(q.values[j] > 0);
    }
  }
  CHECK(run.steps.front().sup_diff_over_z <= cfg.M);
  for (const ContractionStep& s : run.steps) {
    CHECK(s.sup_diff <= s.bound * cfg.eps);
    if (s.n > 0) CHECK(s.ratio <= cfg.gamma + 1e-12);
  }
}

TEST_CASE("converged iterate reproduces the series and the fixed-point equation") {
  const PicardConfig cfg = make_config();
  const PicardRun<double> run = run_picard(cfg, 20);
  CHECK(compare_with_series(run.iterates.back(), compute_coeffs(200)) <= Real("1e-8"));
  CHECK(fixed_point_residual(run.iterates.back(), cfg) < 1e-10);
  // q_1 already has the right linear term; the mismatch is second order.
  const Real first = compare_with_series(run.iterates[1], compute_coeffs(200));
  CHECK(first > Real("1e-6"));
  CHECK(first < Real("1e-4"));
}

TEST_CASE("doubling the quadrature nodes leaves the iterate unchanged to rounding") {
  const PicardRun<double> a = run_picard(make_config(10, 0.01, 32, 64), 20);
  const PicardRun<double> b = run_picard(make_config(10, 0.01, 64, 64), 20);
  double diff = 0;
  for (Eigen::Index j = 0; j < a.iterates.back().values.size(); ++j) {
    diff = std::max(diff, std::abs(a.iterates.back().values[j] - b.iterates.back().values[j]));
  }
  CHECK(diff < 1e-14);
}

TEST_CASE("complex circle iteration") {
  const PicardConfig cfg = make_config();
  const CircleReport report = complex_circle_check(cfg, 20);
  CHECK(report.ok);
  CHECK(report.worst_growth <= 1);
  CHECK(report.real_point_mismatch < 1e-13);

  const auto q0 = initial_iterate<std::complex<double>>(cfg, NodeSet::Circle);
  const auto q1 = picard_step(q0, cfg);
  const std::complex<double> w(0, cfg.eps);
  CHECK(std::abs(q1(w) - 1.0) <= cfg.M * cfg.eps);
  CHECK(std::abs(q1(w) - std::sqrt(1.0 - 2.0 * w + w * w / 2.0)) < 1e-13);
  CHECK_THROWS_AS(initial_iterate<double>(cfg, NodeSet::Circle), std::invalid_argument);
}
