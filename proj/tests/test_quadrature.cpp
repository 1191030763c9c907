#include <doctest.h>

#include <cmath>

#include "connexion/quadrature.hpp"

using namespace connexion;

TEST_CASE("Gauss-Legendre on [0, 1] integrates polynomials up to degree 2n-1") {
  for (int n : {1, 4, 16, 32}) {
    const GaussLegendre g = gauss_legendre(n);
    CHECK(g.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double sum = 0;
      for (int i = 0; i < n; ++i) sum += g.weights[i] * std::pow(g.nodes[i], d);
      CHECK(sum == doctest::Approx(1.0 / (d + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("Gauss-Legendre converges on a smooth non-polynomial integrand") {
  const double exact = std::exp(1.0) - 1;
  const GaussLegendre g = gauss_legendre(12);
  double sum = 0;
  for (int i = 0; i < 12; ++i) sum += g.weights[i] * std::exp(g.nodes[i]);
  CHECK(std::abs(sum - exact) < 1e-14);
}

TEST_CASE("Chebyshev points and weights") {
  const Eigen::VectorXd x = chebyshev_points(9, 0, 0.01);
  CHECK(x[0] == 0);
  CHECK(x[8] == doctest::Approx(0.01).epsilon(1e-15));
  for (int i = 1; i < 9; ++i) CHECK(x[i] > x[i - 1]);
  const Eigen::VectorXd w = chebyshev_weights(9);
  CHECK(std::abs(w[0]) == 0.5);
  CHECK(std::abs(w[8]) == 0.5);
  CHECK(w[1] * w[2] < 0);
}
