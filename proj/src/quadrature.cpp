#include "connexion/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace connexion {

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  GaussLegendre rule{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi's initial guess, then Newton on P_n in long double.
    long double x = std::cos(std::numbers::pi_v<long double> * (i + 0.75L) / (n + 0.5L));
    long double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      long double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const long double pn = p1;
      dp = n * (x * pn - p0) / (x * x - 1);
      const long double dx = pn / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-19L) break;
    }
    const long double w = 2 / ((1 - x * x) * dp * dp);
    // map [-1, 1] -> [0, 1]; store ascending
    rule.nodes[i] = static_cast<double>((1 - x) / 2);
    rule.nodes[n - 1 - i] = static_cast<double>((1 + x) / 2);
    rule.weights[i] = rule.weights[n - 1 - i] = static_cast<double>(w / 2);
  }
  return rule;
}

Eigen::VectorXd chebyshev_points(int n, double a, double b) {
  if (n < 2) throw std::invalid_argument("chebyshev_points: need at least two nodes");
  Eigen::VectorXd x(n);
  for (int j = 0; j < n; ++j) {
    const double c = std::cos(std::numbers::pi * j / (n - 1));
    x[j] = a + (b - a) * (1 - c) / 2;
  }
  x[0] = a;
  x[n - 1] = b;
  return x;
}

Eigen::VectorXd chebyshev_weights(int n) {
  Eigen::VectorXd w(n);
  for (int j = 0; j < n; ++j) w[j] = (j % 2 == 0) ? 1.0 : -1.0;
  w[0] *= 0.5;
  w[n - 1] *= 0.5;
  return w;
}

}  // namespace connexion
