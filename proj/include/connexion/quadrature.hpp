#pragma once

#include <Eigen/Dense>

namespace connexion {

/// Gauss-Legendre rule mapped to [0, 1].
struct GaussLegendre {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// n-point rule on [0, 1]; nodes from Newton iteration on P_n. Exact for
/// polynomials of degree <= 2n - 1.
GaussLegendre gauss_legendre(int n);

/// Chebyshev points of the second kind on [a, b], ascending, both ends included.
Eigen::VectorXd chebyshev_points(int n, double a, double b);

/// Barycentric weights matching chebyshev_points: (-1)^j, halved at the ends.
Eigen::VectorXd chebyshev_weights(int n);

}  // namespace connexion
