#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "connexion/coeffs.hpp"
#include "connexion/quadrature.hpp"
#include "connexion/real.hpp"

namespace connexion {

/// Constants of the q-iteration. Built through make_config, which checks the
/// admissibility inequalities.
struct PicardConfig {
  double M = 10;
  double eps0 = 0.01;
  double eps = 0.01;    ///< min(1/4, eps0)
  double gamma = 0;     ///< 1 / (3 (1 - M eps))
  int quad_nodes = 32;  ///< Gauss-Legendre nodes for the inner integral
  int grid_nodes = 64;  ///< Chebyshev nodes on [0, eps], or points on |z| = eps
};

/// Rejected configuration; `constraint` names the inequality that failed.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string constraint, const std::string& detail)
      : std::invalid_argument(constraint + ": " + detail), constraint_(std::move(constraint)) {}
  const std::string& constraint() const { return constraint_; }

 private:
  std::string constraint_;
};

/// Checks M eps0 < 2/3, (2 + eps0/2)(1 + M eps0) <= M,
/// (1 + M eps0)(2M/3 + 2 + eps0/2) <= M, and gamma < 1.
PicardConfig make_config(double M = 10, double eps0 = 0.01, int quad_nodes = 32, int grid_nodes = 64);

/// Radicand <= 0 (real case) or on the branch cut (complex case).
class PicardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NodeSet {
  Interval,  ///< Chebyshev points on [0, eps], barycentric interpolation
  Circle,    ///< equispaced points on |z| = eps, interpolating polynomial via DFT
};

/// An iterate q_n sampled on a node set. Scalar is double on the real line
/// and std::complex<double> on the circle.
template <class Scalar>
struct GridFunction {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  NodeSet kind = NodeSet::Interval;
  double eps = 0;
  Vector nodes;
  Vector values;
  int iteration = 0;
  /// Circle only: q(w) = sum_k scaled_coeffs[k] (w / eps)^k.
  Vector scaled_coeffs;

  /// Interpolated value at a point of [0, eps] (Interval) or |w| <= eps (Circle).
  Scalar operator()(const Scalar& w) const;
};

/// q_0 == 1 on the requested node set. Circle requires a complex Scalar.
template <class Scalar>
GridFunction<Scalar> initial_iterate(const PicardConfig& cfg, NodeSet kind);

/// q_{n+1}(z) = sqrt(2 - 2z + z^2/2 - 2 int_0^1 t q_n(z t) dt), principal branch.
template <class Scalar>
GridFunction<Scalar> picard_step(const GridFunction<Scalar>& q, const PicardConfig& cfg);

/// One row per step n = 0 .. k-1, comparing q_{n+1} with q_n.
struct ContractionStep {
  int n = 0;
  double sup_diff = 0;          ///< sup_nodes |q_{n+1} - q_n|
  double sup_diff_over_z = 0;   ///< sup_{nodes != 0} |q_{n+1} - q_n| / |z|
  double bound = 0;             ///< M gamma^n
  double ratio = 0;             ///< sup_diff / previous sup_diff (0 for n = 0)
  double growth_margin = 0;     ///< sup_{nodes != 0} |q_{n+1} - 1| / |z|, to compare with M
  double min_value = 0;         ///< min over nodes of Re q_{n+1}
  bool ok = true;               ///< all per-step bounds hold
};

template <class Scalar>
struct PicardRun {
  std::vector<GridFunction<Scalar>> iterates;  ///< q_0 .. q_k
  std::vector<ContractionStep> steps;
  bool ok = true;
};

/// q_0..q_k on [0, eps] with the contraction report.
PicardRun<double> run_picard(const PicardConfig& cfg, int k);

/// Same iteration in complex arithmetic on the circle |z| = eps.
PicardRun<std::complex<double>> run_picard_circle(const PicardConfig& cfg, int k);

/// sup over the nodes and the midpoints between them of |-z q(z) - P_N(z)|.
Real compare_with_series(const GridFunction<double>& q, const CoeffTable& table);

/// sup over nodes of |q(z)^2 - (2 - 2z + z^2/2 - 2 int_0^1 t q(zt) dt)|.
double fixed_point_residual(const GridFunction<double>& q, const PicardConfig& cfg);

struct CircleReport {
  bool ok = true;
  int k = 0;
  double worst_growth = 0;  ///< max over n <= k and nodes of |q_n - 1| / (M |z|)
  double real_point_mismatch = 0;  ///< |q_k(eps) on the circle - q_k(eps) on the line|
  std::vector<ContractionStep> steps;
};

/// Runs the circle iteration and checks |q_n(z) - 1| <= M |z| for all n <= k.
CircleReport complex_circle_check(const PicardConfig& cfg, int k);

}  // namespace connexion
