#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "connexion/coeffs.hpp"
#include "connexion/real.hpp"

namespace connexion {

/// A truncated-series value with a heuristic tail estimate.
struct SeriesEval {
  std::size_t N = 0;
  Real value;
  /// Geometric tail estimate; +inf unless an empirical ratio bound below 1
  /// was found. Not a rigorous bound.
  Real est_tail;
  /// The truncated value itself when it is rational.
  std::optional<BigRational> exact;
  /// Exact radicand, for the square-root formula.
  std::optional<BigRational> radicand;
  /// Set when the formula is undefined at this truncation (value is NaN).
  std::optional<std::string> domain_signal;

  bool tail_finite() const;
};

/// Rigorous two-sided enclosure lower < a* < upper_real.
struct AStarBracket {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  BigRational lower_sq;  ///< 1/2 + 2 sum_{n<=n1} b_n/(n+1)
  BigRational upper;     ///< -sum_{n<=n2} b_n
  Real lower;            ///< sqrt(lower_sq), rounded down
  Real upper_real;       ///< upper, rounded up

  /// upper_real - lower, rounded up.
  Real width() const;
};

struct RadiusEstimate {
  Real estimate;             ///< mean of the last `window` ratios
  std::size_t window = 0;
  std::vector<Real> ratios;  ///< b_n / b_{n+1} for n = 2 .. N-1; ratios[0] is n = 2
};

inline constexpr std::size_t kDefaultRadiusWindow = 20;
inline constexpr std::size_t kTailWindow = 20;

/// sum_{n<=N} b_n z^n. Throws std::domain_error when |z| > 1.
SeriesEval eval_P(const Real& z, const CoeffTable& table);

/// Exact partial sum at a rational point (no range restriction).
BigRational eval_P_exact(const BigRational& z, const CoeffTable& table);

/// -sum_{n<=N} b_n, an upper bound for a* once N >= 2.
SeriesEval astar_series(const CoeffTable& table);

/// sqrt(1/2 + 2 sum_{n<=N} b_n/(n+1)), a lower bound for a* once N >= 2.
/// A negative radicand is reported through domain_signal.
SeriesEval astar_sqrt(const CoeffTable& table);

/// Exact radicand 1/2 + 2 sum_{n<=N} b_n/(n+1) of the first N coefficients.
BigRational astar_radicand(const CoeffTable& table, std::size_t n);

/// Bracket from the first n1 coefficients (lower) and n2 (upper).
/// Throws std::invalid_argument unless 2 <= n1 <= N and 1 <= n2 <= N.
AStarBracket astar_bounds(const CoeffTable& table, std::size_t n1, std::size_t n2);

/// Needs N >= window + 3.
RadiusEstimate radius_estimate(const CoeffTable& table, std::size_t window = kDefaultRadiusWindow);

/// 1/2 P_N(z)^2 - sum b_n z^(n+1)/(n+1) - z^2 + z^3 - z^4/4 for 0 <= z <= 1.
Real integral_residual(const CoeffTable& table, const Real& z);

/// -P_N(1 - y), the slope of the first-order reduction; needs 0 <= 1-y <= 1.
Real first_order_rhs(const Real& y, const CoeffTable& table);

}  // namespace connexion
