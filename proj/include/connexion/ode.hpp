#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "connexion/coeffs.hpp"
#include "connexion/real.hpp"

namespace connexion {

struct Sample {
  double x = 0;
  double y = 0;
  double yp = 0;
};

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double tol = 0;
  double min_step = 0;  ///< smallest accepted step
};

enum class ShotKind { Overshoot, Undershoot, Converged };

std::string to_string(ShotKind kind);

/// A sampled solution. Samples fall exactly on multiples of `stride` (the
/// integrator shortens steps to land on them) plus, when integration stopped
/// at a classifier event, one final sample at the located event.
struct Trajectory {
  std::vector<Sample> samples;
  StepStats meta;
  double stride = 0;
  double x_max = 0;  ///< requested end point
  /// Set when integration stopped early at a classifier event.
  std::optional<ShotKind> stopped_by;

  bool reached_end() const;
};

/// Step size underflow; `x` is where it happened.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double x) : std::runtime_error(what), x_(x) {}
  double x() const { return x_; }

 private:
  double x_;
};

struct OdeOptions {
  double stride = 0.01;  ///< sample spacing in x
  /// Stop at the first overshoot/undershoot event for this margin.
  std::optional<double> stop_margin;
};

/// y'' = y' - y + y^3 from (y, y')(0) = (0, a) on [0, x_max]. Dormand-Prince
/// 5(4) with PI step control; per-step error norm
/// max_i |err_i| / (tol + tol |u_i|) <= 1.
Trajectory integrate_second_order(double a, double x_max, double tol, const OdeOptions& opts = {});

inline constexpr double kDefaultMargin = 0.02;
inline constexpr double kDefaultXMax = 30;
inline constexpr double kSeedLo = 0.01;
inline constexpr double kSeedHi = 1.0;

struct ShotOutcome {
  ShotKind kind = ShotKind::Converged;
  double x_event = 0;
  double y_event = 0;
};

/// None of the classifier rules fired; a longer x_max is needed.
class AmbiguousShot : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Overshoot if y > 1 + margin somewhere; Undershoot if y' < 0 while
/// y < 1 - margin; Converged if the end point was reached with |y - 1| <= margin
/// and |y'| <= margin. The earliest event wins.
ShotOutcome classify(const Trajectory& traj, double margin = kDefaultMargin);

/// The seed interval did not classify as (Undershoot, Overshoot).
class SeedBracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BisectionStep {
  double lo = 0;
  double hi = 0;
  ShotKind mid_kind = ShotKind::Converged;
};

struct ShootResult {
  double a_lo = 0;
  double a_hi = 0;
  std::vector<BisectionStep> history;
  /// True if a midpoint classified as Converged and ended the search.
  bool hit_converged = false;

  double midpoint() const { return (a_lo + a_hi) / 2; }
  double width() const { return a_hi - a_lo; }
};

struct ShootOptions {
  double x_max = kDefaultXMax;
  double tol = 1e-9;     ///< bisection width
  double margin = kDefaultMargin;
  double rk_tol = 1e-10;
  double lo = kSeedLo;
  double hi = kSeedHi;
};

/// Bisection on the initial slope. The seed interval is classified first and
/// must give (Undershoot, Overshoot).
ShootResult shoot(const ShootOptions& opts = {});

/// y' = -P_N(1 - y) as a double-precision Horner evaluation; agrees with
/// first_order_rhs to rounding.
class FirstOrderRhs {
 public:
  explicit FirstOrderRhs(const CoeffTable& table);
  double operator()(double y) const;

 private:
  std::vector<double> b_;  // b_[n - 1] = b_n
};

/// y' = -P_N(1 - y) from y(0) = y0 on [0, x_max]; yp holds the slope.
/// Needs 0 < y0 < 1.
Trajectory integrate_first_order(const CoeffTable& table, double y0, double x_max, double tol,
                                 double stride = 0.01);

/// Cubic Hermite value of y at x from the bracketing samples.
double sample_at(const Trajectory& traj, double x);

/// First x where y reaches `level`, located on the cubic Hermite interpolant.
std::optional<double> first_crossing(const Trajectory& traj, double level);

/// max |r^2 f'' + f - f^3| over interior samples, with r = e^x, f(r) = y(x),
/// and f'' from the three-point formula on the (geometric) r-grid.
/// Throws std::invalid_argument with fewer than three samples or an x-span
/// shorter than 1.
Real f_residual(const Trajectory& traj);

}  // namespace connexion
