#include "connexion/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace connexion {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

// PI controller exponents and limits.
constexpr double kAlpha = 0.7 / 5, kBeta = 0.4 / 5, kSafety = 0.9, kMinFactor = 0.2, kMaxFactor = 5.0;

template <int D>
using State = Eigen::Matrix<double, D, 1>;

// Cubic Hermite on [x0, x1] from values and slopes at both ends.
double hermite(double x0, double y0, double d0, double x1, double y1, double d1, double x) {
  const double h = x1 - x0;
  const double s = (x - x0) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * d1;
}

// Root of g on [lo, hi] with g(lo) >= 0 > g(hi).
template <class G>
double bisect(G g, double lo, double hi) {
  for (int i = 0; i < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(hi)); ++i) {
    const double mid = (lo + hi) / 2;
    if (g(mid) >= 0) lo = mid; else hi = mid;
  }
  return hi;
}

// Adaptive integration landing exactly on multiples of `stride`. on_step sees
// each accepted step (x0, u0, f0) -> (x1, u1, f1) and returns false to stop.
template <int D, class Rhs, class OnSample, class OnStep>
StepStats dopri(Rhs&& rhs, State<D> u, double x_end, double tol, double stride, OnSample&& on_sample,
                OnStep&& on_step) {
  if (!(x_end > 0)) throw std::invalid_argument("integrate: x_max must be positive");
  if (!(tol > 0)) throw std::invalid_argument("integrate: tol must be positive");
  if (!(stride > 0)) throw std::invalid_argument("integrate: stride must be positive");

  StepStats stats;
  stats.tol = tol;
  stats.min_step = std::numeric_limits<double>::infinity();
  double x = 0;
  State<D> f = rhs(x, u);
  on_sample(x, u, f);
  std::size_t next_index = 1;
  double h = std::min(stride, 1e-2 * std::pow(tol, 0.2));
  double err_prev = 1.0;
  bool last_rejected = false;

  while (x < x_end) {
    const double target = std::min(x_end, static_cast<double>(next_index) * stride);
    bool lands = false;
    double step = h;
    if (x + step >= target - 1e-12 * std::max(1.0, std::abs(target))) {
      step = target - x;
      lands = true;
    }
    if (step < 1e-12 * std::max(1.0, std::abs(x))) {
      throw IntegrationError("integrate: step size underflow at x = " + std::to_string(x), x);
    }

    const State<D> k1 = f;
    const State<D> k2 = rhs(x + c2 * step, u + step * (a21 * k1));
    const State<D> k3 = rhs(x + c3 * step, u + step * (a31 * k1 + a32 * k2));
    const State<D> k4 = rhs(x + c4 * step, u + step * (a41 * k1 + a42 * k2 + a43 * k3));
    const State<D> k5 = rhs(x + c5 * step, u + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const State<D> k6 = rhs(x + step, u + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const State<D> u_new = u + step * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const State<D> k7 = rhs(x + step, u_new);
    const State<D> err_vec = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err = 0;
    for (int i = 0; i < u.size(); ++i) {
      const double scale = tol + tol * std::max(std::abs(u[i]), std::abs(u_new[i]));
      err = std::max(err, std::abs(err_vec[i]) / scale);
    }
    if (!std::isfinite(err) || !u_new.allFinite()) err = std::numeric_limits<double>::infinity();

    if (err <= 1.0) {
      const double x_new = lands ? target : x + step;
      ++stats.accepted;
      stats.min_step = std::min(stats.min_step, step);
      const bool go_on = on_step(x, u, k1, x_new, u_new, k7);
      if (lands) {
        ++next_index;
        if (go_on) on_sample(x_new, u_new, k7);
      }
      x = x_new;
      u = u_new;
      f = k7;
      if (!go_on) break;
      double factor = err == 0 ? kMaxFactor
                               : kSafety * std::pow(err, -kAlpha) * std::pow(err_prev, kBeta);
      factor = std::clamp(factor, kMinFactor, kMaxFactor);
      if (last_rejected) factor = std::min(factor, 1.0);
      // A step shortened to land on a sample says little about the natural size.
      h = lands ? std::max(h, step * factor) : step * factor;
      err_prev = std::max(err, 1e-4);
      last_rejected = false;
    } else {
      ++stats.rejected;
      const double factor = std::isfinite(err) ? std::max(kMinFactor, kSafety * std::pow(err, -0.2)) : kMinFactor;
      h = step * factor;
      last_rejected = true;
    }
  }
  if (stats.accepted == 0) stats.min_step = 0;
  return stats;
}

}  // namespace

std::string to_string(ShotKind kind) {
  switch (kind) {
    case ShotKind::Overshoot: return "overshoot";
    case ShotKind::Undershoot: return "undershoot";
    case ShotKind::Converged: return "converged";
  }
  return "unknown";
}

bool Trajectory::reached_end() const {
  return !stopped_by && !samples.empty() && samples.back().x >= x_max - 1e-12 * std::max(1.0, x_max);
}

Trajectory integrate_second_order(double a, double x_max, double tol, const OdeOptions& opts) {
  Trajectory traj;
  traj.stride = opts.stride;
  traj.x_max = x_max;
  auto rhs = [](double, const State<2>& u) {
    State<2> d;
    d << u[1], u[1] - u[0] + u[0] * u[0] * u[0];
    return d;
  };
  auto on_sample = [&](double x, const State<2>& u, const State<2>&) { traj.samples.push_back({x, u[0], u[1]}); };

  auto on_step = [&](double x0, const State<2>& u0, const State<2>& f0, double x1, const State<2>& u1,
                     const State<2>& f1) {
    if (!opts.stop_margin) return true;
    const double m = *opts.stop_margin;
    auto y_at = [&](double x) { return hermite(x0, u0[0], f0[0], x1, u1[0], f1[0], x); };
    auto yp_at = [&](double x) { return hermite(x0, u0[1], f0[1], x1, u1[1], f1[1], x); };
    std::optional<ShotKind> kind;
    double x_event = x1;
    if (u1[0] > 1 + m) {
      kind = ShotKind::Overshoot;
      x_event = bisect([&](double x) { return (1 + m) - y_at(x); }, x0, x1);
    } else if (u1[1] < 0 && u1[0] < 1 - m) {
      kind = ShotKind::Undershoot;
      x_event = bisect([&](double x) { return std::max(yp_at(x), y_at(x) - (1 - m)); }, x0, x1);
    }
    if (!kind) return true;
    traj.samples.push_back({x_event, y_at(x_event), yp_at(x_event)});
    traj.stopped_by = kind;
    return false;
  };

  State<2> u0;
  u0 << 0.0, a;
  traj.meta = dopri<2>(rhs, u0, x_max, tol, opts.stride, on_sample, on_step);
  return traj;
}

ShotOutcome classify(const Trajectory& traj, double margin) {
  if (!(margin > 0 && margin < 0.5)) throw std::invalid_argument("classify: margin must lie in (0, 0.5)");
  if (traj.samples.empty()) throw std::invalid_argument("classify: empty trajectory");
  for (const Sample& s : traj.samples) {
    if (s.y > 1 + margin) return {ShotKind::Overshoot, s.x, s.y};
    if (s.yp < 0 && s.y < 1 - margin) return {ShotKind::Undershoot, s.x, s.y};
  }
  const Sample& last = traj.samples.back();
  if (traj.reached_end() && std::abs(last.y - 1) <= margin && std::abs(last.yp) <= margin) {
    return {ShotKind::Converged, last.x, last.y};
  }
  throw AmbiguousShot("classify: trajectory ends at x = " + std::to_string(last.x) + " with y = " +
                      std::to_string(last.y) + " without a decision; increase x_max");
}

ShootResult shoot(const ShootOptions& opts) {
  if (!(opts.tol > 0)) throw std::invalid_argument("shoot: bisection tolerance must be positive");
  if (!(opts.lo < opts.hi)) throw std::invalid_argument("shoot: need lo < hi");
  OdeOptions ode;
  ode.stop_margin = opts.margin;
  auto outcome = [&](double a) {
    return classify(integrate_second_order(a, opts.x_max, opts.rk_tol, ode), opts.margin).kind;
  };

  const ShotKind lo_kind = outcome(opts.lo);
  const ShotKind hi_kind = outcome(opts.hi);
  if (lo_kind != ShotKind::Undershoot || hi_kind != ShotKind::Overshoot) {
    throw SeedBracketError("shoot: seed bracket [" + std::to_string(opts.lo) + ", " + std::to_string(opts.hi) +
                           "] classifies as (" + to_string(lo_kind) + ", " + to_string(hi_kind) +
                           "), expected (undershoot, overshoot)");
  }

  ShootResult result;
  result.a_lo = opts.lo;
  result.a_hi = opts.hi;
  while (result.a_hi - result.a_lo > opts.tol) {
    const double mid = result.midpoint();
    if (mid <= result.a_lo || mid >= result.a_hi) break;  // no representable midpoint left
    const ShotKind kind = outcome(mid);
    if (kind == ShotKind::Undershoot) {
      result.a_lo = mid;
    } else if (kind == ShotKind::Overshoot) {
      result.a_hi = mid;
    } else {
      result.a_lo = result.a_hi = mid;
      result.hit_converged = true;
    }
    result.history.push_back({result.a_lo, result.a_hi, kind});
  }
  return result;
}

FirstOrderRhs::FirstOrderRhs(const CoeffTable& table) {
  b_.reserve(table.size());
  for (const BigRational& b : table) b_.push_back(b.to_double());
}

double FirstOrderRhs::operator()(double y) const {
  const double w = 1 - y;
  double acc = 0;
  for (std::size_t n = b_.size(); n-- > 0;) acc = acc * w + b_[n];
  return -acc * w;
}

Trajectory integrate_first_order(const CoeffTable& table, double y0, double x_max, double tol, double stride) {
  if (!(y0 > 0 && y0 < 1)) throw std::invalid_argument("integrate_first_order: y0 must lie in (0, 1)");
  const FirstOrderRhs slope(table);
  Trajectory traj;
  traj.stride = stride;
  traj.x_max = x_max;
  auto rhs = [&](double, const State<1>& u) {
    if (!(std::abs(1 - u[0]) <= 1)) {
      throw IntegrationError("integrate_first_order: y left [0, 2]", 0);
    }
    return State<1>(slope(u[0]));
  };
  auto on_sample = [&](double x, const State<1>& u, const State<1>& f) { traj.samples.push_back({x, u[0], f[0]}); };
  auto on_step = [](double, const State<1>&, const State<1>&, double, const State<1>&, const State<1>&) {
    return true;
  };
  traj.meta = dopri<1>(rhs, State<1>(y0), x_max, tol, stride, on_sample, on_step);
  return traj;
}

double sample_at(const Trajectory& traj, double x) {
  const auto& s = traj.samples;
  if (s.empty() || x < s.front().x || x > s.back().x) {
    throw std::out_of_range("sample_at: x = " + std::to_string(x) + " outside the trajectory");
  }
  auto it = std::lower_bound(s.begin(), s.end(), x, [](const Sample& a, double v) { return a.x < v; });
  if (it->x == x) return it->y;
  const Sample& hi = *it;
  const Sample& lo = *(it - 1);
  return hermite(lo.x, lo.y, lo.yp, hi.x, hi.y, hi.yp, x);
}

std::optional<double> first_crossing(const Trajectory& traj, double level) {
  const auto& s = traj.samples;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i].y == level) return s[i].x;
    if (s[i].y < level && s[i + 1].y >= level) {
      const Sample& lo = s[i];
      const Sample& hi = s[i + 1];
      return bisect([&](double x) { return level - hermite(lo.x, lo.y, lo.yp, hi.x, hi.y, hi.yp, x); }, lo.x, hi.x);
    }
  }
  if (!s.empty() && s.back().y == level) return s.back().x;
  return std::nullopt;
}

Real f_residual(const Trajectory& traj) {
  const auto& s = traj.samples;
  if (s.size() < 3) throw std::invalid_argument("f_residual: need at least three samples");
  if (s.back().x - s.front().x < 1) throw std::invalid_argument("f_residual: trajectory must span at least 1 in x");
  Real worst = 0;
  Real r_prev = exp(Real(s[0].x));
  Real r = exp(Real(s[1].x));
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const Real r_next = exp(Real(s[i + 1].x));
    const Real h1 = r - r_prev;
    const Real h2 = r_next - r;
    const Real f0 = s[i - 1].y, f1 = s[i].y, f2 = s[i + 1].y;
    const Real f2nd = 2 * (f0 * h2 - f1 * (h1 + h2) + f2 * h1) / (h1 * h2 * (h1 + h2));
    const Real res = abs(r * r * f2nd + f1 - f1 * f1 * f1);
    if (res > worst) worst = res;
    r_prev = r;
    r = r_next;
  }
  return worst;
}

}  // namespace connexion
