#include "connexion/picard.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "connexion/series.hpp"

namespace connexion {

namespace {

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

double real_part(double x) { return x; }
double real_part(const std::complex<double>& x) { return x.real(); }

template <class Scalar>
void refresh_circle_coeffs(GridFunction<Scalar>& q) {
  if constexpr (is_complex<Scalar>::value) {
    // Discrete Fourier coefficients of the samples at eps * omega^j are the
    // Taylor coefficients of the interpolant in w / eps.
    const Eigen::Index g = q.values.size();
    q.scaled_coeffs.resize(g);
    for (Eigen::Index k = 0; k < g; ++k) {
      std::complex<double> acc = 0;
      for (Eigen::Index j = 0; j < g; ++j) {
        const double angle = -2 * std::numbers::pi * static_cast<double>((j * k) % g) / static_cast<double>(g);
        acc += q.values[j] * std::polar(1.0, angle);
      }
      q.scaled_coeffs[k] = acc / static_cast<double>(g);
    }
  }
}

// 2 - 2z + z^2/2
template <class Scalar>
Scalar forcing(const Scalar& z) {
  return Scalar(2) - Scalar(2) * z + z * z / Scalar(2);
}

// int_0^1 t q(z t) dt by Gauss-Legendre; exactly q(0)/2 at z = 0.
template <class Scalar>
Scalar inner_integral(const GridFunction<Scalar>& q, const Scalar& z, const GaussLegendre& rule) {
  if (z == Scalar(0)) return q(Scalar(0)) / Scalar(2);
  Scalar acc = 0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
    const double t = rule.nodes[i];
    acc += Scalar(rule.weights[i] * t) * q(z * Scalar(t));
  }
  return acc;
}

template <class Scalar>
ContractionStep compare_steps(const GridFunction<Scalar>& prev, const GridFunction<Scalar>& next,
                              const PicardConfig& cfg, double previous_sup) {
  ContractionStep s;
  s.n = prev.iteration;
  s.bound = cfg.M * std::pow(cfg.gamma, prev.iteration);
  s.min_value = real_part(next.values[0]);
  for (Eigen::Index j = 0; j < next.values.size(); ++j) {
    const double diff = std::abs(next.values[j] - prev.values[j]);
    const double r = std::abs(next.nodes[j]);
    s.sup_diff = std::max(s.sup_diff, diff);
    s.min_value = std::min(s.min_value, real_part(next.values[j]));
    if (r > 0) {
      s.sup_diff_over_z = std::max(s.sup_diff_over_z, diff / r);
      s.growth_margin = std::max(s.growth_margin, std::abs(next.values[j] - Scalar(1)) / r);
    }
  }
  s.ratio = previous_sup > 0 ? s.sup_diff / previous_sup : 0;
  s.ok = s.sup_diff_over_z <= s.bound && s.sup_diff <= s.bound * cfg.eps && s.growth_margin <= cfg.M &&
         s.min_value > 0;
  return s;
}

template <class Scalar>
PicardRun<Scalar> run(const PicardConfig& cfg, int k, NodeSet kind) {
  if (k < 1) throw std::invalid_argument("run_picard: k must be at least 1");
  PicardRun<Scalar> out;
  out.iterates.reserve(static_cast<std::size_t>(k) + 1);
  out.iterates.push_back(initial_iterate<Scalar>(cfg, kind));
  double previous_sup = 0;
  for (int n = 0; n < k; ++n) {
    out.iterates.push_back(picard_step(out.iterates.back(), cfg));
    ContractionStep s = compare_steps(out.iterates[n], out.iterates[n + 1], cfg, previous_sup);
    previous_sup = s.sup_diff;
    out.ok = out.ok && s.ok;
    out.steps.push_back(s);
  }
  return out;
}

}  // namespace

PicardConfig make_config(double M, double eps0, int quad_nodes, int grid_nodes) {
  if (!(M > 0)) throw ConfigError("M > 0", "M = " + std::to_string(M));
  if (!(eps0 > 0)) throw ConfigError("eps0 > 0", "eps0 = " + std::to_string(eps0));
  if (quad_nodes < 1) throw ConfigError("quad_nodes >= 1", std::to_string(quad_nodes));
  if (grid_nodes < 2) throw ConfigError("grid_nodes >= 2", std::to_string(grid_nodes));
  if (!(M * eps0 < 2.0 / 3.0)) {
    throw ConfigError("M*eps0 < 2/3", "M*eps0 = " + std::to_string(M * eps0));
  }
  const double second = (2 + eps0 / 2) * (1 + M * eps0);
  if (!(second <= M)) {
    throw ConfigError("(2 + eps0/2)(1 + M*eps0) <= M", "left side = " + std::to_string(second));
  }
  const double third = (1 + M * eps0) * (2 * M / 3 + 2 + eps0 / 2);
  if (!(third <= M)) {
    throw ConfigError("(1 + M*eps0)(2M/3 + 2 + eps0/2) <= M", "left side = " + std::to_string(third));
  }
  PicardConfig cfg;
  cfg.M = M;
  cfg.eps0 = eps0;
  cfg.eps = std::min(0.25, eps0);
  cfg.gamma = 1 / (3 * (1 - M * cfg.eps));
  cfg.quad_nodes = quad_nodes;
  cfg.grid_nodes = grid_nodes;
  if (!(cfg.gamma < 1)) throw ConfigError("gamma < 1", "gamma = " + std::to_string(cfg.gamma));
  return cfg;
}

template <class Scalar>
Scalar GridFunction<Scalar>::operator()(const Scalar& w) const {
  if (kind == NodeSet::Circle) {
    const Scalar u = w / Scalar(eps);
    Scalar acc = 0;
    for (Eigen::Index k = scaled_coeffs.size(); k-- > 0;) acc = acc * u + scaled_coeffs[k];
    return acc;
  }
  static thread_local Eigen::VectorXd weights;
  if (weights.size() != nodes.size()) weights = chebyshev_weights(static_cast<int>(nodes.size()));
  Scalar num = 0;
  Scalar den = 0;
  for (Eigen::Index j = 0; j < nodes.size(); ++j) {
    const Scalar d = w - nodes[j];
    if (d == Scalar(0)) return values[j];
    const Scalar c = Scalar(weights[j]) / d;
    num += c * values[j];
    den += c;
  }
  return num / den;
}

template <class Scalar>
GridFunction<Scalar> initial_iterate(const PicardConfig& cfg, NodeSet kind) {
  GridFunction<Scalar> q;
  q.kind = kind;
  q.eps = cfg.eps;
  const int g = cfg.grid_nodes;
  q.nodes.resize(g);
  if (kind == NodeSet::Interval) {
    const Eigen::VectorXd x = chebyshev_points(g, 0.0, cfg.eps);
    for (int j = 0; j < g; ++j) q.nodes[j] = Scalar(x[j]);
  } else {
    if constexpr (is_complex<Scalar>::value) {
      for (int j = 0; j < g; ++j) q.nodes[j] = std::polar(cfg.eps, 2 * std::numbers::pi * j / g);
      q.nodes[0] = Scalar(cfg.eps);
    } else {
      throw std::invalid_argument("initial_iterate: the circle needs complex values");
    }
  }
  q.values = GridFunction<Scalar>::Vector::Ones(g);
  q.iteration = 0;
  refresh_circle_coeffs(q);
  return q;
}

template <class Scalar>
GridFunction<Scalar> picard_step(const GridFunction<Scalar>& q, const PicardConfig& cfg) {
  const GaussLegendre rule = gauss_legendre(cfg.quad_nodes);
  GridFunction<Scalar> next = q;
  next.iteration = q.iteration + 1;
  for (Eigen::Index j = 0; j < q.nodes.size(); ++j) {
    const Scalar z = q.nodes[j];
    const Scalar radicand = forcing(z) - Scalar(2) * inner_integral(q, z, rule);
    if (!(real_part(radicand) > 0)) {
      throw PicardError("picard_step: radicand " + std::to_string(real_part(radicand)) + " at node " +
                        std::to_string(j) + " of iterate " + std::to_string(next.iteration));
    }
    next.values[j] = std::sqrt(radicand);
  }
  refresh_circle_coeffs(next);
  return next;
}

PicardRun<double> run_picard(const PicardConfig& cfg, int k) { return run<double>(cfg, k, NodeSet::Interval); }

PicardRun<std::complex<double>> run_picard_circle(const PicardConfig& cfg, int k) {
  return run<std::complex<double>>(cfg, k, NodeSet::Circle);
}

Real compare_with_series(const GridFunction<double>& q, const CoeffTable& table) {
  if (q.kind != NodeSet::Interval) throw std::invalid_argument("compare_with_series: needs an interval iterate");
  Real worst = 0;
  auto check = [&](double z) {
    const Real lhs = -Real(z) * Real(q(z));
    const Real diff = abs(lhs - eval_P(Real(z), table).value);
    if (diff > worst) worst = diff;
  };
  for (Eigen::Index j = 0; j < q.nodes.size(); ++j) {
    check(q.nodes[j]);
    if (j + 1 < q.nodes.size()) check((q.nodes[j] + q.nodes[j + 1]) / 2);
  }
  return worst;
}

double fixed_point_residual(const GridFunction<double>& q, const PicardConfig& cfg) {
  const GaussLegendre rule = gauss_legendre(cfg.quad_nodes);
  double worst = 0;
  for (Eigen::Index j = 0; j < q.nodes.size(); ++j) {
    const double z = q.nodes[j];
    const double rhs = forcing(z) - 2 * inner_integral(q, z, rule);
    worst = std::max(worst, std::abs(q.values[j] * q.values[j] - rhs));
  }
  return worst;
}

CircleReport complex_circle_check(const PicardConfig& cfg, int k) {
  const PicardRun<std::complex<double>> circle = run_picard_circle(cfg, k);
  const PicardRun<double> line = run_picard(cfg, k);
  CircleReport report;
  report.k = k;
  report.steps = circle.steps;
  for (const auto& q : circle.iterates) {
    for (Eigen::Index j = 0; j < q.nodes.size(); ++j) {
      const double ratio = std::abs(q.values[j] - 1.0) / (cfg.M * std::abs(q.nodes[j]));
      report.worst_growth = std::max(report.worst_growth, ratio);
    }
  }
  // Node 0 of the circle is z = eps, the last Chebyshev node of the line.
  report.real_point_mismatch =
      std::abs(circle.iterates.back().values[0] - line.iterates.back().values[line.iterates.back().values.size() - 1]);
  report.ok = circle.ok && report.worst_growth <= 1.0;
  return report;
}

template struct GridFunction<double>;
template struct GridFunction<std::complex<double>>;
template GridFunction<double> initial_iterate<double>(const PicardConfig&, NodeSet);
template GridFunction<std::complex<double>> initial_iterate<std::complex<double>>(const PicardConfig&, NodeSet);
template GridFunction<double> picard_step<double>(const GridFunction<double>&, const PicardConfig&);
template GridFunction<std::complex<double>> picard_step<std::complex<double>>(
    const GridFunction<std::complex<double>>&, const PicardConfig&);

}  // namespace connexion
