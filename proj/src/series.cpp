#include "connexion/series.hpp"

#include <limits>
#include <stdexcept>

namespace connexion {

namespace {

// Balanced summation keeps the intermediate denominators from growing one
// term at a time.
mpq_class tree_sum(std::vector<mpq_class>& terms, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return terms[lo];
  if (hi == lo) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  return tree_sum(terms, lo, mid) + tree_sum(terms, mid, hi);
}

Real infinity() { return std::numeric_limits<Real>::infinity(); }

// |b_N z^N| rho / (1 - rho), rho = |z| max |b_{n+1} / b_n| over the trailing window.
Real geometric_tail(const CoeffTable& table, const Real& abs_z) {
  const std::size_t n_max = table.size();
  if (abs_z == 0) return Real(0);
  if (n_max < 2) return infinity();
  const std::size_t first = n_max > kTailWindow ? n_max - kTailWindow : 1;
  Real rho = 0;
  Real prev = abs(to_real(table.b(first)));
  for (std::size_t n = first; n < n_max; ++n) {
    const Real next = abs(to_real(table.b(n + 1)));
    if (prev == 0) return infinity();
    rho = std::max(rho, Real(next / prev));
    prev = next;
  }
  rho *= abs_z;
  if (rho >= 1) return infinity();
  return prev * pow(abs_z, n_max) * rho / (1 - rho);
}

}  // namespace

bool SeriesEval::tail_finite() const { return boost::multiprecision::isfinite(est_tail); }

Real AStarBracket::width() const { return sub_rounded(upper_real, lower, Rounding::Up); }

SeriesEval eval_P(const Real& z, const CoeffTable& table) {
  if (abs(z) > 1) throw std::domain_error("eval_P: |z| > 1 is outside the supported range");
  SeriesEval out;
  out.N = table.size();
  Real acc = 0;
  for (std::size_t n = table.size(); n >= 1; --n) acc = acc * z + to_real(table.b(n));
  out.value = acc * z;
  out.est_tail = geometric_tail(table, abs(z));
  return out;
}

BigRational eval_P_exact(const BigRational& z, const CoeffTable& table) {
  mpq_class acc = 0;
  for (std::size_t n = table.size(); n >= 1; --n) acc = acc * z.raw() + table.b(n).raw();
  return BigRational(mpq_class(acc * z.raw()));
}

SeriesEval astar_series(const CoeffTable& table) {
  std::vector<mpq_class> terms;
  terms.reserve(table.size());
  for (const BigRational& b : table) terms.emplace_back(-b.raw());
  SeriesEval out;
  out.N = table.size();
  out.exact = BigRational(tree_sum(terms, 0, terms.size()));
  out.value = to_real(*out.exact);
  out.est_tail = geometric_tail(table, Real(1));
  return out;
}

BigRational astar_radicand(const CoeffTable& table, std::size_t n) {
  if (n < 1 || n > table.size()) throw std::invalid_argument("astar_radicand: N outside the table");
  std::vector<mpq_class> terms;
  terms.reserve(n + 1);
  terms.emplace_back(1, 2);
  for (std::size_t k = 1; k <= n; ++k) {
    terms.emplace_back(table.b(k).raw() * 2 / static_cast<long>(k + 1));
  }
  return BigRational(tree_sum(terms, 0, terms.size()));
}

SeriesEval astar_sqrt(const CoeffTable& table) {
  SeriesEval out;
  out.N = table.size();
  out.radicand = astar_radicand(table, table.size());
  if (out.radicand->sign() < 0) {
    out.domain_signal = "negative radicand " + out.radicand->to_string() + " at N = " + std::to_string(out.N);
    out.value = std::numeric_limits<Real>::quiet_NaN();
    out.est_tail = infinity();
    return out;
  }
  out.value = sqrt_rounded(*out.radicand, Rounding::Nearest);
  // The radicand's tail is 2 sum_{n>N} b_n/(n+1) <= 2 tail/(N+2); sqrt(r + t) - sqrt(r) <= t / (2 sqrt(r)).
  const Real radicand_tail = 2 * geometric_tail(table, Real(1)) / Real(out.N + 2);
  if (out.value > 0 && boost::multiprecision::isfinite(radicand_tail)) {
    out.est_tail = radicand_tail / (2 * out.value);
  } else {
    out.est_tail = infinity();
  }
  return out;
}

AStarBracket astar_bounds(const CoeffTable& table, std::size_t n1, std::size_t n2) {
  if (n1 < 2) throw std::invalid_argument("astar_bounds: n1 must be at least 2");
  if (n2 < 1) throw std::invalid_argument("astar_bounds: n2 must be at least 1");
  if (n1 > table.size() || n2 > table.size()) {
    throw std::invalid_argument("astar_bounds: n1 and n2 must not exceed the table length " +
                                std::to_string(table.size()));
  }
  AStarBracket out;
  out.n1 = n1;
  out.n2 = n2;
  out.lower_sq = astar_radicand(table, n1);
  if (out.lower_sq.sign() < 0) {
    throw std::domain_error("astar_bounds: negative radicand; table violates positivity");
  }
  std::vector<mpq_class> terms;
  terms.reserve(n2);
  for (std::size_t k = 1; k <= n2; ++k) terms.emplace_back(-table.b(k).raw());
  out.upper = BigRational(tree_sum(terms, 0, terms.size()));
  out.lower = sqrt_rounded(out.lower_sq, Rounding::Down);
  out.upper_real = to_real(out.upper, Rounding::Up);
  return out;
}

RadiusEstimate radius_estimate(const CoeffTable& table, std::size_t window) {
  if (window < 1) throw std::invalid_argument("radius_estimate: window must be positive");
  if (table.size() < window + 3) {
    throw std::invalid_argument("radius_estimate: need at least window + 3 coefficients");
  }
  RadiusEstimate out;
  out.window = window;
  Real prev = to_real(table.b(2));
  for (std::size_t n = 2; n < table.size(); ++n) {
    Real next = to_real(table.b(n + 1));
    out.ratios.push_back(prev / next);
    prev = std::move(next);
  }
  Real sum = 0;
  for (std::size_t i = out.ratios.size() - window; i < out.ratios.size(); ++i) sum += out.ratios[i];
  out.estimate = sum / window;
  return out;
}

Real integral_residual(const CoeffTable& table, const Real& z) {
  if (z < 0 || z > 1) throw std::invalid_argument("integral_residual: z must lie in [0, 1]");
  Real p = 0;
  Real antiderivative = 0;
  for (std::size_t n = table.size(); n >= 1; --n) {
    const Real b = to_real(table.b(n));
    p = p * z + b;
    antiderivative = antiderivative * z + b / (n + 1);
  }
  p *= z;
  antiderivative *= z * z;
  const Real z2 = z * z;
  return p * p / 2 - antiderivative - z2 + z2 * z - z2 * z2 / 4;
}

Real first_order_rhs(const Real& y, const CoeffTable& table) {
  const Real w = 1 - y;
  if (w < 0 || w > 1) throw std::invalid_argument("first_order_rhs: need 0 <= 1 - y <= 1");
  return -eval_P(w, table).value;
}

}  // namespace connexion
