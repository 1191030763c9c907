#include "connexion/coeffs.hpp"

#include <algorithm>

#include "connexion/detail/multimodular.hpp"

namespace connexion {

CoeffTable::CoeffTable(std::vector<BigRational> coeffs, std::string provenance)
    : n_(coeffs.size()), provenance_(std::move(provenance)) {
  if (coeffs.empty()) throw std::invalid_argument("CoeffTable: at least one coefficient is required");
  coeffs_ = std::make_shared<const std::vector<BigRational>>(std::move(coeffs));
}

const BigRational& CoeffTable::b(std::size_t n) const {
  if (n < 1 || n > n_) {
    throw std::out_of_range("CoeffTable: index " + std::to_string(n) + " outside 1.." + std::to_string(n_));
  }
  return (*coeffs_)[n - 1];
}

CoeffTable CoeffTable::truncated(std::size_t n) const {
  if (n < 1 || n > n_) throw std::out_of_range("CoeffTable::truncated: length " + std::to_string(n));
  return CoeffTable(coeffs_, n, provenance_);
}

CoeffTable CoeffTable::with_replaced(std::size_t n, BigRational value) const {
  b(n);  // range check
  std::vector<BigRational> copy(begin(), end());
  copy[n - 1] = std::move(value);
  return CoeffTable(std::move(copy), provenance_ + "+modified");
}

BigRational seed_coefficient(std::size_t n) {
  switch (n) {
    case 1: return BigRational(-1);
    case 2: return BigRational(3, 4);
    case 3: return BigRational(1, 40);
    default: throw std::out_of_range("seed_coefficient: only b_1..b_3 are seeds");
  }
}

CoeffTable compute_coeffs(std::size_t n) {
  if (n < 1) throw std::invalid_argument("compute_coeffs: N must be at least 1");
  const double need = detail::multimodular_memory_estimate(n);
  if (need > kCoeffMemoryBudget) {
    throw ResourceExhausted("compute_coeffs: N = " + std::to_string(n) + " needs about " +
                            std::to_string(static_cast<long long>(need / (1024 * 1024))) +
                            " MiB, above the configured budget");
  }
  return CoeffTable(detail::multimodular_coefficients(n), "recursion");
}

CoeffTable compute_coeffs_direct(std::size_t n) {
  if (n < 1) throw std::invalid_argument("compute_coeffs_direct: N must be at least 1");
  std::vector<mpq_class> b;
  b.reserve(n);
  for (std::size_t i = 1; i <= std::min<std::size_t>(n, 3); ++i) b.push_back(seed_coefficient(i).raw());
  mpq_class sum;
  for (std::size_t m = 4; m <= n; ++m) {
    sum = 0;
    for (std::size_t k = 2; k < m; ++k) sum += mpq_class(static_cast<long>(k)) * b[k - 1] * b[m - k];
    sum /= static_cast<long>(m + 2);
    b.push_back(sum);
  }
  std::vector<BigRational> out;
  out.reserve(n);
  for (auto& q : b) out.emplace_back(std::move(q));
  return CoeffTable(std::move(out), "recursion-direct");
}

BigRational convolution_sum(const CoeffTable& table, std::size_t n, SumOrder order) {
  if (n < 4 || n > table.size()) throw std::out_of_range("convolution_sum: index " + std::to_string(n));
  mpq_class sum = 0;
  auto term = [&](std::size_t k) {
    sum += mpq_class(static_cast<long>(k)) * table.b(k).raw() * table.b(n + 1 - k).raw();
  };
  if (order == SumOrder::Forward) {
    for (std::size_t k = 2; k < n; ++k) term(k);
  } else {
    for (std::size_t k = n - 1; k >= 2; --k) term(k);
  }
  return BigRational(sum);
}

RecursionCheck check_recursion(const CoeffTable& table) {
  auto fail = [](std::size_t n, std::string why) { return RecursionCheck{false, n, std::move(why)}; };
  const std::size_t n_max = table.size();

  for (std::size_t n = 1; n <= std::min<std::size_t>(n_max, 3); ++n) {
    if (table.b(n) != seed_coefficient(n)) {
      return fail(n, "b_" + std::to_string(n) + " = " + table.b(n).to_string() + ", expected " +
                         seed_coefficient(n).to_string());
    }
  }
  for (std::size_t n = 2; n <= n_max; ++n) {
    if (table.b(n).sign() <= 0) return fail(n, "b_" + std::to_string(n) + " is not positive");
  }

  const std::size_t direct = std::min(n_max, kDirectCheckLimit);
  for (std::size_t n = 4; n <= direct; ++n) {
    if (BigRational(static_cast<long>(n + 2)) * table.b(n) != convolution_sum(table, n)) {
      return fail(n, "recursion identity fails at n = " + std::to_string(n));
    }
  }
  if (n_max > direct) {
    const std::vector<BigRational> fresh = detail::multimodular_coefficients(n_max);
    for (std::size_t n = direct + 1; n <= n_max; ++n) {
      if (fresh[n - 1] != table.b(n)) {
        return fail(n, "recursion identity fails at n = " + std::to_string(n));
      }
    }
  }
  return {};
}

bool verify_recursion(const CoeffTable& table) { return check_recursion(table).ok; }

std::vector<BigRational> series_ode_residual_coeffs(const CoeffTable& table) {
  const std::size_t n_max = table.size();
  // z(z-1)(z-2) = 2z - 3z^2 + z^3
  const long cubic[] = {0, 2, -3, 1};
  std::vector<BigRational> out;
  out.reserve(n_max);
  mpq_class c;
  for (std::size_t j = 1; j <= n_max; ++j) {
    // [z^j] P P' = sum_{a=1}^{j} b_a (j+1-a) b_{j+1-a}
    c = 0;
    for (std::size_t a = 1; a <= j; ++a) {
      c += table.b(a).raw() * mpq_class(static_cast<long>(j + 1 - a)) * table.b(j + 1 - a).raw();
    }
    c -= table.b(j).raw();
    if (j <= 3) c -= cubic[j];
    out.emplace_back(c);
  }
  return out;
}

}  // namespace connexion
