#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "connexion/big_rational.hpp"

namespace connexion {

/// Thrown when a request would need more memory than the engine allows.
class ResourceExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The coefficients b_1..b_N of P(z) = sum b_n z^n, indexed from 1.
///
/// Immutable once built; copies and truncations share storage, so a table can
/// be handed to several threads for reading.
class CoeffTable {
 public:
  /// `coeffs[0]` is b_1. Throws std::invalid_argument when empty.
  CoeffTable(std::vector<BigRational> coeffs, std::string provenance);

  std::size_t size() const { return n_; }

  /// b_n for 1 <= n <= size(); throws std::out_of_range otherwise.
  const BigRational& b(std::size_t n) const;
  const BigRational& operator[](std::size_t n) const { return b(n); }

  /// Pointer to b_1; b(n) == data()[n - 1].
  const BigRational* data() const { return coeffs_->data(); }
  const BigRational* begin() const { return data(); }
  const BigRational* end() const { return data() + n_; }

  /// Where the numbers came from ("recursion", "cache:<path>", ...).
  const std::string& provenance() const { return provenance_; }

  /// First n entries (1 <= n <= size()).
  CoeffTable truncated(std::size_t n) const;

  /// Copy with b_n replaced; used to build deliberately corrupted tables.
  CoeffTable with_replaced(std::size_t n, BigRational value) const;

 private:
  CoeffTable(std::shared_ptr<const std::vector<BigRational>> coeffs, std::size_t n, std::string provenance)
      : coeffs_(std::move(coeffs)), n_(n), provenance_(std::move(provenance)) {}

  std::shared_ptr<const std::vector<BigRational>> coeffs_;
  std::size_t n_ = 0;
  std::string provenance_;
};

/// Seed values b_1 = -1, b_2 = 3/4, b_3 = 1/40.
BigRational seed_coefficient(std::size_t n);

/// Memory the engine may use before compute_coeffs refuses a request.
inline constexpr double kCoeffMemoryBudget = 8.0 * 1024 * 1024 * 1024;

/// b_1..b_N from (n+2) b_n = sum_{k=2}^{n-1} k b_k b_{n+1-k}, exactly.
///
/// Uses the multimodular engine. Throws std::invalid_argument for N < 1 and
/// ResourceExhausted when N is too large for kCoeffMemoryBudget.
CoeffTable compute_coeffs(std::size_t n);

/// Same table by direct rational arithmetic. Quadratic in N with growing
/// operands; meant as a reference for moderate N.
CoeffTable compute_coeffs_direct(std::size_t n);

enum class SumOrder { Forward, Backward };

/// sum_{k=2}^{n-1} k b_k b_{n+1-k} in the given order (4 <= n <= size()).
BigRational convolution_sum(const CoeffTable& table, std::size_t n, SumOrder order = SumOrder::Forward);

struct RecursionCheck {
  bool ok = true;
  std::size_t first_bad = 0;  ///< first offending index, 0 if none
  std::string reason;
};

/// Checks every table invariant exactly: the seeds, positivity for n >= 2,
/// and the recursion identity for n >= 4.
///
/// Indices up to kDirectCheckLimit are checked by evaluating the identity in
/// rational arithmetic. Beyond that the table is compared with a fresh engine
/// run; the recursion fixes each b_n from its predecessors, so equality with
/// the recomputed sequence is equivalent to the identity holding.
RecursionCheck check_recursion(const CoeffTable& table);
inline constexpr std::size_t kDirectCheckLimit = 200;

/// check_recursion(table).ok
bool verify_recursion(const CoeffTable& table);

/// Coefficients of z^1..z^N in P_N P_N' - P_N - z(z-1)(z-2), where P_N is the
/// degree-N truncation. All zero for a genuine table.
std::vector<BigRational> series_ode_residual_coeffs(const CoeffTable& table);

}  // namespace connexion
