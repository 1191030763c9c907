#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "connexion/big_rational.hpp"

namespace connexion::detail {

/// Statistics from one run of the multimodular coefficient engine.
struct ModularStats {
  std::size_t word_primes = 0;     ///< 29-bit primes carried through the recursion
  double max_denominator_bits = 0; ///< log2 of the largest denominator bound
};

/// Exponent vectors (over the primes <= n_max + 3) of integers Q_n with
/// Q_n * b_n integral for every n <= n_max. Q_1 = 1, Q_2 = 4, Q_3 = 40 and
/// Q_n = 2(n+2) * lcm_k(Q_k Q_{n+1-k}) for n >= 4.
struct DenominatorBound {
  std::vector<std::uint32_t> primes;                 ///< small primes <= n_max + 3
  std::vector<std::vector<std::uint32_t>> exponents; ///< exponents[n][i] = v_{primes[i]}(Q_n)
  std::vector<double> log2_bound;                    ///< log2(Q_n)
};

DenominatorBound denominator_bound(std::size_t n_max);

/// b_1..b_n_max exactly (element 0 is b_1).
///
/// Runs the coefficient recursion modulo many word-size primes, then rebuilds
/// each numerator b_n * Q_n by Chinese remaindering against a modulus that is
/// provably larger than 2 Q_n. One extra prime per index cross-checks the
/// reconstruction. The result is exact; no rounding happens anywhere.
std::vector<BigRational> multimodular_coefficients(std::size_t n_max, ModularStats* stats = nullptr);

/// Rough peak memory (bytes) the engine needs for n_max.
double multimodular_memory_estimate(std::size_t n_max);

}  // namespace connexion::detail
