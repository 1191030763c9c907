#include "connexion/detail/multimodular.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

#if defined(__AVX512F__) || defined(__AVX2__)
#include <immintrin.h>
#endif

namespace connexion::detail {

namespace {

constexpr std::size_t kLanes = 16;  // primes per block; also the CRT chunk size
constexpr std::uint32_t kPrimeCeiling = 1u << 29;
// Products of two residues are < 2^58; after a fold the accumulator is below
// 2^61 + 2^32, so 55 further products still fit in a uint64.
constexpr std::size_t kLazySteps = 48;

struct alignas(64) Lanes32 : std::array<std::uint32_t, kLanes> {};
struct alignas(64) Lanes64 : std::array<std::uint64_t, kLanes> {};

std::uint32_t mulmod(std::uint64_t a, std::uint64_t b, std::uint32_t p) {
  return static_cast<std::uint32_t>(a * b % p);
}

std::uint32_t powmod(std::uint64_t base, std::uint64_t e, std::uint32_t p) {
  std::uint64_t r = 1;
  base %= p;
  while (e != 0) {
    if ((e & 1u) != 0) r = r * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return static_cast<std::uint32_t>(r);
}

std::uint32_t invmod(std::uint32_t a, std::uint32_t p) { return powmod(a, p - 2, p); }

bool is_prime_u32(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t q : {2u, 3u, 5u, 7u, 11u, 13u}) {
    if (n % q == 0) return n == q;
  }
  std::uint32_t d = n - 1;
  int s = 0;
  while ((d & 1u) == 0) {
    d >>= 1;
    ++s;
  }
  // Deterministic for n < 2^32.
  for (std::uint32_t a : {2u, 7u, 61u}) {
    if (a % n == 0) continue;
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = x * x % n;
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<std::uint32_t> sieve(std::uint32_t limit) {
  std::vector<bool> composite(limit + 1, false);
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = std::uint64_t{i} * i; j <= limit; j += i) composite[j] = true;
  }
  return out;
}

std::vector<std::uint32_t> word_primes(std::size_t count) {
  std::vector<std::uint32_t> out;
  out.reserve(count);
  for (std::uint32_t c = kPrimeCeiling - 1; out.size() < count; c -= 2) {
    if (is_prime_u32(c)) out.push_back(c);
  }
  return out;
}

// Product of primes[i]^exps[i] over [lo, hi), balanced to keep multiplications even.
mpz_class prime_power_product(const std::vector<std::uint32_t>& primes,
                              const std::vector<std::uint32_t>& exps, std::size_t lo,
                              std::size_t hi) {
  if (hi - lo == 1) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), primes[lo], exps[lo]);
    return r;
  }
  if (hi == lo) return 1;
  const std::size_t mid = lo + (hi - lo) / 2;
  return prime_power_product(primes, exps, lo, mid) * prime_power_product(primes, exps, mid, hi);
}

std::size_t chunks_needed(double log2_bound, double chunk_bits) {
  // |b_n Q_n| < Q_n, so a modulus above 2^(log2 Q_n + 1) suffices; keep a margin.
  return static_cast<std::size_t>(std::ceil((log2_bound + 8.0) / chunk_bits));
}

struct Chunk {
  Lanes32 p{};
  Lanes32 garner{};  // inverse of p_0 ... p_{i-1} modulo p_i
  mpz_class modulus;
};

Chunk make_chunk(const std::uint32_t* primes) {
  Chunk c;
  std::copy(primes, primes + kLanes, c.p.begin());
  c.modulus = 1;
  for (std::size_t i = 0; i < kLanes; ++i) {
    std::uint64_t prod = 1;
    for (std::size_t l = 0; l < i; ++l) prod = prod * c.p[l] % c.p[i];
    c.garner[i] = i == 0 ? 1 : invmod(static_cast<std::uint32_t>(prod), c.p[i]);
    c.modulus *= c.p[i];
  }
  return c;
}

mpz_class garner(const Chunk& c, const std::uint32_t* r) {
  Lanes32 digit{};
  for (std::size_t i = 0; i < kLanes; ++i) {
    const std::uint32_t p = c.p[i];
    std::uint64_t t = 0;
    for (std::size_t l = i; l-- > 0;) t = (t * c.p[l] + digit[l]) % p;
    const std::uint64_t diff = (std::uint64_t{r[i]} + p - t) % p;
    digit[i] = mulmod(diff, c.garner[i], p);
  }
  mpz_class x = digit[kLanes - 1];
  for (std::size_t i = kLanes - 1; i-- > 0;) {
    x *= c.p[i];
    x += digit[i];
  }
  return x;
}

// acc[j] += sum_{lo <= k < hi} b[k][j] * b[m-k][j], folding every kLazySteps
// products so the sum stays in 64 bits. Residues are stored zero-extended.
void pair_sum(const Lanes64* b, std::size_t m, std::size_t lo, std::size_t hi, const Lanes64& fold,
              Lanes64& acc) {
#if defined(__AVX512F__)
  __m512i a0 = _mm512_load_si512(acc.data());
  __m512i a1 = _mm512_load_si512(acc.data() + 8);
  const __m512i f0 = _mm512_load_si512(fold.data());
  const __m512i f1 = _mm512_load_si512(fold.data() + 8);
  const __m512i low = _mm512_set1_epi64(0xffffffff);
  for (std::size_t k = lo; k < hi;) {
    const std::size_t stop = std::min(hi, k + kLazySteps);
    for (; k < stop; ++k) {
      const std::uint64_t* u = b[k].data();
      const std::uint64_t* v = b[m - k].data();
      a0 = _mm512_add_epi64(a0, _mm512_mul_epu32(_mm512_load_si512(u), _mm512_load_si512(v)));
      a1 = _mm512_add_epi64(a1, _mm512_mul_epu32(_mm512_load_si512(u + 8), _mm512_load_si512(v + 8)));
    }
    // hi * (2^32 mod p) + lo < 2^61 + 2^32
    a0 = _mm512_add_epi64(_mm512_mul_epu32(_mm512_srli_epi64(a0, 32), f0), _mm512_and_si512(a0, low));
    a1 = _mm512_add_epi64(_mm512_mul_epu32(_mm512_srli_epi64(a1, 32), f1), _mm512_and_si512(a1, low));
  }
  _mm512_store_si512(acc.data(), a0);
  _mm512_store_si512(acc.data() + 8, a1);
#elif defined(__AVX2__)
  __m256i a[4];
  __m256i f[4];
  for (int i = 0; i < 4; ++i) {
    a[i] = _mm256_load_si256(reinterpret_cast<const __m256i*>(acc.data() + 4 * i));
    f[i] = _mm256_load_si256(reinterpret_cast<const __m256i*>(fold.data() + 4 * i));
  }
  const __m256i low = _mm256_set1_epi64x(0xffffffff);
  for (std::size_t k = lo; k < hi;) {
    const std::size_t stop = std::min(hi, k + kLazySteps);
    for (; k < stop; ++k) {
      const auto* u = reinterpret_cast<const __m256i*>(b[k].data());
      const auto* v = reinterpret_cast<const __m256i*>(b[m - k].data());
      for (int i = 0; i < 4; ++i) {
        a[i] = _mm256_add_epi64(a[i], _mm256_mul_epu32(_mm256_load_si256(u + i), _mm256_load_si256(v + i)));
      }
    }
    for (int i = 0; i < 4; ++i) {
      a[i] = _mm256_add_epi64(_mm256_mul_epu32(_mm256_srli_epi64(a[i], 32), f[i]), _mm256_and_si256(a[i], low));
    }
  }
  for (int i = 0; i < 4; ++i) _mm256_store_si256(reinterpret_cast<__m256i*>(acc.data() + 4 * i), a[i]);
#else
  for (std::size_t k = lo; k < hi;) {
    const std::size_t stop = std::min(hi, k + kLazySteps);
    for (; k < stop; ++k) {
      for (std::size_t j = 0; j < kLanes; ++j) acc[j] += b[k][j] * b[m - k][j];
    }
    for (std::size_t j = 0; j < kLanes; ++j) acc[j] = (acc[j] >> 32) * fold[j] + (acc[j] & 0xffffffffu);
  }
#endif
}

// Runs the recursion for one block of primes; writes residues of b_n into
// residues[n][first + lane] wherever that slot exists.
void run_block(std::size_t n_max, const std::uint32_t* primes, std::size_t first,
               std::vector<std::vector<std::uint32_t>>& residues) {
  Lanes32 p{};
  std::copy(primes, primes + kLanes, p.begin());

  const std::size_t inv_size = std::max<std::size_t>(n_max + 3, 41);
  std::vector<Lanes32> inv(inv_size);
  for (std::size_t j = 0; j < kLanes; ++j) {
    inv[1][j] = 1;
    for (std::size_t i = 2; i < inv_size; ++i) {
      const std::uint64_t q = p[j] / i;
      const std::uint64_t r = inv[p[j] % i][j];
      inv[i][j] = static_cast<std::uint32_t>((p[j] - q) * r % p[j]);
    }
  }

  std::vector<Lanes64> b(n_max + 1);
  for (std::size_t j = 0; j < kLanes; ++j) {
    b[1][j] = p[j] - 1;
    if (n_max >= 2) b[2][j] = mulmod(3, inv[4][j], p[j]);
    if (n_max >= 3) b[3][j] = inv[40][j];
  }

  Lanes64 fold{};  // 2^32 mod p
  for (std::size_t j = 0; j < kLanes; ++j) fold[j] = (std::uint64_t{1} << 32) % p[j];

  Lanes64 acc{};
  for (std::size_t n = 4; n <= n_max; ++n) {
    const std::size_t m = n + 1;
    acc.fill(0);
    // Unordered pairs k < m - k; the middle term is added below.
    pair_sum(b.data(), m, 2, (m + 1) / 2, fold, acc);
    for (std::size_t j = 0; j < kLanes; ++j) {
      std::uint64_t t = acc[j] % p[j];
      t = 2 * t % p[j];
      if (m % 2 == 0) t = (t + b[m / 2][j] * b[m / 2][j]) % p[j];
      // (n+2) b_n = sum_k k b_k b_{m-k} = (m/2) sum_k b_k b_{m-k}
      t = t * (n + 1) % p[j];
      t = t * inv[2][j] % p[j];
      b[n][j] = mulmod(t, inv[n + 2][j], p[j]);
    }
  }

  for (std::size_t n = 1; n <= n_max; ++n) {
    auto& slot = residues[n];
    if (first >= slot.size()) continue;
    const std::size_t count = std::min(kLanes, slot.size() - first);
    std::copy(b[n].begin(), b[n].begin() + static_cast<std::ptrdiff_t>(count),
              slot.begin() + static_cast<std::ptrdiff_t>(first));
  }
}

// Moduli and merge inverses for dyadic runs of chunks [s, s + 2^l), built on
// demand. Combining a prefix of chunks walks the binary digits of its length,
// so every index reuses the same balanced subproducts.
class CrtTree {
 public:
  explicit CrtTree(const std::vector<Chunk>& chunks) : chunks_(chunks) {}

  // x mod (product of the first `count` chunk moduli), given x mod each chunk.
  mpz_class combine(const std::vector<mpz_class>& values, std::size_t count) {
    mpz_class x;
    std::size_t start = 0;
    for (int l = 63; l >= 0; --l) {
      if (((count >> l) & 1u) == 0) continue;
      Node& block = node(start, l);
      mpz_class y = value(values, start, l);
      if (start == 0) {
        x = std::move(y);
      } else {
        PrefixLink& link = prefix_link(start, l);
        merge(x, link.prefix, y, block.modulus, link.inverse);
      }
      start += std::size_t{1} << l;
    }
    return x;
  }

  const mpz_class& prefix_modulus(std::size_t count) {
    auto it = prefix_.find(count);
    if (it != prefix_.end()) return it->second;
    mpz_class m = 1;
    std::size_t start = 0;
    for (int l = 63; l >= 0; --l) {
      if (((count >> l) & 1u) == 0) continue;
      m *= node(start, l).modulus;
      start += std::size_t{1} << l;
    }
    return prefix_.emplace(count, std::move(m)).first->second;
  }

 private:
  struct Node {
    mpz_class modulus;
    mpz_class left_inverse;  // (left modulus)^-1 mod right modulus
  };
  struct PrefixLink {
    mpz_class prefix;   // product of chunk moduli below the block
    mpz_class inverse;  // prefix^-1 mod block modulus
  };

  static void invert(mpz_class& out, const mpz_class& a, const mpz_class& m) {
    mpz_class reduced = a % m;
    if (mpz_invert(out.get_mpz_t(), reduced.get_mpz_t(), m.get_mpz_t()) == 0) {
      throw std::logic_error("multimodular: chunk moduli are not coprime");
    }
  }

  // x <- the unique value mod mx * my congruent to x mod mx and y mod my.
  static void merge(mpz_class& x, const mpz_class& mx, const mpz_class& y, const mpz_class& my,
                    const mpz_class& mx_inverse) {
    mpz_class t = y - x;
    mpz_mod(t.get_mpz_t(), t.get_mpz_t(), my.get_mpz_t());
    t *= mx_inverse;
    mpz_mod(t.get_mpz_t(), t.get_mpz_t(), my.get_mpz_t());
    x += mx * t;
  }

  Node& node(std::size_t start, int level) {
    const auto key = std::make_pair(start, level);
    auto it = nodes_.find(key);
    if (it != nodes_.end()) return it->second;
    Node fresh;
    if (level == 0) {
      fresh.modulus = chunks_[start].modulus;
    } else {
      const std::size_t half = std::size_t{1} << (level - 1);
      const mpz_class left = node(start, level - 1).modulus;
      const mpz_class& right = node(start + half, level - 1).modulus;
      fresh.modulus = left * right;
      invert(fresh.left_inverse, left, right);
    }
    return nodes_.emplace(key, std::move(fresh)).first->second;
  }

  PrefixLink& prefix_link(std::size_t start, int level) {
    const auto key = std::make_pair(start, level);
    auto it = links_.find(key);
    if (it != links_.end()) return it->second;
    PrefixLink link;
    link.prefix = prefix_modulus(start);
    invert(link.inverse, link.prefix, node(start, level).modulus);
    return links_.emplace(key, std::move(link)).first->second;
  }

  mpz_class value(const std::vector<mpz_class>& values, std::size_t start, int level) {
    if (level == 0) return values[start];
    const std::size_t half = std::size_t{1} << (level - 1);
    mpz_class x = value(values, start, level - 1);
    const mpz_class y = value(values, start + half, level - 1);
    const Node& whole = node(start, level);
    merge(x, node(start, level - 1).modulus, y, node(start + half, level - 1).modulus, whole.left_inverse);
    return x;
  }

  const std::vector<Chunk>& chunks_;
  std::map<std::pair<std::size_t, int>, Node> nodes_;
  std::map<std::pair<std::size_t, int>, PrefixLink> links_;
  std::map<std::size_t, mpz_class> prefix_;
};

// a / q in lowest terms. Every prime factor of q is one of the small primes
// with a positive exponent, so only those need testing against a; typically a
// handful divide, which is much cheaper than a full gcd.
BigRational reduce_smooth(mpz_class a, mpz_class q, const std::vector<std::uint32_t>& primes,
                          const std::vector<std::uint32_t>& exps) {
  if (sgn(a) == 0) return BigRational(0);
  mpz_class g = 1;
  mpz_class scratch;
  auto strip = [&](std::uint32_t prime, std::uint32_t e) {
    const auto v = static_cast<std::uint32_t>(
        prime == 2 ? mpz_scan1(a.get_mpz_t(), 0) : mpz_remove(scratch.get_mpz_t(), a.get_mpz_t(), mpz_class(prime).get_mpz_t()));
    mpz_class f;
    mpz_ui_pow_ui(f.get_mpz_t(), prime, std::min(v, e));
    g *= f;
  };
  // Residues of a modulo products of several small primes, one pass over a each.
  std::size_t i = 0;
  while (i < primes.size()) {
    std::uint64_t prod = 1;
    std::size_t j = i;
    for (; j < primes.size(); ++j) {
      if (exps[j] == 0) continue;
      if (prod > ~std::uint64_t{0} / primes[j]) break;
      prod *= primes[j];
    }
    if (prod > 1) {
      const std::uint64_t r = mpz_fdiv_ui(a.get_mpz_t(), prod);
      for (std::size_t k = i; k < j; ++k) {
        if (exps[k] != 0 && r % primes[k] == 0) strip(primes[k], exps[k]);
      }
    }
    i = j;
  }
  if (g != 1) {
    mpz_divexact(a.get_mpz_t(), a.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(q.get_mpz_t(), q.get_mpz_t(), g.get_mpz_t());
  }
  return BigRational::from_coprime(std::move(a), std::move(q));
}

}  // namespace

DenominatorBound denominator_bound(std::size_t n_max) {
  DenominatorBound out;
  out.primes = sieve(static_cast<std::uint32_t>(std::max<std::size_t>(n_max + 3, 5)));
  const std::size_t np = out.primes.size();
  out.exponents.assign(n_max + 1, std::vector<std::uint32_t>(np, 0));
  out.log2_bound.assign(n_max + 1, 0.0);

  // prefix_count[x] = number of small primes <= x
  std::vector<std::size_t> prefix_count(n_max + 6, 0);
  for (std::size_t x = 1, i = 0; x < prefix_count.size(); ++x) {
    while (i < np && out.primes[i] <= x) ++i;
    prefix_count[x] = i;
  }
  auto index_of = [&](std::uint32_t q) {
    return static_cast<std::size_t>(std::lower_bound(out.primes.begin(), out.primes.end(), q) -
                                    out.primes.begin());
  };

  if (n_max >= 2) out.exponents[2][index_of(2)] = 2;
  if (n_max >= 3) {
    out.exponents[3][index_of(2)] = 3;
    out.exponents[3][index_of(5)] = 1;
  }
  for (std::size_t n = 4; n <= n_max; ++n) {
    const std::size_t m = n + 1;
    auto& g = out.exponents[n];
    for (std::size_t k = 2; 2 * k <= m; ++k) {
      const auto& u = out.exponents[k];
      const auto& v = out.exponents[m - k];
      // Q_j only involves primes <= j + 2.
      const std::size_t len = prefix_count[m - k + 2];
      for (std::size_t i = 0; i < len; ++i) g[i] = std::max(g[i], u[i] + v[i]);
    }
    std::size_t rest = 2 * (n + 2);
    for (std::size_t i = 0; i < np && rest > 1; ++i) {
      while (rest % out.primes[i] == 0) {
        ++g[i];
        rest /= out.primes[i];
      }
    }
  }
  for (std::size_t n = 1; n <= n_max; ++n) {
    double s = 0;
    for (std::size_t i = 0; i < np; ++i) s += out.exponents[n][i] * std::log2(double(out.primes[i]));
    out.log2_bound[n] = s;
  }
  return out;
}

double multimodular_memory_estimate(std::size_t n_max) {
  const double n = static_cast<double>(n_max);
  const double small_primes = 1.3 * n / std::max(1.0, std::log(n));
  const double word_primes = 30.0 * n / 29.0 + 2 * kLanes;
  return 4.0 * n * small_primes + 2.0 * n * word_primes + 64.0 * n * 4;
}

std::vector<BigRational> multimodular_coefficients(std::size_t n_max, ModularStats* stats) {
  std::vector<BigRational> seeds{BigRational(-1), BigRational(3, 4), BigRational(1, 40)};
  if (n_max <= 3) {
    seeds.resize(n_max);
    return seeds;
  }

  const DenominatorBound bound = denominator_bound(n_max);

  // Every word prime is >= 2^29 - 2^20, so 16 of them carry at least this many bits.
  const double chunk_bits = kLanes * std::log2(double(kPrimeCeiling - (1u << 20)));
  std::vector<std::size_t> chunks(n_max + 1, 0);
  std::size_t max_chunks = 0;
  for (std::size_t n = 4; n <= n_max; ++n) {
    chunks[n] = chunks_needed(bound.log2_bound[n], chunk_bits);
    max_chunks = std::max(max_chunks, chunks[n]);
  }
  // One extra chunk supplies the cross-check prime for the largest index.
  const std::size_t total_chunks = max_chunks + 1;
  const std::vector<std::uint32_t> primes = word_primes(total_chunks * kLanes);

  std::vector<std::vector<std::uint32_t>> residues(n_max + 1);
  for (std::size_t n = 4; n <= n_max; ++n) residues[n].assign((chunks[n] + 1) * kLanes, 0);

  for (std::size_t c = 0; c < total_chunks; ++c) {
    run_block(n_max, primes.data() + c * kLanes, c * kLanes, residues);
  }

  std::vector<Chunk> chunk_info;
  chunk_info.reserve(total_chunks);
  for (std::size_t c = 0; c < total_chunks; ++c) chunk_info.push_back(make_chunk(primes.data() + c * kLanes));

  CrtTree tree(chunk_info);
  std::vector<mpz_class> values(total_chunks);

  std::vector<BigRational> out = std::move(seeds);
  out.reserve(n_max);
  mpz_class a;
  for (std::size_t n = 4; n <= n_max; ++n) {
    const std::vector<std::uint32_t>& r = residues[n];
    const std::size_t nc = chunks[n];
    for (std::size_t c = 0; c < nc; ++c) values[c] = garner(chunk_info[c], r.data() + c * kLanes);
    const mpz_class x = tree.combine(values, nc);

    // x = b_n mod P; the integer numerator over Q_n is b_n Q_n, taken in the symmetric range.
    mpz_class q = prime_power_product(bound.primes, bound.exponents[n], 0, bound.primes.size());
    const mpz_class& modulus = tree.prefix_modulus(nc);
    a = x * q;
    mpz_mod(a.get_mpz_t(), a.get_mpz_t(), modulus.get_mpz_t());
    if (2 * a > modulus) a -= modulus;

    const std::uint32_t check_p = primes[nc * kLanes];
    const std::uint64_t lhs = mpz_fdiv_ui(a.get_mpz_t(), check_p);
    const std::uint64_t rhs = mulmod(r[nc * kLanes], mpz_fdiv_ui(q.get_mpz_t(), check_p), check_p);
    if (lhs != rhs) {
      throw std::logic_error("multimodular: reconstruction cross-check failed at n = " + std::to_string(n));
    }
    out.push_back(reduce_smooth(a, std::move(q), bound.primes, bound.exponents[n]));
  }

  if (stats != nullptr) {
    stats->word_primes = primes.size();
    stats->max_denominator_bits = *std::max_element(bound.log2_bound.begin(), bound.log2_bound.end());
  }
  return out;
}

}  // namespace connexion::detail
