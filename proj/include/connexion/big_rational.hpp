#pragma once

#include <compare>
#include <iosfwd>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace connexion {

/// Exact rational number with arbitrary-precision numerator and denominator.
///
/// Always held in canonical form: denominator > 0 and gcd(|num|, den) = 1.
/// Every constructor and arithmetic operator re-establishes that form, so the
/// invariant can be checked at any point.
class BigRational {
 public:
  BigRational() = default;
  BigRational(long value) : q_(value) {}  // NOLINT(google-explicit-constructor)
  BigRational(long num, long den);
  explicit BigRational(mpq_class q);
  BigRational(const mpz_class& num, const mpz_class& den);

  /// Parses base-10 numerator and denominator strings. Throws
  /// std::invalid_argument on malformed digits or a zero denominator.
  static BigRational from_strings(std::string_view num, std::string_view den);

  /// Wraps a pair the caller already knows to be coprime with den > 0.
  /// Skips the gcd; is_canonical() can confirm the claim later.
  static BigRational from_coprime(mpz_class num, mpz_class den);

  /// Parses "a" or "a/b".
  static BigRational parse(std::string_view text);

  const mpq_class& raw() const { return q_; }
  mpz_class numerator() const { return q_.get_num(); }
  mpz_class denominator() const { return q_.get_den(); }
  std::string numerator_str() const { return q_.get_num().get_str(10); }
  std::string denominator_str() const { return q_.get_den().get_str(10); }

  /// "n" for integers, "n/d" otherwise.
  std::string to_string() const;
  double to_double() const { return q_.get_d(); }

  int sign() const { return sgn(q_); }
  bool is_zero() const { return sign() == 0; }

  /// Checks the canonical-form invariant directly on the stored integers.
  bool is_canonical() const;

  BigRational& operator+=(const BigRational& o);
  BigRational& operator-=(const BigRational& o);
  BigRational& operator*=(const BigRational& o);
  BigRational& operator/=(const BigRational& o);

  friend BigRational operator+(BigRational a, const BigRational& b) { return a += b; }
  friend BigRational operator-(BigRational a, const BigRational& b) { return a -= b; }
  friend BigRational operator*(BigRational a, const BigRational& b) { return a *= b; }
  friend BigRational operator/(BigRational a, const BigRational& b) { return a /= b; }
  friend BigRational operator-(const BigRational& a) { return BigRational(mpq_class(-a.q_)); }

  friend bool operator==(const BigRational& a, const BigRational& b) {
    return cmp(a.q_, b.q_) == 0;
  }
  friend std::strong_ordering operator<=>(const BigRational& a, const BigRational& b) {
    const int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  mpq_class q_;
};

std::ostream& operator<<(std::ostream& os, const BigRational& r);

}  // namespace connexion
