#include "connexion/big_rational.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>
#include <stdexcept>

namespace connexion {

namespace {

bool valid_integer(std::string_view s, bool allow_sign) {
  if (s.empty()) return false;
  std::size_t i = 0;
  if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
  if (i == s.size()) return false;
  return std::all_of(s.begin() + static_cast<std::ptrdiff_t>(i), s.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; });
}

mpz_class parse_integer(std::string_view s) {
  std::string tmp(s);
  if (!tmp.empty() && tmp[0] == '+') tmp.erase(0, 1);
  return mpz_class(tmp, 10);
}

}  // namespace

BigRational::BigRational(long num, long den) {
  if (den == 0) throw std::invalid_argument("BigRational: zero denominator");
  q_ = mpq_class(num, den);
  q_.canonicalize();
}

BigRational::BigRational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

BigRational::BigRational(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw std::invalid_argument("BigRational: zero denominator");
  q_ = mpq_class(num, den);
  q_.canonicalize();
}

BigRational BigRational::from_strings(std::string_view num, std::string_view den) {
  if (!valid_integer(num, true)) {
    throw std::invalid_argument("BigRational: malformed numerator '" + std::string(num) + "'");
  }
  if (!valid_integer(den, true)) {
    throw std::invalid_argument("BigRational: malformed denominator '" + std::string(den) + "'");
  }
  return BigRational(parse_integer(num), parse_integer(den));
}

BigRational BigRational::from_coprime(mpz_class num, mpz_class den) {
  if (sgn(den) <= 0) throw std::invalid_argument("BigRational: denominator must be positive");
  BigRational r;
  mpz_swap(mpq_numref(r.q_.get_mpq_t()), num.get_mpz_t());
  mpz_swap(mpq_denref(r.q_.get_mpq_t()), den.get_mpz_t());
  return r;
}

BigRational BigRational::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return from_strings(text, "1");
  return from_strings(text.substr(0, slash), text.substr(slash + 1));
}

std::string BigRational::to_string() const {
  if (q_.get_den() == 1) return numerator_str();
  return numerator_str() + "/" + denominator_str();
}

bool BigRational::is_canonical() const {
  if (sgn(q_.get_den()) <= 0) return false;
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), q_.get_num_mpz_t(), q_.get_den_mpz_t());
  return g == 1;
}

// gmpxx arithmetic on mpq_class always yields canonical results.
BigRational& BigRational::operator+=(const BigRational& o) {
  q_ += o.q_;
  return *this;
}

BigRational& BigRational::operator-=(const BigRational& o) {
  q_ -= o.q_;
  return *this;
}

BigRational& BigRational::operator*=(const BigRational& o) {
  q_ *= o.q_;
  return *this;
}

BigRational& BigRational::operator/=(const BigRational& o) {
  if (o.is_zero()) throw std::domain_error("BigRational: division by zero");
  q_ /= o.q_;
  return *this;
}

std::ostream& operator<<(std::ostream& os, const BigRational& r) { return os << r.to_string(); }

}  // namespace connexion
