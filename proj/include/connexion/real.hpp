#pragma once

#include <string>

#include <boost/multiprecision/mpfr.hpp>

#include "connexion/big_rational.hpp"

namespace connexion {

/// Working real type: MPFR with a runtime-selected number of decimal digits.
using Real = boost::multiprecision::mpfr_float;

inline constexpr unsigned kDefaultPrecisionDigits = 50;

/// Sets the precision used by newly created Real values.
void set_working_precision(unsigned digits);
unsigned working_precision();

/// Restores the previous working precision on scope exit.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned digits) : saved_(working_precision()) { set_working_precision(digits); }
  ~PrecisionScope() { set_working_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

enum class Rounding { Nearest, Down, Up };

/// q rounded to the working precision in the given direction.
Real to_real(const BigRational& q, Rounding mode = Rounding::Nearest);

/// sqrt(q) rounded in the given direction; q must be >= 0.
Real sqrt_rounded(const BigRational& q, Rounding mode);

/// a - b rounded in the given direction.
Real sub_rounded(const Real& a, const Real& b, Rounding mode);

/// Fixed-notation decimal with `digits` significant digits.
std::string to_decimal(const Real& x, unsigned digits);
std::string to_decimal(const BigRational& q, unsigned digits);

}  // namespace connexion
