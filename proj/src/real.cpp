#include "connexion/real.hpp"

#include <stdexcept>

namespace connexion {

namespace {

mpfr_rnd_t mpfr_mode(Rounding mode) {
  switch (mode) {
    case Rounding::Down: return MPFR_RNDD;
    case Rounding::Up: return MPFR_RNDU;
    case Rounding::Nearest: break;
  }
  return MPFR_RNDN;
}

// Boost starts at 20 digits; the library promises kDefaultPrecisionDigits.
[[maybe_unused]] const bool kDefaultPrecisionApplied = (Real::default_precision(kDefaultPrecisionDigits), true);

}  // namespace

void set_working_precision(unsigned digits) {
  if (digits < 2) throw std::invalid_argument("working precision must be at least 2 digits");
  Real::default_precision(digits);
}

unsigned working_precision() { return Real::default_precision(); }

Real to_real(const BigRational& q, Rounding mode) {
  Real r;
  mpfr_set_q(r.backend().data(), q.raw().get_mpq_t(), mpfr_mode(mode));
  return r;
}

Real sqrt_rounded(const BigRational& q, Rounding mode) {
  if (q.sign() < 0) throw std::domain_error("sqrt_rounded: negative argument " + q.to_string());
  // Round the radicand in the same direction first; sqrt is monotone, so the
  // result stays on the requested side of the true root.
  Real r = to_real(q, mode);
  mpfr_sqrt(r.backend().data(), r.backend().data(), mpfr_mode(mode));
  return r;
}

Real sub_rounded(const Real& a, const Real& b, Rounding mode) {
  Real r;
  mpfr_sub(r.backend().data(), a.backend().data(), b.backend().data(), mpfr_mode(mode));
  return r;
}

std::string to_decimal(const Real& x, unsigned digits) {
  if (digits == 0) digits = 1;
  return x.str(static_cast<std::streamsize>(digits), std::ios_base::fmtflags(0));
}

std::string to_decimal(const BigRational& q, unsigned digits) {
  PrecisionScope scope(std::max(digits + 10, working_precision()));
  return to_decimal(to_real(q), digits);
}

}  // namespace connexion
