#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "connexion/big_rational.hpp"
#include "connexion/real.hpp"

namespace connexion {

/// How much a number can be trusted.
enum class Provenance {
  Exact,             ///< rational arithmetic, no rounding
  SeriesTruncation,  ///< from a truncated series, possibly with directed rounding
  Oracle,            ///< floating-point ODE or quadrature computation
};

std::string to_string(Provenance p);

/// A number as emitted: exact fraction when one exists, a decimal rendering,
/// and where it came from.
struct Quantity {
  std::optional<BigRational> exact;
  std::string decimal;
  Provenance provenance = Provenance::Oracle;

  static Quantity from_exact(const BigRational& q, unsigned digits);
  static Quantity from_real(const Real& x, Provenance p, unsigned digits);
  static Quantity from_double(double x, Provenance p, unsigned digits = 17);
};

struct CheckRecord {
  std::string id;    ///< "1" .. "11" for acceptance criteria
  std::string name;
  bool passed = false;
  Quantity measured;
  std::string bound;  ///< human-readable pass condition
  std::string note;   ///< provenance remarks, sub-results, diagnostics
};

struct VerifyReport {
  std::vector<CheckRecord> checks;
  bool all_passed() const;
};

enum class Suite { Exact, Cross, Picard, All };

/// Parses "exact", "cross", "picard", "all".
std::optional<Suite> parse_suite(const std::string& name);

/// Receives timing and progress lines (not part of the deterministic report).
using VerifyLog = std::function<void(const std::string&)>;

/// Runs the acceptance checks of a suite. exact: criteria 1-3; cross: 4-6
/// and 9-11; picard: 7-8; all: 1-11, each exactly once.
VerifyReport run_verify(Suite suite, unsigned digits, const VerifyLog& log = {});

}  // namespace connexion
