#include <iostream>

#include "connexion/verify.hpp"

// One PASS/FAIL line per criterion; details and timings go to stderr.
int main() {
  const connexion::VerifyReport report = connexion::run_verify(
      connexion::Suite::All, 20, [](const std::string& line) { std::cerr << line << std::endl; });
  for (const auto& c : report.checks) {
    std::cout << (c.passed ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " | measured "
              << c.measured.decimal << " (" << connexion::to_string(c.measured.provenance) << ") | " << c.note
              << std::endl;
  }
  return report.all_passed() ? 0 : 1;
}
