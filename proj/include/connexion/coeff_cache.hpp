#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>

#include "connexion/coeffs.hpp"

namespace connexion {

/// Malformed, unreadable, unwritable, or rejected cache files.
class CacheError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kCacheHeader = "connexion-coeffs v1";

/// $CONNEXION_CACHE if set, else $XDG_CACHE_HOME/connexion/coeffs.txt, else
/// ~/.cache/connexion/coeffs.txt, else ./connexion-coeffs.txt.
std::filesystem::path default_cache_path();

/// Writes the header line and one "<n> <numerator> <denominator>" line per
/// coefficient. The file is written beside the target and renamed into place.
void write_cache(const CoeffTable& table, const std::filesystem::path& path);

/// Parses a cache file and runs check_recursion on the result; any failure
/// throws CacheError naming the line or the broken invariant.
CoeffTable read_cache(const std::filesystem::path& path);

/// At least n coefficients: taken from the cache when it is long enough and
/// valid, otherwise computed and written back (write failures are reported
/// through `write_error` rather than thrown).
CoeffTable load_or_compute(std::size_t n, const std::optional<std::filesystem::path>& cache,
                           std::string* write_error = nullptr);

}  // namespace connexion
