#include "connexion/coeff_cache.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace connexion {

namespace fs = std::filesystem;

fs::path default_cache_path() {
  if (const char* env = std::getenv("CONNEXION_CACHE"); env != nullptr && *env != '\0') return env;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg != nullptr && *xdg != '\0') {
    return fs::path(xdg) / "connexion" / "coeffs.txt";
  }
  if (const char* home = std::getenv("HOME"); home != nullptr && *home != '\0') {
    return fs::path(home) / ".cache" / "connexion" / "coeffs.txt";
  }
  return "connexion-coeffs.txt";
}

void write_cache(const CoeffTable& table, const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CacheError("cannot write cache file " + path.string());
    out << kCacheHeader << '\n';
    for (std::size_t n = 1; n <= table.size(); ++n) {
      const BigRational& b = table.b(n);
      out << n << ' ' << b.numerator_str() << ' ' << b.denominator_str() << '\n';
    }
    out.flush();
    if (!out) throw CacheError("failed while writing cache file " + path.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw CacheError("cannot move cache file into place at " + path.string());
  }
}

CoeffTable read_cache(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CacheError("cannot open cache file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCacheHeader) {
    throw CacheError(path.string() + ": missing header '" + kCacheHeader + "'");
  }
  std::vector<BigRational> coeffs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string index, num, den, extra;
    if (!(fields >> index >> num >> den) || (fields >> extra)) {
      throw CacheError(path.string() + ":" + std::to_string(line_no) + ": expected '<n> <numerator> <denominator>'");
    }
    if (index != std::to_string(coeffs.size() + 1)) {
      throw CacheError(path.string() + ":" + std::to_string(line_no) + ": expected index " +
                       std::to_string(coeffs.size() + 1) + ", found " + index);
    }
    try {
      coeffs.push_back(BigRational::from_strings(num, den));
    } catch (const std::invalid_argument& e) {
      throw CacheError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (coeffs.empty()) throw CacheError(path.string() + ": no coefficients");
  CoeffTable table(std::move(coeffs), "cache:" + path.string());
  const RecursionCheck check = check_recursion(table);
  if (!check.ok) throw CacheError(path.string() + ": rejected, " + check.reason);
  return table;
}

CoeffTable load_or_compute(std::size_t n, const std::optional<fs::path>& cache, std::string* write_error) {
  if (cache && fs::exists(*cache)) {
    try {
      CoeffTable table = read_cache(*cache);
      if (table.size() >= n) return table.truncated(n);
    } catch (const CacheError&) {
      // Unusable cache; recompute and overwrite below.
    }
  }
  CoeffTable table = compute_coeffs(n);
  if (cache) {
    try {
      write_cache(table, *cache);
    } catch (const CacheError& e) {
      if (write_error != nullptr) *write_error = e.what();
    }
  }
  return table;
}

}  // namespace connexion
