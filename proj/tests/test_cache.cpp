#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "connexion/coeff_cache.hpp"

using namespace connexion;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(CONNEXION_TEST_TMP) / "cache";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  fs::remove(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("cache file layout") {
  const fs::path p = scratch("layout.txt");
  write_cache(compute_coeffs(3), p);
  CHECK(slurp(p) == "connexion-coeffs v1\n1 -1 1\n2 3 4\n3 1 40\n");
}

TEST_CASE("write then read reproduces the table exactly") {
  const fs::path p = scratch("roundtrip.txt");
  const CoeffTable t = compute_coeffs(220);
  write_cache(t, p);
  const CoeffTable back = read_cache(p);
  REQUIRE(back.size() == t.size());
  for (std::size_t n = 1; n <= t.size(); ++n) CHECK(back.b(n) == t.b(n));
  CHECK(verify_recursion(back));
}

TEST_CASE("malformed caches are rejected") {
  const fs::path p = scratch("bad.txt");
  write_cache(compute_coeffs(6), p);
  const std::string good = slurp(p);

  SUBCASE("wrong header") {
    spit(p, "connexion-coeffs v2\n1 -1 1\n");
    CHECK_THROWS_AS(read_cache(p), CacheError);
  }
  SUBCASE("index gap") {
    spit(p, "connexion-coeffs v1\n1 -1 1\n3 1 40\n");
    CHECK_THROWS_AS(read_cache(p), CacheError);
  }
  SUBCASE("non-numeric field") {
    spit(p, "connexion-coeffs v1\n1 -1 1\n2 3 four\n");
    CHECK_THROWS_AS(read_cache(p), CacheError);
  }
  SUBCASE("zero denominator") {
    spit(p, "connexion-coeffs v1\n1 -1 0\n");
    CHECK_THROWS_AS(read_cache(p), CacheError);
  }
  SUBCASE("well-formed but violating the recursion") {
    std::string text = good;
    text.replace(text.find("5 33 3200"), 9, "5 34 3200");
    spit(p, text);
    CHECK_THROWS_AS(read_cache(p), CacheError);
  }
  SUBCASE("empty body") {
    spit(p, "connexion-coeffs v1\n");
    CHECK_THROWS_AS(read_cache(p), CacheError);
  }
}

TEST_CASE("load_or_compute reuses a valid cache and repairs a broken one") {
  const fs::path p = scratch("reuse.txt");
  const CoeffTable first = load_or_compute(12, p);
  CHECK(fs::exists(p));
  CHECK(read_cache(p).size() == 12);

  // A shorter request is served from the longer cache.
  const CoeffTable shorter = load_or_compute(5, p);
  CHECK(shorter.size() == 5);
  CHECK(shorter.b(5) == BigRational(33, 3200));
  CHECK(read_cache(p).size() == 12);

  spit(p, "garbage\n");
  const CoeffTable repaired = load_or_compute(8, p);
  CHECK(repaired.size() == 8);
  CHECK(read_cache(p).size() == 8);
}

TEST_CASE("unwritable cache path is reported, not thrown") {
  std::string err;
  const CoeffTable t = load_or_compute(4, fs::path("/proc/connexion-nowhere/coeffs.txt"), &err);
  CHECK(t.size() == 4);
  CHECK_FALSE(err.empty());
  CHECK_THROWS_AS(write_cache(t, "/proc/connexion-nowhere/coeffs.txt"), CacheError);
}

TEST_CASE("CONNEXION_CACHE overrides the default path") {
  const char* saved = std::getenv("CONNEXION_CACHE");
  const std::string keep = saved ? saved : "";
  setenv("CONNEXION_CACHE", "/tmp/somewhere/else.txt", 1);
  CHECK(default_cache_path() == fs::path("/tmp/somewhere/else.txt"));
  if (saved) {
    setenv("CONNEXION_CACHE", keep.c_str(), 1);
  } else {
    unsetenv("CONNEXION_CACHE");
  }
}
