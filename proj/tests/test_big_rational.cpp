#include <doctest.h>

#include "connexion/big_rational.hpp"

using connexion::BigRational;

TEST_CASE("construction reduces to lowest terms with a positive denominator") {
  const BigRational r(6, -8);
  CHECK(r.to_string() == "-3/4");
  CHECK(r.is_canonical());
  CHECK(BigRational(10, 5).to_string() == "2");
  CHECK_THROWS_AS(BigRational(1, 0), std::invalid_argument);
}

TEST_CASE("arithmetic stays canonical") {
  const BigRational a(3, 4), b(1, 40);
  const BigRational sum = a + b;
  CHECK(sum == BigRational(31, 40));
  CHECK((a * b).to_string() == "3/160");
  CHECK((a - a).is_zero());
  CHECK((a / b) == BigRational(30));
  for (const BigRational& r : {sum, a * b, a / b, a - b, -a}) CHECK(r.is_canonical());
}

TEST_CASE("parsing accepts integers and fractions, rejects junk") {
  CHECK(BigRational::parse("33/3200") == BigRational(33, 3200));
  CHECK(BigRational::parse("-7") == BigRational(-7));
  CHECK(BigRational::parse("4/6") == BigRational(2, 3));
  CHECK_THROWS_AS(BigRational::parse("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(BigRational::parse("x/3"), std::invalid_argument);
  CHECK_THROWS_AS(BigRational::parse(""), std::invalid_argument);
}

TEST_CASE("from_coprime trusts the caller but the claim is checkable") {
  const BigRational ok = BigRational::from_coprime(mpz_class(3), mpz_class(4));
  CHECK(ok.is_canonical());
  const BigRational lie = BigRational::from_coprime(mpz_class(2), mpz_class(4));
  CHECK_FALSE(lie.is_canonical());
  CHECK_THROWS_AS(BigRational::from_coprime(mpz_class(1), mpz_class(0)), std::invalid_argument);
  CHECK_THROWS_AS(BigRational::from_coprime(mpz_class(1), mpz_class(-2)), std::invalid_argument);
}

TEST_CASE("ordering is exact") {
  CHECK(BigRational(1, 3) < BigRational(333333, 999998));
  CHECK(BigRational(-1) < BigRational(0));
  CHECK(BigRational(9, 40) > BigRational(67, 320));
}
