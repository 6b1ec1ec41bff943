#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>

#include "rscert/bigint.hpp"
#include "rscert/rational.hpp"
#include "rscert/rng.hpp"

using rscert::BigInt;
using rscert::Rational;

TEST_CASE("small integer arithmetic round-trips") {
  CHECK(BigInt(0).to_string() == "0");
  CHECK(BigInt(-1).to_string() == "-1");
  CHECK((BigInt(1000000007) * BigInt(998244353)).to_string() == "998244359987710471");
  CHECK((BigInt(-7) + BigInt(7)).is_zero());
  CHECK((BigInt(1) - BigInt(100)).to_string() == "-99");
}

TEST_CASE("division matches 128-bit reference on random inputs") {
  rscert::Rng rng(2024);
  for (int it = 0; it < 2000; ++it) {
    const auto a64 = static_cast<std::int64_t>(rng.next_u64() >> (rng.next_below(32)));
    auto b64 = static_cast<std::int64_t>(rng.next_u64() >> (rng.next_below(48)));
    if (b64 == 0) b64 = 1;
    const BigInt a(a64), b(b64);
    BigInt q, r;
    BigInt::divmod(a, b, q, r);
    CHECK(q == BigInt(a64 / b64));
    CHECK(r == BigInt(a64 % b64));
  }
}

TEST_CASE("division identity holds for multi-limb values") {
  rscert::Rng rng(7);
  for (int it = 0; it < 500; ++it) {
    // Build a ~192-bit dividend from three 64-bit pieces.
    BigInt a = BigInt::from_u64(rng.next_u64());
    a = a * BigInt::from_u64(rng.next_u64()) + BigInt::from_u64(rng.next_u64());
    BigInt b = BigInt::from_u64(rng.next_u64() | 1);
    if (it % 3 == 0) b = b * BigInt::from_u64(rng.next_u64() | 1);
    BigInt q, r;
    BigInt::divmod(a, b, q, r);
    CHECK(q * b + r == a);
    CHECK(r >= BigInt(0));
    CHECK(r < b);
  }
}

TEST_CASE("gcd and rational normalization") {
  CHECK(BigInt::gcd(BigInt(12), BigInt(18)) == BigInt(6));
  CHECK(BigInt::gcd(BigInt(0), BigInt(5)) == BigInt(5));
  CHECK(Rational::of(6, 8).to_string() == "3/4");
  CHECK(Rational::of(-6, 8).to_string() == "-3/4");
  CHECK(Rational::of(6, -8).to_string() == "-3/4");
  CHECK(Rational::of(0, 17).to_string() == "0");
}

TEST_CASE("rational field axioms on random small values") {
  rscert::Rng rng(99);
  for (int it = 0; it < 300; ++it) {
    const auto draw = [&] {
      return Rational::of(static_cast<long long>(rng.next_below(2001)) - 1000,
                          static_cast<long long>(rng.next_below(50)) + 1);
    };
    const Rational a = draw(), b = draw(), c = draw();
    CHECK(a + b == b + a);
    CHECK((a + b) + c == a + (b + c));
    CHECK(a * (b + c) == a * b + a * c);
    if (!b.is_zero()) CHECK((a / b) * b == a);
    CHECK((a - a).is_zero());
  }
}

TEST_CASE("rational pow supports negative exponents") {
  CHECK(Rational::of(2, 3).pow(3) == Rational::of(8, 27));
  CHECK(Rational::of(2, 3).pow(-2) == Rational::of(9, 4));
  CHECK(Rational::of(5, 1).pow(0) == Rational(1));
}

TEST_CASE("exact binomial coefficients match the Pascal triangle") {
  // Independent reference: addition-only Pascal triangle.
  constexpr int kMax = 61;
  static BigInt pascal[kMax][kMax];
  for (int n = 0; n < kMax; ++n) {
    pascal[n][0] = BigInt(1);
    for (int k = 1; k <= n; ++k) {
      pascal[n][k] = pascal[n - 1][k - 1] + (k <= n - 1 ? pascal[n - 1][k] : BigInt(0));
    }
  }
  for (int n = 0; n < kMax; ++n) {
    for (int k = 0; k <= n; ++k) {
      CHECK(rscert::binomial_exact(n, k) == pascal[n][k]);
    }
  }
  CHECK(rscert::binomial_exact(60, 20).to_string() == "4191844505805495");
  CHECK(rscert::binomial_exact(3, 5).is_zero());
}

TEST_CASE("multinomial coefficients") {
  CHECK(rscert::multinomial_exact({2, 0}) == BigInt(1));
  CHECK(rscert::multinomial_exact({1, 1}) == BigInt(2));
  CHECK(rscert::multinomial_exact({2, 1, 1}) == BigInt(12));
}

TEST_CASE("to_double is accurate for large magnitudes") {
  const BigInt big = rscert::binomial_exact(60, 30);
  CHECK(big.to_double() == doctest::Approx(1.18264581564861424e17).epsilon(1e-12));
  CHECK(Rational::of(1, 3).to_double() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}
