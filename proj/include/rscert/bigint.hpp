#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rscert {

// Arbitrary-precision signed integer, sign-magnitude over 32-bit limbs.
// The enumeration oracle works on small instances, so magnitudes stay tiny;
// schoolbook algorithms are plenty.
class BigInt {
 public:
  BigInt() = default;
  BigInt(long long v);  // NOLINT: implicit by design, mirrors integer literals
  static BigInt from_u64(std::uint64_t v);

  bool is_zero() const { return sign_ == 0; }
  int sign() const { return sign_; }

  BigInt operator-() const;
  BigInt abs() const;

  BigInt operator+(const BigInt& o) const;
  BigInt operator-(const BigInt& o) const;
  BigInt operator*(const BigInt& o) const;
  BigInt operator/(const BigInt& o) const;  // truncated toward zero
  BigInt operator%(const BigInt& o) const;  // sign follows dividend

  BigInt& operator+=(const BigInt& o) { return *this = *this + o; }
  BigInt& operator-=(const BigInt& o) { return *this = *this - o; }
  BigInt& operator*=(const BigInt& o) { return *this = *this * o; }

  // -1, 0, +1 as *this compares to o.
  int compare(const BigInt& o) const;
  bool operator==(const BigInt& o) const { return compare(o) == 0; }
  bool operator!=(const BigInt& o) const { return compare(o) != 0; }
  bool operator<(const BigInt& o) const { return compare(o) < 0; }
  bool operator<=(const BigInt& o) const { return compare(o) <= 0; }
  bool operator>(const BigInt& o) const { return compare(o) > 0; }
  bool operator>=(const BigInt& o) const { return compare(o) >= 0; }

  static BigInt gcd(BigInt a, BigInt b);
  static void divmod(const BigInt& num, const BigInt& den, BigInt& quot, BigInt& rem);

  double to_double() const;
  std::string to_string() const;

 private:
  int sign_ = 0;                    // 0 iff mag_ empty
  std::vector<std::uint32_t> mag_;  // little-endian, no leading zeros

  void trim();
  static int compare_mag(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b);
  static std::vector<std::uint32_t> add_mag(const std::vector<std::uint32_t>& a,
                                            const std::vector<std::uint32_t>& b);
  // Requires |a| >= |b|.
  static std::vector<std::uint32_t> sub_mag(const std::vector<std::uint32_t>& a,
                                            const std::vector<std::uint32_t>& b);
  static std::vector<std::uint32_t> mul_mag(const std::vector<std::uint32_t>& a,
                                            const std::vector<std::uint32_t>& b);
  static void divmod_mag(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b,
                         std::vector<std::uint32_t>& q, std::vector<std::uint32_t>& r);
};

// Exact binomial coefficient C(n, k) via the stepwise product (every
// intermediate division is exact).
BigInt binomial_exact(long long n, long long k);

// Exact multinomial coefficient size! / prod(counts_i!).
BigInt multinomial_exact(const std::vector<long long>& counts);

}  // namespace rscert
