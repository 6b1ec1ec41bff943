#pragma once

#include <string>

#include "rscert/bigint.hpp"

namespace rscert {

// Exact rational with normalized sign (denominator > 0) and reduced terms.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long v) : num_(v), den_(1) {}  // NOLINT: implicit by design
  Rational(BigInt num, BigInt den);
  static Rational of(long long num, long long den) { return Rational(BigInt(num), BigInt(den)); }

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  Rational operator-() const;
  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  int compare(const Rational& o) const;
  bool operator==(const Rational& o) const { return compare(o) == 0; }
  bool operator!=(const Rational& o) const { return compare(o) != 0; }
  bool operator<(const Rational& o) const { return compare(o) < 0; }
  bool operator<=(const Rational& o) const { return compare(o) <= 0; }
  bool operator>(const Rational& o) const { return compare(o) > 0; }
  bool operator>=(const Rational& o) const { return compare(o) >= 0; }

  // Integer power; exponent may be negative (requires nonzero base).
  Rational pow(long long e) const;

  double to_double() const;
  std::string to_string() const;  // "p/q", or "p" when q == 1

 private:
  BigInt num_;
  BigInt den_;
  void normalize();
};

}  // namespace rscert
