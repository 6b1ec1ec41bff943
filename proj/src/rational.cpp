#include "rscert/rational.hpp"

#include <stdexcept>

namespace rscert {

Rational::Rational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw std::domain_error("Rational: zero denominator");
  normalize();
}

void Rational::normalize() {
  if (den_.sign() < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  if (num_.is_zero()) {
    den_ = BigInt(1);
    return;
  }
  const BigInt g = BigInt::gcd(num_, den_);
  num_ = num_ / g;
  den_ = den_ / g;
}

Rational Rational::operator-() const {
  Rational r = *this;
  r.num_ = -r.num_;
  return r;
}

Rational Rational::operator+(const Rational& o) const {
  return Rational(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

Rational Rational::operator-(const Rational& o) const {
  return Rational(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}

Rational Rational::operator*(const Rational& o) const {
  return Rational(num_ * o.num_, den_ * o.den_);
}

Rational Rational::operator/(const Rational& o) const {
  if (o.is_zero()) throw std::domain_error("Rational: division by zero");
  return Rational(num_ * o.den_, den_ * o.num_);
}

int Rational::compare(const Rational& o) const {
  return (num_ * o.den_).compare(o.num_ * den_);
}

Rational Rational::pow(long long e) const {
  if (e < 0) {
    if (is_zero()) throw std::domain_error("Rational: negative power of zero");
    return Rational(1) / pow(-e);
  }
  Rational base = *this;
  Rational acc(1);
  while (e > 0) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

double Rational::to_double() const { return num_.to_double() / den_.to_double(); }

std::string Rational::to_string() const {
  if (den_ == BigInt(1)) return num_.to_string();
  return num_.to_string() + "/" + den_.to_string();
}

}  // namespace rscert
