#include "rscert/bigint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rscert {

namespace {
constexpr std::uint64_t kBase = 1ULL << 32;
}

BigInt::BigInt(long long v) {
  if (v == 0) return;
  sign_ = v > 0 ? 1 : -1;
  std::uint64_t m = v > 0 ? static_cast<std::uint64_t>(v)
                          : 0 - static_cast<std::uint64_t>(v);
  while (m != 0) {
    mag_.push_back(static_cast<std::uint32_t>(m & 0xffffffffULL));
    m >>= 32;
  }
}

BigInt BigInt::from_u64(std::uint64_t v) {
  BigInt r;
  if (v == 0) return r;
  r.sign_ = 1;
  while (v != 0) {
    r.mag_.push_back(static_cast<std::uint32_t>(v & 0xffffffffULL));
    v >>= 32;
  }
  return r;
}

void BigInt::trim() {
  while (!mag_.empty() && mag_.back() == 0) mag_.pop_back();
  if (mag_.empty()) sign_ = 0;
}

int BigInt::compare_mag(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

std::vector<std::uint32_t> BigInt::add_mag(const std::vector<std::uint32_t>& a,
                                           const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> out(std::max(a.size(), b.size()) + 1, 0);
  std::uint64_t carry = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t s = carry;
    if (i < a.size()) s += a[i];
    if (i < b.size()) s += b[i];
    out[i] = static_cast<std::uint32_t>(s & 0xffffffffULL);
    carry = s >> 32;
  }
  while (!out.empty() && out.back() == 0) out.pop_back();
  return out;
}

std::vector<std::uint32_t> BigInt::sub_mag(const std::vector<std::uint32_t>& a,
                                           const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> out(a.size(), 0);
  std::int64_t borrow = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::int64_t d = static_cast<std::int64_t>(a[i]) - borrow - (i < b.size() ? b[i] : 0);
    if (d < 0) {
      d += static_cast<std::int64_t>(kBase);
      borrow = 1;
    } else {
      borrow = 0;
    }
    out[i] = static_cast<std::uint32_t>(d);
  }
  while (!out.empty() && out.back() == 0) out.pop_back();
  return out;
}

std::vector<std::uint32_t> BigInt::mul_mag(const std::vector<std::uint32_t>& a,
                                           const std::vector<std::uint32_t>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<std::uint32_t> out(a.size() + b.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::uint64_t carry = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      std::uint64_t cur = static_cast<std::uint64_t>(a[i]) * b[j] + out[i + j] + carry;
      out[i + j] = static_cast<std::uint32_t>(cur & 0xffffffffULL);
      carry = cur >> 32;
    }
    std::size_t k = i + b.size();
    while (carry != 0) {
      std::uint64_t cur = out[k] + carry;
      out[k] = static_cast<std::uint32_t>(cur & 0xffffffffULL);
      carry = cur >> 32;
      ++k;
    }
  }
  while (!out.empty() && out.back() == 0) out.pop_back();
  return out;
}

// Knuth algorithm D, base 2^32.
void BigInt::divmod_mag(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b,
                        std::vector<std::uint32_t>& q, std::vector<std::uint32_t>& r) {
  q.clear();
  r.clear();
  if (b.empty()) throw std::domain_error("BigInt: division by zero");
  if (compare_mag(a, b) < 0) {
    r = a;
    return;
  }
  if (b.size() == 1) {
    const std::uint64_t d = b[0];
    q.assign(a.size(), 0);
    std::uint64_t rem = 0;
    for (std::size_t i = a.size(); i-- > 0;) {
      const std::uint64_t cur = (rem << 32) | a[i];
      q[i] = static_cast<std::uint32_t>(cur / d);
      rem = cur % d;
    }
    while (!q.empty() && q.back() == 0) q.pop_back();
    if (rem != 0) r.push_back(static_cast<std::uint32_t>(rem));
    return;
  }

  // Normalize so the divisor's top limb has its high bit set.
  int shift = 0;
  for (std::uint32_t top = b.back(); (top & 0x80000000U) == 0; top <<= 1) ++shift;
  const std::size_t n = b.size();
  const std::size_t m = a.size() - n;

  std::vector<std::uint32_t> u(a.size() + 1, 0), v(n, 0);
  for (std::size_t i = a.size(); i-- > 0;) {
    u[i] = a[i] << shift;
    if (shift != 0 && i > 0) u[i] |= static_cast<std::uint32_t>(a[i - 1] >> (32 - shift));
  }
  if (shift != 0) u[a.size()] = static_cast<std::uint32_t>(a.back() >> (32 - shift));
  for (std::size_t i = n; i-- > 0;) {
    v[i] = b[i] << shift;
    if (shift != 0 && i > 0) v[i] |= static_cast<std::uint32_t>(b[i - 1] >> (32 - shift));
  }

  q.assign(m + 1, 0);
  for (std::size_t j = m + 1; j-- > 0;) {
    const std::uint64_t num = (static_cast<std::uint64_t>(u[j + n]) << 32) | u[j + n - 1];
    std::uint64_t qhat = num / v[n - 1];
    std::uint64_t rhat = num % v[n - 1];
    while (qhat >= kBase ||
           qhat * v[n - 2] > ((rhat << 32) | u[j + n - 2])) {
      --qhat;
      rhat += v[n - 1];
      if (rhat >= kBase) break;
    }
    // Multiply-subtract qhat * v from u[j .. j+n].
    std::int64_t borrow = 0;
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t prod = qhat * v[i] + carry;
      carry = prod >> 32;
      std::int64_t diff = static_cast<std::int64_t>(u[i + j]) -
                          static_cast<std::int64_t>(prod & 0xffffffffULL) - borrow;
      if (diff < 0) {
        diff += static_cast<std::int64_t>(kBase);
        borrow = 1;
      } else {
        borrow = 0;
      }
      u[i + j] = static_cast<std::uint32_t>(diff);
    }
    std::int64_t diff = static_cast<std::int64_t>(u[j + n]) - static_cast<std::int64_t>(carry) - borrow;
    if (diff < 0) {
      // qhat was one too large: add v back once.
      diff += static_cast<std::int64_t>(kBase);
      --qhat;
      std::uint64_t c2 = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t s = static_cast<std::uint64_t>(u[i + j]) + v[i] + c2;
        u[i + j] = static_cast<std::uint32_t>(s & 0xffffffffULL);
        c2 = s >> 32;
      }
      diff += static_cast<std::int64_t>(c2);
      diff &= 0xffffffffLL;
    }
    u[j + n] = static_cast<std::uint32_t>(diff);
    q[j] = static_cast<std::uint32_t>(qhat);
  }
  while (!q.empty() && q.back() == 0) q.pop_back();

  // Denormalize the remainder.
  r.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = u[i] >> shift;
    if (shift != 0 && i + 1 < u.size()) {
      r[i] |= static_cast<std::uint32_t>(static_cast<std::uint64_t>(u[i + 1]) << (32 - shift));
    }
  }
  while (!r.empty() && r.back() == 0) r.pop_back();
}

BigInt BigInt::operator-() const {
  BigInt r = *this;
  r.sign_ = -r.sign_;
  return r;
}

BigInt BigInt::abs() const {
  BigInt r = *this;
  if (r.sign_ < 0) r.sign_ = 1;
  return r;
}

BigInt BigInt::operator+(const BigInt& o) const {
  if (sign_ == 0) return o;
  if (o.sign_ == 0) return *this;
  BigInt r;
  if (sign_ == o.sign_) {
    r.sign_ = sign_;
    r.mag_ = add_mag(mag_, o.mag_);
  } else {
    const int c = compare_mag(mag_, o.mag_);
    if (c == 0) return BigInt();
    if (c > 0) {
      r.sign_ = sign_;
      r.mag_ = sub_mag(mag_, o.mag_);
    } else {
      r.sign_ = o.sign_;
      r.mag_ = sub_mag(o.mag_, mag_);
    }
  }
  r.trim();
  return r;
}

BigInt BigInt::operator-(const BigInt& o) const { return *this + (-o); }

BigInt BigInt::operator*(const BigInt& o) const {
  BigInt r;
  if (sign_ == 0 || o.sign_ == 0) return r;
  r.sign_ = sign_ * o.sign_;
  r.mag_ = mul_mag(mag_, o.mag_);
  r.trim();
  return r;
}

void BigInt::divmod(const BigInt& num, const BigInt& den, BigInt& quot, BigInt& rem) {
  std::vector<std::uint32_t> q, r;
  divmod_mag(num.mag_, den.mag_, q, r);
  quot = BigInt();
  rem = BigInt();
  quot.mag_ = std::move(q);
  rem.mag_ = std::move(r);
  quot.sign_ = quot.mag_.empty() ? 0 : num.sign_ * den.sign_;
  rem.sign_ = rem.mag_.empty() ? 0 : num.sign_;
}

BigInt BigInt::operator/(const BigInt& o) const {
  BigInt q, r;
  divmod(*this, o, q, r);
  return q;
}

BigInt BigInt::operator%(const BigInt& o) const {
  BigInt q, r;
  divmod(*this, o, q, r);
  return r;
}

int BigInt::compare(const BigInt& o) const {
  if (sign_ != o.sign_) return sign_ < o.sign_ ? -1 : 1;
  if (sign_ == 0) return 0;
  const int c = compare_mag(mag_, o.mag_);
  return sign_ > 0 ? c : -c;
}

BigInt BigInt::gcd(BigInt a, BigInt b) {
  a = a.abs();
  b = b.abs();
  while (!b.is_zero()) {
    BigInt r = a % b;
    a = b;
    b = r;
  }
  return a;
}

double BigInt::to_double() const {
  double v = 0.0;
  for (std::size_t i = mag_.size(); i-- > 0;) {
    v = v * 4294967296.0 + static_cast<double>(mag_[i]);
  }
  return sign_ < 0 ? -v : v;
}

std::string BigInt::to_string() const {
  if (sign_ == 0) return "0";
  std::string digits;
  std::vector<std::uint32_t> work = mag_;
  while (!work.empty()) {
    // Divide by 10^9 in place, collecting the remainder.
    std::uint64_t rem = 0;
    for (std::size_t i = work.size(); i-- > 0;) {
      const std::uint64_t cur = (rem << 32) | work[i];
      work[i] = static_cast<std::uint32_t>(cur / 1000000000ULL);
      rem = cur % 1000000000ULL;
    }
    while (!work.empty() && work.back() == 0) work.pop_back();
    for (int d = 0; d < 9; ++d) {
      digits.push_back(static_cast<char>('0' + rem % 10));
      rem /= 10;
    }
  }
  while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
  if (sign_ < 0) digits.push_back('-');
  std::reverse(digits.begin(), digits.end());
  return digits;
}

BigInt binomial_exact(long long n, long long k) {
  if (n < 0 || k < 0) throw std::invalid_argument("binomial_exact: negative argument");
  if (k > n) return BigInt(0);
  if (k > n - k) k = n - k;
  BigInt r(1);
  for (long long i = 1; i <= k; ++i) {
    r = r * BigInt(n - k + i) / BigInt(i);
  }
  return r;
}

BigInt multinomial_exact(const std::vector<long long>& counts) {
  long long total = 0;
  BigInt r(1);
  for (long long c : counts) {
    if (c < 0) throw std::invalid_argument("multinomial_exact: negative count");
    total += c;
    r = r * binomial_exact(total, c);
  }
  return r;
}

}  // namespace rscert
