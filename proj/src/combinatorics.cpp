#include "rscert/combinatorics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace rscert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr long long kLogFactTableSize = 1 << 17;

// Cumulative log-factorial table; covers every n the certification math
// touches (training sets up to ~65k plus the poisoning budget).
double log_factorial(long long n) {
  static const std::vector<double> table = [] {
    std::vector<double> t(kLogFactTableSize);
    t[0] = 0.0;
    for (long long i = 1; i < kLogFactTableSize; ++i) {
      t[i] = t[i - 1] + std::log(static_cast<double>(i));
    }
    return t;
  }();
  if (n < kLogFactTableSize) return table[static_cast<std::size_t>(n)];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

// Streaming log-sum-exp: never exponentiates anything above the running max.
class LogSumExp {
 public:
  void add(double log_term) {
    if (log_term == -kInf) return;
    if (empty_) {
      max_ = log_term;
      sum_ = 1.0;
      empty_ = false;
    } else if (log_term > max_) {
      sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    } else {
      sum_ += std::exp(log_term - max_);
    }
  }
  double log_value() const { return empty_ ? -kInf : max_ + std::log(sum_); }

 private:
  bool empty_ = true;
  double max_ = 0.0;
  double sum_ = 0.0;
};

double log_pmf(long long j, long long trials, double log_p, double log_q) {
  return log_binomial(trials, j) + static_cast<double>(j) * log_p +
         static_cast<double>(trials - j) * log_q;
}

// Sum of binomial pmf over j in [lo, hi], as a probability in [0, 1].
double pmf_range_sum(long long lo, long long hi, long long trials, double p) {
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  LogSumExp acc;
  for (long long j = lo; j <= hi; ++j) acc.add(log_pmf(j, trials, log_p, log_q));
  const double v = std::exp(acc.log_value());
  return v > 1.0 ? 1.0 : v;
}

void check_tail_args(long long trials, double p) {
  if (trials <= 0) throw std::invalid_argument("binomial tail: trials must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial tail: p outside [0,1]");
}

}  // namespace

double log_binomial(long long n, long long k) {
  if (n < 0 || k < 0) throw std::invalid_argument("log_binomial: negative argument");
  if (k > n) return -kInf;
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double binomial_ratio(long long a, long long b, long long k) {
  if (k < 0) throw std::invalid_argument("binomial_ratio: k must be non-negative");
  if (b < k) throw std::invalid_argument("binomial_ratio: requires b >= k");
  if (a < 0) throw std::invalid_argument("binomial_ratio: negative argument");
  if (a < k) return 0.0;
  double r = 1.0;
  for (long long i = 0; i < k; ++i) {
    r *= static_cast<double>(a - i) / static_cast<double>(b - i);
  }
  return r;
}

double log_binomial_ratio(long long a, long long b, long long k) {
  if (k < 0) throw std::invalid_argument("log_binomial_ratio: k must be non-negative");
  if (b < k) throw std::invalid_argument("log_binomial_ratio: requires b >= k");
  if (a < 0) throw std::invalid_argument("log_binomial_ratio: negative argument");
  if (a < k) return -kInf;
  double s = 0.0;
  for (long long i = 0; i < k; ++i) {
    s += std::log(static_cast<double>(a - i) / static_cast<double>(b - i));
  }
  return s;
}

double binomial_upper_tail(long long count, long long trials, double p) {
  check_tail_args(trials, p);
  if (count <= 0) return 1.0;
  if (count > trials) return 0.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  // Sum whichever side has fewer terms.
  if (trials - count + 1 <= count) return pmf_range_sum(count, trials, trials, p);
  return 1.0 - pmf_range_sum(0, count - 1, trials, p);
}

double binomial_lower_tail(long long count, long long trials, double p) {
  check_tail_args(trials, p);
  if (count < 0) return 0.0;
  if (count >= trials) return 1.0;
  if (p == 0.0) return 1.0;
  if (p == 1.0) return 0.0;
  if (count + 1 <= trials - count) return pmf_range_sum(0, count, trials, p);
  return 1.0 - pmf_range_sum(count + 1, trials, trials, p);
}

namespace {

constexpr double kBisectTol = 1e-12;

void check_cp_args(long long count, long long trials, double alpha_half) {
  if (trials <= 0) throw std::invalid_argument("clopper-pearson: trials must be positive");
  if (count < 0 || count > trials) {
    throw std::invalid_argument("clopper-pearson: count outside [0, trials]");
  }
  if (!(alpha_half > 0.0 && alpha_half < 1.0)) {
    throw std::invalid_argument("clopper-pearson: alpha_half outside (0,1)");
  }
}

}  // namespace

double cp_lower(long long count, long long trials, double alpha_half) {
  check_cp_args(count, trials, alpha_half);
  if (count == 0) return 0.0;
  // P(X >= count) is continuous and increasing in p, 0 at p=0, 1 at p=1.
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 100 && hi - lo > kBisectTol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (binomial_upper_tail(count, trials, mid) >= alpha_half) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double cp_upper(long long count, long long trials, double alpha_half) {
  check_cp_args(count, trials, alpha_half);
  if (count == trials) return 1.0;
  // P(X <= count) is continuous and decreasing in p, 1 at p=0, 0 at p=1.
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 100 && hi - lo > kBisectTol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (binomial_lower_tail(count, trials, mid) >= alpha_half) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace rscert
