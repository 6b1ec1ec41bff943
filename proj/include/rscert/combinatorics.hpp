#pragma once

namespace rscert {

// ln C(n, k) on the natural-log scale. Returns -infinity when k > n (the
// coefficient is zero). Negative arguments are rejected.
double log_binomial(long long n, long long k);

// C(a, k) / C(b, k), evaluated as the product of per-factor ratios
// (a - i) / (b - i) so neither coefficient is ever materialized.
// Requires b >= k >= 0; returns 0 when a < k.
double binomial_ratio(long long a, long long b, long long k);

// ln of binomial_ratio; -infinity when a < k.
double log_binomial_ratio(long long a, long long b, long long k);

// Exact binomial tails, evaluated in log space by summing the shorter side
// (at most min(count, trials - count) + 1 terms) with a streaming
// log-sum-exp accumulator.
double binomial_upper_tail(long long count, long long trials, double p);  // P(X >= count)
double binomial_lower_tail(long long count, long long trials, double p);  // P(X <= count)

// One-sided Clopper-Pearson bounds at level alpha_half, found by bisection
// on the exact tails to an absolute tolerance of 1e-12 in p.
//
// cp_lower: inf { p : P(Bin(trials, p) >= count) >= alpha_half }
// cp_upper: sup { p : P(Bin(trials, p) <= count) >= alpha_half }
double cp_lower(long long count, long long trials, double alpha_half);
double cp_upper(long long count, long long trials, double alpha_half);

}  // namespace rscert
