#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rscert/rational.hpp"

namespace rscert {

// The three subsampling distributions mu over sub-datasets of an n-sample
// training set.
struct WithoutReplacement {
  long long subset_size;  // n_s distinct samples, uniform over subsets
};
struct WithReplacement {
  long long subset_size;  // n_s independent uniform draws, repeats allowed
};
struct BinomialSelect {
  double p;  // each sample kept independently with probability p
};
using SelectionScheme = std::variant<WithoutReplacement, WithReplacement, BinomialSelect>;

std::string scheme_name(const SelectionScheme& scheme);

// Rejects non-positive subset sizes, p outside (0,1), and (for sampling
// without replacement) subset_size > n.
void validate_scheme(const SelectionScheme& scheme, long long n);

// One draw of mu over indices [0, n). Deterministic given the seed.
// WithoutReplacement returns a sorted index set; WithReplacement returns the
// draws in order (repeats possible); BinomialSelect returns a sorted subset,
// possibly empty.
std::vector<long long> sample_indices(const SelectionScheme& scheme, long long n,
                                      std::uint64_t seed);

// The tight constant pi with Pr(mu(D'_m) = S) = pi * Pr(mu(D_n) = S) for
// every S inside the shared part of the two datasets.
double log_pi(const SelectionScheme& scheme, long long n, long long m);
double pi_ratio(const SelectionScheme& scheme, long long n, long long m);

// ln Pr(the drawn sub-dataset is contained in a fixed omega-subset).
double log_containment(const SelectionScheme& scheme, long long n_total, long long omega_size);

// Pr(the drawn sub-dataset is NOT contained in a fixed omega-subset).
double miss_probability(const SelectionScheme& scheme, long long n_total, long long omega_size);

// Exact probability mass of one sub-dataset (tiny-n support for the
// enumeration oracle; capped at n <= 20). For WithReplacement the subset is
// a multiset and its mass aggregates all orderings of the draws.
Rational subset_mass(const SelectionScheme& scheme, long long n,
                     std::span<const long long> subset);

// Exact value of p for the enumeration oracle: the rational num/den with
// den <= 1024 whose double rounding reproduces p. Rejects anything else.
Rational binomial_p_exact(const BinomialSelect& scheme);

}  // namespace rscert
