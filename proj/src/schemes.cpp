#include "rscert/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <limits>
#include <stdexcept>

#include "rscert/combinatorics.hpp"
#include "rscert/rng.hpp"

namespace rscert {

namespace {

constexpr long long kExactArithmeticCap = 20;

template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

}  // namespace

std::string scheme_name(const SelectionScheme& scheme) {
  return std::visit(Overload{[](const WithoutReplacement&) { return std::string("without_replacement"); },
                             [](const WithReplacement&) { return std::string("with_replacement"); },
                             [](const BinomialSelect&) { return std::string("binomial"); }},
                    scheme);
}

void validate_scheme(const SelectionScheme& scheme, long long n) {
  if (n < 1) throw std::invalid_argument("scheme: dataset size must be >= 1");
  std::visit(Overload{[&](const WithoutReplacement& s) {
                        if (s.subset_size < 1) {
                          throw std::invalid_argument("scheme: subset size must be >= 1");
                        }
                        if (s.subset_size > n) {
                          throw std::invalid_argument(
                              "scheme: subset size exceeds dataset size for sampling without "
                              "replacement");
                        }
                      },
                      [&](const WithReplacement& s) {
                        if (s.subset_size < 1) {
                          throw std::invalid_argument("scheme: subset size must be >= 1");
                        }
                      },
                      [&](const BinomialSelect& s) {
                        if (!(s.p > 0.0 && s.p < 1.0)) {
                          throw std::invalid_argument("scheme: selection probability must lie in (0,1)");
                        }
                      }},
             scheme);
}

std::vector<long long> sample_indices(const SelectionScheme& scheme, long long n,
                                      std::uint64_t seed) {
  validate_scheme(scheme, n);
  Rng rng(seed);
  return std::visit(
      Overload{[&](const WithoutReplacement& s) {
                 // Floyd's algorithm: uniform n_s-subsets in O(n_s) space.
                 std::unordered_set<long long> chosen;
                 chosen.reserve(static_cast<std::size_t>(s.subset_size) * 2);
                 for (long long j = n - s.subset_size; j < n; ++j) {
                   const long long t =
                       static_cast<long long>(rng.next_below(static_cast<std::uint64_t>(j) + 1));
                   chosen.insert(chosen.count(t) ? j : t);
                 }
                 std::vector<long long> out(chosen.begin(), chosen.end());
                 std::sort(out.begin(), out.end());
                 return out;
               },
               [&](const WithReplacement& s) {
                 std::vector<long long> out;
                 out.reserve(static_cast<std::size_t>(s.subset_size));
                 for (long long i = 0; i < s.subset_size; ++i) {
                   out.push_back(static_cast<long long>(rng.next_below(static_cast<std::uint64_t>(n))));
                 }
                 return out;
               },
               [&](const BinomialSelect& s) {
                 std::vector<long long> out;
                 for (long long i = 0; i < n; ++i) {
                   if (rng.next_double() < s.p) out.push_back(i);
                 }
                 return out;
               }},
      scheme);
}

double log_pi(const SelectionScheme& scheme, long long n, long long m) {
  validate_scheme(scheme, n);
  if (m < 1) throw std::invalid_argument("pi_ratio: poisoned dataset size must be >= 1");
  return std::visit(
      Overload{[&](const WithoutReplacement& s) {
                 if (m < s.subset_size) {
                   throw std::invalid_argument(
                       "pi_ratio: poisoned dataset too small to subsample without replacement");
                 }
                 return log_binomial_ratio(n, m, s.subset_size);
               },
               [&](const WithReplacement& s) {
                 return static_cast<double>(s.subset_size) *
                        (std::log(static_cast<double>(n)) - std::log(static_cast<double>(m)));
               },
               [&](const BinomialSelect& s) {
                 return static_cast<double>(m - n) * std::log1p(-s.p);
               }},
      scheme);
}

double pi_ratio(const SelectionScheme& scheme, long long n, long long m) {
  return std::exp(log_pi(scheme, n, m));
}

double log_containment(const SelectionScheme& scheme, long long n_total, long long omega_size) {
  validate_scheme(scheme, n_total);
  if (omega_size < 0 || omega_size > n_total) {
    throw std::invalid_argument("miss_probability: omega size outside [0, n]");
  }
  return std::visit(
      Overload{[&](const WithoutReplacement& s) {
                 return log_binomial_ratio(omega_size, n_total, s.subset_size);
               },
               [&](const WithReplacement& s) {
                 if (omega_size == 0) return -std::numeric_limits<double>::infinity();
                 return static_cast<double>(s.subset_size) *
                        (std::log(static_cast<double>(omega_size)) -
                         std::log(static_cast<double>(n_total)));
               },
               [&](const BinomialSelect& s) {
                 return static_cast<double>(n_total - omega_size) * std::log1p(-s.p);
               }},
      scheme);
}

double miss_probability(const SelectionScheme& scheme, long long n_total, long long omega_size) {
  return -std::expm1(log_containment(scheme, n_total, omega_size));
}

Rational binomial_p_exact(const BinomialSelect& scheme) {
  // Accept p = num/den for den <= 1024 when the double value is exact.
  for (long long den = 2; den <= 1024; ++den) {
    const double scaled = scheme.p * static_cast<double>(den);
    const double rounded = std::round(scaled);
    if (rounded < 1.0 || rounded >= static_cast<double>(den)) continue;
    if (rounded / static_cast<double>(den) == scheme.p) {
      return Rational::of(static_cast<long long>(rounded), den);
    }
  }
  throw std::invalid_argument(
      "binomial_p_exact: p is not exactly a small rational; exact enumeration unavailable");
}

Rational subset_mass(const SelectionScheme& scheme, long long n,
                     std::span<const long long> subset) {
  validate_scheme(scheme, n);
  if (n > kExactArithmeticCap) {
    throw std::invalid_argument("subset_mass: n exceeds the exact-arithmetic cap");
  }
  for (long long idx : subset) {
    if (idx < 0 || idx >= n) throw std::invalid_argument("subset_mass: index out of range");
  }
  std::vector<long long> sorted(subset.begin(), subset.end());
  std::sort(sorted.begin(), sorted.end());
  const bool has_duplicates = std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();

  return std::visit(
      Overload{[&](const WithoutReplacement& s) {
                 if (static_cast<long long>(sorted.size()) != s.subset_size || has_duplicates) {
                   return Rational(0);
                 }
                 return Rational(BigInt(1), binomial_exact(n, s.subset_size));
               },
               [&](const WithReplacement& s) {
                 if (static_cast<long long>(sorted.size()) != s.subset_size) return Rational(0);
                 // Mass over ordered draw sequences, collapsed to the multiset.
                 std::vector<long long> counts;
                 for (std::size_t i = 0; i < sorted.size();) {
                   std::size_t j = i;
                   while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
                   counts.push_back(static_cast<long long>(j - i));
                   i = j;
                 }
                 BigInt den(1);
                 for (long long i = 0; i < s.subset_size; ++i) den = den * BigInt(n);
                 return Rational(multinomial_exact(counts), den);
               },
               [&](const BinomialSelect& s) {
                 if (has_duplicates) return Rational(0);
                 const Rational p = binomial_p_exact(s);
                 const Rational q = Rational(1) - p;
                 return p.pow(static_cast<long long>(sorted.size())) *
                        q.pow(n - static_cast<long long>(sorted.size()));
               }},
      scheme);
}

}  // namespace rscert
