#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "rscert/rng.hpp"
#include "rscert/schemes.hpp"

using namespace rscert;

namespace {

// Test-side enumeration of every sub-dataset a scheme can produce from
// [0, n), as sorted index vectors (multisets for sampling with replacement).
std::vector<std::vector<long long>> all_subsets(const SelectionScheme& scheme, long long n) {
  std::vector<std::vector<long long>> out;
  if (const auto* wo = std::get_if<WithoutReplacement>(&scheme)) {
    std::vector<long long> idx;
    const long long k = wo->subset_size;
    const auto rec = [&](auto&& self, long long start) -> void {
      if (static_cast<long long>(idx.size()) == k) {
        out.push_back(idx);
        return;
      }
      for (long long v = start; v < n; ++v) {
        idx.push_back(v);
        self(self, v + 1);
        idx.pop_back();
      }
    };
    rec(rec, 0);
  } else if (const auto* wr = std::get_if<WithReplacement>(&scheme)) {
    std::vector<long long> idx;
    const long long k = wr->subset_size;
    const auto rec = [&](auto&& self, long long start) -> void {
      if (static_cast<long long>(idx.size()) == k) {
        out.push_back(idx);
        return;
      }
      for (long long v = start; v < n; ++v) {
        idx.push_back(v);
        self(self, v);  // repeats allowed
        idx.pop_back();
      }
    };
    rec(rec, 0);
  } else {
    for (std::uint64_t bits = 0; bits < (1ULL << n); ++bits) {
      std::vector<long long> idx;
      for (long long i = 0; i < n; ++i) {
        if (bits & (1ULL << i)) idx.push_back(i);
      }
      out.push_back(idx);
    }
  }
  return out;
}

bool inside_omega(const std::vector<long long>& subset, const std::set<long long>& omega) {
  return std::all_of(subset.begin(), subset.end(),
                     [&](long long v) { return omega.count(v) > 0; });
}

}  // namespace

TEST_CASE("sample_indices honors the basic contracts") {
  // Forced full set.
  const auto full = sample_indices(WithoutReplacement{5}, 5, 123);
  CHECK(full == std::vector<long long>{0, 1, 2, 3, 4});

  // Size and range for replacement draws.
  const auto with = sample_indices(WithReplacement{4}, 2, 99);
  CHECK(with.size() == 4);
  for (long long v : with) CHECK((v == 0 || v == 1));

  // Determinism per seed.
  for (const SelectionScheme scheme :
       {SelectionScheme{WithoutReplacement{3}}, SelectionScheme{WithReplacement{3}},
        SelectionScheme{BinomialSelect{0.7}}}) {
    CHECK(sample_indices(scheme, 40, 7) == sample_indices(scheme, 40, 7));
    CHECK(sample_indices(scheme, 40, 7) != sample_indices(scheme, 40, 8));
  }

  // Distinct sorted indices without replacement.
  const auto wo = sample_indices(WithoutReplacement{10}, 100, 5);
  CHECK(std::is_sorted(wo.begin(), wo.end()));
  CHECK(std::adjacent_find(wo.begin(), wo.end()) == wo.end());

  CHECK_THROWS_AS(sample_indices(WithoutReplacement{6}, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_indices(BinomialSelect{1.0}, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_indices(BinomialSelect{0.0}, 5, 1), std::invalid_argument);
}

TEST_CASE("sampling without replacement is uniform over subsets") {
  // Floyd's algorithm check: every 2-subset of 5 elements appears with
  // frequency ~ 1/10.
  std::map<std::vector<long long>, int> freq;
  const int trials = 40000;
  for (int i = 0; i < trials; ++i) {
    freq[sample_indices(WithoutReplacement{2}, 5, 1000 + i)]++;
  }
  CHECK(freq.size() == 10);
  for (const auto& [subset, count] : freq) {
    CHECK(std::fabs(static_cast<double>(count) / trials - 0.1) < 0.01);
  }
}

TEST_CASE("pi_ratio matches its defining constant") {
  CHECK(pi_ratio(WithoutReplacement{2}, 4, 4) == doctest::Approx(1.0));
  CHECK(pi_ratio(WithReplacement{3}, 4, 4) == doctest::Approx(1.0));
  CHECK(pi_ratio(BinomialSelect{0.3}, 9, 9) == doctest::Approx(1.0));

  // Direct substitution.
  CHECK(pi_ratio(WithReplacement{3}, 4, 2) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(pi_ratio(BinomialSelect{0.5}, 4, 6) == doctest::Approx(0.25).epsilon(1e-12));

  // Enumerated masses for a fixed subset inside Omega: 1/6 under n=4 vs 1/3
  // under m=3 gives pi = 2.
  const SelectionScheme wo{WithoutReplacement{2}};
  const std::vector<long long> fixed{0, 1};
  const Rational mass_n = subset_mass(wo, 4, fixed);
  const Rational mass_m = subset_mass(wo, 3, fixed);
  CHECK(mass_n == Rational::of(1, 6));
  CHECK(mass_m == Rational::of(1, 3));
  CHECK(pi_ratio(wo, 4, 3) == doctest::Approx((mass_m / mass_n).to_double()).epsilon(1e-12));
  CHECK(pi_ratio(wo, 4, 3) == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS(pi_ratio(WithoutReplacement{3}, 4, 2), std::invalid_argument);
  CHECK_THROWS_AS(pi_ratio(WithReplacement{3}, 4, 0), std::invalid_argument);
}

TEST_CASE("pi is the exact mass ratio for every subset of a shared region") {
  // For all n, m <= 8 and every sub-dataset inside Omega = [0, min(m, n)):
  // the ratio mass_under_m / mass_under_n is one exact constant across all
  // sub-datasets, and pi_ratio reproduces it.
  for (long long n = 1; n <= 8; ++n) {
    for (long long m = 1; m <= 8; ++m) {
      std::vector<SelectionScheme> schemes;
      for (long long k = 1; k <= std::min({n, m, 3LL}); ++k) {
        schemes.push_back(WithoutReplacement{k});
        schemes.push_back(WithReplacement{k});
      }
      schemes.push_back(BinomialSelect{0.25});
      schemes.push_back(BinomialSelect{0.5});
      for (const SelectionScheme& scheme : schemes) {
        const long long omega = std::min(n, m);
        bool have_ratio = false;
        Rational ratio(0);
        for (const auto& subset : all_subsets(scheme, omega)) {
          const Rational mass_n = subset_mass(scheme, n, subset);
          const Rational mass_m = subset_mass(scheme, m, subset);
          if (mass_n.is_zero()) {
            CHECK(mass_m.is_zero());
            continue;
          }
          const Rational r = mass_m / mass_n;
          if (!have_ratio) {
            ratio = r;
            have_ratio = true;
          } else {
            CHECK(r == ratio);  // exact constancy
          }
        }
        if (have_ratio) {
          CHECK(pi_ratio(scheme, n, m) ==
                doctest::Approx(ratio.to_double()).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("miss_probability basics and frozen values") {
  CHECK(miss_probability(WithoutReplacement{2}, 6, 6) == 0.0);
  CHECK(miss_probability(WithReplacement{2}, 4, 4) == 0.0);
  CHECK(miss_probability(BinomialSelect{0.5}, 4, 4) == 0.0);

  // 16 ordered pairs over 4 elements; 9 stay within a fixed 3-subset.
  CHECK(miss_probability(WithReplacement{2}, 4, 3) == doctest::Approx(7.0 / 16).epsilon(1e-13));
  // The excluded element is selected with probability p.
  CHECK(miss_probability(BinomialSelect{0.5}, 4, 3) == doctest::Approx(0.5).epsilon(1e-13));

  CHECK_THROWS_AS(miss_probability(WithReplacement{2}, 4, 5), std::invalid_argument);
  CHECK_THROWS_AS(miss_probability(WithReplacement{2}, 4, -1), std::invalid_argument);
}

TEST_CASE("miss_probability equals the enumerated escape mass") {
  for (long long n = 1; n <= 8; ++n) {
    std::vector<SelectionScheme> schemes;
    for (long long k = 1; k <= std::min(n, 3LL); ++k) {
      schemes.push_back(WithoutReplacement{k});
      schemes.push_back(WithReplacement{k});
    }
    schemes.push_back(BinomialSelect{0.25});
    schemes.push_back(BinomialSelect{0.5});
    for (const SelectionScheme& scheme : schemes) {
      double previous = 0.0;  // miss at omega = n
      for (long long omega = n; omega >= 0; --omega) {
        std::set<long long> omega_set;
        for (long long v = 0; v < omega; ++v) omega_set.insert(v);
        Rational escape(0);
        for (const auto& subset : all_subsets(scheme, n)) {
          if (!inside_omega(subset, omega_set)) escape += subset_mass(scheme, n, subset);
        }
        const double got = miss_probability(scheme, n, omega);
        CHECK(got == doctest::Approx(escape.to_double()).epsilon(1e-12));
        CHECK(got >= previous - 1e-15);  // nonincreasing in omega
        previous = got;
      }
    }
  }
}

TEST_CASE("subset_mass frozen examples") {
  CHECK(subset_mass(WithoutReplacement{2}, 4, std::vector<long long>{0, 1}) == Rational::of(1, 6));
  CHECK(subset_mass(BinomialSelect{0.5}, 3, std::vector<long long>{}) == Rational::of(1, 8));
  CHECK(subset_mass(WithReplacement{2}, 2, std::vector<long long>{0, 0}) == Rational::of(1, 4));
  CHECK(subset_mass(WithReplacement{2}, 2, std::vector<long long>{0, 1}) == Rational::of(1, 2));
  // Out of the scheme's support.
  CHECK(subset_mass(WithoutReplacement{2}, 4, std::vector<long long>{1}).is_zero());
  CHECK(subset_mass(BinomialSelect{0.5}, 3, std::vector<long long>{0, 0}).is_zero());
  // Caps and input validation.
  CHECK_THROWS_AS(subset_mass(WithoutReplacement{2}, 21, std::vector<long long>{0, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(subset_mass(WithoutReplacement{2}, 4, std::vector<long long>{0, 9}),
                  std::invalid_argument);
  CHECK_THROWS_AS(subset_mass(BinomialSelect{0.2937465119}, 4, std::vector<long long>{0}),
                  std::invalid_argument);  // p not a small rational
}

TEST_CASE("mass conservation for every scheme at n <= 8") {
  for (long long n = 1; n <= 8; ++n) {
    std::vector<SelectionScheme> schemes;
    for (long long k = 1; k <= std::min(n, 3LL); ++k) {
      schemes.push_back(WithoutReplacement{k});
      schemes.push_back(WithReplacement{k});
    }
    schemes.push_back(BinomialSelect{0.25});
    schemes.push_back(BinomialSelect{0.5});
    for (const SelectionScheme& scheme : schemes) {
      Rational total(0);
      for (const auto& subset : all_subsets(scheme, n)) {
        total += subset_mass(scheme, n, subset);
      }
      CHECK(total == Rational(1));
    }
  }
}

TEST_CASE("binomial selection can return the empty subset") {
  int empties = 0;
  for (int i = 0; i < 200; ++i) {
    if (sample_indices(BinomialSelect{0.05}, 6, 500 + i).empty()) ++empties;
  }
  // (1 - 0.05)^6 is about 0.735; the empty subset must show up.
  CHECK(empties > 0);
}
