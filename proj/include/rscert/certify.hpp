#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rscert/schemes.hpp"

namespace rscert {

// Attacker capability classes. The number suffix is the conventional short
// name used throughout the CLI (P1..P6).
enum class PoisonKind {
  insert = 1,                // insert at most rho new samples
  erase = 2,                 // delete at most rho samples
  modify = 3,                // modify at most rho samples in place
  insert_modify = 4,         // any mix of insertions and modifications, total <= rho
  erase_modify = 5,          // any mix of deletions and modifications, total <= rho
  insert_erase_modify = 6,   // any mix of all three operations, total <= rho
};

PoisonKind poison_kind_from_string(const std::string& name);
std::string poison_kind_to_string(PoisonKind kind);
bool poison_allows_insert(PoisonKind kind);
bool poison_allows_erase(PoisonKind kind);
bool poison_allows_modify(PoisonKind kind);

// Range of poisoned-dataset sizes m reachable at intensity rho.
struct MRange {
  long long lo;
  long long hi;
};
MRange poison_m_range(PoisonKind kind, long long n, long long rho);

// Worst-case size of the untouched part (D_n intersect D'_m) for a given m.
long long poison_omega(PoisonKind kind, long long n, long long m, long long rho);

// Sentinel returned by delta when some admissible attack leaves a dataset
// the scheme cannot subsample at all; any value above 1 is uncertifiable
// because vote margins live in [-1, 1].
inline constexpr double kDeltaUncertifiable = 2.0;

// Minimum top-2 vote margin that certifies robustness at intensity rho:
// the worst case over admissible m of
//   Pr[sub-dataset escapes Omega under D_n]
//   + (1/pi) * Pr[sub-dataset escapes Omega under D'_m].
// Clamped to [0, 2]; delta(0) = 0.
double delta(const SelectionScheme& scheme, PoisonKind kind, long long n, long long rho);

// Largest rho <= rho_cap with delta(rho) <= margin, by exponential-then-
// binary search on the monotone delta. nullopt when margin < 0.
std::optional<long long> certified_radius(const SelectionScheme& scheme, PoisonKind kind,
                                          long long n, double margin, long long rho_cap);

// Per-test-example class vote counts over the T base classifiers.
struct VoteRecord {
  std::string example_id;
  std::map<int, long long> counts;
  long long trials = 0;
  std::optional<int> true_label;
};
void validate_vote(const VoteRecord& vote);

// Top-2 classes by count, descending; ties break toward the smaller class
// id. Returns {class, count} pairs; the runner-up is {-1, 0} when the record
// contains fewer than two classes.
std::pair<std::pair<int, long long>, std::pair<int, long long>> top_two(const VoteRecord& vote);

struct Certificate {
  bool abstain = false;
  int label = -1;          // meaningful only when !abstain
  long long radius = -1;   // meaningful only when !abstain
  double p1_lower = 0.0;
  double p2_upper = 1.0;
};

// Certified prediction from Monte-Carlo votes: simultaneous one-sided
// Clopper-Pearson bounds at level alpha/2 each, then the radius search on
// the bounded margin.
Certificate certify_prediction(const VoteRecord& vote, double alpha,
                               const SelectionScheme& scheme, PoisonKind kind, long long n,
                               long long rho_cap);

// Fraction of records whose certificate is non-abstaining, has the correct
// label, and has radius >= rho. Every record must carry a true label.
double certified_accuracy(std::span<const VoteRecord> votes, long long rho, double alpha,
                          const SelectionScheme& scheme, PoisonKind kind, long long n,
                          long long rho_cap);

// certified_accuracy over a grid of rho values (certificates are computed
// once and reused across grid points).
std::vector<std::pair<long long, double>> accuracy_curve(std::span<const VoteRecord> votes,
                                                         std::span<const long long> rho_grid,
                                                         double alpha,
                                                         const SelectionScheme& scheme,
                                                         PoisonKind kind, long long n,
                                                         long long rho_cap);

}  // namespace rscert
