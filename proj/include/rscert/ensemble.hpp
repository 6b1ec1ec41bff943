#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rscert/certify.hpp"
#include "rscert/dataset.hpp"
#include "rscert/learner.hpp"
#include "rscert/schemes.hpp"

namespace rscert {

// Class-frequency-inverse resampling: target draws with replacement where
// each entry's weight is 1 / (count of its class among the entries).
// Returns positions into the given label list. Deterministic per seed.
std::vector<long long> weighted_balance_expand(std::span<const int> labels, long long target,
                                               std::uint64_t seed);

struct EnsembleConfig {
  SelectionScheme scheme;
  long long trials = 1000;  // T
  LearnerSpec learner;
  std::uint64_t master_seed = 1;
  long long expand_target = 2048;
};

// A trained smooth classifier: T members voting by majority. Members are
// trained on subsampled-and-expanded slices of the potentially poisoned
// part, always joined with the full clean part. Training is deterministic
// per (config, master_seed) regardless of thread count.
class Ensemble {
 public:
  // Members classify over the full class set (prior-knowledge cases 1 and
  // 2; case 1 is simply an empty clean part).
  static Ensemble train_case12(const Dataset& poisoned, const Dataset& clean,
                               const EnsembleConfig& config);

  // Two-phase members (case 3): first-phase classifiers see every clean
  // sample relabeled to one virtual class and decide among {virtual} union
  // poisoned classes; one shared second-phase classifier, trained on the
  // clean part only, resolves the virtual class into a clean class.
  static Ensemble train_case3(const Dataset& poisoned, const Dataset& clean,
                              const EnsembleConfig& config);

  long long trials() const { return static_cast<long long>(members_.size()); }
  int num_classes() const { return num_classes_; }
  bool two_phase() const { return phase2_.has_value(); }

  // Member prediction on a raw (unnormalized) feature row.
  int predict_member(long long member, std::span<const double> x) const;

  // First-phase output alone (case 3 only): a poisoned class or the virtual
  // clean class.
  int predict_phase1(long long member, std::span<const double> x) const;

  // Second-phase prediction alone (case 3 only).
  int predict_phase2(std::span<const double> x) const;

  // Id of the virtual class standing in for "some clean class" (case 3).
  int virtual_class() const { return virtual_class_; }

  // Majority votes for every test row; counts always sum to T.
  std::vector<VoteRecord> predict_votes(const Dataset& test) const;

 private:
  std::vector<BaseModel> members_;
  std::optional<BaseModel> phase2_;
  int virtual_class_ = -1;
  int num_classes_ = 0;
  int dim_ = 0;
  std::vector<double> feature_min_;
  std::vector<double> feature_scale_;

  std::vector<double> normalize_row(std::span<const double> x) const;
};

}  // namespace rscert
