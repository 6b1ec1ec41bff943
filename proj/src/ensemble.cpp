#include "rscert/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>

#include "rscert/rng.hpp"

namespace rscert {

std::vector<long long> weighted_balance_expand(std::span<const int> labels, long long target,
                                               std::uint64_t seed) {
  if (labels.empty()) throw std::invalid_argument("weighted_balance_expand: empty subset");
  if (target < 1) throw std::invalid_argument("weighted_balance_expand: target must be >= 1");

  // Group positions by class; per draw, pick a class uniformly and then a
  // member of that class uniformly. That realizes weight 1/class_count per
  // entry.
  std::map<int, std::vector<long long>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[labels[i]].push_back(static_cast<long long>(i));
  }
  std::vector<const std::vector<long long>*> classes;
  classes.reserve(by_class.size());
  for (const auto& [cls, positions] : by_class) classes.push_back(&positions);

  Rng rng(seed);
  std::vector<long long> out;
  out.reserve(static_cast<std::size_t>(target));
  for (long long i = 0; i < target; ++i) {
    const auto& bucket = *classes[rng.next_below(classes.size())];
    out.push_back(bucket[rng.next_below(bucket.size())]);
  }
  return out;
}

namespace {

// Seed streams per member, disjoint by construction.
constexpr std::uint64_t kSampleStream = 1;
constexpr std::uint64_t kExpandStream = 2;
constexpr std::uint64_t kTrainStream = 3;
constexpr std::uint64_t kPhase2Stream = 0x5eed2;

struct Normalization {
  std::vector<double> min;
  std::vector<double> scale;
};

Normalization fit_normalization(const Dataset& poisoned, const Dataset& clean) {
  const int dim = poisoned.n > 0 ? poisoned.dim : clean.dim;
  Normalization norm;
  norm.min.assign(static_cast<std::size_t>(dim), std::numeric_limits<double>::infinity());
  std::vector<double> maxv(static_cast<std::size_t>(dim),
                           -std::numeric_limits<double>::infinity());
  const auto scan = [&](const Dataset& d) {
    for (long long i = 0; i < d.n; ++i) {
      const auto row = d.row(i);
      for (int j = 0; j < dim; ++j) {
        norm.min[static_cast<std::size_t>(j)] =
            std::min(norm.min[static_cast<std::size_t>(j)], row[static_cast<std::size_t>(j)]);
        maxv[static_cast<std::size_t>(j)] =
            std::max(maxv[static_cast<std::size_t>(j)], row[static_cast<std::size_t>(j)]);
      }
    }
  };
  scan(poisoned);
  scan(clean);
  norm.scale.resize(static_cast<std::size_t>(dim));
  for (int j = 0; j < dim; ++j) {
    const double range = maxv[static_cast<std::size_t>(j)] - norm.min[static_cast<std::size_t>(j)];
    norm.scale[static_cast<std::size_t>(j)] = range > 0.0 ? 1.0 / range : 0.0;
  }
  return norm;
}

// Run fn(i) for i in [0, count) across a few worker threads. Each index is
// independent; results land in pre-sized slots, so order does not matter
// and the outcome is identical for any worker count. RSCERT_THREADS
// overrides the pool size (useful when pinning down reproducibility).
template <class Fn>
void parallel_for(long long count, Fn&& fn) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("RSCERT_THREADS"); env != nullptr && *env != '\0') {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed >= 1 && parsed <= 256) hw = static_cast<unsigned>(parsed);
  }
  const unsigned workers = static_cast<unsigned>(
      std::min<long long>(count, static_cast<long long>(std::min(hw, 8u))));
  if (workers <= 1) {
    for (long long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (long long i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void check_compatible(const Dataset& poisoned, const Dataset& clean) {
  if (poisoned.n < 1) {
    throw std::invalid_argument("ensemble: the potentially poisoned part is empty");
  }
  poisoned.validate();
  if (clean.n > 0) {
    clean.validate();
    if (clean.dim != poisoned.dim) {
      throw std::invalid_argument("ensemble: clean/poisoned feature dimensions differ");
    }
  }
}

std::vector<int> distinct_labels(const Dataset& d) {
  std::set<int> s(d.labels.begin(), d.labels.end());
  return {s.begin(), s.end()};
}

}  // namespace

std::vector<double> Ensemble::normalize_row(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) {
    throw std::invalid_argument("ensemble: feature dimension mismatch");
  }
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    out[j] = (x[j] - feature_min_[j]) * feature_scale_[j];
  }
  return out;
}

Ensemble Ensemble::train_case12(const Dataset& poisoned, const Dataset& clean,
                                const EnsembleConfig& config) {
  check_compatible(poisoned, clean);
  validate_scheme(config.scheme, poisoned.n);
  validate_learner(config.learner);
  if (config.trials < 1) throw std::invalid_argument("ensemble: T must be >= 1");
  if (config.expand_target < 1) throw std::invalid_argument("ensemble: expand target must be >= 1");

  Ensemble ens;
  ens.dim_ = poisoned.dim;
  ens.num_classes_ = std::max(poisoned.num_classes, clean.n > 0 ? clean.num_classes : 0);

  const Normalization norm = fit_normalization(poisoned, clean);
  ens.feature_min_ = norm.min;
  ens.feature_scale_ = norm.scale;

  // One normalized feature store: poisoned rows first, then clean rows.
  const long long total_rows = poisoned.n + clean.n;
  std::vector<double> store(static_cast<std::size_t>(total_rows) * ens.dim_);
  std::vector<int> store_labels(static_cast<std::size_t>(total_rows));
  for (long long i = 0; i < poisoned.n; ++i) {
    const auto row = ens.normalize_row(poisoned.row(i));
    std::copy(row.begin(), row.end(), store.begin() + i * ens.dim_);
    store_labels[static_cast<std::size_t>(i)] = poisoned.labels[static_cast<std::size_t>(i)];
  }
  for (long long i = 0; i < clean.n; ++i) {
    const auto row = ens.normalize_row(clean.row(i));
    std::copy(row.begin(), row.end(), store.begin() + (poisoned.n + i) * ens.dim_);
    store_labels[static_cast<std::size_t>(poisoned.n + i)] =
        clean.labels[static_cast<std::size_t>(i)];
  }

  std::vector<int> all_classes(static_cast<std::size_t>(ens.num_classes_));
  for (int c = 0; c < ens.num_classes_; ++c) all_classes[static_cast<std::size_t>(c)] = c;

  int fallback = 0;  // most frequent clean class, for empty member pools
  if (clean.n > 0) {
    std::map<int, long long> freq;
    for (int label : clean.labels) ++freq[label];
    long long best = -1;
    for (const auto& [cls, count] : freq) {
      if (count > best) {
        best = count;
        fallback = cls;
      }
    }
  }

  ens.members_.resize(static_cast<std::size_t>(config.trials), BaseModel::constant(0));
  parallel_for(config.trials, [&](long long i) {
    const std::uint64_t member_seed = mix_seed(config.master_seed, static_cast<std::uint64_t>(i));
    const std::vector<long long> subset =
        sample_indices(config.scheme, poisoned.n, mix_seed(member_seed, kSampleStream));

    std::vector<long long> pool_rows(subset.begin(), subset.end());
    for (long long c = 0; c < clean.n; ++c) pool_rows.push_back(poisoned.n + c);
    if (pool_rows.empty()) {
      // Binomial selection can return the empty sub-dataset.
      ens.members_[static_cast<std::size_t>(i)] = BaseModel::constant(clean.n > 0 ? fallback : 0);
      return;
    }
    std::vector<int> pool_labels;
    pool_labels.reserve(pool_rows.size());
    for (long long r : pool_rows) pool_labels.push_back(store_labels[static_cast<std::size_t>(r)]);

    const std::vector<long long> expanded = weighted_balance_expand(
        pool_labels, config.expand_target, mix_seed(member_seed, kExpandStream));
    std::vector<long long> train_rows;
    std::vector<int> train_labels;
    train_rows.reserve(expanded.size());
    train_labels.reserve(expanded.size());
    for (long long pos : expanded) {
      train_rows.push_back(pool_rows[static_cast<std::size_t>(pos)]);
      train_labels.push_back(pool_labels[static_cast<std::size_t>(pos)]);
    }

    TrainView view{store.data(), ens.dim_, train_rows, train_labels, all_classes};
    ens.members_[static_cast<std::size_t>(i)] =
        BaseModel::train(config.learner, view, mix_seed(member_seed, kTrainStream));
  });
  return ens;
}

Ensemble Ensemble::train_case3(const Dataset& poisoned, const Dataset& clean,
                               const EnsembleConfig& config) {
  check_compatible(poisoned, clean);
  if (clean.n < 1) throw std::invalid_argument("case 3: the clean part must be nonempty");
  validate_scheme(config.scheme, poisoned.n);
  validate_learner(config.learner);
  if (config.trials < 1) throw std::invalid_argument("ensemble: T must be >= 1");
  if (config.expand_target < 1) throw std::invalid_argument("ensemble: expand target must be >= 1");

  const std::vector<int> clean_classes = distinct_labels(clean);
  const std::vector<int> poisoned_classes = distinct_labels(poisoned);
  for (int c : poisoned_classes) {
    if (std::binary_search(clean_classes.begin(), clean_classes.end(), c)) {
      throw std::invalid_argument("case 3: clean and poisoned class sets overlap");
    }
  }

  Ensemble ens;
  ens.dim_ = poisoned.dim;
  ens.num_classes_ = std::max(poisoned.num_classes, clean.num_classes);
  ens.virtual_class_ = ens.num_classes_;  // fresh id for the merged clean class

  const Normalization norm = fit_normalization(poisoned, clean);
  ens.feature_min_ = norm.min;
  ens.feature_scale_ = norm.scale;

  const long long total_rows = poisoned.n + clean.n;
  std::vector<double> store(static_cast<std::size_t>(total_rows) * ens.dim_);
  std::vector<int> phase1_labels(static_cast<std::size_t>(total_rows));
  for (long long i = 0; i < poisoned.n; ++i) {
    const auto row = ens.normalize_row(poisoned.row(i));
    std::copy(row.begin(), row.end(), store.begin() + i * ens.dim_);
    phase1_labels[static_cast<std::size_t>(i)] = poisoned.labels[static_cast<std::size_t>(i)];
  }
  for (long long i = 0; i < clean.n; ++i) {
    const auto row = ens.normalize_row(clean.row(i));
    std::copy(row.begin(), row.end(), store.begin() + (poisoned.n + i) * ens.dim_);
    phase1_labels[static_cast<std::size_t>(poisoned.n + i)] = ens.virtual_class_;
  }

  // First-phase output space: the virtual clean class plus poisoned classes.
  std::vector<int> phase1_classes = poisoned_classes;
  phase1_classes.push_back(ens.virtual_class_);
  std::sort(phase1_classes.begin(), phase1_classes.end());

  ens.members_.resize(static_cast<std::size_t>(config.trials), BaseModel::constant(0));
  parallel_for(config.trials, [&](long long i) {
    const std::uint64_t member_seed = mix_seed(config.master_seed, static_cast<std::uint64_t>(i));
    const std::vector<long long> subset =
        sample_indices(config.scheme, poisoned.n, mix_seed(member_seed, kSampleStream));

    std::vector<long long> pool_rows(subset.begin(), subset.end());
    for (long long c = 0; c < clean.n; ++c) pool_rows.push_back(poisoned.n + c);
    std::vector<int> pool_labels;
    pool_labels.reserve(pool_rows.size());
    for (long long r : pool_rows) pool_labels.push_back(phase1_labels[static_cast<std::size_t>(r)]);

    const std::vector<long long> expanded = weighted_balance_expand(
        pool_labels, config.expand_target, mix_seed(member_seed, kExpandStream));
    std::vector<long long> train_rows;
    std::vector<int> train_labels;
    train_rows.reserve(expanded.size());
    train_labels.reserve(expanded.size());
    for (long long pos : expanded) {
      train_rows.push_back(pool_rows[static_cast<std::size_t>(pos)]);
      train_labels.push_back(pool_labels[static_cast<std::size_t>(pos)]);
    }

    TrainView view{store.data(), ens.dim_, train_rows, train_labels, phase1_classes};
    ens.members_[static_cast<std::size_t>(i)] =
        BaseModel::train(config.learner, view, mix_seed(member_seed, kTrainStream));
  });

  // One shared second-phase classifier on the clean part only.
  std::vector<long long> clean_rows;
  std::vector<int> clean_labels;
  clean_rows.reserve(static_cast<std::size_t>(clean.n));
  for (long long i = 0; i < clean.n; ++i) {
    clean_rows.push_back(poisoned.n + i);
    clean_labels.push_back(clean.labels[static_cast<std::size_t>(i)]);
  }
  TrainView phase2_view{store.data(), ens.dim_, clean_rows, clean_labels, clean_classes};
  ens.phase2_ = BaseModel::train(config.learner, phase2_view,
                                 mix_seed(config.master_seed, kPhase2Stream));
  return ens;
}

int Ensemble::predict_member(long long member, std::span<const double> x) const {
  if (member < 0 || member >= trials()) {
    throw std::invalid_argument("ensemble: member index out of range");
  }
  const std::vector<double> z = normalize_row(x);
  const int first = members_[static_cast<std::size_t>(member)].predict(z);
  if (phase2_ && first == virtual_class_) return phase2_->predict(z);
  return first;
}

int Ensemble::predict_phase1(long long member, std::span<const double> x) const {
  if (!phase2_) throw std::logic_error("ensemble: no first phase (not a case-3 ensemble)");
  if (member < 0 || member >= trials()) {
    throw std::invalid_argument("ensemble: member index out of range");
  }
  return members_[static_cast<std::size_t>(member)].predict(normalize_row(x));
}

int Ensemble::predict_phase2(std::span<const double> x) const {
  if (!phase2_) throw std::logic_error("ensemble: no second phase (not a case-3 ensemble)");
  return phase2_->predict(normalize_row(x));
}

std::vector<VoteRecord> Ensemble::predict_votes(const Dataset& test) const {
  test.validate();
  if (test.dim != dim_) throw std::invalid_argument("ensemble: test feature dimension mismatch");

  // Predict per member in parallel; reduce to counts afterwards so the
  // result does not depend on thread interleaving.
  const long long T = trials();
  std::vector<int> predictions(static_cast<std::size_t>(T) * static_cast<std::size_t>(test.n));
  parallel_for(T, [&](long long member) {
    for (long long i = 0; i < test.n; ++i) {
      predictions[static_cast<std::size_t>(member) * test.n + i] =
          predict_member(member, test.row(i));
    }
  });

  std::vector<VoteRecord> votes;
  votes.reserve(static_cast<std::size_t>(test.n));
  for (long long i = 0; i < test.n; ++i) {
    VoteRecord vote;
    vote.example_id = test.ids[static_cast<std::size_t>(i)];
    vote.trials = T;
    vote.true_label = test.labels[static_cast<std::size_t>(i)];
    for (long long member = 0; member < T; ++member) {
      ++vote.counts[predictions[static_cast<std::size_t>(member) * test.n + i]];
    }
    votes.push_back(std::move(vote));
  }
  return votes;
}

}  // namespace rscert
