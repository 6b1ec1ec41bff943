#include "rscert/learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rscert/rng.hpp"

namespace rscert {

LearnerSpec::Kind learner_kind_from_string(const std::string& name) {
  if (name == "centroid" || name == "nearest_centroid") return LearnerSpec::Kind::nearest_centroid;
  if (name == "logistic" || name == "logistic_sgd") return LearnerSpec::Kind::logistic_sgd;
  throw std::invalid_argument("unknown learner: " + name);
}

std::string learner_kind_to_string(LearnerSpec::Kind kind) {
  return kind == LearnerSpec::Kind::nearest_centroid ? "centroid" : "logistic";
}

void validate_learner(const LearnerSpec& spec) {
  if (spec.epochs < 1) throw std::invalid_argument("learner: epochs must be >= 1");
  if (!(spec.learning_rate > 0.0)) throw std::invalid_argument("learner: learning rate must be > 0");
  if (spec.l2 < 0.0) throw std::invalid_argument("learner: l2 must be >= 0");
}

BaseModel BaseModel::constant(int label) {
  BaseModel m;
  m.type_ = Type::constant;
  m.constant_label_ = label;
  return m;
}

namespace {

void check_view(const TrainView& view) {
  if (view.store == nullptr || view.dim < 1) {
    throw std::invalid_argument("learner: empty feature store");
  }
  if (view.rows.empty()) throw std::invalid_argument("learner: no training rows");
  if (view.rows.size() != view.labels.size()) {
    throw std::invalid_argument("learner: rows/labels size mismatch");
  }
  if (view.class_ids.empty()) throw std::invalid_argument("learner: empty class space");
  if (!std::is_sorted(view.class_ids.begin(), view.class_ids.end())) {
    throw std::invalid_argument("learner: class ids must be ascending");
  }
}

int class_position(std::span<const int> class_ids, int label) {
  const auto it = std::lower_bound(class_ids.begin(), class_ids.end(), label);
  if (it == class_ids.end() || *it != label) {
    throw std::invalid_argument("learner: training label outside the class space");
  }
  return static_cast<int>(it - class_ids.begin());
}

}  // namespace

BaseModel BaseModel::train(const LearnerSpec& spec, const TrainView& view, std::uint64_t seed) {
  validate_learner(spec);
  check_view(view);
  const int k = static_cast<int>(view.class_ids.size());
  const int dim = view.dim;

  BaseModel model;
  model.dim_ = dim;
  model.class_ids_.assign(view.class_ids.begin(), view.class_ids.end());

  if (spec.kind == LearnerSpec::Kind::nearest_centroid) {
    model.type_ = Type::centroid;
    model.weights_.assign(static_cast<std::size_t>(k) * dim, 0.0);
    std::vector<long long> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < view.rows.size(); ++i) {
      const int c = class_position(view.class_ids, view.labels[i]);
      const double* x = view.store + view.rows[i] * dim;
      double* mean = model.weights_.data() + static_cast<std::size_t>(c) * dim;
      for (int j = 0; j < dim; ++j) mean[j] += x[j];
      ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < k; ++c) {
      double* mean = model.weights_.data() + static_cast<std::size_t>(c) * dim;
      if (counts[static_cast<std::size_t>(c)] > 0) {
        for (int j = 0; j < dim; ++j) mean[j] /= static_cast<double>(counts[c]);
      } else {
        // Unseen class: park its centroid far away so it is never chosen.
        for (int j = 0; j < dim; ++j) mean[j] = 1e30;
      }
    }
    return model;
  }

  // Multinomial logistic regression by plain SGD with per-epoch shuffling.
  model.type_ = Type::linear;
  model.weights_.assign(static_cast<std::size_t>(k) * (dim + 1), 0.0);
  std::vector<std::size_t> order(view.rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> logits(static_cast<std::size_t>(k));

  for (int epoch = 0; epoch < spec.epochs; ++epoch) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.next_below(i)]);
    }
    for (const std::size_t pos : order) {
      const double* x = view.store + view.rows[pos] * dim;
      const int y = class_position(view.class_ids, view.labels[pos]);
      for (int c = 0; c < k; ++c) {
        const double* w = model.weights_.data() + static_cast<std::size_t>(c) * (dim + 1);
        double z = w[dim];
        for (int j = 0; j < dim; ++j) z += w[j] * x[j];
        logits[static_cast<std::size_t>(c)] = z;
      }
      const double zmax = *std::max_element(logits.begin(), logits.end());
      double norm = 0.0;
      for (double& z : logits) {
        z = std::exp(z - zmax);
        norm += z;
      }
      for (int c = 0; c < k; ++c) {
        const double prob = logits[static_cast<std::size_t>(c)] / norm;
        const double g = prob - (c == y ? 1.0 : 0.0);
        double* w = model.weights_.data() + static_cast<std::size_t>(c) * (dim + 1);
        for (int j = 0; j < dim; ++j) {
          w[j] -= spec.learning_rate * (g * x[j] + spec.l2 * w[j]);
        }
        w[dim] -= spec.learning_rate * g;
      }
    }
  }
  return model;
}

int BaseModel::predict(std::span<const double> x) const {
  if (type_ == Type::constant) return constant_label_;
  if (static_cast<int>(x.size()) != dim_) {
    throw std::invalid_argument("predict: feature dimension mismatch");
  }
  const int k = static_cast<int>(class_ids_.size());
  int best = 0;
  if (type_ == Type::centroid) {
    double best_dist = 0.0;
    for (int c = 0; c < k; ++c) {
      const double* mean = weights_.data() + static_cast<std::size_t>(c) * dim_;
      double dist = 0.0;
      for (int j = 0; j < dim_; ++j) {
        const double d = x[static_cast<std::size_t>(j)] - mean[j];
        dist += d * d;
      }
      if (c == 0 || dist < best_dist) {
        best_dist = dist;
        best = c;
      }
    }
  } else {
    double best_score = 0.0;
    for (int c = 0; c < k; ++c) {
      const double* w = weights_.data() + static_cast<std::size_t>(c) * (dim_ + 1);
      double z = w[dim_];
      for (int j = 0; j < dim_; ++j) z += w[j] * x[static_cast<std::size_t>(j)];
      if (c == 0 || z > best_score) {
        best_score = z;
        best = c;
      }
    }
  }
  return class_ids_[static_cast<std::size_t>(best)];
}

}  // namespace rscert
