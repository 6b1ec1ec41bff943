#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rscert {

// Base-classifier family for ensemble members. Both options are fast and
// fully deterministic given a seed, which is what desk-scale certification
// experiments need.
struct LearnerSpec {
  enum class Kind { nearest_centroid, logistic_sgd };
  Kind kind = Kind::logistic_sgd;
  int epochs = 5;
  double learning_rate = 0.2;
  double l2 = 1e-4;
};

LearnerSpec::Kind learner_kind_from_string(const std::string& name);
std::string learner_kind_to_string(LearnerSpec::Kind kind);
void validate_learner(const LearnerSpec& spec);

// Training input: rows index into a feature store; labels run parallel to
// rows (they may differ from the store's own labels, e.g. after relabeling
// to a virtual class).
struct TrainView {
  const double* store = nullptr;  // row-major features
  int dim = 0;
  std::span<const long long> rows;
  std::span<const int> labels;
  std::span<const int> class_ids;  // ascending output space of the model
};

// A trained base classifier. Prediction ties always resolve to the smallest
// class id.
class BaseModel {
 public:
  static BaseModel constant(int label);
  static BaseModel train(const LearnerSpec& spec, const TrainView& view, std::uint64_t seed);

  int predict(std::span<const double> x) const;

 private:
  enum class Type { constant, centroid, linear };
  Type type_ = Type::constant;
  int constant_label_ = 0;
  int dim_ = 0;
  std::vector<int> class_ids_;
  std::vector<double> weights_;  // centroid: k*dim means; linear: k*(dim+1) with bias last
};

}  // namespace rscert
