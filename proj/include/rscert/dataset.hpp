#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rscert {

// Dense labeled dataset; features are row-major n x dim.
struct Dataset {
  long long n = 0;
  int dim = 0;
  int num_classes = 0;
  std::vector<double> features;
  std::vector<int> labels;
  std::vector<std::string> ids;

  std::span<const double> row(long long i) const {
    return {features.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }
  void validate() const;
};

// CSV with a header row; the `label` column holds the class id and every
// other column is a numeric feature.
Dataset load_csv(const std::string& path);
void save_csv(const Dataset& data, const std::string& path);

// Raw big-endian IDX image/label pair (magic numbers 0x803 / 0x801); pixel
// values become features in [0, 255].
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// Synthetic Gaussian blobs: class c is centered on axis c (mod dim) at the
// given separation, unit variance, balanced labels. Deterministic per seed.
struct BlobSpec {
  int classes = 2;
  long long n = 1000;
  int dim = 2;
  double separation = 8.0;
  std::uint64_t seed = 1;
};
Dataset make_blobs(const BlobSpec& spec);

// Row subsets / splits used when carving the clean part out of a training
// file. Keeps ids and relabels nothing.
Dataset take_rows(const Dataset& data, std::span<const long long> rows);

}  // namespace rscert
