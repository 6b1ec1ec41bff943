#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rscert/learner.hpp"
#include "rscert/schemes.hpp"

namespace rscert {

// Training-run configuration. Parses from a plain-text key=value file
// (# starts a comment); CLI flags mirror the keys and override the file.
struct RunConfig {
  // data
  std::string train_csv;
  std::string test_csv;
  std::string train_images, train_labels;  // IDX alternative to train_csv
  std::string test_images, test_labels;

  // selection scheme
  std::string scheme = "with";  // without | with | binomial
  long long subset_size = 0;    // n_s; for binomial, p defaults to n_s / |poisoned part|
  std::optional<double> p;      // explicit binomial probability

  // ensemble
  long long trials = 1000;
  double alpha = 0.001;
  LearnerSpec learner;
  long long expand_target = 2048;
  std::uint64_t master_seed = 1;

  // prior knowledge
  int prior_case = 1;
  long long n_clean = 0;               // case 2: first n_clean rows are clean
  std::vector<int> clean_classes;      // case 3

  // outputs
  std::string votes_out = "votes.json";
};

RunConfig load_config_file(const std::string& path);
void apply_config_kv(RunConfig& config, const std::string& key, const std::string& value);

// Structural validation that does not need the datasets yet.
void validate_config(const RunConfig& config);

// Resolve the scheme against the size of the potentially poisoned part.
SelectionScheme resolve_scheme(const RunConfig& config, long long poisoned_n);

// Canonical one-line rendering, used for the config digest.
std::string canonical_config(const RunConfig& config);

// "a,b,c" or "lo:hi[:step]" into an explicit grid.
std::vector<long long> parse_rho_grid(const std::string& text);

}  // namespace rscert
