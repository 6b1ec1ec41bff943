#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rscert/certify.hpp"
#include "rscert/schemes.hpp"

namespace rscert {

// Self-describing vote dump: certification is decoupled from training, and
// third-party ensembles can be certified by emitting this format.
struct VotesFile {
  long long trials = 0;           // T
  std::vector<int> classes;       // declared class set
  SelectionScheme scheme;         // selection used during training
  long long n = 0;                // size of the potentially poisoned part
  long long n_clean = 0;          // size of the clean part
  std::uint64_t master_seed = 0;
  std::string config_digest;
  std::vector<VoteRecord> records;
};

void save_votes(const VotesFile& votes, const std::string& path);
VotesFile load_votes(const std::string& path);

// Certificate table (CSV): example_id,label,radius,p1_lower,p2_upper,abstain.
// Abstaining rows carry the literal marker ABSTAIN in the label and radius
// columns.
std::string certificates_to_csv(const std::vector<std::pair<std::string, Certificate>>& rows);

// Curve table (CSV): rho,certified_accuracy.
std::string curve_to_csv(const std::vector<std::pair<long long, double>>& curve);

}  // namespace rscert
