#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "rscert/config.hpp"
#include "rscert/dataset.hpp"

namespace rscert {

// Command implementations behind the CLI. They validate their inputs fully
// before writing anything; all file writes are atomic. Validation problems
// surface as std::invalid_argument (exit 1), everything else as
// std::runtime_error (exit 2).

struct GenerateArgs {
  BlobSpec spec;
  std::string out_path;
};
void cmd_generate(const GenerateArgs& args, std::ostream& log);

void cmd_train(const RunConfig& config, std::ostream& log);

struct CertifyArgs {
  std::string votes_path;
  std::string out_path;
  std::string model = "P6";
  std::optional<double> alpha;  // default: 0.001
  long long rho_cap = 100000;
};
void cmd_certify(const CertifyArgs& args, std::ostream& log);

struct CurveArgs {
  std::string votes_path;
  std::string out_path;
  std::string model = "P6";
  std::optional<double> alpha;
  std::string rho_grid = "0:100:5";
  long long rho_cap = 100000;
};
void cmd_curve(const CurveArgs& args, std::ostream& log);

struct RadiusArgs {
  long long n = 0;
  std::string scheme = "with";
  long long subset_size = 0;
  std::optional<double> p;
  std::string model = "P6";
  double margin = 0.0;
  long long rho_cap = 100000;
};
void cmd_radius(const RadiusArgs& args, std::ostream& log);

struct OracleArgs {
  long long max_n = 7;
  long long max_rho = 2;
  bool verbose = false;
  bool pi_perturb = false;  // deliberately scale pi to demonstrate detection
  std::string json_out;
};
// Returns true when every check passed (with pi_perturb, "passed" means the
// perturbation was detected on every instance it touches).
bool cmd_oracle_check(const OracleArgs& args, std::ostream& log);

}  // namespace rscert
