#include <cstdlib>
#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "rscert/commands.hpp"

namespace {

// Exit codes: 0 success, 1 validation error, 2 runtime failure.
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

void add_scheme_flags(CLI::App* cmd, std::string& scheme, long long& subset_size,
                      std::optional<double>& p) {
  cmd->add_option("--scheme", scheme, "Selection scheme: without | with | binomial")
      ->default_val("with");
  cmd->add_option("--subset-size", subset_size, "Selection size n_s");
  cmd->add_option("--p", p, "Binomial selection probability (default n_s / n)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "rscert: certified robustness of subsample-and-aggregate classifiers "
      "against data poisoning"};
  app.require_subcommand(1);

  // generate
  rscert::GenerateArgs gen;
  CLI::App* generate = app.add_subcommand("generate", "Write a synthetic Gaussian-blob CSV");
  generate->add_option("--classes", gen.spec.classes, "Number of classes")->default_val(2);
  generate->add_option("--n", gen.spec.n, "Number of samples")->default_val(1000);
  generate->add_option("--dim", gen.spec.dim, "Feature dimension")->default_val(2);
  generate->add_option("--separation", gen.spec.separation, "Center separation (sigma = 1)")
      ->default_val(8.0);
  generate->add_option("--seed", gen.spec.seed, "Generator seed")->default_val(1);
  generate->add_option("--out", gen.out_path, "Output CSV path")->required();

  // train
  rscert::RunConfig train_config;
  std::string config_path;
  std::vector<std::string> overrides;
  CLI::App* train = app.add_subcommand(
      "train", "Train a subsampled ensemble and write the votes file (config keys "
               "mirror the flags; RSCERT_CONFIG names a default config file)");
  train->add_option("--config", config_path, "key=value config file");
  train->add_option("--set", overrides, "Override a config key, e.g. --set trials=500");
  train->add_option("--train-csv", train_config.train_csv, "Training CSV");
  train->add_option("--test-csv", train_config.test_csv, "Test CSV");
  train->add_option("--train-images", train_config.train_images, "Training IDX images");
  train->add_option("--train-labels", train_config.train_labels, "Training IDX labels");
  train->add_option("--test-images", train_config.test_images, "Test IDX images");
  train->add_option("--test-labels", train_config.test_labels, "Test IDX labels");
  std::string train_scheme;
  long long train_subset_size = -1;
  std::optional<double> train_p;
  train->add_option("--scheme", train_scheme, "Selection scheme: without | with | binomial");
  train->add_option("--subset-size", train_subset_size, "Selection size n_s");
  train->add_option("--p", train_p, "Binomial selection probability");
  std::optional<long long> train_trials;
  std::optional<double> train_alpha;
  train->add_option("--trials", train_trials, "Number of base classifiers T");
  train->add_option("--alpha", train_alpha, "Confidence parameter alpha");
  std::string train_learner;
  train->add_option("--learner", train_learner, "Base learner: centroid | logistic");
  std::optional<int> train_epochs;
  train->add_option("--epochs", train_epochs, "SGD epochs");
  std::optional<double> train_lr, train_l2;
  train->add_option("--learning-rate", train_lr, "SGD learning rate");
  train->add_option("--l2", train_l2, "SGD l2 penalty");
  std::optional<long long> train_expand;
  train->add_option("--expand-target", train_expand, "Balanced expansion size");
  std::optional<std::uint64_t> train_seed;
  train->add_option("--master-seed", train_seed, "Master seed");
  std::optional<int> train_case;
  train->add_option("--prior-case", train_case, "Prior knowledge case: 1 | 2 | 3");
  std::optional<long long> train_n_clean;
  train->add_option("--n-clean", train_n_clean, "Case 2: first n_clean rows are clean");
  std::string train_clean_classes;
  train->add_option("--clean-classes", train_clean_classes, "Case 3: comma list of clean classes");
  std::string train_votes_out;
  train->add_option("--votes-out", train_votes_out, "Votes file path");

  // certify
  rscert::CertifyArgs cert;
  CLI::App* certify = app.add_subcommand("certify", "Certify a votes file into a CSV of certificates");
  certify->add_option("--votes", cert.votes_path, "Votes file")->required();
  certify->add_option("--out", cert.out_path, "Certificates CSV path")->required();
  certify->add_option("--model", cert.model, "Poisoning model P1..P6")->default_val("P6");
  certify->add_option("--alpha", cert.alpha, "Confidence parameter (default 0.001)");
  certify->add_option("--rho-cap", cert.rho_cap, "Radius search cap")->default_val(100000);

  // curve
  rscert::CurveArgs curve;
  CLI::App* curve_cmd = app.add_subcommand("curve", "Certified-accuracy curve over a rho grid");
  curve_cmd->add_option("--votes", curve.votes_path, "Votes file")->required();
  curve_cmd->add_option("--out", curve.out_path, "Curve CSV path")->required();
  curve_cmd->add_option("--model", curve.model, "Poisoning model P1..P6")->default_val("P6");
  curve_cmd->add_option("--alpha", curve.alpha, "Confidence parameter (default 0.001)");
  curve_cmd->add_option("--rho-grid", curve.rho_grid, "Grid: lo:hi[:step] or comma list")
      ->default_val("0:100:5");
  curve_cmd->add_option("--rho-cap", curve.rho_cap, "Radius search cap")->default_val(100000);

  // radius
  rscert::RadiusArgs radius;
  CLI::App* radius_cmd = app.add_subcommand("radius", "Certified radius for a vote margin");
  radius_cmd->add_option("--n", radius.n, "Size of the potentially poisoned part")->required();
  add_scheme_flags(radius_cmd, radius.scheme, radius.subset_size, radius.p);
  radius_cmd->add_option("--model", radius.model, "Poisoning model P1..P6")->default_val("P6");
  radius_cmd->add_option("--margin", radius.margin, "Lower-bounded vote margin p1 - p2")
      ->required();
  radius_cmd->add_option("--rho-cap", radius.rho_cap, "Radius search cap")->default_val(100000);

  // oracle-check
  rscert::OracleArgs oracle;
  CLI::App* oracle_cmd = app.add_subcommand(
      "oracle-check", "Verify the closed-form certification math against exact enumeration");
  oracle_cmd->add_option("--max-n", oracle.max_n, "Largest training-set size (<= 8)")
      ->default_val(7);
  oracle_cmd->add_option("--max-rho", oracle.max_rho, "Largest poisoning budget (<= 3)")
      ->default_val(2);
  oracle_cmd->add_flag("--verbose", oracle.verbose, "Print one line per instance");
  oracle_cmd->add_flag("--pi-perturb", oracle.pi_perturb,
                       "Debug: perturb pi by 1% and confirm the check rejects it");
  oracle_cmd->add_option("--json", oracle.json_out, "Write a machine-readable summary");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      rscert::cmd_generate(gen, std::cout);
    } else if (*train) {
      if (config_path.empty()) {
        if (const char* env = std::getenv("RSCERT_CONFIG"); env != nullptr && *env != '\0') {
          config_path = env;
        }
      }
      rscert::RunConfig config =
          config_path.empty() ? rscert::RunConfig{} : rscert::load_config_file(config_path);
      for (const std::string& kv : overrides) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos) {
          throw std::invalid_argument("--set expects key=value, got: " + kv);
        }
        rscert::apply_config_kv(config, kv.substr(0, eq), kv.substr(eq + 1));
      }
      // Explicit flags override the config file.
      if (!train_config.train_csv.empty()) config.train_csv = train_config.train_csv;
      if (!train_config.test_csv.empty()) config.test_csv = train_config.test_csv;
      if (!train_config.train_images.empty()) config.train_images = train_config.train_images;
      if (!train_config.train_labels.empty()) config.train_labels = train_config.train_labels;
      if (!train_config.test_images.empty()) config.test_images = train_config.test_images;
      if (!train_config.test_labels.empty()) config.test_labels = train_config.test_labels;
      if (!train_scheme.empty()) config.scheme = train_scheme;
      if (train_subset_size >= 0) config.subset_size = train_subset_size;
      if (train_p) config.p = train_p;
      if (train_trials) config.trials = *train_trials;
      if (train_alpha) config.alpha = *train_alpha;
      if (!train_learner.empty()) config.learner.kind = rscert::learner_kind_from_string(train_learner);
      if (train_epochs) config.learner.epochs = *train_epochs;
      if (train_lr) config.learner.learning_rate = *train_lr;
      if (train_l2) config.learner.l2 = *train_l2;
      if (train_expand) config.expand_target = *train_expand;
      if (train_seed) config.master_seed = *train_seed;
      if (train_case) config.prior_case = *train_case;
      if (train_n_clean) config.n_clean = *train_n_clean;
      if (!train_clean_classes.empty()) {
        rscert::apply_config_kv(config, "clean_classes", train_clean_classes);
      }
      if (!train_votes_out.empty()) config.votes_out = train_votes_out;
      rscert::cmd_train(config, std::cout);
    } else if (*certify) {
      rscert::cmd_certify(cert, std::cout);
    } else if (*curve_cmd) {
      rscert::cmd_curve(curve, std::cout);
    } else if (*radius_cmd) {
      rscert::cmd_radius(radius, std::cout);
    } else if (*oracle_cmd) {
      if (!rscert::cmd_oracle_check(oracle, std::cout)) return kExitValidation;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
