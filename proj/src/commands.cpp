#include "rscert/commands.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rscert/certify.hpp"
#include "rscert/ensemble.hpp"
#include "rscert/io_util.hpp"
#include "rscert/oracle.hpp"
#include "rscert/votes_io.hpp"

namespace rscert {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Dataset load_train(const RunConfig& config) {
  if (!config.train_csv.empty()) return load_csv(config.train_csv);
  return load_idx(config.train_images, config.train_labels);
}

Dataset load_test(const RunConfig& config) {
  if (!config.test_csv.empty()) return load_csv(config.test_csv);
  return load_idx(config.test_images, config.test_labels);
}

}  // namespace

void cmd_generate(const GenerateArgs& args, std::ostream& log) {
  if (args.out_path.empty()) throw std::invalid_argument("generate: output path must be set");
  const Dataset data = make_blobs(args.spec);
  save_csv(data, args.out_path);
  log << "wrote " << data.n << " samples (" << data.num_classes << " classes, dim " << data.dim
      << ") to " << args.out_path << "\n";
}

void cmd_train(const RunConfig& config, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  validate_config(config);

  Dataset train = load_train(config);
  Dataset test = load_test(config);
  if (train.dim != test.dim) {
    throw std::invalid_argument("train: train/test feature dimensions differ");
  }
  const int num_classes = std::max(train.num_classes, test.num_classes);
  train.num_classes = num_classes;
  test.num_classes = num_classes;

  // Carve the clean part out of the training set.
  std::vector<long long> clean_rows, poisoned_rows;
  if (config.prior_case == 1) {
    for (long long i = 0; i < train.n; ++i) poisoned_rows.push_back(i);
  } else if (config.prior_case == 2) {
    if (config.n_clean >= train.n) {
      throw std::invalid_argument("train: n_clean must leave a nonempty poisoned part");
    }
    for (long long i = 0; i < config.n_clean; ++i) clean_rows.push_back(i);
    for (long long i = config.n_clean; i < train.n; ++i) poisoned_rows.push_back(i);
  } else {
    std::vector<bool> is_clean_class(static_cast<std::size_t>(num_classes), false);
    for (int c : config.clean_classes) {
      if (c < 0 || c >= num_classes) {
        throw std::invalid_argument("train: clean class outside the label range");
      }
      is_clean_class[static_cast<std::size_t>(c)] = true;
    }
    for (long long i = 0; i < train.n; ++i) {
      (is_clean_class[static_cast<std::size_t>(train.labels[static_cast<std::size_t>(i)])]
           ? clean_rows
           : poisoned_rows)
          .push_back(i);
    }
    if (clean_rows.empty()) {
      throw std::invalid_argument("train: no training samples belong to the clean classes");
    }
    if (poisoned_rows.empty()) {
      throw std::invalid_argument(
          "train: clean classes must be a strict subset of the observed classes");
    }
  }

  Dataset poisoned = take_rows(train, poisoned_rows);
  Dataset clean;
  clean.dim = train.dim;
  clean.num_classes = num_classes;
  if (!clean_rows.empty()) clean = take_rows(train, clean_rows);
  poisoned.num_classes = num_classes;
  clean.num_classes = num_classes;

  EnsembleConfig ens_config;
  ens_config.scheme = resolve_scheme(config, poisoned.n);
  ens_config.trials = config.trials;
  ens_config.learner = config.learner;
  ens_config.master_seed = config.master_seed;
  ens_config.expand_target = config.expand_target;
  validate_scheme(ens_config.scheme, poisoned.n);

  const Ensemble ensemble = config.prior_case == 3
                                ? Ensemble::train_case3(poisoned, clean, ens_config)
                                : Ensemble::train_case12(poisoned, clean, ens_config);
  log << "trained " << ensemble.trials() << " members in " << seconds_since(start) << " s\n";

  VotesFile votes;
  votes.trials = config.trials;
  for (int c = 0; c < num_classes; ++c) votes.classes.push_back(c);
  votes.scheme = ens_config.scheme;
  votes.n = poisoned.n;
  votes.n_clean = clean.n;
  votes.master_seed = config.master_seed;
  votes.config_digest = fnv1a_hex(canonical_config(config));
  votes.records = ensemble.predict_votes(test);
  save_votes(votes, config.votes_out);

  long long correct = 0;
  for (const VoteRecord& vote : votes.records) {
    if (top_two(vote).first.first == *vote.true_label) ++correct;
  }
  log << "majority-vote accuracy on " << test.n
      << " test samples: " << static_cast<double>(correct) / static_cast<double>(test.n) << "\n";
  log << "wrote votes to " << config.votes_out << " (" << seconds_since(start) << " s total)\n";
}

void cmd_certify(const CertifyArgs& args, std::ostream& log) {
  if (args.out_path.empty()) throw std::invalid_argument("certify: output path must be set");
  if (args.rho_cap < 0) throw std::invalid_argument("certify: rho cap must be >= 0");
  const double alpha = args.alpha.value_or(0.001);
  const PoisonKind kind = poison_kind_from_string(args.model);
  const VotesFile votes = load_votes(args.votes_path);

  std::vector<std::pair<std::string, Certificate>> rows;
  rows.reserve(votes.records.size());
  long long abstentions = 0;
  for (const VoteRecord& record : votes.records) {
    Certificate cert =
        certify_prediction(record, alpha, votes.scheme, kind, votes.n, args.rho_cap);
    if (cert.abstain) ++abstentions;
    rows.emplace_back(record.example_id, cert);
  }
  atomic_write_text(args.out_path, certificates_to_csv(rows));
  log << "certified " << rows.size() << " examples under " << poison_kind_to_string(kind)
      << " (alpha=" << alpha << "): " << abstentions << " abstentions\n";
  log << "wrote certificates to " << args.out_path << "\n";
}

void cmd_curve(const CurveArgs& args, std::ostream& log) {
  if (args.out_path.empty()) throw std::invalid_argument("curve: output path must be set");
  if (args.rho_cap < 0) throw std::invalid_argument("curve: rho cap must be >= 0");
  const double alpha = args.alpha.value_or(0.001);
  const PoisonKind kind = poison_kind_from_string(args.model);
  const std::vector<long long> grid = parse_rho_grid(args.rho_grid);
  const VotesFile votes = load_votes(args.votes_path);

  const auto curve =
      accuracy_curve(votes.records, grid, alpha, votes.scheme, kind, votes.n, args.rho_cap);
  atomic_write_text(args.out_path, curve_to_csv(curve));
  log << "wrote " << curve.size() << " curve points to " << args.out_path << "\n";
}

void cmd_radius(const RadiusArgs& args, std::ostream& log) {
  if (args.n < 1) throw std::invalid_argument("radius: n must be >= 1");
  RunConfig scheme_config;
  scheme_config.scheme = args.scheme;
  scheme_config.subset_size = args.subset_size;
  scheme_config.p = args.p;
  const SelectionScheme scheme = resolve_scheme(scheme_config, args.n);
  validate_scheme(scheme, args.n);
  const PoisonKind kind = poison_kind_from_string(args.model);

  const auto radius = certified_radius(scheme, kind, args.n, args.margin, args.rho_cap);
  if (radius) {
    log << *radius << "\n";
  } else {
    log << "ABSTAIN\n";
  }
}

bool cmd_oracle_check(const OracleArgs& args, std::ostream& log) {
  if (args.max_n > oracle::kMaxN || args.max_rho > oracle::kMaxRho) {
    throw std::invalid_argument("oracle-check: caps exceed the enumeration domain (n <= 8, rho <= 3)");
  }
  if (args.max_n < 3 || args.max_rho < 0) {
    throw std::invalid_argument("oracle-check: caps too small for the grid");
  }
  const auto start = std::chrono::steady_clock::now();
  const std::vector<oracle::TinyInstance> grid = oracle::standard_grid(args.max_n, args.max_rho);
  const Rational perturbation = Rational::of(101, 100);

  long long delta_checks = 0, pi_checks = 0, tightness_checks = 0;
  long long failures = 0;
  double max_abs_diff = 0.0;
  std::vector<std::string> failure_notes;

  const auto record_failure = [&](const std::string& note) {
    ++failures;
    if (failure_notes.size() < 20) failure_notes.push_back(note);
    log << "FAIL " << note << "\n";
  };

  for (const oracle::TinyInstance& instance : grid) {
    std::ostringstream label;
    label << scheme_name(instance.scheme) << " " << poison_kind_to_string(instance.kind)
          << " n=" << instance.n << " rho=" << instance.rho;

    const Rational exact = oracle::enumerate_delta_exact(instance);
    const double closed = delta(instance.scheme, instance.kind, instance.n, instance.rho);
    const double diff = std::fabs(closed - exact.to_double());
    max_abs_diff = std::max(max_abs_diff, diff);
    ++delta_checks;
    if (diff > 1e-9) {
      record_failure(label.str() + ": closed-form delta " + std::to_string(closed) +
                     " != exact " + exact.to_string());
    }

    if (args.pi_perturb) {
      const oracle::PiCheck check = oracle::verify_pi_bounds(instance, perturbation);
      ++pi_checks;
      // The perturbed constant must be rejected wherever anything is checkable.
      if (check.ok && !check.vacuous) {
        record_failure(label.str() + ": perturbed pi escaped detection");
      } else if (args.verbose) {
        log << "rejected perturbed pi on " << label.str() << ": " << check.detail << "\n";
      }
    } else {
      const oracle::PiCheck check = oracle::verify_pi_bounds(instance);
      ++pi_checks;
      if (!check.ok) record_failure(label.str() + ": " + check.detail);

      // Boundary behavior: certified at delta exactly, attackable below.
      const Rational margin_step = Rational::of(1, 1000);
      if (oracle::tightness_witness(instance, exact)) {
        record_failure(label.str() + ": witness found at margin = delta");
      }
      if (!oracle::tightness_witness(instance, exact - margin_step)) {
        record_failure(label.str() + ": no witness strictly below delta");
      }
      tightness_checks += 2;
      if (args.verbose) {
        log << "ok " << label.str() << ": delta = " << exact.to_string() << "\n";
      }
    }
  }

  const double elapsed = seconds_since(start);
  const bool ok = failures == 0;
  log << (ok ? "PASS" : "FAIL") << ": " << grid.size() << " instances, " << delta_checks
      << " delta checks (max |closed - exact| = " << max_abs_diff << "), " << pi_checks
      << (args.pi_perturb ? " perturbed-pi rejection checks, " : " pi checks, ")
      << tightness_checks << " tightness checks, " << failures << " failures in " << elapsed
      << " s\n";

  if (!args.json_out.empty()) {
    nlohmann::ordered_json j;
    j["instances"] = grid.size();
    j["delta_checks"] = delta_checks;
    j["max_abs_diff"] = max_abs_diff;
    j["pi_checks"] = pi_checks;
    j["tightness_checks"] = tightness_checks;
    j["pi_perturb"] = args.pi_perturb;
    j["failures"] = failures;
    j["failure_notes"] = failure_notes;
    j["elapsed_seconds"] = elapsed;
    j["ok"] = ok;
    atomic_write_text(args.json_out, j.dump(2) + "\n");
    log << "wrote summary to " << args.json_out << "\n";
  }
  return ok;
}

}  // namespace rscert
