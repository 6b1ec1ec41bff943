#include "rscert/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rscert {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

long long parse_ll(const std::string& value, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer for " + key + ": " + value);
  }
}

double parse_d(const std::string& value, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for " + key + ": " + value);
  }
}

std::vector<int> parse_int_list(const std::string& value, const std::string& key) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(static_cast<int>(parse_ll(item, key)));
  }
  return out;
}

}  // namespace

void apply_config_kv(RunConfig& config, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "train_csv") config.train_csv = value;
  else if (key == "test_csv") config.test_csv = value;
  else if (key == "train_images") config.train_images = value;
  else if (key == "train_labels") config.train_labels = value;
  else if (key == "test_images") config.test_images = value;
  else if (key == "test_labels") config.test_labels = value;
  else if (key == "scheme") config.scheme = value;
  else if (key == "subset_size") config.subset_size = parse_ll(value, key);
  else if (key == "p") config.p = parse_d(value, key);
  else if (key == "trials") config.trials = parse_ll(value, key);
  else if (key == "alpha") config.alpha = parse_d(value, key);
  else if (key == "learner") config.learner.kind = learner_kind_from_string(value);
  else if (key == "epochs") config.learner.epochs = static_cast<int>(parse_ll(value, key));
  else if (key == "learning_rate") config.learner.learning_rate = parse_d(value, key);
  else if (key == "l2") config.learner.l2 = parse_d(value, key);
  else if (key == "expand_target") config.expand_target = parse_ll(value, key);
  else if (key == "master_seed") config.master_seed = static_cast<std::uint64_t>(parse_ll(value, key));
  else if (key == "prior_case") config.prior_case = static_cast<int>(parse_ll(value, key));
  else if (key == "n_clean") config.n_clean = parse_ll(value, key);
  else if (key == "clean_classes") config.clean_classes = parse_int_list(value, key);
  else if (key == "votes_out") config.votes_out = value;
  else throw std::invalid_argument("config: unknown key: " + key);
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  RunConfig config;
  std::string line;
  long long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " is not key=value: " + line);
    }
    apply_config_kv(config, line.substr(0, eq), line.substr(eq + 1));
  }
  return config;
}

void validate_config(const RunConfig& config) {
  const bool csv_train = !config.train_csv.empty();
  const bool idx_train = !config.train_images.empty() || !config.train_labels.empty();
  if (csv_train == idx_train) {
    throw std::invalid_argument(
        "config: provide exactly one of train_csv or train_images+train_labels");
  }
  if (idx_train && (config.train_images.empty() || config.train_labels.empty())) {
    throw std::invalid_argument("config: IDX input needs both train_images and train_labels");
  }
  const bool csv_test = !config.test_csv.empty();
  const bool idx_test = !config.test_images.empty() || !config.test_labels.empty();
  if (csv_test == idx_test) {
    throw std::invalid_argument(
        "config: provide exactly one of test_csv or test_images+test_labels");
  }
  if (idx_test && (config.test_images.empty() || config.test_labels.empty())) {
    throw std::invalid_argument("config: IDX input needs both test_images and test_labels");
  }
  if (config.scheme != "without" && config.scheme != "with" && config.scheme != "binomial") {
    throw std::invalid_argument("config: scheme must be one of without|with|binomial");
  }
  if (config.scheme != "binomial" && config.subset_size < 1) {
    throw std::invalid_argument("config: subset_size must be >= 1");
  }
  if (config.scheme == "binomial" && !config.p && config.subset_size < 1) {
    throw std::invalid_argument("config: binomial selection needs p or subset_size");
  }
  if (config.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw std::invalid_argument("config: alpha must lie in (0,1)");
  }
  validate_learner(config.learner);
  if (config.expand_target < 1) throw std::invalid_argument("config: expand_target must be >= 1");
  if (config.prior_case < 1 || config.prior_case > 3) {
    throw std::invalid_argument("config: prior_case must be 1, 2, or 3");
  }
  if (config.prior_case == 2 && config.n_clean < 1) {
    throw std::invalid_argument("config: case 2 needs n_clean >= 1");
  }
  if (config.prior_case == 3 && config.clean_classes.empty()) {
    throw std::invalid_argument("config: case 3 needs clean_classes");
  }
  if (config.votes_out.empty()) throw std::invalid_argument("config: votes_out must be set");
}

SelectionScheme resolve_scheme(const RunConfig& config, long long poisoned_n) {
  if (config.scheme == "without") return WithoutReplacement{config.subset_size};
  if (config.scheme == "with") return WithReplacement{config.subset_size};
  if (config.scheme == "binomial") {
    const double p = config.p ? *config.p
                              : static_cast<double>(config.subset_size) /
                                    static_cast<double>(poisoned_n);
    return BinomialSelect{p};
  }
  throw std::invalid_argument("config: unknown scheme: " + config.scheme);
}

std::string canonical_config(const RunConfig& config) {
  std::ostringstream out;
  out.precision(17);
  out << "scheme=" << config.scheme << ";subset_size=" << config.subset_size;
  if (config.p) out << ";p=" << *config.p;
  out << ";trials=" << config.trials << ";alpha=" << config.alpha
      << ";learner=" << learner_kind_to_string(config.learner.kind)
      << ";epochs=" << config.learner.epochs << ";lr=" << config.learner.learning_rate
      << ";l2=" << config.learner.l2 << ";expand_target=" << config.expand_target
      << ";master_seed=" << config.master_seed << ";prior_case=" << config.prior_case
      << ";n_clean=" << config.n_clean << ";clean_classes=";
  for (std::size_t i = 0; i < config.clean_classes.size(); ++i) {
    if (i > 0) out << '|';
    out << config.clean_classes[i];
  }
  return out.str();
}

std::vector<long long> parse_rho_grid(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("rho grid: empty specification");
  std::vector<long long> grid;
  if (text.find(':') != std::string::npos) {
    std::vector<long long> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(parse_ll(trim(item), "rho_grid"));
    if (parts.size() < 2 || parts.size() > 3) {
      throw std::invalid_argument("rho grid: expected lo:hi or lo:hi:step");
    }
    const long long lo = parts[0], hi = parts[1], step = parts.size() == 3 ? parts[2] : 1;
    if (step < 1) throw std::invalid_argument("rho grid: step must be >= 1");
    if (hi < lo) throw std::invalid_argument("rho grid: hi must be >= lo");
    for (long long v = lo; v <= hi; v += step) grid.push_back(v);
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) grid.push_back(parse_ll(item, "rho_grid"));
    }
  }
  if (grid.empty()) throw std::invalid_argument("rho grid: no values");
  for (long long v : grid) {
    if (v < 0) throw std::invalid_argument("rho grid: negative rho");
  }
  return grid;
}

}  // namespace rscert
