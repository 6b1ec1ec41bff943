#include "rscert/votes_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rscert/io_util.hpp"

namespace rscert {

namespace {

using ordered_json = nlohmann::ordered_json;

template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

ordered_json scheme_to_json(const SelectionScheme& scheme) {
  ordered_json j;
  j["kind"] = scheme_name(scheme);
  std::visit(Overload{[&](const WithoutReplacement& s) { j["subset_size"] = s.subset_size; },
                      [&](const WithReplacement& s) { j["subset_size"] = s.subset_size; },
                      [&](const BinomialSelect& s) { j["p"] = s.p; }},
             scheme);
  return j;
}

SelectionScheme scheme_from_json(const ordered_json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "without_replacement") return WithoutReplacement{j.at("subset_size").get<long long>()};
  if (kind == "with_replacement") return WithReplacement{j.at("subset_size").get<long long>()};
  if (kind == "binomial") return BinomialSelect{j.at("p").get<double>()};
  throw std::runtime_error("votes file: unknown scheme kind: " + kind);
}

}  // namespace

void save_votes(const VotesFile& votes, const std::string& path) {
  ordered_json j;
  j["format"] = "rscert-votes/1";
  j["trials"] = votes.trials;
  j["classes"] = votes.classes;
  j["scheme"] = scheme_to_json(votes.scheme);
  j["n"] = votes.n;
  j["n_clean"] = votes.n_clean;
  j["master_seed"] = votes.master_seed;
  j["config_digest"] = votes.config_digest;
  ordered_json records = ordered_json::array();
  for (const VoteRecord& record : votes.records) {
    ordered_json r;
    r["id"] = record.example_id;
    ordered_json counts;
    for (const auto& [cls, count] : record.counts) counts[std::to_string(cls)] = count;
    r["counts"] = counts;
    if (record.true_label) r["true_label"] = *record.true_label;
    records.push_back(std::move(r));
  }
  j["records"] = std::move(records);
  atomic_write_text(path, j.dump(2) + "\n");
}

VotesFile load_votes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open votes file: " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("votes file: invalid json in " + path + ": " + e.what());
  }
  if (j.value("format", "") != "rscert-votes/1") {
    throw std::runtime_error("votes file: unknown format marker in " + path);
  }

  VotesFile votes;
  votes.trials = j.at("trials").get<long long>();
  votes.classes = j.at("classes").get<std::vector<int>>();
  votes.scheme = scheme_from_json(j.at("scheme"));
  votes.n = j.at("n").get<long long>();
  votes.n_clean = j.at("n_clean").get<long long>();
  votes.master_seed = j.at("master_seed").get<std::uint64_t>();
  votes.config_digest = j.value("config_digest", "");

  if (votes.trials < 1) throw std::runtime_error("votes file: trials must be >= 1");
  for (const auto& r : j.at("records")) {
    VoteRecord record;
    record.example_id = r.at("id").get<std::string>();
    record.trials = votes.trials;
    for (const auto& [key, value] : r.at("counts").items()) {
      int cls = 0;
      try {
        std::size_t pos = 0;
        cls = std::stoi(key, &pos);
        if (pos != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        throw std::runtime_error("votes file: non-integer class id: " + key);
      }
      record.counts[cls] = value.get<long long>();
    }
    if (r.contains("true_label")) record.true_label = r.at("true_label").get<int>();
    validate_vote(record);
    long long total = 0;
    for (const auto& [cls, count] : record.counts) {
      total += count;
      if (std::find(votes.classes.begin(), votes.classes.end(), cls) == votes.classes.end()) {
        throw std::runtime_error("votes file: record class outside the declared class set");
      }
    }
    if (record.true_label &&
        std::find(votes.classes.begin(), votes.classes.end(), *record.true_label) ==
            votes.classes.end()) {
      throw std::runtime_error("votes file: true label outside the declared class set");
    }
    if (total != votes.trials) {
      throw std::runtime_error("votes file: record counts do not sum to the trial count");
    }
    votes.records.push_back(std::move(record));
  }
  return votes;
}

std::string certificates_to_csv(const std::vector<std::pair<std::string, Certificate>>& rows) {
  std::ostringstream out;
  out.precision(12);
  out << "example_id,label,radius,p1_lower,p2_upper,abstain\n";
  for (const auto& [id, cert] : rows) {
    out << id << ',';
    if (cert.abstain) {
      out << "ABSTAIN,ABSTAIN,";
    } else {
      out << cert.label << ',' << cert.radius << ',';
    }
    out << cert.p1_lower << ',' << cert.p2_upper << ',' << (cert.abstain ? 1 : 0) << "\n";
  }
  return out.str();
}

std::string curve_to_csv(const std::vector<std::pair<long long, double>>& curve) {
  std::ostringstream out;
  out.precision(12);
  out << "rho,certified_accuracy\n";
  for (const auto& [rho, ca] : curve) out << rho << ',' << ca << "\n";
  return out.str();
}

}  // namespace rscert
