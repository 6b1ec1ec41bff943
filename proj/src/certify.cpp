#include "rscert/certify.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rscert/combinatorics.hpp"

namespace rscert {

namespace {

template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

}  // namespace

PoisonKind poison_kind_from_string(const std::string& name) {
  std::string s;
  for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "p1" || s == "insert") return PoisonKind::insert;
  if (s == "p2" || s == "delete") return PoisonKind::erase;
  if (s == "p3" || s == "modify") return PoisonKind::modify;
  if (s == "p4" || s == "insert+modify") return PoisonKind::insert_modify;
  if (s == "p5" || s == "delete+modify") return PoisonKind::erase_modify;
  if (s == "p6" || s == "insert+delete+modify") return PoisonKind::insert_erase_modify;
  throw std::invalid_argument("unknown poisoning model: " + name);
}

std::string poison_kind_to_string(PoisonKind kind) {
  switch (kind) {
    case PoisonKind::insert: return "P1";
    case PoisonKind::erase: return "P2";
    case PoisonKind::modify: return "P3";
    case PoisonKind::insert_modify: return "P4";
    case PoisonKind::erase_modify: return "P5";
    case PoisonKind::insert_erase_modify: return "P6";
  }
  throw std::logic_error("unreachable poison kind");
}

bool poison_allows_insert(PoisonKind kind) {
  return kind == PoisonKind::insert || kind == PoisonKind::insert_modify ||
         kind == PoisonKind::insert_erase_modify;
}

bool poison_allows_erase(PoisonKind kind) {
  return kind == PoisonKind::erase || kind == PoisonKind::erase_modify ||
         kind == PoisonKind::insert_erase_modify;
}

bool poison_allows_modify(PoisonKind kind) {
  return kind == PoisonKind::modify || kind == PoisonKind::insert_modify ||
         kind == PoisonKind::erase_modify || kind == PoisonKind::insert_erase_modify;
}

MRange poison_m_range(PoisonKind kind, long long n, long long rho) {
  if (n < 1) throw std::invalid_argument("poisoning: n must be >= 1");
  if (rho < 0) throw std::invalid_argument("poisoning: rho must be >= 0");
  if (poison_allows_modify(kind) && rho > n) {
    // Modifying more samples than exist would make the untouched part
    // negative; the model is not meaningful there.
    throw std::invalid_argument("poisoning: rho exceeds n for a modification-capable model");
  }
  const long long lo = poison_allows_erase(kind) ? std::max(0LL, n - rho) : n;
  const long long hi = poison_allows_insert(kind) ? n + rho : n;
  return {lo, hi};
}

long long poison_omega(PoisonKind kind, long long n, long long m, long long rho) {
  switch (kind) {
    case PoisonKind::insert:
      return n;  // originals untouched
    case PoisonKind::erase:
      return m;  // survivors untouched
    default:
      return std::max(m, n) - rho;
  }
}

namespace {

// delta contribution of a single poisoned size m. For every scheme the
// closed form collapses to
//   delta_m = (1/pi - 1) + 2 * (1 - Pr[D_sub inside Omega under D_n])
//           = expm1(-log pi) - 2 * expm1(log containment)
// because (1/pi) * Pr[inside Omega under D'_m] = Pr[inside Omega under D_n].
// The expm1 forms stay accurate when both factors are close to 1.
double delta_at_m(const SelectionScheme& scheme, PoisonKind kind, long long n, long long rho,
                  long long m) {
  const bool broken = std::visit(
      Overload{[&](const WithoutReplacement& s) { return m < s.subset_size; },
               [&](const WithReplacement&) { return m < 1; },
               [&](const BinomialSelect&) { return false; }},
      scheme);
  if (broken) return kDeltaUncertifiable;  // D'_m cannot be subsampled at all

  const long long omega = poison_omega(kind, n, m, rho);
  // ln(1/pi), computed inline so binomial selection survives m = 0 (the
  // everything-deleted dataset, on which it is still well defined).
  const double log_inv_pi = std::visit(
      Overload{[&](const WithoutReplacement& s) { return log_binomial_ratio(m, n, s.subset_size); },
               [&](const WithReplacement& s) {
                 return static_cast<double>(s.subset_size) *
                        (std::log(static_cast<double>(m)) - std::log(static_cast<double>(n)));
               },
               [&](const BinomialSelect& s) {
                 return static_cast<double>(n - m) * std::log1p(-s.p);
               }},
      scheme);
  const double log_keep = log_containment(scheme, n, omega);
  if (log_inv_pi > 700.0) return kDeltaUncertifiable;  // exp would overflow; hopeless anyway
  return std::expm1(log_inv_pi) - 2.0 * std::expm1(log_keep);
}

}  // namespace

double delta(const SelectionScheme& scheme, PoisonKind kind, long long n, long long rho) {
  validate_scheme(scheme, n);
  const MRange range = poison_m_range(kind, n, rho);
  double worst = 0.0;
  for (long long m = range.lo; m <= range.hi; ++m) {
    worst = std::max(worst, delta_at_m(scheme, kind, n, rho, m));
  }
  return std::clamp(worst, 0.0, kDeltaUncertifiable);
}

std::optional<long long> certified_radius(const SelectionScheme& scheme, PoisonKind kind,
                                          long long n, double margin, long long rho_cap) {
  validate_scheme(scheme, n);
  if (rho_cap < 0) throw std::invalid_argument("certified_radius: rho_cap must be >= 0");
  if (std::isnan(margin) || margin < 0.0) return std::nullopt;

  // Modification-capable models are undefined past rho = n.
  const long long cap = poison_allows_modify(kind) ? std::min(rho_cap, n) : rho_cap;
  const auto certifies = [&](long long rho) { return delta(scheme, kind, n, rho) <= margin; };

  // Exponential bracket, then binary search on the monotone delta. delta(0)
  // is 0, so rho = 0 always certifies; the bracket grows lazily because a
  // single delta evaluation costs O(rho) at large rho.
  if (cap == 0) return 0;
  long long lo = 0;  // certified
  long long hi = 1;  // candidate
  while (certifies(hi)) {
    lo = hi;
    if (hi >= cap) return cap;
    hi = std::min(cap, hi * 2);
  }
  // Invariant: certifies(lo) and !certifies(hi).
  while (hi - lo > 1) {
    const long long mid = lo + (hi - lo) / 2;
    if (certifies(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

void validate_vote(const VoteRecord& vote) {
  if (vote.trials <= 0) throw std::invalid_argument("vote record: trials must be positive");
  long long total = 0;
  for (const auto& [cls, count] : vote.counts) {
    if (cls < 0) throw std::invalid_argument("vote record: negative class id");
    if (count < 0) throw std::invalid_argument("vote record: negative count");
    total += count;
  }
  if (total > vote.trials) {
    throw std::invalid_argument("vote record: counts exceed the number of trials");
  }
}

std::pair<std::pair<int, long long>, std::pair<int, long long>> top_two(const VoteRecord& vote) {
  std::pair<int, long long> first{-1, -1}, second{-1, -1};
  for (const auto& [cls, count] : vote.counts) {
    // std::map iterates ids ascending, so strict > keeps the smaller id on ties.
    if (count > first.second) {
      second = first;
      first = {cls, count};
    } else if (count > second.second) {
      second = {cls, count};
    }
  }
  if (first.second < 0) throw std::invalid_argument("vote record: no classes");
  if (second.second < 0) second = {-1, 0};
  return {first, second};
}

Certificate certify_prediction(const VoteRecord& vote, double alpha,
                               const SelectionScheme& scheme, PoisonKind kind, long long n,
                               long long rho_cap) {
  validate_vote(vote);
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("certify_prediction: alpha outside (0,1)");
  }
  const auto [best, runner_up] = top_two(vote);

  Certificate cert;
  cert.p1_lower = cp_lower(best.second, vote.trials, alpha / 2.0);
  cert.p2_upper = std::min(1.0 - cert.p1_lower,
                           cp_upper(runner_up.second, vote.trials, alpha / 2.0));
  const double margin = cert.p1_lower - cert.p2_upper;

  const auto radius = certified_radius(scheme, kind, n, margin, rho_cap);
  if (!radius) {
    cert.abstain = true;
    return cert;
  }
  cert.label = best.first;
  cert.radius = *radius;
  return cert;
}

double certified_accuracy(std::span<const VoteRecord> votes, long long rho, double alpha,
                          const SelectionScheme& scheme, PoisonKind kind, long long n,
                          long long rho_cap) {
  if (votes.empty()) throw std::invalid_argument("certified_accuracy: no vote records");
  long long hits = 0;
  for (const VoteRecord& vote : votes) {
    if (!vote.true_label) {
      throw std::invalid_argument("certified_accuracy: record lacks a true label");
    }
    const Certificate cert = certify_prediction(vote, alpha, scheme, kind, n, rho_cap);
    if (!cert.abstain && cert.label == *vote.true_label && cert.radius >= rho) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(votes.size());
}

std::vector<std::pair<long long, double>> accuracy_curve(std::span<const VoteRecord> votes,
                                                         std::span<const long long> rho_grid,
                                                         double alpha,
                                                         const SelectionScheme& scheme,
                                                         PoisonKind kind, long long n,
                                                         long long rho_cap) {
  if (rho_grid.empty()) throw std::invalid_argument("accuracy_curve: empty rho grid");
  if (votes.empty()) throw std::invalid_argument("accuracy_curve: no vote records");
  for (long long rho : rho_grid) {
    if (rho < 0) throw std::invalid_argument("accuracy_curve: negative rho");
  }

  struct Outcome {
    bool certified_correct;
    long long radius;
  };
  std::vector<Outcome> outcomes;
  outcomes.reserve(votes.size());
  for (const VoteRecord& vote : votes) {
    if (!vote.true_label) throw std::invalid_argument("accuracy_curve: record lacks a true label");
    const Certificate cert = certify_prediction(vote, alpha, scheme, kind, n, rho_cap);
    outcomes.push_back({!cert.abstain && cert.label == *vote.true_label,
                        cert.abstain ? -1 : cert.radius});
  }

  std::vector<std::pair<long long, double>> curve;
  curve.reserve(rho_grid.size());
  for (long long rho : rho_grid) {
    long long hits = 0;
    for (const Outcome& o : outcomes) {
      if (o.certified_correct && o.radius >= rho) ++hits;
    }
    curve.emplace_back(rho, static_cast<double>(hits) / static_cast<double>(votes.size()));
  }
  return curve;
}

}  // namespace rscert
