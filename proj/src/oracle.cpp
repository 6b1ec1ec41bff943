#include "rscert/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace rscert::oracle {

namespace {

template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

bool scheme_breaks_on(const SelectionScheme& scheme, long long m) {
  return std::visit(Overload{[&](const WithoutReplacement& s) { return m < s.subset_size; },
                             [&](const WithReplacement&) { return m < 1; },
                             [&](const BinomialSelect&) { return false; }},
                    scheme);
}

// Visit every sub-dataset with positive mass over indices [0, N), paired
// with its exact mass. WithReplacement visits multisets (nondecreasing index
// sequences); the others visit plain subsets.
template <class F>
void for_each_subset(const SelectionScheme& scheme, long long N, F&& f) {
  std::visit(
      Overload{
          [&](const WithoutReplacement& s) {
            const long long k = s.subset_size;
            if (N < k) return;  // nothing to draw
            std::vector<long long> idx(static_cast<std::size_t>(k));
            for (long long i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
            const Rational mass(BigInt(1), binomial_exact(N, k));
            for (;;) {
              f(idx, mass);
              long long i = k - 1;
              while (i >= 0 && idx[static_cast<std::size_t>(i)] == N - k + i) --i;
              if (i < 0) break;
              ++idx[static_cast<std::size_t>(i)];
              for (long long j = i + 1; j < k; ++j) {
                idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
              }
            }
          },
          [&](const WithReplacement& s) {
            const long long k = s.subset_size;
            if (N < 1) return;  // nothing to draw
            std::vector<long long> idx(static_cast<std::size_t>(k), 0);
            for (;;) {
              f(idx, subset_mass(scheme, N, idx));
              long long i = k - 1;
              while (i >= 0 && idx[static_cast<std::size_t>(i)] == N - 1) --i;
              if (i < 0) break;
              const long long v = idx[static_cast<std::size_t>(i)] + 1;
              for (long long j = i; j < k; ++j) idx[static_cast<std::size_t>(j)] = v;
            }
          },
          [&](const BinomialSelect& s) {
            const Rational p = binomial_p_exact(s);
            const Rational q = Rational(1) - p;
            std::vector<long long> idx;
            for (std::uint64_t bits = 0; bits < (1ULL << N); ++bits) {
              idx.clear();
              for (long long i = 0; i < N; ++i) {
                if (bits & (1ULL << i)) idx.push_back(i);
              }
              f(idx, p.pow(static_cast<long long>(idx.size())) *
                         q.pow(N - static_cast<long long>(idx.size())));
            }
          }},
      scheme);
}

// Mass of sub-datasets NOT contained in the canonical untouched prefix
// [0, omega), by direct enumeration.
Rational escape_mass(const SelectionScheme& scheme, long long N, long long omega) {
  Rational total(0);
  for_each_subset(scheme, N, [&](const std::vector<long long>& idx, const Rational& mass) {
    const bool escapes = !idx.empty() && idx.back() >= omega;
    if (escapes) total += mass;
  });
  return total;
}

Rational exact_pi(const SelectionScheme& scheme, long long n, long long m) {
  return std::visit(
      Overload{[&](const WithoutReplacement& s) {
                 return Rational(binomial_exact(n, s.subset_size), binomial_exact(m, s.subset_size));
               },
               [&](const WithReplacement& s) {
                 return Rational::of(n, m).pow(s.subset_size);
               },
               [&](const BinomialSelect& s) {
                 return (Rational(1) - binomial_p_exact(s)).pow(m - n);
               }},
      scheme);
}

struct AttackKey {
  long long m;
  long long omega;
  bool operator<(const AttackKey& o) const {
    return m != o.m ? m < o.m : omega < o.omega;
  }
};

// subset_mass, extended to the empty dataset (reachable by deleting
// everything; only binomial selection is still defined there).
Rational mass_under(const SelectionScheme& scheme, long long N,
                    const std::vector<long long>& idx) {
  if (N == 0) {
    if (!std::holds_alternative<BinomialSelect>(scheme)) {
      throw std::logic_error("oracle: sampler evaluated on an empty dataset");
    }
    return idx.empty() ? Rational(1) : Rational(0);
  }
  return subset_mass(scheme, N, idx);
}

std::string describe_attack(const Attack& a) {
  std::ostringstream out;
  out << "insert " << a.inserts << ", delete " << a.erases << ", modify " << a.modifies
      << " (m=" << a.m << ", untouched=" << a.omega << ")";
  return out.str();
}

}  // namespace

void validate_instance(const TinyInstance& instance) {
  if (instance.n < 1 || instance.n > kMaxN) {
    throw std::invalid_argument("oracle: n outside [1, 8]");
  }
  if (instance.rho < 0 || instance.rho > kMaxRho) {
    throw std::invalid_argument("oracle: rho outside [0, 3]");
  }
  validate_scheme(instance.scheme, instance.n);
  // Enumeration work bound: the largest dataset ever enumerated.
  const long long max_size = instance.n + instance.rho;
  const double work = std::visit(
      Overload{[&](const WithoutReplacement& s) {
                 return binomial_exact(max_size, s.subset_size).to_double();
               },
               [&](const WithReplacement& s) {
                 return std::pow(static_cast<double>(max_size), static_cast<double>(s.subset_size));
               },
               [&](const BinomialSelect&) {
                 return std::pow(2.0, static_cast<double>(max_size));
               }},
      instance.scheme);
  if (work > 1e6) throw std::invalid_argument("oracle: enumeration domain exceeds 1e6");
}

std::vector<AttackEval> enumerate_attacks(const TinyInstance& instance) {
  validate_instance(instance);
  const auto [scheme, kind, n, rho] = instance;

  const long long max_insert = poison_allows_insert(kind) ? rho : 0;
  const long long max_erase = poison_allows_erase(kind) ? rho : 0;
  const long long max_modify = poison_allows_modify(kind) ? rho : 0;

  // Escape masses repeat across attacks that share (dataset size, omega).
  std::map<AttackKey, Rational> memo;
  const auto escape = [&](long long N, long long omega) -> const Rational& {
    const AttackKey key{N, omega};
    auto it = memo.find(key);
    if (it == memo.end()) it = memo.emplace(key, escape_mass(scheme, N, omega)).first;
    return it->second;
  };

  std::vector<AttackEval> evals;
  for (long long ins = 0; ins <= max_insert; ++ins) {
    for (long long era = 0; era <= max_erase; ++era) {
      for (long long mod = 0; mod <= max_modify; ++mod) {
        if (ins + era + mod > rho) continue;
        if (era + mod > n) continue;  // cannot touch more samples than exist
        AttackEval eval;
        eval.attack = {ins, era, mod, n + ins - era, n - era - mod, false};
        if (scheme_breaks_on(scheme, eval.attack.m)) {
          eval.attack.sampler_broken = true;
          eval.miss_clean = escape(n, eval.attack.omega);
          eval.miss_poisoned = Rational(1);
          eval.pi = Rational(0);
          eval.delta = Rational(2);
        } else {
          eval.miss_clean = escape(n, eval.attack.omega);
          eval.miss_poisoned = escape(eval.attack.m, eval.attack.omega);
          eval.pi = exact_pi(scheme, n, eval.attack.m);
          Rational d = eval.miss_clean + eval.miss_poisoned / eval.pi;
          if (d > Rational(2)) d = Rational(2);
          eval.delta = d;
        }
        evals.push_back(std::move(eval));
      }
    }
  }
  return evals;
}

Rational enumerate_delta_exact(const TinyInstance& instance) {
  Rational worst(0);
  for (const AttackEval& eval : enumerate_attacks(instance)) {
    if (eval.delta > worst) worst = eval.delta;
  }
  return worst;
}

PiCheck verify_pi_bounds(const TinyInstance& instance, const Rational& pi_scale) {
  PiCheck result;
  long long attacks_checked = 0;
  long long points_checked = 0;

  for (const AttackEval& eval : enumerate_attacks(instance)) {
    if (eval.attack.sampler_broken) continue;
    const long long m = eval.attack.m;
    const long long omega = eval.attack.omega;
    const Rational pi = eval.pi * pi_scale;
    ++attacks_checked;

    bool violation = false;
    std::string note;
    for_each_subset(instance.scheme, omega,
                    [&](const std::vector<long long>& idx, const Rational&) {
                      if (violation) return;
                      // Masses of the same sub-dataset under both datasets.
                      const Rational mass_clean = mass_under(instance.scheme, instance.n, idx);
                      const Rational mass_poisoned = mass_under(instance.scheme, m, idx);
                      if (mass_clean.is_zero() && mass_poisoned.is_zero()) return;
                      ++points_checked;
                      // pi_2 * Pr_clean >= Pr_poisoned >= pi_1 * Pr_clean,
                      // and for these schemes the constant is tight: equality.
                      const Rational scaled = pi * mass_clean;
                      if (scaled != mass_poisoned) {
                        violation = true;
                        std::ostringstream out;
                        out << "pi bound violated at " << describe_attack(eval.attack)
                            << ": pi*Pr_clean=" << scaled.to_string()
                            << " vs Pr_poisoned=" << mass_poisoned.to_string();
                        note = out.str();
                      }
                    });
    if (violation) {
      result.ok = false;
      result.vacuous = false;
      result.detail = note;
      return result;
    }
  }

  result.ok = true;
  result.vacuous = (points_checked == 0);
  std::ostringstream out;
  out << "checked " << points_checked << " sub-datasets across " << attacks_checked << " attacks";
  result.detail = out.str();
  return result;
}

namespace {

// Enumerated containment mass (complement of escape) under dataset size N.
Rational containment_mass(const SelectionScheme& scheme, long long N, long long omega) {
  Rational total(0);
  for_each_subset(scheme, N, [&](const std::vector<long long>& idx, const Rational& mass) {
    const bool inside = idx.empty() || idx.back() < omega;
    if (inside) total += mass;
  });
  return total;
}

}  // namespace

std::optional<Witness> tightness_witness(const TinyInstance& instance, const Rational& margin) {
  const std::vector<AttackEval> evals = enumerate_attacks(instance);
  Rational delta(0);
  const AttackEval* worst = nullptr;
  for (const AttackEval& eval : evals) {
    if (worst == nullptr || eval.delta > delta) {
      delta = eval.delta;
      worst = &eval;
    }
  }
  if (worst == nullptr) throw std::logic_error("oracle: no admissible attacks");
  if (margin >= delta) return std::nullopt;  // certified at and above delta

  Witness w;
  w.attack = worst->attack;

  // Least favorable vote profile at the requested margin; capped at the
  // best physically possible votes (p1 = 1, p2 = 0) when margin > 1.
  const Rational half = Rational::of(1, 2);
  w.p1 = (Rational(1) + margin) * half;
  if (w.p1 > Rational(1)) w.p1 = Rational(1);
  w.p2 = w.p1 - margin;
  if (w.p2 < Rational(0)) w.p2 = Rational(0);

  if (w.attack.sampler_broken) {
    w.post_attack_c1 = Rational(0);
    w.post_attack_c2 = Rational(0);
    w.description = describe_attack(w.attack) +
                    ": the attacked dataset is too small to subsample; the smoothed prediction "
                    "is undefined";
    return w;
  }

  // Worst-case base classifier achieving the bound's equality cases:
  // predict c1 on escapes of the clean dataset, c2 on escapes of the
  // attacked dataset, and split the shared region to realize (p1, p2).
  const Rational keep_clean = Rational(1) - worst->miss_clean;
  Rational on_shared_c1 = w.p1 - worst->miss_clean;
  if (on_shared_c1 < Rational(0)) on_shared_c1 = Rational(0);
  Rational on_shared_c2 = keep_clean - on_shared_c1;
  if (w.p2 < on_shared_c2) on_shared_c2 = w.p2;

  const Rational keep_poisoned = containment_mass(instance.scheme, w.attack.m, w.attack.omega);
  // Sanity: the containment masses are linked by the tight constant.
  if (keep_poisoned != worst->pi * keep_clean) {
    throw std::logic_error("oracle: containment masses disagree with pi");
  }
  w.post_attack_c1 =
      keep_clean.is_zero() ? Rational(0) : keep_poisoned * on_shared_c1 / keep_clean;
  w.post_attack_c2 =
      (keep_clean.is_zero() ? Rational(0) : keep_poisoned * on_shared_c2 / keep_clean) +
      worst->miss_poisoned;
  if (!(w.post_attack_c2 > w.post_attack_c1)) {
    throw std::logic_error("oracle: constructed witness does not flip the majority");
  }
  std::ostringstream out;
  out << describe_attack(w.attack) << ": clean votes p1=" << w.p1.to_string()
      << ", p2=" << w.p2.to_string() << " become c1=" << w.post_attack_c1.to_string()
      << " < c2=" << w.post_attack_c2.to_string() << " after the attack";
  w.description = out.str();
  return w;
}

std::vector<TinyInstance> standard_grid(long long max_n, long long max_rho) {
  if (max_n > kMaxN || max_rho > kMaxRho) {
    throw std::invalid_argument("oracle grid: caps exceed the enumeration domain");
  }
  std::vector<TinyInstance> grid;
  const PoisonKind kinds[] = {PoisonKind::insert,        PoisonKind::erase,
                              PoisonKind::modify,        PoisonKind::insert_modify,
                              PoisonKind::erase_modify,  PoisonKind::insert_erase_modify};
  for (long long n = 3; n <= max_n; ++n) {
    std::vector<SelectionScheme> schemes;
    for (long long k = 1; k <= std::min<long long>(3, n); ++k) {
      schemes.push_back(WithoutReplacement{k});
      schemes.push_back(WithReplacement{k});
    }
    schemes.push_back(BinomialSelect{0.25});
    schemes.push_back(BinomialSelect{0.5});
    for (const SelectionScheme& scheme : schemes) {
      for (PoisonKind kind : kinds) {
        for (long long rho = 0; rho <= max_rho; ++rho) {
          grid.push_back(TinyInstance{scheme, kind, n, rho});
        }
      }
    }
  }
  return grid;
}

}  // namespace rscert::oracle
