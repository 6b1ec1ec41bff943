#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rscert/certify.hpp"
#include "rscert/rational.hpp"
#include "rscert/schemes.hpp"

namespace rscert::oracle {

// A certification problem small enough to solve by exhaustive enumeration in
// exact rational arithmetic. Everything in this namespace is the independent
// check on the closed forms: no floating point, no shared formulas.
struct TinyInstance {
  SelectionScheme scheme;
  PoisonKind kind;
  long long n = 0;
  long long rho = 0;
};

inline constexpr long long kMaxN = 8;
inline constexpr long long kMaxRho = 3;

void validate_instance(const TinyInstance& instance);

// One admissible adversary action, canonicalized: the untouched samples
// occupy indices [0, omega) in both datasets. All three schemes are
// permutation-invariant (their masses depend only on which indices a
// sub-dataset uses, never on where they sit), so fixing the touched samples
// to a suffix loses no adversary; the unit tests spot-check this against
// full placement enumeration.
struct Attack {
  long long inserts = 0;
  long long erases = 0;
  long long modifies = 0;
  long long m = 0;      // poisoned dataset size
  long long omega = 0;  // untouched sample count
  bool sampler_broken = false;  // scheme cannot draw from the attacked dataset
};

struct AttackEval {
  Attack attack;
  Rational miss_clean;     // escape mass under the clean dataset
  Rational miss_poisoned;  // escape mass under the attacked dataset
  Rational pi;             // tight constant (0 when sampler_broken)
  Rational delta;          // miss_clean + miss_poisoned / pi, capped at 2
};

// Every admissible (inserts, erases, modifies) action at intensity <= rho,
// each evaluated by full sub-dataset enumeration.
std::vector<AttackEval> enumerate_attacks(const TinyInstance& instance);

// Exact delta(rho): the worst AttackEval delta, clamped to [0, 2].
Rational enumerate_delta_exact(const TinyInstance& instance);

struct PiCheck {
  bool ok = false;
  bool vacuous = false;  // no sub-dataset with positive mass fits inside Omega
  std::string detail;
};

// Confirms that the implemented pi satisfies both certification inequalities
// with exact equality for every sub-dataset inside Omega, for every
// admissible attack. pi_scale multiplies the implemented pi before the check
// (a deliberate perturbation hook for tests; 1 checks the real constant).
PiCheck verify_pi_bounds(const TinyInstance& instance, const Rational& pi_scale = Rational(1));

// A constructive attack on an under-margined prediction: the adversary
// action, the clean vote profile, and the post-attack vote masses for the
// top-2 classes, all enumerated exactly. Present iff margin < delta(rho).
struct Witness {
  Attack attack;
  Rational p1;
  Rational p2;
  Rational post_attack_c1;
  Rational post_attack_c2;
  std::string description;
};

std::optional<Witness> tightness_witness(const TinyInstance& instance, const Rational& margin);

// The standard verification grid: all three schemes (subset sizes 1..3,
// binomial p in {1/4, 1/2}) x all six poisoning models x n in [3, max_n]
// x rho in [0, max_rho].
std::vector<TinyInstance> standard_grid(long long max_n, long long max_rho);

}  // namespace rscert::oracle
