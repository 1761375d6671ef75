#pragma once

// Discriminant bounds: least non-residues, the C/D parameter selectors, the
// m = 1, 2 table, the explicit m >= 3 formulas and the inequality alternatives
// that feed them.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kitaoka/ntheory.hpp"
#include "kitaoka/qfield.hpp"

namespace kitaoka {

/// Rational enclosure [lo, hi] of log(x), x > 0, with width below 2^-180.
std::pair<Rat, Rat> log_bounds(const Rat& x);

/// gamma_p < 1.4 p^{1/4} log p for every odd prime p <= limit, decided with
/// certified logarithms. An undecidable comparison counts as a failure.
bool trevino_check(std::int64_t limit);
bool trevino_holds(std::int64_t p);

struct CChoice {
  std::int64_t p;
  std::int64_t C;
};

/// Integer 2x2 Gram of independent vectors; throws NotPositiveDefinite.
CChoice choose_C(const std::array<std::array<Int, 2>, 2>& G2);

/// Exact constants of the m = 1, 2 table. Throws OutOfRange.
Int table_bound(int m, int rank);
/// The same constants recomputed by maximising the rank-wise bounds over every
/// admissible (p, C, q, D) for the given m.
Int table_bound_from_ranges(int m, int rank);

struct CertifiedBound {
  Rat lower;
  Rat upper;
};

/// Enclosure of K m^a (log m)^b for the unconditional m >= 3 formulas; the
/// relative width is at most 1e-6. Throws OutOfRange.
CertifiedBound explicit_bound(std::int64_t m, int rank);

/// The explicit formula's constant and exponents as (K, a_num, a_den, b_num, b_den).
struct ExplicitFormula {
  Int K;
  long a_num, a_den, b_num, b_den;
};
ExplicitFormula explicit_formula(int rank);

struct BoundParams {
  std::int64_t m = 1;
  int rank = 3;
  std::int64_t p1 = 2, p2 = 2, q1 = 2, q2 = 2;
  std::int64_t C1 = 2, C2 = 2, D1 = 1, D2 = 1;
  Gamma2Mode gamma2_mode = Gamma2Mode::Seven;
};

/// Throws InvariantViolation when a parameter is outside its admissible range.
void validate(const BoundParams& bp);

/// Strict bound on sqrt(Delta) for the given rank; the Delta bound is its square.
Int corollary_bound(const BoundParams& bp);

struct Alternative {
  std::string label;
  bool holds;
};

struct RankConditions {
  int rank;
  std::vector<Alternative> alternatives;
  bool any() const;
};

struct Thm31Report {
  std::vector<RankConditions> ranks;  // ranks 3..7
  /// Every t-type inequality that holds also satisfies sqrt(Delta) < 4Cm^2 t + 1.
  bool lemma_consistent = true;
};

Thm31Report thm31_conditions(std::int64_t D, std::int64_t m, std::int64_t C1, std::int64_t C2,
                             std::int64_t D1, std::int64_t D2);

}  // namespace kitaoka
