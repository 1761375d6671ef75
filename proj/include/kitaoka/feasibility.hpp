#pragma once

// Exhaustive search for totally positive semidefinite Gram matrices of rank at
// most 3 with a prescribed diagonal, and the nonexistence sets built on it.
//
// Columns are added one at a time against an exact LDL^T of the pivot columns
// found so far. Entries against pivots are enumerated; entries against
// dependent columns are forced. A column whose Schur complement vanishes is
// dependent, a totally positive one becomes a pivot, anything else is pruned.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kitaoka/exactmat.hpp"
#include "kitaoka/lattice.hpp"
#include "kitaoka/qfield.hpp"

namespace kitaoka {

/// All beta in (1/2)O_F, or O_F when classical, with beta^2 <= ai*aj in both
/// embeddings, sorted by omega coordinates (v, u) of 2*beta.
std::vector<QuadRat> offdiag_candidates(const FieldCtx& ctx, const QuadRat& ai, const QuadRat& aj,
                                        bool classical);

enum class ColumnOrder { AscendingNorm, DescendingNorm, AsGiven };

struct FeasibilityProblem {
  FieldCtx ctx{2};
  std::vector<QuadRat> S;
  bool classical = false;
  std::uint64_t node_budget = 1'000'000'000;
  double time_budget_s = 3600;
  ColumnOrder order = ColumnOrder::AscendingNorm;
  bool symmetry = true;
};

/// Throws InvariantViolation / OutOfRange when S is empty, too long (k > 8) or
/// has an element that is not a totally positive integer.
void validate(const FeasibilityProblem& p);

enum class FeasStatus { Feasible, Infeasible, Inconclusive };
const char* to_string(FeasStatus s);

struct SearchStats {
  std::uint64_t nodes = 0;
  std::uint64_t prune_ring = 0;      // forced entry outside the allowed ring
  std::uint64_t prune_psd = 0;       // Schur complement not totally nonnegative
  std::uint64_t prune_rank = 0;      // a fourth independent column
  std::uint64_t prune_symmetry = 0;  // non-canonical sign of a column
  std::uint64_t units = 0;           // depth-2 work units
  std::uint64_t units_done = 0;
};

struct FeasibilityOutcome {
  FeasStatus status = FeasStatus::Inconclusive;
  std::optional<ExactSymMat> witness;  // in the order of problem.S
  SearchStats stats;
  std::string note;  // reason for Inconclusive
};

struct SearchOptions {
  unsigned jobs = 1;
  std::string checkpoint_path;  // empty: no checkpointing
  double checkpoint_every_s = 60;
};

FeasibilityOutcome search_rank_le3(const FeasibilityProblem& problem, const SearchOptions& opt = {});

/// Every canonical witness, up to `cap`; the search stops once a further one
/// is found and flags saturation.
struct EnumerationResult {
  FeasStatus status = FeasStatus::Inconclusive;  // Feasible iff any witness
  std::vector<ExactSymMat> witnesses;
  bool saturated = false;  // more than `cap` witnesses exist
  SearchStats stats;
  std::string note;
};

EnumerationResult enumerate_witnesses(const FeasibilityProblem& problem, std::size_t cap,
                                      const SearchOptions& opt = {});

/// Re-checks a witness: totally PSD, rank <= 3, diagonal S, entries in the ring.
/// Returns an empty string when valid, otherwise the first failed check.
std::string audit_witness(const FeasibilityProblem& problem, const ExactSymMat& G);

/// FNV-1a hash of the canonical problem text (field, S, ring, order, symmetry).
std::uint64_t problem_hash(const FeasibilityProblem& p);

enum class SetMode { Paper, Generic };

struct NonexistenceSet {
  std::string kind;  // "generic", "fallback" or "table"
  std::vector<QuadRat> S;
};

/// Throws AdmissibleD for the 13 fields that carry universal ternary lattices.
NonexistenceSet nonexistence_set(std::int64_t D, SetMode mode = SetMode::Paper);

struct NonexistenceVerdict {
  NonexistenceSet set;
  FeasibilityOutcome outcome;
};

NonexistenceVerdict nonexistence_suite(std::int64_t D, SetMode mode = SetMode::Paper,
                                       const SearchOptions& opt = {},
                                       std::uint64_t node_budget = 1'000'000'000);

/// Fields with a universal ternary lattice.
const std::vector<std::int64_t>& admissible_D();

/// Lattice spanned by the vectors with Gram matrix G (totally PSD). The
/// returned module has O_F-rank equal to rank(G).
OFLattice span_lattice(const FieldCtx& ctx, const ExactSymMat& G);
/// span_lattice restricted to rank 3; throws RankNot3.
OFLattice span_module(const FieldCtx& ctx, const ExactSymMat& G);

struct ClassifyResult {
  std::vector<OFLattice> lattices;  // distinct fingerprints, in witness order
  std::vector<std::string> fingerprints;
  std::size_t witnesses = 0;
  std::size_t low_rank_witnesses = 0;
  bool saturated = false;  // witness cap hit or some witness spans rank < 3
  FeasStatus status = FeasStatus::Inconclusive;
  SearchStats stats;
};

ClassifyResult classify_search(const FeasibilityProblem& problem, std::size_t witness_cap = 100000,
                               const SearchOptions& opt = {});

}  // namespace kitaoka
