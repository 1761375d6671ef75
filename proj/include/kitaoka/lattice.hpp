#pragma once

// O_F-lattices stored as rank-2n integer modules: a Gram matrix over F on 2n
// abstract generators plus the integer matrix of multiplication by omega.
// Free lattices use generators b_i, omega*b_i; the non-free shape replaces the
// last pair by b_n, theta*b_n with p2^{-1} = Z + Z*theta.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kitaoka/exactmat.hpp"
#include "kitaoka/qfield.hpp"

namespace kitaoka {

using IntVec = std::vector<std::int64_t>;
using IntMatrix = std::vector<IntVec>;

enum class ModuleShape { Free, P2InvLast };

class OFLattice {
 public:
  /// Validates W^2 = c1 W + c0, W^T G = omega G, integrality and total
  /// positive definiteness. Throws InvariantViolation, NotIntegral, NotTotallyPD.
  OFLattice(const FieldCtx& ctx, ExactSymMat gram, IntMatrix omega_action, std::string label = {});

  const FieldCtx& ctx() const noexcept { return ctx_; }
  std::size_t n() const noexcept { return gram_.size() / 2; }
  std::size_t zrank() const noexcept { return gram_.size(); }
  const ExactSymMat& gram() const noexcept { return gram_; }
  const IntMatrix& omega_action() const noexcept { return W_; }
  const std::string& label() const noexcept { return label_; }
  void set_label(std::string s) { label_ = std::move(s); }

  /// 2 * trace(B(g_i, g_j)); x^T M x = 2 trace Q(x).
  const IntMatrix& doubled_trace() const noexcept { return trace2_; }

  QuadRat q_value(const IntVec& x) const;
  QuadRat b_value(const IntVec& x, const IntVec& y) const;

  /// Q(x) in omega coordinates, exact in 128-bit arithmetic.
  std::pair<__int128, __int128> q_fast(const IntVec& x) const;
  __int128 trace2_of(const IntVec& x) const;

 private:
  FieldCtx ctx_;
  ExactSymMat gram_;
  IntMatrix W_;
  std::string label_;
  IntMatrix trace2_;
  // Q(x) = sum_{i<=j} x_i x_j (pu_ij + pv_ij omega)
  IntMatrix pu_, pv_;
};

/// Upper-triangular coefficients c[i][j] (i <= j) of sum c_ij x_i x_j.
OFLattice lattice_from_form(const FieldCtx& ctx, const std::vector<std::vector<QuadRat>>& coeffs,
                            ModuleShape shape, std::string label = {});

OFLattice conjugate_lattice(const OFLattice& L);
/// Throws InvariantViolation unless u is a totally positive unit.
OFLattice scale_by_unit(const OFLattice& L, const QuadRat& u);
/// Q scaled by any totally positive s; integrality is re-checked.
OFLattice scale(const OFLattice& L, const QuadRat& s);

struct RepWitness {
  IntVec coords;
  QuadRat value;
};

/// Lexicographically least witness with positive leading coordinate, or none.
/// Exhaustive: an empty result proves alpha is not represented.
std::optional<RepWitness> represents(const OFLattice& L, const QuadRat& alpha, unsigned jobs = 1);

/// Calls f(x) for every nonzero x whose first nonzero coordinate is positive and
/// with trace Q(x) <= T.
void for_each_short_vector(const OFLattice& L, std::int64_t T,
                           const std::function<void(const IntVec&)>& f);

struct BoxReport {
  std::int64_t trace_bound = 0;
  std::optional<Rat> norm_bound;
  std::size_t count_checked = 0;
  std::size_t vectors_enumerated = 0;
  std::vector<QuadRat> failures;  // in enumeration order of the targets
};

BoxReport check_box_universal(const OFLattice& L, std::int64_t T, unsigned jobs = 1,
                              std::optional<Rat> norm_bound = std::nullopt);

/// Isometry invariant: sorted Q-values (with multiplicity, up to sign) of all
/// vectors up to the smallest trace at which short vectors span the module.
std::string fingerprint(const OFLattice& L);

/// Catalog of the conjectured universal ternary lattices.
struct CatalogEntry {
  std::string name;
  std::int64_t D;
  std::string definition;  // the data-file line it came from
};

const std::vector<CatalogEntry>& catalog_entries();
std::vector<OFLattice> catalog_list();
std::vector<OFLattice> catalog_for_D(std::int64_t D);
OFLattice catalog_get(const std::string& name);
/// Catalog names whose lattices are known universal (class number one).
const std::vector<std::string>& proven_universal_names();

}  // namespace kitaoka
