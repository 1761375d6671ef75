#pragma once

// Symmetric matrices over Q(sqrt D) with exact determinant, rank and total
// (semi)definiteness tests.

#include <cstddef>
#include <string>
#include <vector>

#include "kitaoka/qfield.hpp"

namespace kitaoka {

/// Dense square matrix over Q(sqrt D), row-major. Used for the non-symmetric
/// submatrices that show up in the determinant-sum expansion.
class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(const FieldCtx& ctx, std::size_t n);

  std::size_t size() const noexcept { return n_; }
  QuadRat& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const QuadRat& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<QuadRat> a_;
};

QuadRat det(const QMatrix& m);

class ExactSymMat {
 public:
  ExactSymMat() = default;
  ExactSymMat(const FieldCtx& ctx, std::size_t k);
  /// Throws DimensionMismatch for ragged input, InvariantViolation if not symmetric.
  static ExactSymMat from_rows(const FieldCtx& ctx, const std::vector<std::vector<QuadRat>>& rows);
  static ExactSymMat diagonal(const FieldCtx& ctx, const std::vector<QuadRat>& d);
  static ExactSymMat identity(const FieldCtx& ctx, std::size_t k);

  std::size_t size() const noexcept { return k_; }
  std::int64_t D() const noexcept { return D_; }
  const QuadRat& operator()(std::size_t i, std::size_t j) const { return a_[i * k_ + j]; }
  /// Sets both (i,j) and (j,i).
  void set(std::size_t i, std::size_t j, const QuadRat& x);

  ExactSymMat principal(const std::vector<std::size_t>& idx) const;
  ExactSymMat conj() const;
  ExactSymMat operator+(const ExactSymMat& o) const;
  ExactSymMat scaled(const QuadRat& s) const;
  QMatrix to_general() const;

  friend bool operator==(const ExactSymMat& x, const ExactSymMat& y) {
    return x.k_ == y.k_ && x.a_ == y.a_;
  }

  /// Row-major "a,b,q" strings.
  std::vector<std::vector<std::string>> to_strings() const;

 private:
  std::int64_t D_ = 2;
  std::size_t k_ = 0;
  std::vector<QuadRat> a_;
};

QuadRat det(const ExactSymMat& m);
std::size_t rank(const ExactSymMat& m);

/// Every principal minor is totally nonnegative (k <= 8), or an exact LDL^T
/// with nonzero pivots has totally positive pivots and a vanishing remainder.
bool is_totally_psd(const ExactSymMat& m);
/// Symmetric pivoting LDL^T: every nonzero pivot is totally positive and the
/// remainder vanishes. Equivalent to is_totally_psd.
bool is_totally_psd_ldl(const ExactSymMat& m);
/// Every leading principal minor is totally positive.
bool is_totally_pd(const ExactSymMat& m);

/// Determinant of [[A, v], [v^T, a]] is totally nonnegative. For totally PD A
/// this is equivalent to the bordered matrix being totally PSD.
bool psd_extend_check(const ExactSymMat& A, const std::vector<QuadRat>& v, const QuadRat& a);

/// det(M + N) as the double sum over index subsequences of complementary
/// minors of M and N.
QuadRat det_sum_expansion(const ExactSymMat& M, const ExactSymMat& N);

/// Product of the diagonal.
QuadRat hadamard_bound(const ExactSymMat& m);

/// x >= y in both embeddings.
bool totally_geq(const QuadRat& x, const QuadRat& y);

}  // namespace kitaoka
