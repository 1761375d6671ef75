#pragma once

// Exact arithmetic in a real quadratic field Q(sqrt D).
//
// Elements are stored as (a + b*sqrt(D)) / q in lowest terms with q > 0. The
// ring of integers is Z[omega] with omega = (1 + sqrt D)/2 when D = 1 mod 4 and
// omega = sqrt D otherwise; helpers convert to and from {1, omega}
// coordinates. Every order decision (signs, floors) is made with integer
// comparisons only.

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kitaoka/errors.hpp"
#include "kitaoka/ntheory.hpp"

namespace kitaoka {

enum class Embedding { First = 1, Second = 2 };

class FieldCtx {
 public:
  /// Throws OutOfRange if D <= 1, NotSquarefree if p^2 | D.
  explicit FieldCtx(std::int64_t D);

  std::int64_t D() const noexcept { return D_; }
  /// Field discriminant: D if D = 1 mod 4, else 4D.
  std::int64_t disc() const noexcept { return disc_; }
  bool omega_is_half() const noexcept { return D_ % 4 == 1; }
  /// omega^2 = c1*omega + c0.
  std::int64_t c0() const noexcept { return c0_; }
  std::int64_t c1() const noexcept { return c1_; }

  friend bool operator==(const FieldCtx& a, const FieldCtx& b) noexcept { return a.D_ == b.D_; }

 private:
  std::int64_t D_;
  std::int64_t disc_;
  std::int64_t c0_;
  std::int64_t c1_;
};

FieldCtx make_field(std::int64_t D);

class QuadRat {
 public:
  QuadRat() = default;  // zero of Q(sqrt 2); mostly a placeholder for containers
  QuadRat(const FieldCtx& ctx, Int a, Int b = 0, Int q = 1);
  QuadRat(std::int64_t D, Int a, Int b, Int q);

  static QuadRat from_rational(const FieldCtx& ctx, const Rat& r);
  /// u + v*omega.
  static QuadRat from_omega(const FieldCtx& ctx, const Rat& u, const Rat& v);
  static QuadRat omega(const FieldCtx& ctx);
  static QuadRat sqrt_disc(const FieldCtx& ctx);

  std::int64_t D() const noexcept { return D_; }
  const Int& a() const noexcept { return a_; }
  const Int& b() const noexcept { return b_; }
  const Int& q() const noexcept { return q_; }

  bool is_zero() const noexcept { return sgn(a_) == 0 && sgn(b_) == 0; }
  bool is_rational() const noexcept { return sgn(b_) == 0; }
  Rat rational_part() const { return make_rat(a_, q_); }
  Rat sqrt_part() const { return make_rat(b_, q_); }

  /// Coordinates (u, v) with x = u + v*omega.
  std::pair<Rat, Rat> omega_coords() const;

  QuadRat conj() const;
  Rat norm() const;
  Rat trace() const;

  int sign(Embedding emb) const;
  Int floor(Embedding emb) const;
  bool is_totally_positive() const;
  /// x is totally nonnegative (both embeddings >= 0).
  bool is_totally_nonnegative() const;
  bool in_OF() const;
  bool in_half_OF() const;

  double to_double(Embedding emb) const;

  QuadRat inverse() const;

  QuadRat& operator+=(const QuadRat& o);
  QuadRat& operator-=(const QuadRat& o);
  QuadRat& operator*=(const QuadRat& o);
  QuadRat& operator/=(const QuadRat& o);
  QuadRat operator-() const;

  friend QuadRat operator+(QuadRat x, const QuadRat& y) { return x += y; }
  friend QuadRat operator-(QuadRat x, const QuadRat& y) { return x -= y; }
  friend QuadRat operator*(QuadRat x, const QuadRat& y) { return x *= y; }
  friend QuadRat operator/(QuadRat x, const QuadRat& y) { return x /= y; }
  friend bool operator==(const QuadRat& x, const QuadRat& y) {
    return x.D_ == y.D_ && x.a_ == y.a_ && x.b_ == y.b_ && x.q_ == y.q_;
  }

  QuadRat scaled(const Rat& r) const;

  /// "a,b,q"
  std::string to_string() const;
  static QuadRat parse(const FieldCtx& ctx, std::string_view text);

 private:
  void normalize();
  void check_same(const QuadRat& o) const;

  std::int64_t D_ = 2;
  Int a_ = 0;
  Int b_ = 0;
  Int q_ = 1;
};

/// Strict weak order by (a, b, q); arbitrary but canonical, used for sorting.
bool canonical_less(const QuadRat& x, const QuadRat& y);

std::ostream& operator<<(std::ostream& os, const QuadRat& x);

Rat norm(const QuadRat& x);
Rat trace(const QuadRat& x);
QuadRat conj(const QuadRat& x);
int sign_embed(const QuadRat& x, Embedding emb);
Int floor_embed(const QuadRat& x, Embedding emb);
bool is_totally_positive(const QuadRat& x);

/// Smallest odd integer >= j*sqrt(D).
Int odd_ceil_sqrt(const FieldCtx& ctx, std::int64_t j);

enum class AlphaVariant { Half, Whole };

/// Half: (ceil_odd(j sqrt D) + j sqrt D)/2, only for D = 1 mod 4 and odd j.
/// Whole: ceil(j sqrt D) + j sqrt D.
QuadRat make_alpha(const FieldCtx& ctx, std::int64_t j, AlphaVariant variant);

/// All totally positive alpha in O_F with trace(alpha) <= T, ordered by
/// (trace, norm, omega-coordinate).
std::vector<QuadRat> enumerate_tp_by_trace(const FieldCtx& ctx, std::int64_t T);

/// Same set intersected with norm(alpha) <= norm_bound.
std::vector<QuadRat> enumerate_tp_by_trace_and_norm(const FieldCtx& ctx, std::int64_t T,
                                                    const Rat& norm_bound);

}  // namespace kitaoka
