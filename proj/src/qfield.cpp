#include "kitaoka/qfield.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace kitaoka {

FieldCtx::FieldCtx(std::int64_t D) : D_(D) {
  if (D <= 1) throw Error(ErrorCode::OutOfRange, "D must exceed 1, got " + std::to_string(D));
  if (D > (std::int64_t{1} << 40)) throw Error(ErrorCode::OutOfRange, "D too large");
  if (!is_squarefree(D)) {
    throw Error(ErrorCode::NotSquarefree, std::to_string(D) + " is not squarefree");
  }
  if (D % 4 == 1) {
    disc_ = D;
    c1_ = 1;
    c0_ = (D - 1) / 4;
  } else {
    disc_ = 4 * D;
    c1_ = 0;
    c0_ = D;
  }
}

FieldCtx make_field(std::int64_t D) { return FieldCtx(D); }

namespace {

QuadRat from_parts(std::int64_t D, const Rat& r, const Rat& s) {
  Int q;
  mpz_lcm(q.get_mpz_t(), r.get_den_mpz_t(), s.get_den_mpz_t());
  Int a = r.get_num() * (q / r.get_den());
  Int b = s.get_num() * (q / s.get_den());
  return QuadRat(D, a, b, q);
}

int sign_of_sum(const Int& a, const Int& c, std::int64_t D) {
  // sign of a + c*sqrt(D)
  const int sa = sgn(a);
  const int sc = sgn(c);
  if (sa >= 0 && sc >= 0) return (sa | sc) ? 1 : 0;
  if (sa <= 0 && sc <= 0) return -1;
  const Int a2 = a * a;
  const Int c2d = c * c * D;
  if (sa > 0) return a2 > c2d ? 1 : -1;
  return c2d > a2 ? 1 : -1;
}

}  // namespace

QuadRat::QuadRat(const FieldCtx& ctx, Int a, Int b, Int q)
    : D_(ctx.D()), a_(std::move(a)), b_(std::move(b)), q_(std::move(q)) {
  normalize();
}

QuadRat::QuadRat(std::int64_t D, Int a, Int b, Int q)
    : D_(D), a_(std::move(a)), b_(std::move(b)), q_(std::move(q)) {
  normalize();
}

void QuadRat::normalize() {
  if (sgn(q_) == 0) throw Error(ErrorCode::OutOfRange, "zero denominator");
  if (sgn(q_) < 0) {
    q_ = -q_;
    a_ = -a_;
    b_ = -b_;
  }
  Int g;
  mpz_gcd(g.get_mpz_t(), a_.get_mpz_t(), b_.get_mpz_t());
  mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), q_.get_mpz_t());
  if (g != 1) {
    mpz_divexact(a_.get_mpz_t(), a_.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(b_.get_mpz_t(), b_.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(q_.get_mpz_t(), q_.get_mpz_t(), g.get_mpz_t());
  }
}

void QuadRat::check_same(const QuadRat& o) const {
  if (D_ != o.D_ && !o.is_rational() && !is_rational()) {
    throw Error(ErrorCode::FieldMismatch,
                "mixing Q(sqrt " + std::to_string(D_) + ") and Q(sqrt " + std::to_string(o.D_) + ")");
  }
}

QuadRat QuadRat::from_rational(const FieldCtx& ctx, const Rat& r) {
  return QuadRat(ctx, r.get_num(), 0, r.get_den());
}

QuadRat QuadRat::from_omega(const FieldCtx& ctx, const Rat& u, const Rat& v) {
  if (ctx.omega_is_half()) return from_parts(ctx.D(), u + v / 2, v / 2);
  return from_parts(ctx.D(), u, v);
}

QuadRat QuadRat::omega(const FieldCtx& ctx) {
  return ctx.omega_is_half() ? QuadRat(ctx, 1, 1, 2) : QuadRat(ctx, 0, 1, 1);
}

QuadRat QuadRat::sqrt_disc(const FieldCtx& ctx) {
  return ctx.omega_is_half() ? QuadRat(ctx, 0, 1, 1) : QuadRat(ctx, 0, 2, 1);
}

std::pair<Rat, Rat> QuadRat::omega_coords() const {
  if (D_ % 4 == 1) return {make_rat(a_ - b_, q_), make_rat(2 * b_, q_)};
  return {make_rat(a_, q_), make_rat(b_, q_)};
}

QuadRat QuadRat::conj() const { return QuadRat(D_, a_, -b_, q_); }

Rat QuadRat::norm() const { return make_rat(a_ * a_ - b_ * b_ * D_, q_ * q_); }

Rat QuadRat::trace() const { return make_rat(2 * a_, q_); }

int QuadRat::sign(Embedding emb) const {
  return sign_of_sum(a_, emb == Embedding::First ? b_ : Int(-b_), D_);
}

Int QuadRat::floor(Embedding emb) const {
  const Int c = emb == Embedding::First ? b_ : Int(-b_);
  Int s = isqrt(c * c * D_);
  if (sgn(c) < 0) s = -s - 1;
  Int out;
  const Int num = a_ + s;
  mpz_fdiv_q(out.get_mpz_t(), num.get_mpz_t(), q_.get_mpz_t());
  return out;
}

bool QuadRat::is_totally_positive() const {
  return sign(Embedding::First) > 0 && sign(Embedding::Second) > 0;
}

bool QuadRat::is_totally_nonnegative() const {
  return sign(Embedding::First) >= 0 && sign(Embedding::Second) >= 0;
}

bool QuadRat::in_OF() const {
  if (D_ % 4 == 1) {
    return mpz_divisible_p(Int(a_ - b_).get_mpz_t(), q_.get_mpz_t()) &&
           mpz_divisible_p(Int(2 * b_).get_mpz_t(), q_.get_mpz_t());
  }
  return q_ == 1;
}

bool QuadRat::in_half_OF() const { return QuadRat(D_, 2 * a_, 2 * b_, q_).in_OF(); }

double QuadRat::to_double(Embedding emb) const {
  const double s = std::sqrt(static_cast<double>(D_));
  const double b = emb == Embedding::First ? b_.get_d() : -b_.get_d();
  return (a_.get_d() + b * s) / q_.get_d();
}

QuadRat QuadRat::inverse() const {
  if (is_zero()) throw Error(ErrorCode::OutOfRange, "division by zero");
  return QuadRat(D_, q_ * a_, -q_ * b_, a_ * a_ - b_ * b_ * D_);
}

QuadRat& QuadRat::operator+=(const QuadRat& o) {
  check_same(o);
  if (is_rational()) D_ = o.D_;
  a_ = a_ * o.q_ + o.a_ * q_;
  b_ = b_ * o.q_ + o.b_ * q_;
  q_ *= o.q_;
  normalize();
  return *this;
}

QuadRat& QuadRat::operator-=(const QuadRat& o) { return *this += -o; }

QuadRat& QuadRat::operator*=(const QuadRat& o) {
  check_same(o);
  if (is_rational()) D_ = o.D_;
  Int a = a_ * o.a_ + b_ * o.b_ * D_;
  Int b = a_ * o.b_ + b_ * o.a_;
  a_ = std::move(a);
  b_ = std::move(b);
  q_ *= o.q_;
  normalize();
  return *this;
}

QuadRat& QuadRat::operator/=(const QuadRat& o) { return *this *= o.inverse(); }

QuadRat QuadRat::operator-() const { return QuadRat(D_, -a_, -b_, q_); }

QuadRat QuadRat::scaled(const Rat& r) const {
  return QuadRat(D_, a_ * r.get_num(), b_ * r.get_num(), q_ * r.get_den());
}

std::string QuadRat::to_string() const {
  return a_.get_str() + "," + b_.get_str() + "," + q_.get_str();
}

QuadRat QuadRat::parse(const FieldCtx& ctx, std::string_view text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == ',') {
      parts.push_back(cur);
      cur.clear();
    } else if (ch != ' ' && ch != '\t' && ch != '\r' && ch != '\n') {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  if (parts.size() != 3) {
    throw Error(ErrorCode::ParseError, "expected a,b,q but got '" + std::string(text) + "'");
  }
  Int v[3];
  for (int i = 0; i < 3; ++i) {
    const std::string& s = parts[static_cast<std::size_t>(i)];
    const std::size_t start = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (s.size() == start ||
        !std::all_of(s.begin() + static_cast<long>(start), s.end(),
                     [](char c) { return c >= '0' && c <= '9'; })) {
      throw Error(ErrorCode::ParseError, "bad integer '" + s + "'");
    }
    v[i].set_str(s[0] == '+' ? s.substr(1) : s, 10);
  }
  if (sgn(v[2]) == 0) throw Error(ErrorCode::ParseError, "zero denominator");
  return QuadRat(ctx, v[0], v[1], v[2]);
}

bool canonical_less(const QuadRat& x, const QuadRat& y) {
  if (x.a() != y.a()) return x.a() < y.a();
  if (x.b() != y.b()) return x.b() < y.b();
  return x.q() < y.q();
}

std::ostream& operator<<(std::ostream& os, const QuadRat& x) { return os << x.to_string(); }

Rat norm(const QuadRat& x) { return x.norm(); }
Rat trace(const QuadRat& x) { return x.trace(); }
QuadRat conj(const QuadRat& x) { return x.conj(); }
int sign_embed(const QuadRat& x, Embedding emb) { return x.sign(emb); }
Int floor_embed(const QuadRat& x, Embedding emb) { return x.floor(emb); }
bool is_totally_positive(const QuadRat& x) { return x.is_totally_positive(); }

Int odd_ceil_sqrt(const FieldCtx& ctx, std::int64_t j) {
  if (j < 1) throw Error(ErrorCode::OutOfRange, "j must be positive");
  Int c = isqrt(Int(j) * j * ctx.D()) + 1;
  if (mpz_even_p(c.get_mpz_t())) c += 1;
  return c;
}

QuadRat make_alpha(const FieldCtx& ctx, std::int64_t j, AlphaVariant variant) {
  if (j < 1) throw Error(ErrorCode::OutOfRange, "j must be positive");
  if (variant == AlphaVariant::Half) {
    if (!ctx.omega_is_half() || j % 2 == 0) {
      throw Error(ErrorCode::VariantMismatch,
                  "half variant needs D = 1 mod 4 and odd j (D=" + std::to_string(ctx.D()) +
                      ", j=" + std::to_string(j) + ")");
    }
    return QuadRat(ctx, odd_ceil_sqrt(ctx, j), j, 2);
  }
  return QuadRat(ctx, isqrt(Int(j) * j * ctx.D()) + 1, j, 1);
}

std::vector<QuadRat> enumerate_tp_by_trace(const FieldCtx& ctx, std::int64_t T) {
  struct Item {
    std::int64_t t;
    Rat n;
    std::int64_t v;
    QuadRat x;
  };
  std::vector<Item> items;
  const std::int64_t disc = ctx.disc();
  for (std::int64_t t = 1; t <= T; ++t) {
    const Int vmax = isqrt(Int(t) * t / disc + 1) + 1;
    const std::int64_t vm = vmax.get_si();
    for (std::int64_t v = -vm; v <= vm; ++v) {
      if (Int(v) * v * disc >= Int(t) * t) continue;
      const std::int64_t twice_u = t - v * ctx.c1();
      if (twice_u % 2 != 0) continue;
      QuadRat x = QuadRat::from_omega(ctx, Rat(twice_u / 2), Rat(v));
      Rat n = x.norm();
      items.push_back({t, std::move(n), v, std::move(x)});
    }
  }
  std::sort(items.begin(), items.end(), [](const Item& l, const Item& r) {
    if (l.t != r.t) return l.t < r.t;
    if (l.n != r.n) return l.n < r.n;
    return l.v < r.v;
  });
  std::vector<QuadRat> out;
  out.reserve(items.size());
  for (auto& it : items) out.push_back(std::move(it.x));
  return out;
}

std::vector<QuadRat> enumerate_tp_by_trace_and_norm(const FieldCtx& ctx, std::int64_t T,
                                                    const Rat& norm_bound) {
  std::vector<QuadRat> all = enumerate_tp_by_trace(ctx, T);
  std::vector<QuadRat> out;
  for (auto& x : all) {
    if (x.norm() <= norm_bound) out.push_back(std::move(x));
  }
  return out;
}

}  // namespace kitaoka
