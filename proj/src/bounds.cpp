#include "kitaoka/bounds.hpp"

#include <algorithm>

#include "kitaoka/errors.hpp"

namespace kitaoka {

namespace {

constexpr unsigned long kFixedBits = 256;
constexpr int kAtanhTerms = 64;

Int pow2(unsigned long e) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, e);
  return r;
}

Int fdiv(const Int& a, const Int& b) {
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

Int cdiv(const Int& a, const Int& b) {
  Int r;
  mpz_cdiv_q(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

// atanh(z) for 0 <= z <= 1/3, as [lo, hi] scaled by 2^kFixedBits.
std::pair<Int, Int> atanh_fixed(const Rat& z) {
  const Int one = pow2(kFixedBits);
  const Int zlo = fdiv(z.get_num() * one, z.get_den());
  const Int zhi = cdiv(z.get_num() * one, z.get_den());
  const Int z2lo = fdiv(zlo * zlo, one);
  const Int z2hi = cdiv(zhi * zhi, one);
  Int plo = zlo, phi = zhi, slo = 0, shi = 0;
  for (int n = 0; n < kAtanhTerms; ++n) {
    const Int k = 2 * n + 1;
    slo += fdiv(plo, k);
    shi += cdiv(phi, k);
    plo = fdiv(plo * z2lo, one);
    phi = cdiv(phi * z2hi, one);
  }
  // remaining terms are at most z^(2N+1) / ((2N+1)(1 - z^2)) with 1 - z^2 >= 8/9
  shi += cdiv(phi * 9, Int(8 * (2 * kAtanhTerms + 1)));
  return {slo, shi};
}

const std::pair<Int, Int>& log2_fixed() {
  static const std::pair<Int, Int> v = [] {
    auto [lo, hi] = atanh_fixed(Rat(1, 3));
    return std::make_pair(Int(2 * lo), Int(2 * hi));
  }();
  return v;
}

struct Interval {
  Rat lo, hi;
};

Interval mul(const Interval& a, const Interval& b) { return {a.lo * b.lo, a.hi * b.hi}; }

Interval powi(const Interval& a, long e) {
  Interval r{Rat(1), Rat(1)};
  for (long i = 0; i < e; ++i) r = mul(r, a);
  return r;
}

// Enclosure of x^(1/r) for x >= 0.
Interval root_bounds(const Rat& x, unsigned long r, unsigned long bits = 160) {
  Int dpow;
  mpz_pow_ui(dpow.get_mpz_t(), x.get_den_mpz_t(), r - 1);
  const Int v = x.get_num() * dpow * pow2(r * bits);
  Int f;
  const bool exact = mpz_root(f.get_mpz_t(), v.get_mpz_t(), r) != 0;
  const Int den = x.get_den() * pow2(bits);
  return {make_rat(f, den), make_rat(exact ? f : Int(f + 1), den)};
}

Interval root_interval(const Interval& a, unsigned long r) {
  return {root_bounds(a.lo, r).lo, root_bounds(a.hi, r).hi};
}

Rat round_up(const Rat& x, const Int& scale) { return make_rat(cdiv(x.get_num() * scale, x.get_den()), scale); }
Rat round_down(const Rat& x, const Int& scale) {
  return make_rat(fdiv(x.get_num() * scale, x.get_den()), scale);
}

std::int64_t gamma_of(std::int64_t p, Gamma2Mode mode) { return least_nonresidue(p, mode); }

}  // namespace

std::pair<Rat, Rat> log_bounds(const Rat& x) {
  if (sgn(x) <= 0) throw Error(ErrorCode::OutOfRange, "log of a non-positive number");
  long k = static_cast<long>(mpz_sizeinbase(x.get_num_mpz_t(), 2)) -
           static_cast<long>(mpz_sizeinbase(x.get_den_mpz_t(), 2));
  Rat y = x;
  if (k >= 0) {
    y /= Rat(pow2(static_cast<unsigned long>(k)));
  } else {
    y *= Rat(pow2(static_cast<unsigned long>(-k)));
  }
  while (y >= 2) {
    y /= 2;
    ++k;
  }
  while (y < 1) {
    y *= 2;
    --k;
  }
  const Rat z = (y - 1) / (y + 1);
  auto [alo, ahi] = atanh_fixed(z);
  const auto& [l2lo, l2hi] = log2_fixed();
  Int lo = 2 * alo + (k >= 0 ? l2lo : l2hi) * k;
  Int hi = 2 * ahi + (k >= 0 ? l2hi : l2lo) * k;
  const Int one = pow2(kFixedBits);
  return {make_rat(lo, one), make_rat(hi, one)};
}

bool trevino_holds(std::int64_t p) {
  const std::int64_t g = least_nonresidue(p);
  const Rat llo = log_bounds(Rat(p)).first;
  const Rat l4 = llo * llo * llo * llo;
  const Rat g4 = Rat(g) * g * g * g;
  return Rat(2401, 625) * p * l4 > g4;
}

bool trevino_check(std::int64_t limit) {
  for (std::int64_t p : primes_up_to(limit)) {
    if (p == 2) continue;
    if (!trevino_holds(p)) return false;
  }
  return true;
}

CChoice choose_C(const std::array<std::array<Int, 2>, 2>& G2) {
  if (G2[0][1] != G2[1][0]) throw Error(ErrorCode::InvariantViolation, "Gram is not symmetric");
  const Int det = G2[0][0] * G2[1][1] - G2[0][1] * G2[1][0];
  if (sgn(G2[0][0]) <= 0 || sgn(det) <= 0) {
    throw Error(ErrorCode::NotPositiveDefinite, "2x2 Gram is not positive definite");
  }
  bool found = false;
  CChoice best{0, 0};
  for (std::int64_t p : prime_factors(det)) {
    if (p == 2 || valuation(det, p) % 2 == 0) continue;
    const std::int64_t g = least_nonresidue(p);
    if (!found || g < best.C) {
      best = {p, g};
      found = true;
    }
  }
  if (found) return best;
  if (valuation(det, 2) % 2 == 1) return {2, 5};
  return {2, 3};
}

Int table_bound(int m, int rank) {
  static const char* const values[2][5] = {
      {"625", "2025", "50625", "275625", "441000000"},
      {"10000", "32400", "3240000", "2470090000", "63234304000000"},
  };
  if (m < 1 || m > 2 || rank < 3 || rank > 7) {
    throw Error(ErrorCode::OutOfRange, "table covers m in {1,2} and rank 3..7");
  }
  return Int(values[m - 1][rank - 3]);
}

namespace {

Int sqrt_delta_bound(int rank, const Int& m, const Int& C1, const Int& C2, const Int& D1,
                     const Int& D2) {
  const Int m2 = m * m, m3 = m2 * m, m4 = m3 * m;
  switch (rank) {
    case 3: return 5 * C1 * m2;
    case 4: return 9 * C1 * m2;
    case 5: return 45 * C2 * m3;
    case 6: return std::max(Int(45 * C2 * m3), Int(5 * D1 * std::max(C1, C2) * m2));
    case 7:
      return std::max(Int(5 * std::max(C1, D1) * std::max(C2, D2) * m2), Int(200 * C2 * D2 * m4));
    default: throw Error(ErrorCode::OutOfRange, "rank must be 3..7");
  }
}

}  // namespace

Int table_bound_from_ranges(int m, int rank) {
  if (m < 1 || m > 2 || rank < 3 || rank > 7) {
    throw Error(ErrorCode::OutOfRange, "table covers m in {1,2} and rank 3..7");
  }
  // (C, largest admissible D for that C)
  std::vector<std::pair<std::int64_t, std::int64_t>> options;
  for (std::int64_t p : primes_up_to(2 * m * m)) {
    for (std::int64_t C = 2; C <= gamma_of(p, Gamma2Mode::Five); ++C) {
      std::int64_t dmax = 0;
      for (std::int64_t q : primes_up_to(2 * C * m * m * m)) {
        dmax = std::max(dmax, q * gamma_of(q, Gamma2Mode::Seven));
      }
      options.emplace_back(C, dmax);
    }
  }
  Int best = 0;
  for (const auto& [C1, D1] : options) {
    for (const auto& [C2, D2] : options) {
      best = std::max(best, sqrt_delta_bound(rank, m, C1, C2, D1, D2));
    }
  }
  return best * best;
}

ExplicitFormula explicit_formula(int rank) {
  auto K = [](unsigned long a2, unsigned long a3, unsigned long a5) {
    Int r = 1;
    for (unsigned long i = 0; i < a2; ++i) r *= 2;
    for (unsigned long i = 0; i < a3; ++i) r *= 3;
    for (unsigned long i = 0; i < a5; ++i) r *= 5;
    return r;
  };
  switch (rank) {
    case 3: return {K(0, 0, 4), 5, 1, 2, 1};
    case 4: return {K(0, 4, 2), 5, 1, 2, 1};
    case 5: return {K(0, 4, 4), 7, 1, 2, 1};
    case 6: return {K(6, 0, 8), 55, 4, 13, 2};
    case 7: return {K(12, 0, 10), 43, 2, 9, 1};
    default: throw Error(ErrorCode::OutOfRange, "rank must be 3..7");
  }
}

CertifiedBound explicit_bound(std::int64_t m, int rank) {
  if (m < 3) throw Error(ErrorCode::OutOfRange, "explicit formulas need m >= 3");
  const ExplicitFormula f = explicit_formula(rank);
  auto [llo, lhi] = log_bounds(Rat(m));
  Int mp;
  mpz_pow_ui(mp.get_mpz_t(), Int(m).get_mpz_t(), static_cast<unsigned long>(f.a_num));
  const Interval mpart = root_bounds(Rat(mp), static_cast<unsigned long>(f.a_den));
  const Interval lpart =
      root_interval(powi({llo, lhi}, f.b_num), static_cast<unsigned long>(f.b_den));
  Interval v = mul(mul({Rat(f.K), Rat(f.K)}, mpart), lpart);
  // round outward to 15 significant digits
  const long digits = static_cast<long>(mpz_sizeinbase(Int(fdiv(v.lo.get_num(), v.lo.get_den())).get_mpz_t(), 10));
  Int scale = 1;
  for (long i = digits; i < 15; ++i) scale *= 10;
  CertifiedBound out{round_down(v.lo, scale), round_up(v.hi, scale)};
  if ((out.upper - out.lower) > out.lower * Rat(1, 1000000)) {
    throw Error(ErrorCode::InvariantViolation, "explicit bound enclosure too wide");
  }
  return out;
}

void validate(const BoundParams& bp) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvariantViolation, what); };
  if (bp.m < 1) fail("m must be positive");
  if (bp.rank < 3 || bp.rank > 7) fail("rank must be 3..7");
  const std::int64_t pmax = 2 * bp.m * bp.m;
  const std::int64_t ps[2] = {bp.p1, bp.p2};
  const std::int64_t qs[2] = {bp.q1, bp.q2};
  const std::int64_t Cs[2] = {bp.C1, bp.C2};
  const std::int64_t Ds[2] = {bp.D1, bp.D2};
  for (int i = 0; i < 2; ++i) {
    const std::string idx = std::to_string(i + 1);
    if (!is_prime(ps[i]) || ps[i] > pmax) fail("p" + idx + " must be a prime <= 2m^2");
    if (Cs[i] < 2 || Cs[i] > gamma_of(ps[i], bp.gamma2_mode)) fail("C" + idx + " outside [2, gamma_p]");
    if (!is_prime(qs[i]) || qs[i] > 2 * Cs[i] * bp.m * bp.m * bp.m) {
      fail("q" + idx + " must be a prime <= 2 C m^3");
    }
    if (Ds[i] < 1 || Ds[i] > qs[i] * gamma_of(qs[i], Gamma2Mode::Seven)) {
      fail("D" + idx + " outside [1, q gamma_q]");
    }
  }
}

Int corollary_bound(const BoundParams& bp) {
  validate(bp);
  return sqrt_delta_bound(bp.rank, bp.m, bp.C1, bp.C2, bp.D1, bp.D2);
}

bool RankConditions::any() const {
  return std::any_of(alternatives.begin(), alternatives.end(),
                     [](const Alternative& a) { return a.holds; });
}

Thm31Report thm31_conditions(std::int64_t D, std::int64_t m, std::int64_t C1, std::int64_t C2,
                             std::int64_t D1, std::int64_t D2) {
  const FieldCtx f(D);
  const QuadRat w = QuadRat::omega(f);
  const QuadRat s = QuadRat::sqrt_disc(f);
  const QuadRat disc(f, f.disc());
  auto num = [&](std::int64_t v) { return QuadRat(f, v); };
  auto leq = [](const QuadRat& x, const QuadRat& y) { return (y - x).sign(Embedding::First) >= 0; };
  auto qmax = [](const QuadRat& x, const QuadRat& y) {
    return (x - y).sign(Embedding::First) >= 0 ? x : y;
  };
  // t*omega - floor(t*omega')
  auto gap = [&](std::int64_t t) {
    const QuadRat tw = w * num(t);
    return tw - QuadRat(f, tw.floor(Embedding::Second));
  };
  const std::int64_t m2 = m * m, m3 = m2 * m, m4 = m3 * m;

  Thm31Report rep;
  auto t_type = [&](std::int64_t C, std::int64_t t) {
    const bool holds = leq(disc, num(4 * C * m2) * gap(t));
    if (holds) {
      const std::int64_t r = 4 * C * m2 * t + 1;
      if (!(Int(f.disc()) < Int(r) * r)) rep.lemma_consistent = false;
    }
    return holds;
  };
  const QuadRat s2 = s * s, s3 = s2 * s, s4 = s3 * s;
  const bool cubic = leq(s3, num(36 * C2 * m3) * s2 + num(18 * C2 * m3) * s + num(m3));
  const bool quartic = leq(s4, num(192 * C2 * D2 * m4) * s3 + num(144 * C2 * D2 * m4) * s2 +
                                   num(96 * std::max(C2, D2) * m4) * s + num(m4));
  const bool a1 = t_type(C1, 1);
  const bool a2 = t_type(C1, 2);
  const bool a3 = t_type(C1, C2);
  const bool a4c = leq(disc, num(4 * D1 * m2) * qmax(num(C1), gap(C2)));
  const bool a5a = leq(disc, num(4 * C1 * D1 * m2));
  const bool a5b = leq(disc, num(4 * std::max(C1, D1) * m2) * qmax(gap(C2), gap(D2)));

  rep.ranks.push_back({3, {{"1", a1}}});
  rep.ranks.push_back({4, {{"2", a2}}});
  rep.ranks.push_back({5, {{"3a", a3}, {"3b", cubic}}});
  rep.ranks.push_back({6, {{"4a", a3}, {"4b", cubic}, {"4c", a4c}}});
  rep.ranks.push_back({7, {{"5a", a5a}, {"5b", a5b}, {"5c", cubic}, {"5d", quartic}}});
  return rep;
}

}  // namespace kitaoka
