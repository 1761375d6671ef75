#include <mpfr.h>

#include <cmath>
#include <vector>

#include "doctest.h"
#include "kitaoka/bounds.hpp"
#include "support.hpp"

using namespace kitaoka;

namespace {

struct Mpfr {
  mpfr_t v;
  Mpfr() { mpfr_init2(v, 400); }
  ~Mpfr() { mpfr_clear(v); }
  Mpfr(const Mpfr&) = delete;
};

Rat to_rat(const mpfr_t x) {
  mpz_t m;
  mpz_init(m);
  const long e = mpfr_get_z_2exp(m, x);
  Rat r{Int(m)};
  mpz_clear(m);
  if (e >= 0) {
    Int p;
    mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(e));
    return r * p;
  }
  Int p;
  mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(-e));
  return make_rat(r.get_num(), p);
}

// K m^(a) (log m)^(b) in 400-bit MPFR.
Rat mpfr_formula(long m, int rank) {
  const ExplicitFormula f = explicit_formula(rank);
  Mpfr lg, t, out;
  mpfr_set_si(lg.v, m, MPFR_RNDN);
  mpfr_log(lg.v, lg.v, MPFR_RNDN);
  mpfr_set_si(t.v, f.b_num, MPFR_RNDN);
  mpfr_div_si(t.v, t.v, f.b_den, MPFR_RNDN);
  mpfr_pow(lg.v, lg.v, t.v, MPFR_RNDN);
  Mpfr base, ex;
  mpfr_set_si(base.v, m, MPFR_RNDN);
  mpfr_set_si(ex.v, f.a_num, MPFR_RNDN);
  mpfr_div_si(ex.v, ex.v, f.a_den, MPFR_RNDN);
  mpfr_pow(out.v, base.v, ex.v, MPFR_RNDN);
  mpfr_mul(out.v, out.v, lg.v, MPFR_RNDN);
  mpfr_mul_z(out.v, out.v, f.K.get_mpz_t(), MPFR_RNDN);
  return to_rat(out.v);
}

std::array<std::array<Int, 2>, 2> g2(long a, long b, long c) { return {{{Int(a), Int(b)}, {Int(b), Int(c)}}}; }

}  // namespace

TEST_CASE("least non-residue examples and property") {
  CHECK(least_nonresidue(3) == 2);
  CHECK(least_nonresidue(71) == 7);
  CHECK(least_nonresidue(7) == 3);
  CHECK(least_nonresidue(2) == 7);
  CHECK(least_nonresidue(2, Gamma2Mode::Five) == 5);
  for (std::int64_t p : primes_up_to(100000)) {
    if (p == 2) continue;
    const std::int64_t g = least_nonresidue(p);
    REQUIRE(is_prime(g));
    REQUIRE(legendre(Int(g), p) == -1);
    for (std::int64_t a = 2; a < g; ++a) REQUIRE(legendre(Int(a), p) == 1);
  }
}

TEST_CASE("log enclosure against mpfr") {
  auto g = testsupport::seeded("log_bounds", 17);
  std::vector<Rat> xs = {Rat(1), Rat(2), Rat(3), make_rat(1, 7), make_rat(1000003, 999), Rat(Int("123456789012345678901"))};
  for (int i = 0; i < 200; ++i) {
    xs.push_back(make_rat(testsupport::uniform(g, 1, 1000000), testsupport::uniform(g, 1, 1000000)));
  }
  Int w;
  mpz_ui_pow_ui(w.get_mpz_t(), 2, 180);
  for (const Rat& x : xs) {
    auto [lo, hi] = log_bounds(x);
    Mpfr v;
    mpfr_set_q(v.v, x.get_mpq_t(), MPFR_RNDN);
    mpfr_log(v.v, v.v, MPFR_RNDN);
    const Rat ref = to_rat(v.v);
    const Rat eps = make_rat(1, w) / 1024;
    CHECK(lo <= ref + eps);
    CHECK(ref - eps <= hi);
    CHECK(hi - lo < make_rat(1, w));
  }
  CHECK_THROWS_AS(log_bounds(Rat(0)), Error);
}

TEST_CASE("trevino inequality") {
  CHECK(trevino_check(3));
  CHECK(trevino_check(4));
  CHECK(trevino_holds(3));
  CHECK(trevino_check(100000));
}

TEST_CASE("choose_C cases") {
  CChoice c = choose_C(g2(1, 0, 1));
  CHECK(c.C == 3);
  CHECK(c.p == 2);
  c = choose_C(g2(1, 0, 2));
  CHECK(c.C == 5);
  CHECK(c.p == 2);
  c = choose_C(g2(1, 0, 3));
  CHECK(c.C == 2);
  CHECK(c.p == 3);
  c = choose_C(g2(2, 0, 9));
  CHECK(c.p == 2);
  CHECK(c.C == 5);
  c = choose_C(g2(1, 0, 7 * 3));
  CHECK(c.p == 3);
  CHECK_THROWS_AS(choose_C(g2(1, 1, 1)), Error);
  auto g = testsupport::seeded("choose_C", 23);
  for (int i = 0; i < 500; ++i) {
    const long a = testsupport::uniform(g, 1, 40), c2 = testsupport::uniform(g, 1, 40);
    const long b = testsupport::uniform(g, -20, 20);
    if (a * c2 - b * b <= 0) continue;
    const CChoice r = choose_C(g2(a, b, c2));
    CHECK(r.C >= 2);
    CHECK(r.C <= least_nonresidue(r.p, Gamma2Mode::Five));
    CHECK((r.p == 2 || (a * c2 - b * b) % r.p == 0));
  }
}

TEST_CASE("table constants") {
  CHECK(table_bound(1, 3) == 625);
  CHECK(table_bound(1, 7) == 441000000);
  CHECK(table_bound(2, 7) == Int("63234304000000"));
  CHECK(table_bound(1, 6) == Int(3 * 25 * 7) * (3 * 25 * 7));
  for (int m = 1; m <= 2; ++m) {
    for (int r = 3; r <= 7; ++r) CHECK(table_bound(m, r) == table_bound_from_ranges(m, r));
  }
  CHECK_THROWS_AS(table_bound(3, 3), Error);
  CHECK_THROWS_AS(table_bound(1, 8), Error);
}

TEST_CASE("explicit bounds against mpfr") {
  for (long m : {3L, 4L, 5L, 10L, 97L}) {
    for (int r = 3; r <= 7; ++r) {
      const CertifiedBound b = explicit_bound(m, r);
      const Rat ref = mpfr_formula(m, r);
      const Rat slack = ref * make_rat(1, Int("1000000000000"));
      CHECK(b.upper >= ref - slack);
      CHECK(b.lower <= ref + slack);
      CHECK((b.upper - ref) <= ref * make_rat(1, 1000000));
    }
  }
  const double v = explicit_bound(3, 3).upper.get_d();
  CHECK(std::abs(v - 183305.38) < 0.01);
  for (int r = 3; r <= 7; ++r) {
    Rat prev = explicit_bound(3, r).upper;
    for (long m = 4; m <= 40; ++m) {
      const Rat cur = explicit_bound(m, r).upper;
      CHECK(cur > prev);
      prev = cur;
    }
  }
  CHECK_THROWS_AS(explicit_bound(2, 3), Error);
}

TEST_CASE("corollary bound and parameter ranges") {
  BoundParams bp;
  bp.rank = 3;
  bp.C1 = 5;
  CHECK(corollary_bound(bp) == 25);
  bp = {};
  bp.rank = 5;
  bp.C2 = 3;
  CHECK(corollary_bound(bp) == 135);
  bp = {};
  bp.rank = 4;
  bp.C1 = 2;
  CHECK(corollary_bound(bp) == 18);
  bp = {};
  bp.C1 = 8;
  CHECK_THROWS_AS(corollary_bound(bp), Error);
  bp = {};
  bp.gamma2_mode = Gamma2Mode::Five;
  bp.C1 = 6;
  CHECK_THROWS_AS(validate(bp), Error);
  bp = {};
  bp.p1 = 3;
  CHECK_THROWS_AS(validate(bp), Error);
  bp = {};
  bp.q1 = 5;
  CHECK_THROWS_AS(validate(bp), Error);
  bp = {};
  bp.q1 = 3;
  bp.D1 = 6;
  CHECK_NOTHROW(validate(bp));
  bp.D1 = 7;
  CHECK_THROWS_AS(validate(bp), Error);
}

TEST_CASE("inequality alternatives") {
  Thm31Report r = thm31_conditions(5, 1, 2, 2, 1, 1);
  REQUIRE(r.ranks.size() == 5);
  CHECK(r.ranks[0].rank == 3);
  CHECK(r.ranks[0].alternatives[0].label == "1");
  CHECK(r.ranks[0].alternatives[0].holds);
  CHECK(r.lemma_consistent);

  r = thm31_conditions(1009, 1, 2, 2, 1, 1);
  CHECK_FALSE(r.ranks[0].alternatives[0].holds);
  CHECK(r.lemma_consistent);

  for (std::int64_t D = 2; D < 3000; ++D) {
    if (!is_squarefree(D)) continue;
    const Thm31Report rep = thm31_conditions(D, 1, 2, 3, 1, 2);
    REQUIRE(rep.lemma_consistent);
    const FieldCtx f(D);
    // independent float check of (1): Delta <= 8 (omega - floor(omega'))
    const double s = std::sqrt(static_cast<double>(D));
    const double w = f.omega_is_half() ? (1 + s) / 2 : s;
    const double wc = f.omega_is_half() ? (1 - s) / 2 : -s;
    const double rhs = 8 * (w - std::floor(wc));
    if (std::abs(rhs - f.disc()) > 1e-6) CHECK(rep.ranks[0].alternatives[0].holds == (f.disc() <= rhs));
    if (rep.ranks[0].alternatives[0].holds) CHECK(std::sqrt(double(f.disc())) < 9);
  }
}
