#include <cmath>
#include <set>
#include <tuple>

#include "doctest.h"
#include "kitaoka/qfield.hpp"
#include "support.hpp"

using namespace kitaoka;

TEST_CASE("make_field") {
  auto f13 = make_field(13);
  CHECK(f13.disc() == 13);
  CHECK(QuadRat::omega(f13) == QuadRat(f13, 1, 1, 2));
  auto f10 = make_field(10);
  CHECK(f10.disc() == 40);
  CHECK(QuadRat::omega(f10) == QuadRat(f10, 0, 1, 1));
  auto code = [](std::int64_t D) {
    try {
      make_field(D);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvariantViolation;
  };
  CHECK(code(12) == ErrorCode::NotSquarefree);
  CHECK(code(1) == ErrorCode::OutOfRange);
  CHECK(code(-5) == ErrorCode::OutOfRange);

  for (std::int64_t D : {2, 3, 5, 6, 7, 13, 17, 29, 41, 77}) {
    auto f = make_field(D);
    auto w = QuadRat::omega(f);
    auto s = w - w.conj();
    CHECK(s * s == QuadRat(f, f.disc()));
    CHECK(w * w == w * QuadRat(f, f.c1()) + QuadRat(f, f.c0()));
  }
}

TEST_CASE("norm trace conj") {
  auto f13 = make_field(13);
  auto f10 = make_field(10);
  auto w = QuadRat::omega(f13);
  CHECK(w.norm() == -3);
  CHECK(w.trace() == 1);
  CHECK(QuadRat(f10, 3, 1).norm() == -1);
  CHECK(w.conj().conj() == w);
}

TEST_CASE("sign and floor") {
  auto f2 = make_field(2);
  auto f13 = make_field(13);
  auto f19 = make_field(19);
  CHECK(sign_embed(QuadRat(f2, 1, 1), Embedding::Second) == -1);
  CHECK(sign_embed(QuadRat(f2, 0), Embedding::First) == 0);
  CHECK(sign_embed(QuadRat(f13, 5, -1, 2), Embedding::First) == 1);
  CHECK(is_totally_positive(QuadRat(f13, 3) + QuadRat::omega(f13)));
  CHECK_FALSE(is_totally_positive(QuadRat(f2, 1, 1)));
  CHECK_FALSE(is_totally_positive(QuadRat(f2, 0)));
  CHECK(floor_embed(QuadRat::omega(f19), Embedding::Second) == -5);
  CHECK(floor_embed(QuadRat::omega(f13), Embedding::First) == 2);
  CHECK(floor_embed(QuadRat(f13, 5), Embedding::Second) == 5);
  CHECK(floor_embed(QuadRat(f13, 5), Embedding::First) == 5);
}

TEST_CASE("alpha") {
  auto f19 = make_field(19);
  auto f29 = make_field(29);
  CHECK(make_alpha(f19, 1, AlphaVariant::Whole) == QuadRat(f19, 5, 1));
  CHECK(make_alpha(f19, 2, AlphaVariant::Whole) == QuadRat(f19, 9, 2));
  CHECK(make_alpha(f29, 1, AlphaVariant::Half) == QuadRat(f29, 7, 1, 2));
  CHECK(odd_ceil_sqrt(f29, 1) == 7);
  CHECK_THROWS_AS(make_alpha(f19, 1, AlphaVariant::Half), Error);
  CHECK_THROWS_AS(make_alpha(f29, 2, AlphaVariant::Half), Error);
  for (std::int64_t D : {29, 37, 53, 101, 19, 11, 14}) {
    auto f = make_field(D);
    for (std::int64_t j = 1; j <= 5; ++j) {
      auto a = make_alpha(f, j, AlphaVariant::Whole);
      CHECK(a.is_totally_positive());
      CHECK(a.in_OF());
      if (f.omega_is_half() && j % 2 == 1) {
        auto h = make_alpha(f, j, AlphaVariant::Half);
        CHECK(h.is_totally_positive());
        CHECK(h.in_OF());
      }
    }
  }
}

TEST_CASE("membership") {
  auto f13 = make_field(13);
  auto f10 = make_field(10);
  CHECK(QuadRat(f13, 1, 1, 2).in_OF());
  CHECK_FALSE(QuadRat(f13, 1, 0, 2).in_OF());
  CHECK(QuadRat(f13, 1, 0, 2).in_half_OF());
  CHECK(QuadRat(f13, 1, 1, 4).in_half_OF());
  CHECK_FALSE(QuadRat(f13, 1, 0, 4).in_half_OF());
  CHECK_FALSE(QuadRat(f10, 1, 1, 2).in_OF());
  CHECK(QuadRat(f10, 1, 1, 2).in_half_OF());
  auto x = QuadRat::from_omega(f13, Rat(3), Rat(-2));
  CHECK(x == QuadRat(f13, 2, -1, 1));
  CHECK(x.omega_coords() == std::make_pair(Rat(3), Rat(-2)));
}

TEST_CASE("parse and format") {
  auto f = make_field(29);
  CHECK(QuadRat::parse(f, "7,1,2") == QuadRat(f, 7, 1, 2));
  CHECK(QuadRat::parse(f, " -4, 2 ,-4") == QuadRat(f, 2, -1, 2));
  CHECK(QuadRat(f, 7, 1, 2).to_string() == "7,1,2");
  CHECK_THROWS_AS(QuadRat::parse(f, "x,y"), Error);
  CHECK_THROWS_AS(QuadRat::parse(f, "1,2,0"), Error);
  CHECK_THROWS_AS(QuadRat::parse(f, "1,2"), Error);
}

TEST_CASE("enumerate_tp_by_trace examples") {
  auto f5 = make_field(5);
  auto f2 = make_field(2);
  auto one = enumerate_tp_by_trace(f5, 2);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == QuadRat(f5, 1));
  CHECK(enumerate_tp_by_trace(f5, 1).empty());
  auto e = enumerate_tp_by_trace(f2, 4);
  REQUIRE(e.size() == 4);
  CHECK(e[0] == QuadRat(f2, 1));
  CHECK(e[1] == QuadRat(f2, 2, -1));
  CHECK(e[2] == QuadRat(f2, 2, 1));
  CHECK(e[3] == QuadRat(f2, 2));
}

TEST_CASE("enumerate_tp_by_trace vs naive box") {
  for (std::int64_t D : {2, 3, 5, 13, 17, 10, 41}) {
    auto f = make_field(D);
    for (std::int64_t T : {1, 7, 20, 50}) {
      std::set<std::tuple<Int, Int, Int>> naive;
      for (std::int64_t u = -2 * T; u <= 2 * T; ++u) {
        for (std::int64_t v = -2 * T; v <= 2 * T; ++v) {
          auto x = QuadRat::from_omega(f, Rat(u), Rat(v));
          if (x.is_totally_positive() && x.trace() <= T) naive.insert({x.a(), x.b(), x.q()});
        }
      }
      auto got = enumerate_tp_by_trace(f, T);
      std::set<std::tuple<Int, Int, Int>> s;
      for (auto& x : got) s.insert({x.a(), x.b(), x.q()});
      CHECK(s.size() == got.size());
      CHECK(s == naive);
      for (std::size_t i = 1; i < got.size(); ++i) {
        auto key = [](const QuadRat& x) { return std::make_tuple(x.trace(), x.norm()); };
        CHECK(key(got[i - 1]) <= key(got[i]));
      }
    }
  }
}

TEST_CASE("field properties") {
  auto g = testsupport::seeded("qfield.properties", 20240611);
  for (std::int64_t D : {2, 5, 13, 19, 29, 10007}) {
    auto f = make_field(D);
    for (int it = 0; it < 1000; ++it) {
      auto x = testsupport::random_quad(g, f, 1000000, 50);
      auto y = testsupport::random_quad(g, f, 1000000, 50);
      CHECK(x.conj().conj() == x);
      CHECK((x * x.conj()).rational_part() == x.norm());
      CHECK((x * y).norm() == x.norm() * y.norm());
      CHECK((x + y).trace() == x.trace() + y.trace());
      if (!y.is_zero()) CHECK((x / y) * y == x);
      CHECK((!x.in_OF() || x.in_half_OF()));
    }
  }
}

TEST_CASE("floor and sign properties") {
  auto g = testsupport::seeded("qfield.floor", 7);
  mpf_set_default_prec(256);
  for (std::int64_t D : {2, 3, 5, 13, 19, 65, 9973}) {
    auto f = make_field(D);
    mpf_class s(D, 256);
    s = sqrt(s);
    for (int it = 0; it < 1000; ++it) {
      auto x = testsupport::random_quad(g, f, 1000000, 97);
      for (auto emb : {Embedding::First, Embedding::Second}) {
        Int fl = floor_embed(x, emb);
        CHECK((x - QuadRat(f, fl)).sign(emb) >= 0);
        CHECK((x - QuadRat(f, fl + 1)).sign(emb) < 0);
        mpf_class b(emb == Embedding::First ? x.b() : Int(-x.b()), 256);
        mpf_class val = (mpf_class(x.a(), 256) + b * s) / mpf_class(x.q(), 256);
        mpf_class err = abs(b) / mpf_class(x.q(), 256);
        mpf_div_2exp(err.get_mpf_t(), err.get_mpf_t(), 200);
        if (val - err > 0) CHECK(x.sign(emb) == 1);
        if (val + err < 0) CHECK(x.sign(emb) == -1);
      }
    }
  }
}
