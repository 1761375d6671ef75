#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "kitaoka/lattice.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace kitaoka;
using namespace oracles;

namespace {

QuadRat qr(const FieldCtx& f, long a, long b = 0, long q = 1) { return QuadRat(f, a, b, q); }

OFLattice sum_of_squares(std::int64_t D) {
  const FieldCtx f(D);
  std::vector<std::vector<QuadRat>> c(3, std::vector<QuadRat>(3, qr(f, 0)));
  for (int i = 0; i < 3; ++i) c[i][i] = qr(f, 1);
  return lattice_from_form(f, c, ModuleShape::Free);
}

IntVec unit_vec(std::size_t n, std::size_t i) {
  IntVec v(n, 0);
  v[i] = 1;
  return v;
}

// Gram and omega action in a new Z-basis given by the columns of U (unimodular).
OFLattice rebased(const OFLattice& L, const IntMatrix& U, const IntMatrix& Uinv) {
  const std::size_t k = L.zrank();
  ExactSymMat G(L.ctx(), k);
  for (std::size_t a = 0; a < k; ++a) {
    IntVec ca(k), cb(k);
    for (std::size_t i = 0; i < k; ++i) ca[i] = U[i][a];
    for (std::size_t b = a; b < k; ++b) {
      for (std::size_t i = 0; i < k; ++i) cb[i] = U[i][b];
      G.set(a, b, L.b_value(ca, cb));
    }
  }
  const IntMatrix& W = L.omega_action();
  IntMatrix WU(k, IntVec(k, 0)), out(k, IntVec(k, 0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t l = 0; l < k; ++l) WU[i][j] += W[i][l] * U[l][j];
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t l = 0; l < k; ++l) out[i][j] += Uinv[i][l] * WU[l][j];
  return OFLattice(L.ctx(), G, out);
}


}  // namespace

TEST_CASE("construction from forms") {
  const OFLattice L7 = catalog_get("phi_7");
  CHECK(L7.n() == 3);
  CHECK(L7.zrank() == 6);
  const FieldCtx f7(7);
  CHECK(L7.q_value(IntVec(6, 0)) == qr(f7, 0));
  CHECK(L7.q_value(unit_vec(6, 2)) == qr(f7, 1));

  const OFLattice L10 = catalog_get("phi_10");
  CHECK(L10.q_value(unit_vec(6, 5)) == qr(FieldCtx(10), 10));

  const FieldCtx f13(13);
  const OFLattice L13 = catalog_get("phi24_13");
  IntVec v(6, 0);
  v[0] = 1;
  v[4] = 1;
  CHECK(L13.q_value(v) == qr(f13, 3) + QuadRat::omega(f13));
  CHECK(L13.gram()(0, 0) == qr(f13, 1));
  CHECK(L13.gram()(2, 2) == qr(f13, 1));
  CHECK(L13.gram()(4, 4) == qr(f13, 2));

  const FieldCtx f5(5);
  std::vector<std::vector<QuadRat>> c(2, std::vector<QuadRat>(2, qr(f5, 0)));
  c[0][0] = qr(f5, 1);
  c[1][1] = qr(f5, 1, 0, 2);
  try {
    lattice_from_form(f5, c, ModuleShape::Free);
    FAIL("expected NotIntegral");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotIntegral);
  }
  c[1][1] = qr(f5, -1);
  try {
    lattice_from_form(f5, c, ModuleShape::Free);
    FAIL("expected NotTotallyPD");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotTotallyPD);
  }
  c[1][1] = qr(f5, 1);
  CHECK_THROWS_AS(lattice_from_form(f5, c, ModuleShape::P2InvLast), Error);
}

TEST_CASE("catalog contents") {
  const auto all = catalog_list();
  CHECK(all.size() == 34);
  const std::vector<std::int64_t> Ds = {6, 7, 10, 13, 17, 21, 33, 41, 65, 77};
  const std::vector<std::size_t> counts = {4, 2, 1, 8, 11, 2, 2, 1, 1, 2};
  for (std::size_t i = 0; i < Ds.size(); ++i) CHECK(catalog_for_D(Ds[i]).size() == counts[i]);
  std::set<std::string> names;
  for (const auto& L : all) names.insert(L.label());
  CHECK(names.size() == 34);
  for (const auto& n : proven_universal_names()) CHECK(names.count(n) == 1);
  CHECK(catalog_for_D(41).front().label() == "phi_41");
  try {
    catalog_get("phi_99");
    FAIL("expected UnknownName");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownName);
  }
}

TEST_CASE("lattice invariants on the catalog") {
  auto g = testsupport::seeded("catalog integrality", 101);
  for (const auto& L : catalog_list()) {
    const FieldCtx& f = L.ctx();
    const std::size_t k = L.zrank();
    const QuadRat w = QuadRat::omega(f);
    // W^T G W = omega^2 G
    const IntMatrix& W = L.omega_action();
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        QuadRat s(f, 0);
        for (std::size_t a = 0; a < k; ++a)
          for (std::size_t b = 0; b < k; ++b)
            if (W[a][i] && W[b][j]) s += L.gram()(a, b) * qr(f, static_cast<long>(W[a][i] * W[b][j]));
        REQUIRE(s == w * w * L.gram()(i, j));
      }
    }
    CHECK(conjugate_lattice(conjugate_lattice(L)).gram() == L.gram());
    for (int t = 0; t < 10000; ++t) {
      IntVec v(k);
      for (auto& e : v) e = testsupport::uniform(g, -3, 3);
      const QuadRat q = L.q_value(v);
      bool zero = std::all_of(v.begin(), v.end(), [](auto e) { return e == 0; });
      REQUIRE(q.in_OF());
      REQUIRE((zero || q.is_totally_positive()));
      if (t < 200) {
        IntVec v2 = v;
        for (auto& e : v2) e *= 3;
        REQUIRE(L.q_value(v2) == q * qr(f, 9));
        auto [u, vv] = L.q_fast(v);
        REQUIRE(QuadRat::from_omega(f, Rat(static_cast<long>(u)), Rat(static_cast<long>(vv))) == q);
      }
    }
  }
}

TEST_CASE("integral bilinear values are rational below the discriminant") {
  auto g = testsupport::seeded("small bilinear", 202);
  std::size_t hits = 0;
  for (const auto& L : catalog_list()) {
    const FieldCtx& f = L.ctx();
    const QuadRat quarter(f, f.disc(), 0, 4);
    for (int t = 0; t < 2000; ++t) {
      IntVec v(L.zrank()), u(L.zrank());
      for (auto& e : v) e = testsupport::uniform(g, -1, 1);
      for (auto& e : u) e = testsupport::uniform(g, -1, 1);
      const QuadRat b = L.b_value(u, v);
      if (!b.in_OF()) continue;
      const QuadRat prod = L.q_value(u) * L.q_value(v);
      if (!(quarter - prod).is_totally_positive()) continue;
      ++hits;
      CHECK(b.is_rational());
    }
  }
  CHECK(hits > 100);
}

TEST_CASE("scaling") {
  const OFLattice L = catalog_get("phi_7");
  const FieldCtx f(7);
  const QuadRat eps(f, 8, 3, 1);
  const OFLattice S = scale_by_unit(L, eps);
  IntVec v = unit_vec(6, 0);
  CHECK(S.q_value(v) == eps);
  CHECK_THROWS_AS(scale_by_unit(L, qr(f, 2)), Error);
  CHECK_THROWS_AS(scale_by_unit(L, QuadRat(f, 8, -3, 1) * qr(f, -1)), Error);
  const OFLattice T = scale(L, qr(f, 2));
  CHECK(T.q_value(v) == qr(f, 2));
  CHECK(catalog_get("eps_phi_7").gram() == S.gram());
}

TEST_CASE("representation examples") {
  const OFLattice L7 = catalog_get("phi_7");
  auto w = represents(L7, QuadRat(FieldCtx(7), 1));
  REQUIRE(w);
  CHECK(w->coords == IntVec{0, 0, 0, 1, -2, 0});  // y = sqrt 7, z = -2

  const FieldCtx f13(13);
  const OFLattice L13 = catalog_get("phi24_13");
  const QuadRat target = qr(f13, 3) + QuadRat::omega(f13);
  w = represents(L13, target);
  REQUIRE(w);
  CHECK(L13.q_value(w->coords) == target);

  const OFLattice S5 = sum_of_squares(5);
  CHECK_FALSE(represents(S5, QuadRat::omega(FieldCtx(5))));
  CHECK(represents(S5, qr(FieldCtx(5), 3)));
}

TEST_CASE("box universality controls") {
  BoxReport r = check_box_universal(sum_of_squares(5), 10);
  CHECK(r.count_checked > 0);
  CHECK(r.failures.empty());

  r = check_box_universal(sum_of_squares(2), 8);
  const QuadRat bad(FieldCtx(2), 2, 1, 1);
  CHECK(std::find(r.failures.begin(), r.failures.end(), bad) != r.failures.end());

  r = check_box_universal(catalog_get("phi24_13"), 20);
  CHECK(r.failures.empty());

  const BoxReport a = check_box_universal(catalog_get("phi_41"), 24, 1);
  const BoxReport b = check_box_universal(catalog_get("phi_41"), 24, 4);
  CHECK(a.failures == b.failures);
  CHECK(a.vectors_enumerated == b.vectors_enumerated);
  CHECK(a.count_checked == b.count_checked);

  const BoxReport n = check_box_universal(catalog_get("phi_41"), 24, 1, Rat(10));
  CHECK(n.count_checked < a.count_checked);
}

TEST_CASE("represents agrees with a box oracle") {
  for (const char* name : {"phi_7", "phi24_13", "phi1_17", "phi_41", "phi_10"}) {
    const OFLattice L = catalog_get(name);
    const auto oracle = box_oracle(L, 20);
    std::size_t checked = 0;
    for (const QuadRat& t : enumerate_tp_by_trace(L.ctx(), 20)) {
      auto [u, v] = t.omega_coords();
      auto it = oracle.find({u.get_num(), v.get_num()});
      const auto w = represents(L, t, 2);
      REQUIRE(w.has_value() == (it != oracle.end()));
      if (w) {
        CHECK(w->coords == it->second);
        CHECK(w->value == t);
      }
      ++checked;
    }
    MESSAGE(std::string(name) << ": " << checked << " targets");
  }
}

TEST_CASE("fingerprint is a basis invariant") {
  auto g = testsupport::seeded("fingerprint rebasing", 303);
  for (const char* name : {"phi_7", "phi12_13", "phi_10"}) {
    const OFLattice L = catalog_get(name);
    const std::size_t k = L.zrank();
    for (int rep = 0; rep < 3; ++rep) {
      IntMatrix U(k, IntVec(k, 0)), Ui(k, IntVec(k, 0));
      for (std::size_t i = 0; i < k; ++i) U[i][i] = Ui[i][i] = 1;
      for (int s = 0; s < 6; ++s) {
        const std::size_t i = testsupport::uniform(g, 0, k - 1), j = testsupport::uniform(g, 0, k - 1);
        if (i == j) continue;
        const std::int64_t c = testsupport::uniform(g, -2, 2);
        // column j += c * column i ; inverse row i -= c * row j
        for (std::size_t r = 0; r < k; ++r) U[r][j] += c * U[r][i];
        for (std::size_t r = 0; r < k; ++r) Ui[i][r] -= c * Ui[j][r];
      }
      CHECK(fingerprint(rebased(L, U, Ui)) == fingerprint(L));
    }
  }
  CHECK(fingerprint(catalog_get("phi12_13")) != fingerprint(catalog_get("phi12_13_conj")));
  CHECK(fingerprint(catalog_get("phi_7")) != fingerprint(catalog_get("eps_phi_7")));
}
