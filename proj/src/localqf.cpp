#include "kitaoka/localqf.hpp"

#include "kitaoka/errors.hpp"

namespace kitaoka {

namespace {

// Square class of x is that of num * den, an integer.
Int integer_rep(const Rat& x) { return x.get_num() * x.get_den(); }

int mod8(const Int& u) {
  Int r;
  mpz_fdiv_r_ui(r.get_mpz_t(), u.get_mpz_t(), 8);
  return static_cast<int>(r.get_si());
}

int hilbert_int(const Int& a, const Int& b, std::int64_t p) {
  auto [alpha, u] = split_valuation(a, p);
  auto [beta, v] = split_valuation(b, p);
  if (p == 2) {
    const int u8 = mod8(u);
    const int v8 = mod8(v);
    const int eu = ((u8 - 1) / 2) & 1;
    const int ev = ((v8 - 1) / 2) & 1;
    const int wu = ((u8 * u8 - 1) / 8) & 1;
    const int wv = ((v8 * v8 - 1) / 8) & 1;
    const long e = eu * ev + alpha * wv + beta * wu;
    return (e & 1) ? -1 : 1;
  }
  int s = 1;
  if ((alpha & 1) && (beta & 1) && ((p - 1) / 2) % 2 == 1) s = -s;
  if (beta & 1) s *= legendre(u, p);
  if (alpha & 1) s *= legendre(v, p);
  return s;
}

}  // namespace

int hilbert(const Rat& a, const Rat& b, std::int64_t p) {
  if (sgn(a) == 0 || sgn(b) == 0) throw Error(ErrorCode::OutOfRange, "Hilbert symbol of zero");
  if (!is_prime(p)) throw Error(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
  return hilbert_int(integer_rep(a), integer_rep(b), p);
}

SquareClass square_class_of(const Rat& x, std::int64_t p) {
  if (sgn(x) == 0) throw Error(ErrorCode::OutOfRange, "square class of zero");
  if (!is_prime(p)) throw Error(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
  auto [v, u] = split_valuation(integer_rep(x), p);
  SquareClass c;
  c.p = p;
  c.d = static_cast<int>(v & 1);
  if (p == 2) {
    c.eta = mod8(u);
  } else {
    c.eta = legendre(u, p) == 1 ? 1 : least_nonresidue(p);
  }
  return c;
}

Int det3(const IntMat3& G) {
  return G[0][0] * (G[1][1] * G[2][2] - G[1][2] * G[2][1]) -
         G[0][1] * (G[1][0] * G[2][2] - G[1][2] * G[2][0]) +
         G[0][2] * (G[1][0] * G[2][1] - G[1][1] * G[2][0]);
}

std::array<Rat, 3> diagonalize_ternary(const IntMat3& G) {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (G[i][j] != G[j][i]) throw Error(ErrorCode::InvariantViolation, "Gram is not symmetric");
    }
  }
  const Int d1 = G[0][0];
  const Int d2 = G[0][0] * G[1][1] - G[0][1] * G[1][0];
  const Int d3 = det3(G);
  if (sgn(d1) <= 0 || sgn(d2) <= 0 || sgn(d3) <= 0) {
    throw Error(ErrorCode::NotPositiveDefinite, "ternary Gram is not positive definite");
  }
  return {Rat(d1), make_rat(d2, d1), make_rat(d3, d2)};
}

bool ternary_isotropic_at(const IntMat3& G, std::int64_t p) {
  const auto a = diagonalize_ternary(G);
  return hilbert(-a[0] * a[2], -a[1] * a[2], p) == 1;
}

std::vector<std::int64_t> ternary_anisotropic_primes(const IntMat3& G) {
  diagonalize_ternary(G);
  std::vector<std::int64_t> out;
  for (std::int64_t p : prime_factors(2 * det3(G))) {
    if (!ternary_isotropic_at(G, p)) out.push_back(p);
  }
  if (out.empty()) {
    throw Error(ErrorCode::InvariantViolation, "no anisotropic prime found for a definite form");
  }
  return out;
}

bool ternary_represents_class(const IntMat3& G, const SquareClass& c) {
  const auto a3 = diagonalize_ternary(G);
  const std::int64_t p = c.p;
  const std::array<Rat, 4> a{a3[0], a3[1], a3[2], Rat(-c.representative())};
  const Rat disc = a[0] * a[1] * a[2] * a[3];
  const SquareClass dc = square_class_of(disc, p);
  if (!(dc.d == 0 && dc.eta == 1)) return true;
  int eps = 1;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) eps *= hilbert(a[i], a[j], p);
  }
  return eps == hilbert(Rat(-1), Rat(-1), p);
}

std::vector<SquareClass> all_square_classes(std::int64_t p) {
  std::vector<SquareClass> out;
  for (int d = 0; d < 2; ++d) {
    if (p == 2) {
      for (std::int64_t eta : {1, 3, 5, 7}) out.push_back({p, d, eta});
    } else {
      out.push_back({p, d, 1});
      out.push_back({p, d, least_nonresidue(p)});
    }
  }
  return out;
}

SquareClass missed_square_class(const IntMat3& G, std::int64_t q) {
  if (ternary_isotropic_at(G, q)) {
    throw Error(ErrorCode::IsotropicAtQ, "space is isotropic at " + std::to_string(q));
  }
  const SquareClass missed = square_class_of(Rat(-det3(G)), q);
#ifndef NDEBUG
  for (const auto& c : all_square_classes(q)) {
    if (ternary_represents_class(G, c) == (c == missed)) {
      throw Error(ErrorCode::InvariantViolation, "missed class check failed at " + std::to_string(q));
    }
  }
#endif
  return missed;
}

std::pair<std::int64_t, std::int64_t> choose_D_param(const IntMat3& G) {
  const std::int64_t q = ternary_anisotropic_primes(G).front();
  const SquareClass missed = missed_square_class(G, q);
  const SquareClass c = square_class_of(Rat(missed.representative()) * G[0][0], q);
  return {q, c.representative()};
}

std::string to_string(const SquareClass& c) {
  return "(p=" + std::to_string(c.p) + ", d=" + std::to_string(c.d) +
         ", eta=" + std::to_string(c.eta) + ")";
}

}  // namespace kitaoka
