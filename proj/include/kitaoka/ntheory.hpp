#pragma once

// Elementary rational number theory used across the library: primality,
// valuations, Legendre symbols and least quadratic non-residues.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace kitaoka {

using Int = mpz_class;
using Rat = mpq_class;

/// n/d in canonical form.
inline Rat make_rat(const Int& n, const Int& d) {
  Rat r(n, d);
  r.canonicalize();
  return r;
}

/// Value used for the least non-residue at p = 2. The default convention is 7;
/// 5 is the sharper variant that is valid for every C-type bound.
enum class Gamma2Mode { Seven = 7, Five = 5 };

bool is_prime(std::int64_t n);
bool is_squarefree(std::int64_t n);
std::vector<std::int64_t> primes_up_to(std::int64_t n);

/// Distinct prime factors of |n| in increasing order; n != 0.
std::vector<std::int64_t> prime_factors(const Int& n);

/// Returns (v, u) with n = p^v * u and p not dividing u; n != 0.
std::pair<long, Int> split_valuation(const Int& n, std::int64_t p);
long valuation(const Int& n, std::int64_t p);

/// Legendre symbol (a/p) for odd prime p, in {-1, 0, 1}.
int legendre(const Int& a, std::int64_t p);

/// Least positive quadratic non-residue modulo p. For p = 2 the value is the
/// convention selected by `mode`. Throws NotPrime.
std::int64_t least_nonresidue(std::int64_t p, Gamma2Mode mode = Gamma2Mode::Seven);

/// floor(sqrt(n)) for n >= 0.
Int isqrt(const Int& n);
bool is_square(const Int& n);
bool is_square(const Rat& x);

/// Decimal expansion of x truncated toward -infinity after `digits` places.
std::string to_decimal(const Rat& x, int digits);

}  // namespace kitaoka
