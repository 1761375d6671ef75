#pragma once

// p-adic square classes, Hilbert symbols and the local behaviour of ternary
// rational quadratic spaces.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kitaoka/ntheory.hpp"

namespace kitaoka {

struct SquareClass {
  std::int64_t p = 2;
  int d = 0;              // parity of the p-adic valuation
  std::int64_t eta = 1;   // 1 or gamma_p for odd p; 1, 3, 5 or 7 for p = 2

  /// p^d * eta
  std::int64_t representative() const { return (d ? p : 1) * eta; }
  friend bool operator==(const SquareClass&, const SquareClass&) = default;
};

using IntMat3 = std::array<std::array<Int, 3>, 3>;

int hilbert(const Rat& a, const Rat& b, std::int64_t p);
SquareClass square_class_of(const Rat& x, std::int64_t p);

/// Diagonal entries of an orthogonal basis of a positive definite ternary form:
/// d1, d2/d1, d3/d2 from the leading minors. Throws NotPositiveDefinite.
std::array<Rat, 3> diagonalize_ternary(const IntMat3& G);
Int det3(const IntMat3& G);

bool ternary_isotropic_at(const IntMat3& G, std::int64_t p);

/// Primes q | 2 det G where the space is anisotropic, increasing.
std::vector<std::int64_t> ternary_anisotropic_primes(const IntMat3& G);

/// Class of -det G. Throws IsotropicAtQ if the space is isotropic at q.
SquareClass missed_square_class(const IntMat3& G, std::int64_t q);

/// Does the ternary space represent the square class c over Q_q? Decided via
/// isotropy of the quaternary space G + <-c>.
bool ternary_represents_class(const IntMat3& G, const SquareClass& c);

/// All square classes of Q_p^x in canonical order.
std::vector<SquareClass> all_square_classes(std::int64_t p);

/// (q, D) where q is the smallest anisotropic prime of G and D is the small
/// representative of the class of q^d eta * G[0][0], with d, eta the missed class.
std::pair<std::int64_t, std::int64_t> choose_D_param(const IntMat3& G);

std::string to_string(const SquareClass& c);

}  // namespace kitaoka
