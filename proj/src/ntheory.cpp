#include "kitaoka/ntheory.hpp"

#include <string>

#include "kitaoka/errors.hpp"

namespace kitaoka {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotSquarefree: return "NotSquarefree";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::VariantMismatch: return "VariantMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotPrime: return "NotPrime";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::IsotropicAtQ: return "IsotropicAtQ";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::NotIntegral: return "NotIntegral";
    case ErrorCode::NotTotallyPD: return "NotTotallyPD";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::AdmissibleD: return "AdmissibleD";
    case ErrorCode::RankNot3: return "RankNot3";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::FieldMismatch: return "FieldMismatch";
  }
  return "Unknown";
}

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0 || n % 3 == 0) return false;
  for (std::int64_t d = 5; d * d <= n; d += 6) {
    if (n % d == 0 || n % (d + 2) == 0) return false;
  }
  return true;
}

bool is_squarefree(std::int64_t n) {
  if (n < 1) return false;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % (d * d) == 0) return false;
  }
  return true;
}

std::vector<std::int64_t> primes_up_to(std::int64_t n) {
  std::vector<std::int64_t> out;
  if (n < 2) return out;
  std::vector<bool> composite(static_cast<std::size_t>(n) + 1, false);
  for (std::int64_t i = 2; i <= n; ++i) {
    if (composite[static_cast<std::size_t>(i)]) continue;
    out.push_back(i);
    for (std::int64_t j = i * i; j <= n; j += i) composite[static_cast<std::size_t>(j)] = true;
  }
  return out;
}

std::vector<std::int64_t> prime_factors(const Int& n) {
  Int m = abs(n);
  std::vector<std::int64_t> out;
  for (std::int64_t d = 2; Int(d) * d <= m; d += (d == 2 ? 1 : 2)) {
    if (mpz_divisible_ui_p(m.get_mpz_t(), static_cast<unsigned long>(d))) {
      out.push_back(d);
      while (mpz_divisible_ui_p(m.get_mpz_t(), static_cast<unsigned long>(d))) m /= d;
    }
  }
  if (m > 1) {
    if (!m.fits_slong_p()) {
      throw Error(ErrorCode::OutOfRange, "prime factor exceeds 64-bit range");
    }
    out.push_back(m.get_si());
  }
  return out;
}

std::pair<long, Int> split_valuation(const Int& n, std::int64_t p) {
  Int u = n;
  long v = 0;
  const auto up = static_cast<unsigned long>(p);
  while (mpz_divisible_ui_p(u.get_mpz_t(), up)) {
    mpz_divexact_ui(u.get_mpz_t(), u.get_mpz_t(), up);
    ++v;
  }
  return {v, u};
}

long valuation(const Int& n, std::int64_t p) { return split_valuation(n, p).first; }

int legendre(const Int& a, std::int64_t p) {
  const Int pp(static_cast<long>(p));
  return mpz_legendre(Int(a % pp + pp).get_mpz_t(), pp.get_mpz_t());
}

std::int64_t least_nonresidue(std::int64_t p, Gamma2Mode mode) {
  if (!is_prime(p)) throw Error(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
  if (p == 2) return static_cast<std::int64_t>(mode);
  for (std::int64_t g = 2;; ++g) {
    if (legendre(Int(static_cast<long>(g)), p) == -1) return g;
  }
}

Int isqrt(const Int& n) {
  Int r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

bool is_square(const Int& n) { return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0; }

bool is_square(const Rat& x) {
  return x >= 0 && is_square(Int(x.get_num())) && is_square(Int(x.get_den()));
}

std::string to_decimal(const Rat& x, int digits) {
  Int scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  Int n = x.get_num() * scale;
  Int f;
  mpz_fdiv_q(f.get_mpz_t(), n.get_mpz_t(), x.get_den_mpz_t());
  std::string s = Int(abs(f)).get_str();
  if (digits > 0) {
    if (s.size() <= static_cast<std::size_t>(digits)) {
      s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
    }
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  }
  return sgn(f) < 0 ? "-" + s : s;
}

}  // namespace kitaoka
