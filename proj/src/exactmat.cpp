#include "kitaoka/exactmat.hpp"

#include <utility>

namespace kitaoka {

QMatrix::QMatrix(const FieldCtx& ctx, std::size_t n)
    : n_(n), a_(n * n, QuadRat(ctx, 0)) {}

QuadRat det(const QMatrix& m) {
  const std::size_t n = m.size();
  if (n == 0) return QuadRat(2, 1, 0, 1);
  QMatrix a = m;
  QuadRat prev = QuadRat(a(0, 0).D(), 1, 0, 1);
  bool negate = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k).is_zero()) {
      std::size_t r = k + 1;
      while (r < n && a(r, k).is_zero()) ++r;
      if (r == n) return QuadRat(a(0, 0).D(), 0, 0, 1);
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(r, j));
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        a(i, j) = (a(k, k) * a(i, j) - a(i, k) * a(k, j)) / prev;
      }
    }
    prev = a(k, k);
  }
  QuadRat d = a(n - 1, n - 1);
  return negate ? -d : d;
}

ExactSymMat::ExactSymMat(const FieldCtx& ctx, std::size_t k)
    : D_(ctx.D()), k_(k), a_(k * k, QuadRat(ctx, 0)) {}

ExactSymMat ExactSymMat::from_rows(const FieldCtx& ctx,
                                   const std::vector<std::vector<QuadRat>>& rows) {
  ExactSymMat m(ctx, rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) {
      throw Error(ErrorCode::DimensionMismatch, "matrix rows must have length " +
                                                    std::to_string(rows.size()));
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (!(rows[i][j] == rows[j][i])) {
        throw Error(ErrorCode::InvariantViolation, "matrix is not symmetric");
      }
      m.a_[i * m.k_ + j] = rows[i][j];
    }
  }
  return m;
}

ExactSymMat ExactSymMat::diagonal(const FieldCtx& ctx, const std::vector<QuadRat>& d) {
  ExactSymMat m(ctx, d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m.a_[i * m.k_ + i] = d[i];
  return m;
}

ExactSymMat ExactSymMat::identity(const FieldCtx& ctx, std::size_t k) {
  return diagonal(ctx, std::vector<QuadRat>(k, QuadRat(ctx, 1)));
}

void ExactSymMat::set(std::size_t i, std::size_t j, const QuadRat& x) {
  a_[i * k_ + j] = x;
  a_[j * k_ + i] = x;
}

ExactSymMat ExactSymMat::principal(const std::vector<std::size_t>& idx) const {
  ExactSymMat m(FieldCtx(D_), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = 0; j < idx.size(); ++j) m.a_[i * m.k_ + j] = (*this)(idx[i], idx[j]);
  }
  return m;
}

ExactSymMat ExactSymMat::conj() const {
  ExactSymMat m = *this;
  for (auto& x : m.a_) x = x.conj();
  return m;
}

ExactSymMat ExactSymMat::operator+(const ExactSymMat& o) const {
  if (o.k_ != k_) throw Error(ErrorCode::DimensionMismatch, "matrix sizes differ");
  ExactSymMat m = *this;
  for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] += o.a_[i];
  return m;
}

ExactSymMat ExactSymMat::scaled(const QuadRat& s) const {
  ExactSymMat m = *this;
  for (auto& x : m.a_) x *= s;
  return m;
}

QMatrix ExactSymMat::to_general() const {
  QMatrix g(FieldCtx(D_), k_);
  for (std::size_t i = 0; i < k_; ++i) {
    for (std::size_t j = 0; j < k_; ++j) g(i, j) = (*this)(i, j);
  }
  return g;
}

std::vector<std::vector<std::string>> ExactSymMat::to_strings() const {
  std::vector<std::vector<std::string>> out(k_);
  for (std::size_t i = 0; i < k_; ++i) {
    for (std::size_t j = 0; j < k_; ++j) out[i].push_back((*this)(i, j).to_string());
  }
  return out;
}

QuadRat det(const ExactSymMat& m) {
  if (m.size() == 0) return QuadRat(m.D(), 1, 0, 1);
  return det(m.to_general());
}

std::size_t rank(const ExactSymMat& m) {
  const std::size_t n = m.size();
  QMatrix a = m.to_general();
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < n; ++c) {
    std::size_t p = r;
    while (p < n && a(p, c).is_zero()) ++p;
    if (p == n) continue;
    for (std::size_t j = 0; j < n; ++j) std::swap(a(r, j), a(p, j));
    const QuadRat inv = a(r, c).inverse();
    for (std::size_t i = r + 1; i < n; ++i) {
      if (a(i, c).is_zero()) continue;
      const QuadRat f = a(i, c) * inv;
      for (std::size_t j = c; j < n; ++j) a(i, j) -= f * a(r, j);
    }
    ++r;
  }
  return r;
}

bool is_totally_psd_ldl(const ExactSymMat& m) {
  const std::size_t n = m.size();
  QMatrix a = m.to_general();
  std::vector<bool> done(n, false);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t p = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!done[i] && !a(i, i).is_zero()) {
        p = i;
        break;
      }
    }
    if (p == n) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (!done[i] && !done[j] && !a(i, j).is_zero()) return false;
        }
      }
      return true;
    }
    if (!a(p, p).is_totally_positive()) return false;
    done[p] = true;
    const QuadRat inv = a(p, p).inverse();
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i] || a(i, p).is_zero()) continue;
      const QuadRat f = a(i, p) * inv;
      for (std::size_t j = 0; j < n; ++j) {
        if (!done[j]) a(i, j) -= f * a(p, j);
      }
    }
  }
  return true;
}

bool is_totally_psd(const ExactSymMat& m) {
  const std::size_t n = m.size();
  if (n > 8) return is_totally_psd_ldl(m);
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) idx.push_back(i);
    }
    if (!det(m.principal(idx)).is_totally_nonnegative()) return false;
  }
  return true;
}

bool is_totally_pd(const ExactSymMat& m) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < m.size(); ++i) {
    idx.push_back(i);
    if (!det(m.principal(idx)).is_totally_positive()) return false;
  }
  return true;
}

bool psd_extend_check(const ExactSymMat& A, const std::vector<QuadRat>& v, const QuadRat& a) {
  const std::size_t k = A.size();
  if (v.size() != k) throw Error(ErrorCode::DimensionMismatch, "border length mismatch");
  ExactSymMat B(FieldCtx(a.D() == A.D() ? A.D() : a.D()), k + 1);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) B.set(i, j, A(i, j));
    B.set(i, k, v[i]);
  }
  B.set(k, k, a);
  return det(B).is_totally_nonnegative();
}

namespace {

void subsequences(std::size_t n, std::size_t r, std::size_t start, std::vector<std::size_t>& cur,
                  std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == r) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    subsequences(n, r, i + 1, cur, out);
    cur.pop_back();
  }
}

QuadRat submatrix_det(const ExactSymMat& m, const std::vector<std::size_t>& rows,
                      const std::vector<std::size_t>& cols) {
  QMatrix s(FieldCtx(m.D()), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) s(i, j) = m(rows[i], cols[j]);
  }
  if (rows.empty()) return QuadRat(m.D(), 1, 0, 1);
  return det(s);
}

std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& a) {
  std::vector<std::size_t> out;
  std::size_t p = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (p < a.size() && a[p] == i) {
      ++p;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace

QuadRat det_sum_expansion(const ExactSymMat& M, const ExactSymMat& N) {
  if (M.size() != N.size()) throw Error(ErrorCode::DimensionMismatch, "matrix sizes differ");
  const std::size_t n = M.size();
  QuadRat total(M.D(), 0, 0, 1);
  for (std::size_t r = 0; r <= n; ++r) {
    std::vector<std::vector<std::size_t>> xi;
    std::vector<std::size_t> cur;
    subsequences(n, r, 0, cur, xi);
    for (const auto& alpha : xi) {
      std::size_t sa = 0;
      for (auto i : alpha) sa += i + 1;
      const auto alpha_c = complement(n, alpha);
      for (const auto& beta : xi) {
        std::size_t sb = 0;
        for (auto i : beta) sb += i + 1;
        const QuadRat dn = submatrix_det(N, alpha, beta);
        if (dn.is_zero()) continue;
        QuadRat term = submatrix_det(M, alpha_c, complement(n, beta)) * dn;
        if ((sa + sb) % 2 == 1) term = -term;
        total += term;
      }
    }
  }
  return total;
}

QuadRat hadamard_bound(const ExactSymMat& m) {
  QuadRat p(m.D(), 1, 0, 1);
  for (std::size_t i = 0; i < m.size(); ++i) p *= m(i, i);
  return p;
}

bool totally_geq(const QuadRat& x, const QuadRat& y) { return (x - y).is_totally_nonnegative(); }

}  // namespace kitaoka
