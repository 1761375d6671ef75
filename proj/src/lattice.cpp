#include "kitaoka/lattice.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "kitaoka/errors.hpp"
#include "kitaoka_catalog_data.hpp"

namespace kitaoka {

namespace {

std::int64_t to_i64(const Rat& r, const char* what) {
  if (r.get_den() != 1 || !r.get_num().fits_slong_p()) {
    throw Error(ErrorCode::NotIntegral, std::string(what) + " is not a small integer");
  }
  return r.get_num().get_si();
}

std::pair<std::int64_t, std::int64_t> omega_ints(const QuadRat& x, const char* what) {
  auto [u, v] = x.omega_coords();
  return {to_i64(u, what), to_i64(v, what)};
}

bool leading_minors_positive(const IntMatrix& M) {
  const std::size_t n = M.size();
  std::vector<std::vector<Int>> a(n, std::vector<Int>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = Int(static_cast<long>(M[i][j]));
  }
  Int prev = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (sgn(a[k][k]) <= 0) return false;
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / prev;
      }
    }
    prev = a[k][k];
  }
  return true;
}

// Fincke-Pohst over the doubled trace form. Coordinates are enumerated with
// x_0 outermost; the first nonzero coordinate is kept positive.
class ShortVectors {
 public:
  ShortVectors(const OFLattice& L, std::int64_t T) : L_(L), N_(L.zrank()), bound2_(2 * T) {
    const IntMatrix& M = L.doubled_trace();
    // reversed order so that the innermost loop runs over the last coordinate
    q_.assign(N_, std::vector<double>(N_, 0.0));
    for (std::size_t i = 0; i < N_; ++i) {
      for (std::size_t j = 0; j < N_; ++j) {
        q_[i][j] = static_cast<double>(M[N_ - 1 - i][N_ - 1 - j]);
      }
    }
    for (std::size_t i = 0; i < N_; ++i) {
      for (std::size_t j = i + 1; j < N_; ++j) {
        q_[j][i] = q_[i][j];
        q_[i][j] /= q_[i][i];
      }
      for (std::size_t k = i + 1; k < N_; ++k) {
        for (std::size_t l = k; l < N_; ++l) q_[k][l] -= q_[k][i] * q_[i][l];
      }
    }
  }

  std::int64_t outer_max() const {
    const double B = widened();
    return static_cast<std::int64_t>(std::floor(std::sqrt(B / q_[N_ - 1][N_ - 1]) + 1e-9));
  }

  // Visits all vectors with leading coordinate x0 (x0 >= 0).
  template <class F>
  void run_unit(std::int64_t x0, F&& f) const {
    std::vector<std::int64_t> y(N_, 0);
    IntVec x(N_, 0);
    const double B = widened();
    const std::size_t top = N_ - 1;
    y[top] = x0;
    const double t = static_cast<double>(x0);
    const double rem = B - q_[top][top] * t * t;
    if (rem < -1e-9 * B - 1e-9) return;
    if (N_ == 1) {
      emit(y, x, f);
      return;
    }
    rec(top - 1, rem, x0 == 0, y, x, f);
  }

 private:
  double widened() const { return static_cast<double>(bound2_) * (1 + 1e-9) + 1e-6; }

  template <class F>
  void rec(std::size_t i, double rem, bool all_zero, std::vector<std::int64_t>& y, IntVec& x,
           F& f) const {
    double c = 0;
    for (std::size_t j = i + 1; j < N_; ++j) c -= q_[i][j] * static_cast<double>(y[j]);
    const double r = std::sqrt(std::max(0.0, rem / q_[i][i])) + 1e-7;
    std::int64_t lo = static_cast<std::int64_t>(std::ceil(c - r));
    const std::int64_t hi = static_cast<std::int64_t>(std::floor(c + r));
    if (all_zero) lo = std::max<std::int64_t>(lo, 0);
    for (std::int64_t v = lo; v <= hi; ++v) {
      const double d = static_cast<double>(v) - c;
      const double rem2 = rem - q_[i][i] * d * d;
      if (rem2 < -1e-7 * (1 + rem)) continue;
      y[i] = v;
      if (i == 0) {
        emit(y, x, f);
      } else {
        rec(i - 1, rem2, all_zero && v == 0, y, x, f);
      }
    }
    y[i] = 0;
  }

  template <class F>
  void emit(const std::vector<std::int64_t>& y, IntVec& x, F& f) const {
    bool nonzero = false;
    for (std::size_t k = 0; k < N_; ++k) {
      x[k] = y[N_ - 1 - k];
      nonzero = nonzero || x[k] != 0;
    }
    if (!nonzero) return;
    if (L_.trace2_of(x) > bound2_) return;
    f(static_cast<const IntVec&>(x));
  }

  const OFLattice& L_;
  std::size_t N_;
  std::int64_t bound2_;
  std::vector<std::vector<double>> q_;
};

// Runs one unit per leading-coordinate value on `jobs` threads. make() builds a
// per-unit sink; results are returned in unit order.
template <class Sink, class Make>
std::vector<Sink> run_units(const ShortVectors& sv, unsigned jobs, Make make) {
  const std::int64_t units = sv.outer_max() + 1;
  std::vector<Sink> out(static_cast<std::size_t>(units));
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (std::int64_t u = next++; u < units; u = next++) {
      Sink s = make();
      sv.run_unit(u, [&](const IntVec& x) { s(x); });
      out[static_cast<std::size_t>(u)] = std::move(s);
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(units)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace

OFLattice::OFLattice(const FieldCtx& ctx, ExactSymMat gram, IntMatrix omega_action,
                     std::string label)
    : ctx_(ctx), gram_(std::move(gram)), W_(std::move(omega_action)), label_(std::move(label)) {
  const std::size_t k = gram_.size();
  if (k == 0 || k % 2 != 0) throw Error(ErrorCode::DimensionMismatch, "lattice needs 2n generators");
  if (gram_.D() != ctx_.D()) throw Error(ErrorCode::FieldMismatch, "Gram matrix over a different field");
  if (W_.size() != k) throw Error(ErrorCode::DimensionMismatch, "omega action has wrong size");
  for (const auto& row : W_) {
    if (row.size() != k) throw Error(ErrorCode::DimensionMismatch, "omega action has wrong size");
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      std::int64_t s = 0;
      for (std::size_t l = 0; l < k; ++l) s += W_[i][l] * W_[l][j];
      const std::int64_t want = ctx_.c1() * W_[i][j] + (i == j ? ctx_.c0() : 0);
      if (s != want) throw Error(ErrorCode::InvariantViolation, "omega action violates its minimal polynomial");
    }
  }
  const QuadRat w = QuadRat::omega(ctx_);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      QuadRat s(ctx_, 0);
      for (std::size_t l = 0; l < k; ++l) {
        if (W_[l][i] != 0) s += gram_(l, j) * QuadRat(ctx_, static_cast<long>(W_[l][i]));
      }
      if (!(s == w * gram_(i, j))) {
        throw Error(ErrorCode::InvariantViolation, "Gram matrix is not F-bilinear under the omega action");
      }
    }
  }
  pu_.assign(k, IntVec(k, 0));
  pv_.assign(k, IntVec(k, 0));
  trace2_.assign(k, IntVec(k, 0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      const QuadRat p = i == j ? gram_(i, i) : gram_(i, j) * QuadRat(ctx_, 2);
      if (!p.in_OF()) {
        throw Error(ErrorCode::NotIntegral, "Q takes values outside O_F on generators " +
                                                std::to_string(i) + ", " + std::to_string(j));
      }
      std::tie(pu_[i][j], pv_[i][j]) = omega_ints(p, "Gram entry");
      trace2_[i][j] = trace2_[j][i] = to_i64(gram_(i, j).trace() * 2, "trace entry");
    }
  }
  if (!leading_minors_positive(trace2_)) {
    throw Error(ErrorCode::NotTotallyPD, "trace form is not positive definite");
  }
}

QuadRat OFLattice::q_value(const IntVec& x) const { return b_value(x, x); }

QuadRat OFLattice::b_value(const IntVec& x, const IntVec& y) const {
  if (x.size() != zrank() || y.size() != zrank()) {
    throw Error(ErrorCode::DimensionMismatch, "coordinate vector has wrong length");
  }
  QuadRat s(ctx_, 0);
  for (std::size_t i = 0; i < zrank(); ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < zrank(); ++j) {
      if (y[j] == 0) continue;
      s += gram_(i, j) * QuadRat(ctx_, Int(static_cast<long>(x[i])) * static_cast<long>(y[j]));
    }
  }
  return s;
}

std::pair<__int128, __int128> OFLattice::q_fast(const IntVec& x) const {
  __int128 u = 0, v = 0;
  const std::size_t k = zrank();
  for (std::size_t i = 0; i < k; ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = i; j < k; ++j) {
      if (x[j] == 0) continue;
      const __int128 m = static_cast<__int128>(x[i]) * x[j];
      u += m * pu_[i][j];
      v += m * pv_[i][j];
    }
  }
  return {u, v};
}

__int128 OFLattice::trace2_of(const IntVec& x) const {
  __int128 s = 0;
  const std::size_t k = zrank();
  for (std::size_t i = 0; i < k; ++i) {
    if (x[i] == 0) continue;
    __int128 r = 0;
    for (std::size_t j = 0; j < k; ++j) r += static_cast<__int128>(trace2_[i][j]) * x[j];
    s += r * x[i];
  }
  return s;
}

OFLattice lattice_from_form(const FieldCtx& ctx, const std::vector<std::vector<QuadRat>>& coeffs,
                            ModuleShape shape, std::string label) {
  const std::size_t n = coeffs.size();
  for (const auto& row : coeffs) {
    if (row.size() != n) throw Error(ErrorCode::DimensionMismatch, "coefficient table must be square");
  }
  if (n == 0) throw Error(ErrorCode::DimensionMismatch, "empty form");
  auto B = [&](std::size_t i, std::size_t j) {
    if (i == j) return coeffs[i][i];
    const QuadRat& c = coeffs[std::min(i, j)][std::max(i, j)];
    return c * QuadRat(ctx, 1, 0, 2);
  };
  const QuadRat one(ctx, 1);
  const QuadRat w = QuadRat::omega(ctx);
  QuadRat theta = w;
  std::int64_t Wt[2][2] = {{0, ctx.c0()}, {1, ctx.c1()}};  // columns: omega*1, omega*theta
  if (shape == ModuleShape::P2InvLast) {
    if (ctx.D() == 10) {
      theta = QuadRat(ctx, 0, 1, 2);
      Wt[0][0] = 0;
      Wt[1][0] = 2;
      Wt[0][1] = 5;
      Wt[1][1] = 0;
    } else if (ctx.D() == 65) {
      theta = (one + w) * QuadRat(ctx, 1, 0, 2);
      Wt[0][0] = -1;
      Wt[1][0] = 2;
      Wt[0][1] = 7;
      Wt[1][1] = 2;
    } else {
      throw Error(ErrorCode::OutOfRange, "the non-free shape is defined for D = 10 and 65 only");
    }
    // omega * 1 = Wt[0][0] + Wt[1][0] theta and omega * theta = Wt[0][1] + Wt[1][1] theta
    const QuadRat c0 = QuadRat(ctx, Wt[0][0]) + QuadRat(ctx, Wt[1][0]) * theta;
    const QuadRat c1 = QuadRat(ctx, Wt[0][1]) + QuadRat(ctx, Wt[1][1]) * theta;
    if (!(c0 == w) || !(c1 == w * theta)) {
      throw Error(ErrorCode::InvariantViolation, "theta action table is inconsistent");
    }
  }
  const std::size_t k = 2 * n;
  std::vector<QuadRat> scal(k);
  for (std::size_t i = 0; i < n; ++i) {
    scal[2 * i] = one;
    scal[2 * i + 1] = (shape == ModuleShape::P2InvLast && i + 1 == n) ? theta : w;
  }
  ExactSymMat G(ctx, k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) G.set(a, b, scal[a] * scal[b] * B(a / 2, b / 2));
  }
  IntMatrix W(k, IntVec(k, 0));
  for (std::size_t i = 0; i < n; ++i) {
    const bool nf = shape == ModuleShape::P2InvLast && i + 1 == n;
    const std::size_t a = 2 * i, b = 2 * i + 1;
    if (nf) {
      W[a][a] = Wt[0][0];
      W[b][a] = Wt[1][0];
      W[a][b] = Wt[0][1];
      W[b][b] = Wt[1][1];
    } else {
      W[b][a] = 1;
      W[a][b] = ctx.c0();
      W[b][b] = ctx.c1();
    }
  }
  return OFLattice(ctx, std::move(G), std::move(W), std::move(label));
}

OFLattice conjugate_lattice(const OFLattice& L) {
  IntMatrix W = L.omega_action();
  for (std::size_t i = 0; i < W.size(); ++i) {
    for (std::size_t j = 0; j < W.size(); ++j) W[i][j] = (i == j ? L.ctx().c1() : 0) - W[i][j];
  }
  return OFLattice(L.ctx(), L.gram().conj(), std::move(W));
}

OFLattice scale(const OFLattice& L, const QuadRat& s) {
  if (!s.is_totally_positive()) throw Error(ErrorCode::InvariantViolation, "scale must be totally positive");
  return OFLattice(L.ctx(), L.gram().scaled(s), L.omega_action());
}

OFLattice scale_by_unit(const OFLattice& L, const QuadRat& u) {
  if (!u.in_OF() || u.norm() != 1 || !u.is_totally_positive()) {
    throw Error(ErrorCode::InvariantViolation, u.to_string() + " is not a totally positive unit");
  }
  return scale(L, u);
}

void for_each_short_vector(const OFLattice& L, std::int64_t T,
                           const std::function<void(const IntVec&)>& f) {
  if (T <= 0) return;
  ShortVectors sv(L, T);
  for (std::int64_t u = 0; u <= sv.outer_max(); ++u) sv.run_unit(u, f);
}

std::optional<RepWitness> represents(const OFLattice& L, const QuadRat& alpha, unsigned jobs) {
  if (!alpha.in_OF() || !alpha.is_totally_positive()) return std::nullopt;
  const Rat tr = alpha.trace();
  const std::int64_t t = to_i64(tr, "trace");
  auto [au, av] = omega_ints(alpha, "target");
  ShortVectors sv(L, t);
  struct Best {
    std::optional<IntVec> best;
    const OFLattice* L = nullptr;
    std::int64_t t2 = 0, au = 0, av = 0;
    void operator()(const IntVec& x) {
      if (L->trace2_of(x) != t2) return;
      auto [u, v] = L->q_fast(x);
      if (u != au || v != av) return;
      if (!best || x < *best) best = x;
    }
  };
  auto units = run_units<Best>(sv, jobs, [&] {
    Best b;
    b.L = &L;
    b.t2 = 2 * t;
    b.au = au;
    b.av = av;
    return b;
  });
  std::optional<IntVec> best;
  for (auto& u : units) {
    if (u.best && (!best || *u.best < *best)) best = u.best;
  }
  if (!best) return std::nullopt;
  RepWitness w{*best, L.q_value(*best)};
  if (!(w.value == alpha)) throw Error(ErrorCode::InvariantViolation, "fast evaluation disagrees with exact Q");
  return w;
}

BoxReport check_box_universal(const OFLattice& L, std::int64_t T, unsigned jobs,
                              std::optional<Rat> norm_bound) {
  BoxReport rep;
  rep.trace_bound = T;
  rep.norm_bound = norm_bound;
  const std::vector<QuadRat> targets = norm_bound ? enumerate_tp_by_trace_and_norm(L.ctx(), T, *norm_bound)
                                                  : enumerate_tp_by_trace(L.ctx(), T);
  rep.count_checked = targets.size();
  if (targets.empty()) return rep;
  std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> index;
  for (std::size_t i = 0; i < targets.size(); ++i) index[omega_ints(targets[i], "target")] = i;
  struct Hits {
    std::vector<char> hit;
    std::size_t count = 0;
    const OFLattice* L = nullptr;
    const std::map<std::pair<std::int64_t, std::int64_t>, std::size_t>* index = nullptr;
    void operator()(const IntVec& x) {
      ++count;
      auto [u, v] = L->q_fast(x);
      auto it = index->find({static_cast<std::int64_t>(u), static_cast<std::int64_t>(v)});
      if (it != index->end()) hit[it->second] = 1;
    }
  };
  ShortVectors sv(L, T);
  auto units = run_units<Hits>(sv, jobs, [&] {
    Hits h;
    h.hit.assign(targets.size(), 0);
    h.L = &L;
    h.index = &index;
    return h;
  });
  std::vector<char> hit(targets.size(), 0);
  for (const auto& u : units) {
    rep.vectors_enumerated += u.count;
    for (std::size_t i = 0; i < hit.size(); ++i) hit[i] |= u.hit[i];
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (!hit[i]) rep.failures.push_back(targets[i]);
  }
  return rep;
}

std::string fingerprint(const OFLattice& L) {
  const std::size_t N = L.zrank();
  for (std::int64_t T = 2;; T *= 2) {
    std::vector<std::pair<__int128, IntVec>> vecs;
    for_each_short_vector(L, T, [&](const IntVec& x) { vecs.emplace_back(L.trace2_of(x), x); });
    std::sort(vecs.begin(), vecs.end());
    // incremental rank over Q with exact echelon rows
    std::vector<std::vector<Rat>> rows;
    std::vector<std::size_t> pivots;
    __int128 tstar = -1;
    for (const auto& [t2, x] : vecs) {
      std::vector<Rat> r(N);
      for (std::size_t i = 0; i < N; ++i) r[i] = Rat(static_cast<long>(x[i]));
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const Rat f = r[pivots[k]];
        if (sgn(f) == 0) continue;
        for (std::size_t i = 0; i < N; ++i) r[i] -= f * rows[k][i];
      }
      std::size_t p = 0;
      while (p < N && sgn(r[p]) == 0) ++p;
      if (p == N) continue;
      const Rat inv = 1 / r[p];
      for (auto& e : r) e *= inv;
      for (auto& row : rows) {
        const Rat f = row[p];
        if (sgn(f) == 0) continue;
        for (std::size_t i = 0; i < N; ++i) row[i] -= f * r[i];
      }
      rows.push_back(std::move(r));
      pivots.push_back(p);
      if (rows.size() == N) {
        tstar = t2;
        break;
      }
    }
    if (tstar < 0) continue;
    std::map<std::pair<std::int64_t, std::pair<std::int64_t, std::int64_t>>, std::size_t> counts;
    for (const auto& [t2, x] : vecs) {
      if (t2 > tstar) break;
      auto [u, v] = L.q_fast(x);
      ++counts[{static_cast<std::int64_t>(t2), {static_cast<std::int64_t>(u), static_cast<std::int64_t>(v)}}];
    }
    std::ostringstream os;
    os << "D" << L.ctx().D() << "/r" << N;
    for (const auto& [key, c] : counts) {
      os << ";" << key.second.first << "," << key.second.second << "x" << c;
    }
    return os.str();
  }
}

namespace {

struct Catalog {
  std::vector<CatalogEntry> entries;
  std::vector<OFLattice> lattices;
};

const Catalog& catalog() {
  static const Catalog cat = [] {
    Catalog c;
    std::istringstream in(kCatalogText);
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& why) {
      throw Error(ErrorCode::ParseError, "catalog line " + std::to_string(lineno) + ": " + why);
    };
    auto find = [&](const std::string& name) -> const OFLattice& {
      for (std::size_t i = 0; i < c.entries.size(); ++i) {
        if (c.entries[i].name == name) return c.lattices[i];
      }
      fail("unknown source " + name);
      throw;
    };
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      std::string name, kind;
      std::int64_t D = 0;
      if (!(ls >> name >> D >> kind)) fail("expected name, D and kind");
      const FieldCtx ctx(D);
      std::optional<OFLattice> L;
      if (kind == "free" || kind == "p2inv") {
        std::vector<std::vector<QuadRat>> coeffs(3, std::vector<QuadRat>(3, QuadRat(ctx, 0)));
        std::string tok;
        while (ls >> tok) {
          if (tok.size() < 4 || tok[2] != '=') fail("bad entry " + tok);
          const int i = tok[0] - '1', j = tok[1] - '1';
          if (i < 0 || j < i || j > 2) fail("bad index in " + tok);
          coeffs[i][j] = QuadRat::parse(ctx, tok.substr(3));
        }
        L.emplace(lattice_from_form(ctx, coeffs, kind == "free" ? ModuleShape::Free : ModuleShape::P2InvLast));
      } else if (kind == "conj") {
        std::string src;
        if (!(ls >> src)) fail("conj needs a source");
        L.emplace(conjugate_lattice(find(src)));
      } else if (kind == "scale") {
        std::string src, unit;
        if (!(ls >> src >> unit)) fail("scale needs a source and a unit");
        L.emplace(scale_by_unit(find(src), QuadRat::parse(ctx, unit)));
      } else {
        fail("unknown kind " + kind);
      }
      L->set_label(name);
      c.entries.push_back({name, D, line});
      c.lattices.push_back(std::move(*L));
    }
    return c;
  }();
  return cat;
}

}  // namespace

const std::vector<CatalogEntry>& catalog_entries() { return catalog().entries; }

std::vector<OFLattice> catalog_list() { return catalog().lattices; }

std::vector<OFLattice> catalog_for_D(std::int64_t D) {
  std::vector<OFLattice> out;
  for (const auto& L : catalog().lattices) {
    if (L.ctx().D() == D) out.push_back(L);
  }
  return out;
}

OFLattice catalog_get(const std::string& name) {
  for (const auto& L : catalog().lattices) {
    if (L.label() == name) return L;
  }
  throw Error(ErrorCode::UnknownName, "no catalog lattice named " + name);
}

const std::vector<std::string>& proven_universal_names() {
  static const std::vector<std::string> names = {
      "phi24_13",  "phi12_13",       "phi12_13_conj", "phinm_13",  "phinm_13_conj",
      "phi1_17",   "phi1_17_conj",   "phi2_17",       "phinm1_17", "phinm1_17_conj",
      "phinm2_17", "phinm2_17_conj", "phinm3_17",     "phinm3_17_conj"};
  return names;
}

}  // namespace kitaoka
