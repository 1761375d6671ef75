#include "kitaoka/feasibility.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "kitaoka/errors.hpp"
#include "kitaoka/io.hpp"

namespace kitaoka {

namespace {

using Clock = std::chrono::steady_clock;

bool in_ring(const QuadRat& x, bool classical) { return classical ? x.in_OF() : x.in_half_OF(); }

// Ring elements beta with |beta - c| <= r in each embedding, from a widened
// float box, ordered by the omega coordinates (v, u) of s*beta.
template <class F>
void ring_box(const FieldCtx& ctx, bool classical, double c1, double c2, double r1, double r2, F&& f) {
  const double s = classical ? 1.0 : 2.0;
  const double sq = std::sqrt(static_cast<double>(ctx.D()));
  const double w1 = ctx.omega_is_half() ? (1 + sq) / 2 : sq;
  const double w2 = ctx.omega_is_half() ? (1 - sq) / 2 : -sq;
  const double sd = w1 - w2;
  const double lo1 = s * (c1 - r1), hi1 = s * (c1 + r1);
  const double lo2 = s * (c2 - r2), hi2 = s * (c2 + r2);
  const double mag = std::max({std::abs(lo1), std::abs(hi1), std::abs(lo2), std::abs(hi2), 1.0});
  const double eps = 1e-9 * mag;
  const auto ylo = static_cast<std::int64_t>(std::ceil((lo1 - hi2) / sd - eps));
  const auto yhi = static_cast<std::int64_t>(std::floor((hi1 - lo2) / sd + eps));
  const Int den = classical ? 1 : 2;
  for (std::int64_t y = ylo; y <= yhi; ++y) {
    const double yd = static_cast<double>(y);
    const auto xlo = static_cast<std::int64_t>(std::ceil(std::max(lo1 - yd * w1, lo2 - yd * w2) - eps));
    const auto xhi = static_cast<std::int64_t>(std::floor(std::min(hi1 - yd * w1, hi2 - yd * w2) + eps));
    for (std::int64_t x = xlo; x <= xhi; ++x) {
      f(QuadRat::from_omega(ctx, make_rat(Int(static_cast<long>(x)), den), make_rat(Int(static_cast<long>(y)), den)));
    }
  }
}

double emb(const QuadRat& x, Embedding e) { return x.to_double(e); }

std::optional<Rat> rat_sqrt(const Rat& x) {
  if (sgn(x) < 0 || !is_square(x)) return std::nullopt;
  return make_rat(isqrt(x.get_num()), isqrt(x.get_den()));
}

// y with y^2 = x in F, if any.
std::optional<QuadRat> field_sqrt(const QuadRat& x) {
  const FieldCtx ctx(x.D());
  if (x.is_zero()) return x;
  const Rat A = x.rational_part(), B = x.sqrt_part();
  const Rat N = A * A - B * B * x.D();
  if (sgn(N) < 0 || !is_square(N)) return std::nullopt;
  const Rat n = make_rat(isqrt(N.get_num()), isqrt(N.get_den()));
  for (int sgnn : {1, -1}) {
    const Rat u2 = (A + sgnn * n) / 2;
    const Rat v2 = (A - sgnn * n) / (2 * x.D());
    auto u = rat_sqrt(u2);
    auto v = rat_sqrt(v2);
    if (!u || !v) continue;
    Rat ur = *u, vr = *v;
    if (sgn(B) < 0) vr = -vr;
    if (2 * ur * vr != B) continue;
    return QuadRat::from_rational(ctx, ur) + QuadRat(ctx, 0, 1) * QuadRat::from_rational(ctx, vr);
  }
  return std::nullopt;
}

struct State {
  std::size_t col = 0;
  std::vector<QuadRat> G;  // k*k, search order
  std::vector<std::size_t> pivots;
  std::array<QuadRat, 3> d;
  std::array<std::array<QuadRat, 3>, 3> L;
  std::vector<std::array<QuadRat, 3>> coef;  // per processed column
  std::vector<bool> is_pivot;
};

struct UnitResult {
  std::uint64_t nodes = 0, prune_ring = 0, prune_psd = 0, prune_rank = 0, prune_symmetry = 0;
  std::vector<std::vector<QuadRat>> witnesses;  // k*k, search order
  bool more = false;
  bool over_budget = false;
  bool timed_out = false;
  bool complete = false;
};

struct Shared {
  const FieldCtx* ctx;
  std::vector<QuadRat> a;  // diagonal in search order
  std::size_t k;
  bool classical;
  bool symmetry;
};

class Searcher {
 public:
  Searcher(const Shared& sh, bool all, std::uint64_t node_cap, std::size_t witness_cap,
           Clock::time_point deadline)
      : sh_(sh), all_(all), cap_(node_cap), wcap_(witness_cap), deadline_(deadline) {}

  // Columns [state.col, stop_col) are filled; states reaching stop_col are
  // handed to `at_stop` when given.
  void run(State& st, std::size_t stop_col, std::vector<State>* at_stop) {
    stop_col_ = stop_col;
    at_stop_ = at_stop;
    dfs(st);
    res_.complete = !res_.over_budget && !res_.timed_out;
  }

  UnitResult& result() { return res_; }

 private:
  bool tick() {
    ++res_.nodes;
    if (res_.nodes > cap_) {
      res_.over_budget = true;
      stop_ = true;
    } else if ((res_.nodes & 1023) == 0 && Clock::now() > deadline_) {
      res_.timed_out = true;
      stop_ = true;
    }
    return !stop_;
  }

  void dfs(State& st) {
    if (stop_) return;
    if (at_stop_ && st.col == stop_col_) {
      at_stop_->push_back(st);
      return;
    }
    if (st.col == sh_.k) {
      if (res_.witnesses.size() < wcap_) {
        res_.witnesses.push_back(st.G);
      } else {
        res_.more = true;
        stop_ = true;
      }
      if (!all_) stop_ = true;
      return;
    }
    std::array<QuadRat, 3> g, u;
    std::array<QuadRat, 4> s;
    s[0] = sh_.a[st.col];
    choose(st, 0, g, u, s);
  }

  void choose(State& st, std::size_t m, std::array<QuadRat, 3>& g, std::array<QuadRat, 3>& u,
              std::array<QuadRat, 4>& s) {
    if (stop_) return;
    const std::size_t r = st.pivots.size();
    if (m == r) {
      finish(st, g, u, s[r]);
      return;
    }
    const FieldCtx& ctx = *sh_.ctx;
    QuadRat c(ctx, 0);
    for (std::size_t t = 0; t < m; ++t) c += st.L[m][t] * u[t];
    const QuadRat ds = st.d[m] * s[m];
    auto visit = [&](const QuadRat& cand) {
      if (stop_) return;
      if (m == 0 && sh_.symmetry && cand.sign(Embedding::First) < 0) {
        ++res_.prune_symmetry;
        return;
      }
      const QuadRat um = cand - c;
      const QuadRat rest = ds - um * um;
      if (!rest.is_totally_nonnegative()) {
        ++res_.prune_psd;
        return;
      }
      if (!tick()) return;
      g[m] = cand;
      u[m] = um;
      s[m + 1] = rest / st.d[m];
      choose(st, m + 1, g, u, s);
    };
    if (r == 3 && m == 2) {
      // the column must be dependent: u^2 = d*s exactly
      auto root = field_sqrt(ds);
      if (!root) {
        ++res_.prune_rank;
        return;
      }
      std::vector<QuadRat> cands;
      for (const QuadRat& v : {c + *root, c - *root}) {
        if (!in_ring(v, sh_.classical)) continue;
        if (std::find(cands.begin(), cands.end(), v) == cands.end()) cands.push_back(v);
      }
      if (cands.empty()) {
        ++res_.prune_ring;
        return;
      }
      std::sort(cands.begin(), cands.end(), [](const QuadRat& x, const QuadRat& y) {
        auto [xu, xv] = x.omega_coords();
        auto [yu, yv] = y.omega_coords();
        return xv != yv ? xv < yv : xu < yu;
      });
      for (const auto& v : cands) visit(v);
      return;
    }
    const double r1 = std::sqrt(std::max(0.0, emb(ds, Embedding::First)));
    const double r2 = std::sqrt(std::max(0.0, emb(ds, Embedding::Second)));
    ring_box(ctx, sh_.classical, emb(c, Embedding::First), emb(c, Embedding::Second), r1, r2, visit);
  }

  void finish(State& st, const std::array<QuadRat, 3>& g, const std::array<QuadRat, 3>& u, const QuadRat& s) {
    const std::size_t j = st.col, k = sh_.k, r = st.pivots.size();
    const bool dependent = s.is_zero();
    if (!dependent && r == 3) {
      ++res_.prune_rank;
      return;
    }
    for (std::size_t i = 0; i < j; ++i) {
      QuadRat v(*sh_.ctx, 0);
      if (st.is_pivot[i]) {
        const std::size_t m = std::find(st.pivots.begin(), st.pivots.end(), i) - st.pivots.begin();
        v = g[m];
      } else {
        for (std::size_t m = 0; m < r; ++m) {
          if (!st.coef[i][m].is_zero()) v += st.coef[i][m] * g[m];
        }
        if (!in_ring(v, sh_.classical)) {
          ++res_.prune_ring;
          return;
        }
      }
      st.G[i * k + j] = v;
      st.G[j * k + i] = v;
    }
    if (sh_.symmetry) {
      for (std::size_t i = 0; i < j; ++i) {
        const int sg = st.G[i * k + j].sign(Embedding::First);
        if (sg == 0) continue;
        if (sg < 0) {
          ++res_.prune_symmetry;
          return;
        }
        break;
      }
    }
    std::array<QuadRat, 3> cf;
    cf.fill(QuadRat(*sh_.ctx, 0));
    if (dependent) {
      for (std::size_t m = r; m-- > 0;) {
        QuadRat v = u[m] / st.d[m];
        for (std::size_t t = m + 1; t < r; ++t) v -= st.L[t][m] * cf[t];
        cf[m] = v;
      }
      st.coef.push_back(cf);
      st.is_pivot.push_back(false);
    } else {
      for (std::size_t t = 0; t < r; ++t) st.L[r][t] = u[t] / st.d[t];
      st.L[r][r] = QuadRat(*sh_.ctx, 1);
      st.d[r] = s;
      cf[r] = QuadRat(*sh_.ctx, 1);
      st.pivots.push_back(j);
      st.coef.push_back(cf);
      st.is_pivot.push_back(true);
    }
    ++st.col;
    dfs(st);
    --st.col;
    st.coef.pop_back();
    st.is_pivot.pop_back();
    if (!dependent) st.pivots.pop_back();
  }

  const Shared& sh_;
  bool all_;
  std::uint64_t cap_;
  std::size_t wcap_;
  Clock::time_point deadline_;
  std::size_t stop_col_ = 0;
  std::vector<State>* at_stop_ = nullptr;
  bool stop_ = false;
  UnitResult res_;
};

void add_counts(SearchStats& s, const UnitResult& u) {
  s.nodes += u.nodes;
  s.prune_ring += u.prune_ring;
  s.prune_psd += u.prune_psd;
  s.prune_rank += u.prune_rank;
  s.prune_symmetry += u.prune_symmetry;
}

std::vector<std::size_t> search_order(const FeasibilityProblem& p) {
  std::vector<std::size_t> idx(p.S.size());
  std::iota(idx.begin(), idx.end(), 0);
  if (p.order == ColumnOrder::AsGiven) return idx;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
    const Rat nx = p.S[x].norm(), ny = p.S[y].norm();
    return p.order == ColumnOrder::AscendingNorm ? nx < ny : nx > ny;
  });
  return idx;
}

// The generic driver behind search_rank_le3 and enumerate_witnesses.
struct Driver {
  const FeasibilityProblem& p;
  const SearchOptions& opt;
  bool all;
  std::size_t wcap;

  Shared sh;
  std::vector<std::size_t> perm;
  std::vector<State> units;
  SearchStats frontier;
  UnitResult frontier_res;

  Driver(const FeasibilityProblem& prob, const SearchOptions& o, bool enumerate_all, std::size_t cap)
      : p(prob), opt(o), all(enumerate_all), wcap(cap) {
    validate(p);
    perm = search_order(p);
    sh.ctx = &p.ctx;
    sh.k = p.S.size();
    sh.classical = p.classical;
    sh.symmetry = p.symmetry;
    for (std::size_t i : perm) sh.a.push_back(p.S[i]);
  }

  ExactSymMat to_original(const std::vector<QuadRat>& G) const {
    const std::size_t k = sh.k;
    ExactSymMat out(p.ctx, k);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i; j < k; ++j) out.set(perm[i], perm[j], G[i * k + j]);
    }
    return out;
  }

  State initial() const {
    State st;
    const std::size_t k = sh.k;
    st.G.assign(k * k, QuadRat(p.ctx, 0));
    for (std::size_t i = 0; i < k; ++i) st.G[i * k + i] = sh.a[i];
    for (auto& row : st.L) row.fill(QuadRat(p.ctx, 0));
    st.d.fill(QuadRat(p.ctx, 0));
    st.pivots = {0};
    st.d[0] = sh.a[0];
    st.L[0][0] = QuadRat(p.ctx, 1);
    std::array<QuadRat, 3> e;
    e.fill(QuadRat(p.ctx, 0));
    e[0] = QuadRat(p.ctx, 1);
    st.coef = {e};
    st.is_pivot = {true};
    st.col = 1;
    return st;
  }

  std::string mode() const { return all ? "all" : "first"; }

  UnitRecord to_record(std::size_t idx, const UnitResult& r) const {
    UnitRecord u;
    u.index = idx;
    u.nodes = r.nodes;
    u.prune_ring = r.prune_ring;
    u.prune_psd = r.prune_psd;
    u.prune_rank = r.prune_rank;
    u.prune_symmetry = r.prune_symmetry;
    u.more = r.more;
    for (const auto& w : r.witnesses) {
      std::vector<std::string> e;
      for (const auto& x : w) e.push_back(x.to_string());
      u.witnesses.push_back(std::move(e));
    }
    return u;
  }

  UnitResult from_record(const UnitRecord& u) const {
    UnitResult r;
    r.nodes = u.nodes;
    r.prune_ring = u.prune_ring;
    r.prune_psd = u.prune_psd;
    r.prune_rank = u.prune_rank;
    r.prune_symmetry = u.prune_symmetry;
    r.more = u.more;
    r.complete = true;
    for (const auto& w : u.witnesses) {
      if (w.size() != sh.k * sh.k) throw Error(ErrorCode::ParseError, "checkpoint witness has wrong size");
      std::vector<QuadRat> G;
      for (const auto& e : w) G.push_back(QuadRat::parse(p.ctx, e));
      r.witnesses.push_back(std::move(G));
    }
    return r;
  }

  // Runs every unit (possibly in parallel) and returns per-unit results; a
  // unit's result has complete = false if it was skipped or cut short.
  std::vector<UnitResult> run_all(Clock::time_point deadline, std::uint64_t cap) {
    const std::size_t n = units.size();
    std::vector<UnitResult> res(n);
    std::vector<char> done(n, 0);
    const std::uint64_t hash = problem_hash(p);
    if (!opt.checkpoint_path.empty()) {
      std::ifstream probe(opt.checkpoint_path);
      if (probe.good()) {
        probe.close();
        const Checkpoint cp = load_checkpoint(opt.checkpoint_path, hash, mode());
        if (cp.units != n) throw Error(ErrorCode::ChecksumMismatch, "checkpoint unit count differs");
        for (const auto& u : cp.done) {
          res[u.index] = from_record(u);
          done[u.index] = 1;
        }
      }
    }
    std::mutex mu;
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> first_hit{n};
    std::atomic<bool> halt{false};
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i] && (all ? res[i].more : !res[i].witnesses.empty())) first_hit = std::min<std::size_t>(first_hit, i);
    }
    auto last_save = Clock::now();
    auto save = [&] {
      Checkpoint cp;
      cp.hash = hash;
      cp.mode = mode();
      cp.units = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (done[i]) cp.done.push_back(to_record(i, res[i]));
      }
      save_checkpoint(opt.checkpoint_path, cp);
      last_save = Clock::now();
    };
    // prefix of completed units used to stop early once the budget is gone
    std::size_t prefix_end = 0;
    std::uint64_t prefix_nodes = frontier.nodes;
    std::size_t prefix_witnesses = 0;
    auto worker = [&] {
      while (!halt) {
        const std::size_t i = next++;
        if (i >= n) return;
        if (done[i]) continue;
        if (i > first_hit) continue;
        State st = units[i];
        Searcher s(sh, all, cap, all ? wcap + 1 : 1, deadline);
        s.run(st, sh.k + 1, nullptr);
        UnitResult r = std::move(s.result());
        std::lock_guard<std::mutex> lock(mu);
        if (r.timed_out) halt = true;
        if (!r.complete) {
          res[i] = std::move(r);
          continue;
        }
        if (all ? r.more : !r.witnesses.empty()) first_hit = std::min<std::size_t>(first_hit, i);
        res[i] = std::move(r);
        done[i] = 1;
        while (prefix_end < n && done[prefix_end]) {
          prefix_nodes += res[prefix_end].nodes;
          prefix_witnesses += res[prefix_end].witnesses.size();
          ++prefix_end;
        }
        if (prefix_nodes > p.node_budget) halt = true;
        if (all && prefix_witnesses > wcap) halt = true;
        if (!opt.checkpoint_path.empty() &&
            std::chrono::duration<double>(Clock::now() - last_save).count() >= opt.checkpoint_every_s) {
          save();
        }
      }
    };
    const unsigned jobs = std::max(1u, opt.jobs);
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < jobs && t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (!opt.checkpoint_path.empty()) save();
    for (std::size_t i = 0; i < n; ++i) {
      if (!done[i]) res[i].complete = false;
    }
    return res;
  }

  // Sequential-equivalent merge. Calls finish_hit for witnesses in order; the
  // return value is the status.
  template <class OnUnit>
  FeasStatus merge(std::vector<UnitResult>& res, SearchStats& stats, std::string& note, OnUnit on_unit) {
    stats = frontier;
    stats.units = units.size();
    if (frontier_res.timed_out) {
      note = "time budget exhausted";
      return FeasStatus::Inconclusive;
    }
    if (frontier.nodes > p.node_budget) {
      note = "node budget exhausted";
      stats.nodes = p.node_budget + 1;
      return FeasStatus::Inconclusive;
    }
    for (std::size_t i = 0; i < res.size(); ++i) {
      UnitResult& r = res[i];
      if (!r.complete && !r.over_budget) {
        note = r.timed_out ? "time budget exhausted" : "time budget exhausted before all units ran";
        return FeasStatus::Inconclusive;
      }
      if (r.over_budget || stats.nodes + r.nodes > p.node_budget) {
        // replay this unit with the exact remaining budget
        Searcher s(sh, all, p.node_budget - stats.nodes, all ? wcap + 1 : 1, Clock::time_point::max());
        State st = units[i];
        s.run(st, sh.k + 1, nullptr);
        UnitResult& part = s.result();
        add_counts(stats, part);
        if (part.complete) {
          // the unit fits after all (only reachable through rounding of caps)
          ++stats.units_done;
          if (on_unit(part)) return FeasStatus::Feasible;
          continue;
        }
        note = "node budget exhausted";
        return FeasStatus::Inconclusive;
      }
      add_counts(stats, r);
      ++stats.units_done;
      if (on_unit(r)) return FeasStatus::Feasible;
    }
    return FeasStatus::Infeasible;
  }

  void build_frontier(Clock::time_point deadline) {
    State st = initial();
    const std::size_t stop = std::min<std::size_t>(3, sh.k);
    Searcher s(sh, true, p.node_budget, 0, deadline);
    s.run(st, stop, &units);
    frontier_res = s.result();
    add_counts(frontier, frontier_res);
    if (!frontier_res.complete) units.clear();
  }
};

}  // namespace

std::vector<QuadRat> offdiag_candidates(const FieldCtx& ctx, const QuadRat& ai, const QuadRat& aj,
                                        bool classical) {
  if (!ai.is_totally_positive() || !aj.is_totally_positive()) {
    throw Error(ErrorCode::InvariantViolation, "diagonal entries must be totally positive");
  }
  const QuadRat prod = ai * aj;
  std::vector<QuadRat> out;
  ring_box(ctx, classical, 0, 0, std::sqrt(emb(prod, Embedding::First)), std::sqrt(emb(prod, Embedding::Second)),
           [&](const QuadRat& b) {
             if ((prod - b * b).is_totally_nonnegative()) out.push_back(b);
           });
  return out;
}

void validate(const FeasibilityProblem& p) {
  if (p.S.empty()) throw Error(ErrorCode::OutOfRange, "the element set is empty");
  if (p.S.size() > 8) throw Error(ErrorCode::OutOfRange, "at most 8 elements are supported");
  for (const auto& a : p.S) {
    if (a.D() != p.ctx.D() && !a.is_rational()) {
      throw Error(ErrorCode::FieldMismatch, a.to_string() + " lives in another field");
    }
    if (!a.in_OF() || !a.is_totally_positive()) {
      throw Error(ErrorCode::InvariantViolation, a.to_string() + " is not a totally positive integer");
    }
  }
}

const char* to_string(FeasStatus s) {
  switch (s) {
    case FeasStatus::Feasible: return "Feasible";
    case FeasStatus::Infeasible: return "Infeasible";
    case FeasStatus::Inconclusive: return "Inconclusive";
  }
  return "?";
}

std::uint64_t problem_hash(const FeasibilityProblem& p) {
  std::ostringstream os;
  os << "D=" << p.ctx.D() << ";classical=" << p.classical << ";order=" << static_cast<int>(p.order)
     << ";symmetry=" << p.symmetry << ";S=";
  for (const auto& a : p.S) os << QuadRat(p.ctx, 0) + a << ";";
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : os.str()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

FeasibilityOutcome search_rank_le3(const FeasibilityProblem& problem, const SearchOptions& opt) {
  const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                           std::chrono::duration<double>(problem.time_budget_s));
  Driver drv(problem, opt, false, 1);
  FeasibilityOutcome out;
  drv.build_frontier(deadline);
  std::vector<UnitResult> res;
  if (drv.frontier_res.complete) res = drv.run_all(deadline, problem.node_budget);
  out.status = drv.merge(res, out.stats, out.note, [&](const UnitResult& r) {
    if (r.witnesses.empty()) return false;
    out.witness = drv.to_original(r.witnesses.front());
    return true;
  });
  if (out.status == FeasStatus::Feasible) {
    const std::string bad = audit_witness(problem, *out.witness);
    if (!bad.empty()) throw Error(ErrorCode::InvariantViolation, "witness audit failed: " + bad);
  }
  return out;
}

EnumerationResult enumerate_witnesses(const FeasibilityProblem& problem, std::size_t cap,
                                      const SearchOptions& opt) {
  const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                           std::chrono::duration<double>(problem.time_budget_s));
  Driver drv(problem, opt, true, cap);
  EnumerationResult out;
  drv.build_frontier(deadline);
  std::vector<UnitResult> res;
  if (drv.frontier_res.complete) res = drv.run_all(deadline, problem.node_budget);
  FeasStatus st = drv.merge(res, out.stats, out.note, [&](const UnitResult& r) {
    for (const auto& w : r.witnesses) {
      if (out.witnesses.size() < cap) {
        out.witnesses.push_back(drv.to_original(w));
      } else {
        out.saturated = true;
      }
    }
    if (r.more) out.saturated = true;
    return out.saturated;
  });
  if (st == FeasStatus::Inconclusive) {
    out.status = FeasStatus::Inconclusive;
  } else {
    out.status = out.witnesses.empty() ? FeasStatus::Infeasible : FeasStatus::Feasible;
  }
  for (const auto& w : out.witnesses) {
    const std::string bad = audit_witness(problem, w);
    if (!bad.empty()) throw Error(ErrorCode::InvariantViolation, "witness audit failed: " + bad);
  }
  return out;
}

std::string audit_witness(const FeasibilityProblem& problem, const ExactSymMat& G) {
  const std::size_t k = problem.S.size();
  if (G.size() != k) return "size";
  for (std::size_t i = 0; i < k; ++i) {
    if (!(G(i, i) == QuadRat(problem.ctx, 0) + problem.S[i])) return "diagonal";
    for (std::size_t j = i + 1; j < k; ++j) {
      if (!in_ring(G(i, j), problem.classical)) return "ring";
      if (!(G(i, j) == G(j, i))) return "symmetry";
    }
  }
  if (!is_totally_psd_ldl(G)) return "psd";
  if (rank(G) > 3) return "rank";
  return {};
}

const std::vector<std::int64_t>& admissible_D() {
  static const std::vector<std::int64_t> v = {2, 3, 5, 6, 7, 10, 13, 17, 21, 33, 41, 65, 77};
  return v;
}

NonexistenceSet nonexistence_set(std::int64_t D, SetMode mode) {
  const FieldCtx ctx(D);
  const auto& adm = admissible_D();
  if (std::find(adm.begin(), adm.end(), D) != adm.end()) {
    throw Error(ErrorCode::AdmissibleD, "Q(sqrt " + std::to_string(D) + ") is expected to carry a universal ternary lattice");
  }
  auto n = [&](long v) { return QuadRat(ctx, v); };
  const QuadRat w = QuadRat::omega(ctx);
  const QuadRat s = QuadRat(ctx, 0, 1);
  NonexistenceSet out;
  if (D % 4 == 1) {
    auto ah = [&](long j) { return make_alpha(ctx, j, AlphaVariant::Half); };
    static const std::set<std::int64_t> exceptions = {29,  37,  53,  57,  61,  69,  73,  85,  89,  93,  101,
                                                      105, 129, 133, 161, 177, 217, 253, 273, 301, 329, 341};
    if (mode == SetMode::Generic || !exceptions.count(D)) {
      out.kind = "generic";
      out.S = {n(1), n(2), ah(1), make_alpha(ctx, 1, AlphaVariant::Whole)};
      return out;
    }
    out.kind = "table";
    const QuadRat a1 = ah(1);
    auto o = [&](long x, long y) { return n(x) + n(y) * w; };
    switch (D) {
      case 29: out.S = {n(1), n(2), n(5), n(6), a1, a1.conj()}; break;
      case 37: out.S = {n(1), n(2), n(5), a1, a1.conj()}; break;
      case 57: out.S = {n(1), n(2), o(4, 1), o(131, 40)}; break;
      case 61: out.S = {n(1), n(2), o(5, -1), o(9, -2), o(92, 27), o(133, 39)}; break;
      case 85: out.S = {n(1), n(2), o(5, 1), o(21, 5), o(38, 9)}; break;
      case 105: out.S = {n(1), n(2), o(5, 1), o(19, 4), o(45, -8)}; break;
      case 133: out.S = {n(1), n(2), o(8, 1), o(27, 5), o(79, 15)}; break;
      case 273: out.S = {n(1), n(2), o(8, 1), o(683, 88)}; break;
      case 329: out.S = {n(1), o(9, 1), o(29, -3), o(48, -5), o(60, 7)}; break;
      default:
        out.kind = "fallback";
        out.S = {n(1), n(2), n(3), n(5), a1, ah(3), ah(5)};
    }
    return out;
  }
  auto a = [&](long j) { return make_alpha(ctx, j, AlphaVariant::Whole); };
  static const std::set<std::int64_t> exceptions = {11, 14, 15, 19, 22, 23, 26, 30, 31, 35, 38, 39, 42,
                                                    46, 47, 55, 62, 66, 67, 70, 78, 83, 86, 91, 94, 102};
  if (mode == SetMode::Generic || !exceptions.count(D)) {
    out.kind = "generic";
    out.S = {n(1), n(2), a(1), a(2)};
    return out;
  }
  out.kind = "table";
  auto r = [&](long x, long y) { return n(x) + n(y) * s; };
  switch (D) {
    case 11: out.S = {n(1), n(2), n(6), a(1), a(1) + n(1), a(2), a(3), a(5)}; break;
    case 14: out.S = {n(1), n(2), n(5), n(10), a(1), a(1).conj() + n(2), r(35, 9)}; break;
    case 22: out.S = {n(1), n(5), n(7), a(1) + n(1), a(5), r(197, 42)}; break;
    case 26: out.S = {n(1), n(2), n(3), a(1), a(1) + n(4), a(5)}; break;
    case 38: out.S = {n(1), n(3), a(1) + n(1), a(3), r(68, 11)}; break;
    case 46: out.S = {n(1), n(2), n(5), a(1), a(3) + n(2)}; break;
    case 62: out.S = {n(1), n(3), n(5), a(1), r(63, -8)}; break;
    default:
      out.kind = "fallback";
      out.S = {n(1), n(2), n(3), n(5), a(1), a(2).conj(), a(3), a(5)};
  }
  return out;
}

NonexistenceVerdict nonexistence_suite(std::int64_t D, SetMode mode, const SearchOptions& opt,
                                       std::uint64_t node_budget) {
  NonexistenceVerdict v;
  v.set = nonexistence_set(D, mode);
  FeasibilityProblem p;
  p.ctx = FieldCtx(D);
  p.S = v.set.S;
  p.node_budget = node_budget;
  v.outcome = search_rank_le3(p, opt);
  return v;
}

namespace {

std::vector<QuadRat> solve_F(std::vector<std::vector<QuadRat>> A, std::vector<QuadRat> b) {
  const std::size_t n = A.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && A[p][c].is_zero()) ++p;
    if (p == n) throw Error(ErrorCode::RankNot3, "singular pivot block");
    std::swap(A[p], A[c]);
    std::swap(b[p], b[c]);
    const QuadRat inv = A[c][c].inverse();
    for (auto& e : A[c]) e *= inv;
    b[c] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || A[r][c].is_zero()) continue;
      const QuadRat f = A[r][c];
      for (std::size_t j = 0; j < n; ++j) A[r][j] -= f * A[c][j];
      b[r] -= f * b[c];
    }
  }
  return b;
}

// Row echelon Z-basis of the row span.
std::vector<std::vector<Int>> integer_basis(std::vector<std::vector<Int>> rows, std::size_t cols) {
  std::vector<std::vector<Int>> out;
  std::size_t top = 0;
  for (std::size_t c = 0; c < cols && top < rows.size(); ++c) {
    while (true) {
      std::size_t best = rows.size();
      for (std::size_t r = top; r < rows.size(); ++r) {
        if (sgn(rows[r][c]) != 0 && (best == rows.size() || abs(rows[r][c]) < abs(rows[best][c]))) best = r;
      }
      if (best == rows.size()) break;
      std::swap(rows[top], rows[best]);
      bool clean = true;
      for (std::size_t r = top + 1; r < rows.size(); ++r) {
        if (sgn(rows[r][c]) == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), rows[r][c].get_mpz_t(), rows[top][c].get_mpz_t());
        for (std::size_t j = c; j < cols; ++j) rows[r][j] -= q * rows[top][j];
        if (sgn(rows[r][c]) != 0) clean = false;
      }
      if (clean) {
        if (sgn(rows[top][c]) < 0) {
          for (auto& e : rows[top]) e = -e;
        }
        ++top;
        break;
      }
    }
  }
  for (std::size_t r = 0; r < top; ++r) out.push_back(rows[r]);
  return out;
}

}  // namespace

OFLattice span_lattice(const FieldCtx& ctx, const ExactSymMat& G) {
  const std::size_t k = G.size();
  if (!is_totally_psd_ldl(G)) throw Error(ErrorCode::NotTotallyPD, "Gram matrix is not totally PSD");
  std::vector<std::size_t> piv;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<std::size_t> trial = piv;
    trial.push_back(i);
    if (!det(G.principal(trial)).is_zero()) piv = trial;
  }
  const std::size_t r = piv.size();
  if (r == 0) throw Error(ErrorCode::RankNot3, "zero Gram matrix");
  std::vector<std::vector<QuadRat>> GP(r, std::vector<QuadRat>(r));
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b) GP[a][b] = G(piv[a], piv[b]);
  // F-coordinates of every vector in the pivot basis
  std::vector<std::vector<QuadRat>> coords;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<QuadRat> rhs(r);
    for (std::size_t a = 0; a < r; ++a) rhs[a] = G(piv[a], i);
    coords.push_back(solve_F(GP, rhs));
  }
  const QuadRat w = QuadRat::omega(ctx);
  auto qcoords = [&](const std::vector<QuadRat>& c) {
    std::vector<Rat> out;
    for (const auto& e : c) {
      auto [u, v] = e.omega_coords();
      out.push_back(u);
      out.push_back(v);
    }
    return out;
  };
  std::vector<std::vector<Rat>> gens;
  for (const auto& c : coords) {
    gens.push_back(qcoords(c));
    std::vector<QuadRat> wc;
    for (const auto& e : c) wc.push_back(w * e);
    gens.push_back(qcoords(wc));
  }
  Int den = 1;
  for (const auto& g : gens)
    for (const auto& e : g) den = lcm(den, Int(e.get_den()));
  std::vector<std::vector<Int>> irows;
  for (const auto& g : gens) {
    std::vector<Int> row;
    for (const auto& e : g) row.push_back(Int(e * den));
    irows.push_back(std::move(row));
  }
  const auto basis = integer_basis(irows, 2 * r);
  if (basis.size() != 2 * r) throw Error(ErrorCode::InvariantViolation, "module basis has wrong rank");
  auto to_F = [&](const std::vector<Int>& row) {
    std::vector<QuadRat> c;
    for (std::size_t a = 0; a < r; ++a) {
      c.push_back(QuadRat::from_omega(ctx, make_rat(row[2 * a], den), make_rat(row[2 * a + 1], den)));
    }
    return c;
  };
  std::vector<std::vector<QuadRat>> bF;
  for (const auto& row : basis) bF.push_back(to_F(row));
  auto bil = [&](const std::vector<QuadRat>& x, const std::vector<QuadRat>& y) {
    QuadRat s(ctx, 0);
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = 0; b < r; ++b) s += x[a] * GP[a][b] * y[b];
    return s;
  };
  const std::size_t n2 = 2 * r;
  ExactSymMat gram(ctx, n2);
  for (std::size_t a = 0; a < n2; ++a)
    for (std::size_t b = a; b < n2; ++b) gram.set(a, b, bil(bF[a], bF[b]));
  // omega * basis vector, written in the echelon basis
  IntMatrix W(n2, IntVec(n2, 0));
  for (std::size_t a = 0; a < n2; ++a) {
    std::vector<QuadRat> wc;
    for (const auto& e : bF[a]) wc.push_back(w * e);
    std::vector<Rat> target = qcoords(wc);
    std::vector<Int> t;
    for (const auto& e : target) {
      const Rat v = e * den;
      if (v.get_den() != 1) throw Error(ErrorCode::InvariantViolation, "module not closed under omega");
      t.push_back(v.get_num());
    }
    std::size_t col = 0;
    for (std::size_t b = 0; b < n2; ++b) {
      while (col < n2 && sgn(basis[b][col]) == 0) ++col;
      Int q;
      if (!mpz_divisible_p(t[col].get_mpz_t(), basis[b][col].get_mpz_t())) {
        throw Error(ErrorCode::InvariantViolation, "module not closed under omega");
      }
      mpz_divexact(q.get_mpz_t(), t[col].get_mpz_t(), basis[b][col].get_mpz_t());
      for (std::size_t j = 0; j < n2; ++j) t[j] -= q * basis[b][j];
      if (!q.fits_slong_p()) throw Error(ErrorCode::OutOfRange, "omega action too large");
      W[b][a] = q.get_si();
    }
    for (const auto& e : t) {
      if (sgn(e) != 0) throw Error(ErrorCode::InvariantViolation, "module not closed under omega");
    }
  }
  return OFLattice(ctx, std::move(gram), std::move(W));
}

OFLattice span_module(const FieldCtx& ctx, const ExactSymMat& G) {
  if (rank(G) != 3) throw Error(ErrorCode::RankNot3, "Gram matrix must have rank 3");
  return span_lattice(ctx, G);
}

ClassifyResult classify_search(const FeasibilityProblem& problem, std::size_t witness_cap,
                               const SearchOptions& opt) {
  ClassifyResult out;
  const EnumerationResult en = enumerate_witnesses(problem, witness_cap, opt);
  out.status = en.status;
  out.stats = en.stats;
  out.saturated = en.saturated;
  out.witnesses = en.witnesses.size();
  std::set<std::string> seen;
  for (const auto& G : en.witnesses) {
    const std::size_t rk = rank(G);
    if (rk < 3) {
      ++out.low_rank_witnesses;
      out.saturated = true;
    }
    OFLattice L = span_lattice(problem.ctx, G);
    std::string fp = fingerprint(L);
    if (!seen.insert(fp).second) continue;
    out.fingerprints.push_back(fp);
    out.lattices.push_back(std::move(L));
  }
  return out;
}

}  // namespace kitaoka
