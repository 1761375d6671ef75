#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "kitaoka/bounds.hpp"
#include "kitaoka/errors.hpp"
#include "kitaoka/feasibility.hpp"
#include "kitaoka/io.hpp"
#include "kitaoka/lattice.hpp"
#include "kitaoka/ntheory.hpp"

#ifndef KITAOKA_VERSION
#define KITAOKA_VERSION "0.0.0"
#endif

using json = nlohmann::json;
using namespace kitaoka;

namespace {

enum Exit { kOk = 0, kInconclusive = 2, kUsage = 3, kInvariant = 4 };

json qjson(const QuadRat& x) { return x.to_string(); }

json qlist(const std::vector<QuadRat>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(qjson(x));
  return a;
}

json matrix_json(const ExactSymMat& m) { return m.to_strings(); }

json stats_json(const SearchStats& s) {
  return {{"nodes", s.nodes},
          {"prune_ring", s.prune_ring},
          {"prune_psd", s.prune_psd},
          {"prune_rank", s.prune_rank},
          {"prune_symmetry", s.prune_symmetry},
          {"units", s.units},
          {"units_done", s.units_done}};
}

json lattice_json(const OFLattice& L) {
  return {{"D", L.ctx().D()},
          {"n", L.n()},
          {"label", L.label()},
          {"gram", matrix_json(L.gram())},
          {"omega_action", L.omega_action()}};
}

std::string rat_string(const Rat& r) { return r.get_str(); }

json int_json(const Int& v) {
  if (v.fits_slong_p()) return v.get_si();
  return v.get_str();
}

struct Common {
  unsigned jobs = 1;
};

unsigned default_jobs() {
  if (const char* e = std::getenv("KITAOKA_JOBS")) {
    try {
      const long v = std::stol(e);
      if (v >= 1 && v <= 1024) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return 1;
}

ColumnOrder parse_order(const std::string& s) {
  if (s == "ascending") return ColumnOrder::AscendingNorm;
  if (s == "descending") return ColumnOrder::DescendingNorm;
  return ColumnOrder::AsGiven;
}

int status_exit(FeasStatus s) { return s == FeasStatus::Inconclusive ? kInconclusive : kOk; }

class Runner {
 public:
  explicit Runner(std::string command) : command_(std::move(command)), t0_(std::chrono::steady_clock::now()) {}

  json report(json params, json outcome) const {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0_);
    return {{"command", command_},
            {"version", KITAOKA_VERSION},
            {"params", std::move(params)},
            {"outcome", std::move(outcome)},
            {"wall_time_ms", ms.count()}};
  }

 private:
  std::string command_;
  std::chrono::steady_clock::time_point t0_;
};

void emit(const json& j) { std::cout << j.dump() << "\n" << std::flush; }

// --- bounds ---------------------------------------------------------------

struct BoundsArgs {
  std::int64_t m = 1;
  int rank = 3;
};

int run_bounds(const BoundsArgs& a) {
  Runner r("bounds");
  json params = {{"m", a.m}, {"rank", a.rank}};
  json out;
  if (a.m <= 0) throw Error(ErrorCode::OutOfRange, "m must be positive");
  if (a.m <= 2) {
    const Int b = table_bound(static_cast<int>(a.m), a.rank);
    out = {{"mode", "table"}, {"bound", int_json(b)}, {"bound_exact", b.get_str()}};
  } else {
    const auto f = explicit_formula(a.rank);
    const auto cb = explicit_bound(a.m, a.rank);
    out = {{"mode", "explicit"},
           {"bound", cb.upper.get_d()},
           {"bound_exact", {{"lower", rat_string(cb.lower)}, {"upper", rat_string(cb.upper)}}},
           {"formula",
            {{"K", f.K.get_str()},
             {"m_exponent", std::to_string(f.a_num) + "/" + std::to_string(f.a_den)},
             {"log_exponent", std::to_string(f.b_num) + "/" + std::to_string(f.b_den)}}}};
  }
  out["params"] = params;
  emit(r.report(params, out));
  return kOk;
}

// --- nonresidue -----------------------------------------------------------

struct NonresidueArgs {
  std::optional<std::int64_t> p;
  std::optional<std::int64_t> limit;
  int gamma2 = 7;
};

int run_nonresidue(const NonresidueArgs& a) {
  Runner r("nonresidue");
  const Gamma2Mode mode = a.gamma2 == 5 ? Gamma2Mode::Five : Gamma2Mode::Seven;
  json params = {{"gamma2", a.gamma2}};
  json out;
  if (a.p) {
    params["p"] = *a.p;
    const auto g = least_nonresidue(*a.p, mode);
    out = {{"p", *a.p}, {"gamma", g}};
    if (*a.p > 2) out["trevino"] = trevino_holds(*a.p);
  } else if (a.limit) {
    params["limit"] = *a.limit;
    std::size_t count = 0;
    std::int64_t max_gamma = 0, argmax = 0;
    for (auto p : primes_up_to(*a.limit)) {
      if (p == 2) continue;
      ++count;
      const auto g = least_nonresidue(p, mode);
      if (g > max_gamma) {
        max_gamma = g;
        argmax = p;
      }
    }
    out = {{"limit", *a.limit},
           {"odd_primes", count},
           {"max_gamma", max_gamma},
           {"max_gamma_at", argmax},
           {"trevino_all", trevino_check(*a.limit)}};
  } else {
    throw CLI::ValidationError("nonresidue needs --p or --limit");
  }
  emit(r.report(params, out));
  return kOk;
}

// --- nonexist -------------------------------------------------------------

struct SearchArgs {
  std::uint64_t budget = 1'000'000'000;
  double time_budget = 3600;
  bool classical = false;
  std::string order = "ascending";
  bool no_symmetry = false;
  std::string checkpoint;
  double checkpoint_every = 60;
};

void add_search_flags(CLI::App* c, SearchArgs& s) {
  c->add_flag("--classical", s.classical, "off-diagonal entries in O_F instead of (1/2)O_F");
  c->add_option("--budget", s.budget, "node budget")->capture_default_str();
  c->add_option("--time-budget", s.time_budget, "seconds before giving up")->capture_default_str();
  c->add_option("--order", s.order, "column order")
      ->check(CLI::IsMember({"ascending", "descending", "given"}))
      ->capture_default_str();
  c->add_flag("--no-symmetry", s.no_symmetry, "disable the sign reduction");
  c->add_option("--checkpoint", s.checkpoint, "checkpoint file (resumed if present)");
  c->add_option("--checkpoint-every", s.checkpoint_every, "seconds between checkpoint writes")
      ->capture_default_str();
}

json search_params(const SearchArgs& s) {
  json p = {{"classical", s.classical},
            {"budget", s.budget},
            {"time_budget", s.time_budget},
            {"order", s.order},
            {"symmetry", !s.no_symmetry}};
  if (!s.checkpoint.empty()) p["checkpoint"] = s.checkpoint;
  return p;
}

FeasibilityProblem make_problem(const FieldCtx& ctx, std::vector<QuadRat> S, const SearchArgs& s) {
  FeasibilityProblem p;
  p.ctx = ctx;
  p.S = std::move(S);
  p.classical = s.classical;
  p.node_budget = s.budget;
  p.time_budget_s = s.time_budget;
  p.order = parse_order(s.order);
  p.symmetry = !s.no_symmetry;
  return p;
}

SearchOptions make_options(const SearchArgs& s, const Common& c) {
  SearchOptions o;
  o.jobs = c.jobs;
  o.checkpoint_path = s.checkpoint;
  o.checkpoint_every_s = s.checkpoint_every;
  return o;
}

struct NonexistArgs {
  std::int64_t D = 0;
  std::string set = "paper";
  std::string elements;
  SearchArgs search;
};

int run_nonexist(const NonexistArgs& a, const Common& c) {
  Runner r("nonexist");
  const FieldCtx ctx(a.D);
  json params = search_params(a.search);
  params["D"] = a.D;
  std::string kind;
  std::vector<QuadRat> S;
  if (!a.elements.empty()) {
    params["elements"] = a.elements;
    S = load_elements(a.elements, ctx);
    kind = "file";
  } else {
    params["set"] = a.set;
    auto ns = nonexistence_set(a.D, a.set == "generic" ? SetMode::Generic : SetMode::Paper);
    S = ns.S;
    kind = ns.kind;
  }
  const auto problem = make_problem(ctx, S, a.search);
  const auto res = search_rank_le3(problem, make_options(a.search, c));
  json out = {{"status", to_string(res.status)}, {"set_kind", kind}, {"S", qlist(S)}, {"stats", stats_json(res.stats)}};
  if (res.witness) out["witness"] = matrix_json(*res.witness);
  if (!res.note.empty()) out["note"] = res.note;
  emit(r.report(params, out));
  return status_exit(res.status);
}

// --- classify -------------------------------------------------------------

struct ClassifyArgs {
  std::int64_t D = 0;
  std::string elements;
  std::optional<std::int64_t> norm_bound;
  std::optional<std::int64_t> trace_bound;
  std::size_t max_elements = 8;
  std::size_t cap = 100000;
  SearchArgs search;
};

int run_classify(const ClassifyArgs& a, const Common& c) {
  Runner r("classify");
  const FieldCtx ctx(a.D);
  json params = search_params(a.search);
  params["D"] = a.D;
  params["cap"] = a.cap;
  std::vector<QuadRat> S;
  if (!a.elements.empty()) {
    params["elements"] = a.elements;
    S = load_elements(a.elements, ctx);
  } else {
    if (!a.trace_bound) throw CLI::ValidationError("classify needs --elements or --trace-bound");
    params["trace_bound"] = *a.trace_bound;
    params["max_elements"] = a.max_elements;
    if (a.norm_bound) {
      params["norm_bound"] = *a.norm_bound;
      S = enumerate_tp_by_trace_and_norm(ctx, *a.trace_bound, Rat(*a.norm_bound));
    } else {
      S = enumerate_tp_by_trace(ctx, *a.trace_bound);
    }
    std::stable_sort(S.begin(), S.end(), [](const QuadRat& x, const QuadRat& y) { return x.norm() < y.norm(); });
    if (S.size() > a.max_elements) S.resize(a.max_elements);
  }
  const auto problem = make_problem(ctx, S, a.search);
  const auto res = classify_search(problem, a.cap, make_options(a.search, c));
  std::vector<std::pair<std::string, std::string>> known;
  for (const auto& L : catalog_for_D(a.D)) known.emplace_back(L.label(), fingerprint(L));
  for (std::size_t i = 0; i < res.lattices.size(); ++i) {
    json matches = json::array();
    for (const auto& [name, fp] : known) {
      if (fp == res.fingerprints[i]) matches.push_back(name);
    }
    json line = lattice_json(res.lattices[i]);
    line["record"] = "lattice";
    line["index"] = i;
    line["fingerprint"] = res.fingerprints[i];
    line["catalog_matches"] = matches;
    emit(line);
  }
  json out = {{"status", to_string(res.status)},
              {"S", qlist(S)},
              {"lattices", res.lattices.size()},
              {"witnesses", res.witnesses},
              {"low_rank_witnesses", res.low_rank_witnesses},
              {"saturated", res.saturated},
              {"stats", stats_json(res.stats)}};
  json rep = r.report(params, out);
  rep["record"] = "report";
  emit(rep);
  return status_exit(res.status);
}

// --- verify / represent / catalog ------------------------------------------

OFLattice sum_of_squares(std::int64_t D, std::size_t n) {
  const FieldCtx ctx(D);
  std::vector<std::vector<QuadRat>> c(n, std::vector<QuadRat>(n, QuadRat(ctx, 0)));
  for (std::size_t i = 0; i < n; ++i) c[i][i] = QuadRat(ctx, 1);
  return lattice_from_form(ctx, c, ModuleShape::Free, "sum" + std::to_string(n) + "_" + std::to_string(D));
}

struct LatticeArgs {
  std::string lattice;
  std::optional<std::int64_t> squares_D;
  std::size_t squares = 3;
};

void add_lattice_flags(CLI::App* c, LatticeArgs& l) {
  c->add_option("--lattice", l.lattice, "catalog name");
  c->add_option("--squares-over", l.squares_D, "use a sum of squares over Q(sqrt D) instead");
  c->add_option("--squares", l.squares, "number of squares for --squares-over")->capture_default_str();
}

std::pair<OFLattice, json> resolve_lattice(const LatticeArgs& l) {
  if (!l.lattice.empty() && l.squares_D) throw CLI::ValidationError("--lattice and --squares-over are exclusive");
  if (!l.lattice.empty()) return {catalog_get(l.lattice), json{{"lattice", l.lattice}}};
  if (l.squares_D) {
    return {sum_of_squares(*l.squares_D, l.squares), json{{"squares_over", *l.squares_D}, {"squares", l.squares}}};
  }
  throw CLI::ValidationError("a lattice is required (--lattice or --squares-over)");
}

struct VerifyArgs {
  LatticeArgs lat;
  std::int64_t trace_bound = 10;
  std::optional<std::int64_t> norm_bound;
};

int run_verify(const VerifyArgs& a, const Common& c) {
  Runner r("verify");
  auto [L, params] = resolve_lattice(a.lat);
  params["trace_bound"] = a.trace_bound;
  std::optional<Rat> nb;
  if (a.norm_bound) {
    params["norm_bound"] = *a.norm_bound;
    nb = Rat(*a.norm_bound);
  }
  const auto rep = check_box_universal(L, a.trace_bound, c.jobs, nb);
  json out = {{"lattice", L.label()},
              {"D", L.ctx().D()},
              {"count_checked", rep.count_checked},
              {"vectors_enumerated", rep.vectors_enumerated},
              {"failures", qlist(rep.failures)},
              {"universal_on_box", rep.failures.empty()}};
  emit(r.report(params, out));
  return kOk;
}

struct RepresentArgs {
  LatticeArgs lat;
  std::string target;
};

int run_represent(const RepresentArgs& a, const Common& c) {
  Runner r("represent");
  auto [L, params] = resolve_lattice(a.lat);
  params["target"] = a.target;
  const QuadRat alpha = QuadRat::parse(L.ctx(), a.target);
  if (!alpha.in_OF() || !alpha.is_totally_positive()) {
    throw Error(ErrorCode::OutOfRange, "target must be a totally positive integer of the field");
  }
  const auto w = represents(L, alpha, c.jobs);
  json out = {{"lattice", L.label()}, {"target", qjson(alpha)}, {"represented", w.has_value()}};
  if (w) out["witness"] = {{"coords", w->coords}, {"value", qjson(w->value)}};
  emit(r.report(params, out));
  return kOk;
}

struct CatalogArgs {
  std::optional<std::int64_t> D;
  std::string name;
};

int run_catalog(const CatalogArgs& a) {
  Runner r("catalog");
  json params = json::object();
  const auto& proven = proven_universal_names();
  auto entry_json = [&](const CatalogEntry& e) {
    const auto L = catalog_get(e.name);
    json j = {{"name", e.name},
              {"D", e.D},
              {"definition", e.definition},
              {"n", L.n()},
              {"proven_universal", std::find(proven.begin(), proven.end(), e.name) != proven.end()}};
    return j;
  };
  json entries = json::array();
  if (!a.name.empty()) {
    params["name"] = a.name;
    const auto L = catalog_get(a.name);
    for (const auto& e : catalog_entries()) {
      if (e.name == a.name) {
        json j = entry_json(e);
        j["lattice"] = lattice_json(L);
        entries.push_back(j);
      }
    }
  } else {
    if (a.D) {
      params["D"] = *a.D;
      FieldCtx check(*a.D);
    }
    for (const auto& e : catalog_entries()) {
      if (!a.D || e.D == *a.D) entries.push_back(entry_json(e));
    }
  }
  json out = {{"count", entries.size()}, {"entries", entries}};
  emit(r.report(params, out));
  return kOk;
}

// --- sweep ----------------------------------------------------------------

struct SweepArgs {
  std::int64_t from = 2;
  std::int64_t to = 100;
  std::string set = "paper";
  SearchArgs search;
};

int run_sweep(const SweepArgs& a, const Common& c) {
  Runner r("sweep");
  json params = search_params(a.search);
  params["from"] = a.from;
  params["to"] = a.to;
  params["set"] = a.set;
  if (!a.search.checkpoint.empty()) throw CLI::ValidationError("sweep does not take --checkpoint");
  const auto& adm = admissible_D();
  std::size_t infeasible = 0, inconclusive = 0;
  json feasible = json::array(), skipped = json::array();
  for (std::int64_t D = std::max<std::int64_t>(2, a.from); D <= a.to; ++D) {
    if (!is_squarefree(D)) continue;
    if (std::find(adm.begin(), adm.end(), D) != adm.end()) {
      skipped.push_back(D);
      continue;
    }
    const auto ns = nonexistence_set(D, a.set == "generic" ? SetMode::Generic : SetMode::Paper);
    const auto res = search_rank_le3(make_problem(FieldCtx(D), ns.S, a.search), make_options(a.search, c));
    json line = {{"record", "field"},
                 {"D", D},
                 {"set_kind", ns.kind},
                 {"status", to_string(res.status)},
                 {"nodes", res.stats.nodes}};
    emit(line);
    if (res.status == FeasStatus::Infeasible) ++infeasible;
    if (res.status == FeasStatus::Inconclusive) ++inconclusive;
    if (res.status == FeasStatus::Feasible) feasible.push_back(D);
  }
  json out = {{"infeasible", infeasible},
              {"inconclusive", inconclusive},
              {"feasible", feasible},
              {"admissible_skipped", skipped}};
  json rep = r.report(params, out);
  rep["record"] = "report";
  emit(rep);
  return inconclusive > 0 ? kInconclusive : kOk;
}

void print_error(const std::string& code, const std::string& message) {
  std::cerr << json{{"error", code}, {"message", message}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact tools for universal ternary lattices over real quadratic fields", "kitaoka"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", KITAOKA_VERSION);
  Common common;
  common.jobs = default_jobs();
  app.add_option("--jobs", common.jobs, "worker threads (default: $KITAOKA_JOBS or 1)")
      ->check(CLI::Range(1u, 1024u));

  BoundsArgs ba;
  auto* bounds = app.add_subcommand("bounds", "discriminant bounds");
  bounds->add_option("--m", ba.m, "m")->required();
  bounds->add_option("--rank", ba.rank, "lattice rank (3..7)")->required();

  NonresidueArgs na;
  auto* nonres = app.add_subcommand("nonresidue", "least quadratic non-residue");
  nonres->add_option("--p", na.p, "prime");
  nonres->add_option("--limit", na.limit, "check every odd prime up to this bound");
  nonres->add_option("--gamma2", na.gamma2, "convention at p = 2")->check(CLI::IsMember({5, 7}))->capture_default_str();

  NonexistArgs nx;
  auto* nonexist = app.add_subcommand("nonexist", "rank <= 3 feasibility of a nonexistence set");
  nonexist->add_option("--D", nx.D, "squarefree D")->required();
  nonexist->add_option("--set", nx.set, "element set")->check(CLI::IsMember({"paper", "generic"}))->capture_default_str();
  nonexist->add_option("--elements", nx.elements, "element file (a,b,q per line)");
  add_search_flags(nonexist, nx.search);

  ClassifyArgs ca;
  auto* classify = app.add_subcommand("classify", "all rank <= 3 lattices through a finite element set (JSON lines)");
  classify->add_option("--D", ca.D, "squarefree D")->required();
  classify->add_option("--elements", ca.elements, "element file");
  classify->add_option("--trace-bound", ca.trace_bound, "generate elements with trace <= T");
  classify->add_option("--norm-bound", ca.norm_bound, "and norm <= N");
  classify->add_option("--max-elements", ca.max_elements, "keep the smallest-norm K elements")->capture_default_str();
  classify->add_option("--cap", ca.cap, "witness cap")->capture_default_str();
  add_search_flags(classify, ca.search);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "represent every element of a trace box");
  add_lattice_flags(verify, va.lat);
  verify->add_option("--trace-bound", va.trace_bound, "trace bound T")->capture_default_str();
  verify->add_option("--norm-bound", va.norm_bound, "also require norm <= N");

  RepresentArgs ra;
  auto* represent = app.add_subcommand("represent", "find a representation of one element");
  add_lattice_flags(represent, ra.lat);
  represent->add_option("--target", ra.target, "a,b,q meaning (a + b sqrt D)/q")->required();

  CatalogArgs cat;
  auto* catalog = app.add_subcommand("catalog", "list candidate lattices");
  catalog->add_option("--D", cat.D, "restrict to one field");
  catalog->add_option("--name", cat.name, "one entry with its Gram matrix");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "nonexistence sets over a range of D (JSON lines, long running)");
  sweep->add_option("--from", sw.from, "first D")->capture_default_str();
  sweep->add_option("--to", sw.to, "last D")->capture_default_str();
  sweep->add_option("--set", sw.set, "element set")->check(CLI::IsMember({"paper", "generic"}))->capture_default_str();
  add_search_flags(sweep, sw.search);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return kUsage;
  }

  try {
    if (*bounds) return run_bounds(ba);
    if (*nonres) return run_nonresidue(na);
    if (*nonexist) return run_nonexist(nx, common);
    if (*classify) return run_classify(ca, common);
    if (*verify) return run_verify(va, common);
    if (*represent) return run_represent(ra, common);
    if (*catalog) return run_catalog(cat);
    if (*sweep) return run_sweep(sw, common);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return kUsage;
  } catch (const Error& e) {
    print_error(to_string(e.code()), e.what());
    return e.code() == ErrorCode::InvariantViolation ? kInvariant : kUsage;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return kInvariant;
  }
  return kUsage;
}
