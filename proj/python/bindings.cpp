#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kitaoka/bounds.hpp"
#include "kitaoka/errors.hpp"
#include "kitaoka/feasibility.hpp"
#include "kitaoka/lattice.hpp"
#include "kitaoka/ntheory.hpp"

namespace py = pybind11;
using namespace kitaoka;

namespace {

py::object to_py(const Int& x) { return py::int_(py::str(x.get_str())); }

py::object to_fraction(const Rat& x) {
  static py::object Fraction = py::module_::import("fractions").attr("Fraction");
  return Fraction(to_py(x.get_num()), to_py(x.get_den()));
}

std::vector<QuadRat> parse_all(const FieldCtx& ctx, const std::vector<std::string>& xs) {
  std::vector<QuadRat> out;
  for (const auto& s : xs) out.push_back(QuadRat::parse(ctx, s));
  return out;
}

ColumnOrder parse_order(const std::string& s) {
  if (s == "ascending") return ColumnOrder::AscendingNorm;
  if (s == "descending") return ColumnOrder::DescendingNorm;
  if (s == "given") return ColumnOrder::AsGiven;
  throw Error(ErrorCode::UnknownName, "unknown column order " + s);
}

py::dict stats_dict(const SearchStats& s) {
  py::dict d;
  d["nodes"] = s.nodes;
  d["prune_ring"] = s.prune_ring;
  d["prune_psd"] = s.prune_psd;
  d["prune_rank"] = s.prune_rank;
  d["prune_symmetry"] = s.prune_symmetry;
  d["units"] = s.units;
  d["units_done"] = s.units_done;
  return d;
}

FeasibilityProblem make_problem(std::int64_t D, const std::vector<std::string>& S, bool classical,
                                std::uint64_t budget, double time_budget, const std::string& order,
                                bool symmetry) {
  FeasibilityProblem p;
  p.ctx = FieldCtx(D);
  p.S = parse_all(p.ctx, S);
  p.classical = classical;
  p.node_budget = budget;
  p.time_budget_s = time_budget;
  p.order = parse_order(order);
  p.symmetry = symmetry;
  return p;
}

}  // namespace

PYBIND11_MODULE(_kitaoka, m) {
  static PyObject* exc = PyErr_NewException("kitaoka._kitaoka.KitaokaError", PyExc_ValueError, nullptr);
  m.add_object("KitaokaError", py::handle(exc));
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = py::handle(exc)(py::str(e.what()));
      err.attr("code") = to_string(e.code());
      PyErr_SetObject(exc, err.ptr());
    }
  });

  m.def("least_nonresidue", [](std::int64_t p, int gamma2) {
    return least_nonresidue(p, gamma2 == 5 ? Gamma2Mode::Five : Gamma2Mode::Seven);
  }, py::arg("p"), py::arg("gamma2") = 7);
  m.def("trevino_check", &trevino_check, py::arg("limit"));
  m.def("table_bound", [](int mm, int rank) { return to_py(table_bound(mm, rank)); },
        py::arg("m"), py::arg("rank"));
  m.def("explicit_bound", [](std::int64_t mm, int rank) {
    auto b = explicit_bound(mm, rank);
    return py::make_tuple(to_fraction(b.lower), to_fraction(b.upper));
  }, py::arg("m"), py::arg("rank"));

  m.def("admissible_D", &admissible_D);
  m.def("nonexistence_set", [](std::int64_t D, bool generic) {
    auto s = nonexistence_set(D, generic ? SetMode::Generic : SetMode::Paper);
    std::vector<std::string> xs;
    for (const auto& x : s.S) xs.push_back(x.to_string());
    return py::make_tuple(s.kind, xs);
  }, py::arg("D"), py::arg("generic") = false);

  m.def("search", [](std::int64_t D, const std::vector<std::string>& S, bool classical,
                     std::uint64_t budget, double time_budget, const std::string& order, bool symmetry,
                     unsigned jobs) {
    auto p = make_problem(D, S, classical, budget, time_budget, order, symmetry);
    SearchOptions opt;
    opt.jobs = jobs;
    FeasibilityOutcome r;
    {
      py::gil_scoped_release nogil;
      r = search_rank_le3(p, opt);
    }
    py::dict d;
    d["status"] = to_string(r.status);
    d["stats"] = stats_dict(r.stats);
    d["witness"] = r.witness ? py::cast(r.witness->to_strings()) : py::none();
    d["note"] = r.note;
    return d;
  }, py::arg("D"), py::arg("S"), py::arg("classical") = false, py::arg("budget") = 1'000'000'000ULL,
     py::arg("time_budget") = 3600.0, py::arg("order") = "ascending", py::arg("symmetry") = true,
     py::arg("jobs") = 1);

  m.def("audit_witness", [](std::int64_t D, const std::vector<std::string>& S,
                            const std::vector<std::vector<std::string>>& rows, bool classical) {
    FeasibilityProblem p;
    p.ctx = FieldCtx(D);
    p.S = parse_all(p.ctx, S);
    p.classical = classical;
    std::vector<std::vector<QuadRat>> g;
    for (const auto& r : rows) g.push_back(parse_all(p.ctx, r));
    return audit_witness(p, ExactSymMat::from_rows(p.ctx, g));
  }, py::arg("D"), py::arg("S"), py::arg("witness"), py::arg("classical") = false);

  py::class_<OFLattice>(m, "Lattice")
      .def_property_readonly("D", [](const OFLattice& L) { return L.ctx().D(); })
      .def_property_readonly("n", &OFLattice::n)
      .def_property_readonly("label", &OFLattice::label)
      .def_property_readonly("gram", [](const OFLattice& L) { return L.gram().to_strings(); })
      .def_property_readonly("omega_action", &OFLattice::omega_action)
      .def("value", [](const OFLattice& L, const IntVec& x) { return L.q_value(x).to_string(); })
      .def("fingerprint", [](const OFLattice& L) { return fingerprint(L); })
      .def("represents", [](const OFLattice& L, const std::string& target, unsigned jobs) -> py::object {
        auto w = represents(L, QuadRat::parse(L.ctx(), target), jobs);
        if (!w) return py::none();
        return py::make_tuple(w->coords, w->value.to_string());
      }, py::arg("target"), py::arg("jobs") = 1)
      .def("check_box", [](const OFLattice& L, std::int64_t T, std::optional<std::string> norm_bound,
                           unsigned jobs) {
        std::optional<Rat> nb;
        if (norm_bound) nb = Rat(*norm_bound);
        BoxReport r;
        {
          py::gil_scoped_release nogil;
          r = check_box_universal(L, T, jobs, nb);
        }
        py::dict d;
        d["count_checked"] = r.count_checked;
        d["vectors_enumerated"] = r.vectors_enumerated;
        std::vector<std::string> f;
        for (const auto& x : r.failures) f.push_back(x.to_string());
        d["failures"] = f;
        return d;
      }, py::arg("trace_bound"), py::arg("norm_bound") = py::none(), py::arg("jobs") = 1)
      .def("__repr__", [](const OFLattice& L) {
        return "<Lattice " + L.label() + " D=" + std::to_string(L.ctx().D()) + " n=" + std::to_string(L.n()) + ">";
      });

  m.def("catalog_names", [](std::optional<std::int64_t> D) {
    std::vector<std::string> out;
    for (const auto& e : catalog_entries())
      if (!D || e.D == *D) out.push_back(e.name);
    return out;
  }, py::arg("D") = py::none());
  m.def("catalog_get", &catalog_get, py::arg("name"));
  m.def("proven_universal_names", &proven_universal_names);

  m.def("classify", [](std::int64_t D, const std::vector<std::string>& S, std::size_t cap, unsigned jobs) {
    FeasibilityProblem p;
    p.ctx = FieldCtx(D);
    p.S = parse_all(p.ctx, S);
    SearchOptions opt;
    opt.jobs = jobs;
    ClassifyResult r;
    {
      py::gil_scoped_release nogil;
      r = classify_search(p, cap, opt);
    }
    py::dict d;
    d["status"] = to_string(r.status);
    d["lattices"] = r.lattices;
    d["fingerprints"] = r.fingerprints;
    d["witnesses"] = r.witnesses;
    d["low_rank_witnesses"] = r.low_rank_witnesses;
    d["saturated"] = r.saturated;
    d["stats"] = stats_dict(r.stats);
    return d;
  }, py::arg("D"), py::arg("S"), py::arg("cap") = 100000, py::arg("jobs") = 1);
}
