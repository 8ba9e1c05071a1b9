#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hkq/cli.hpp"
#include "hkq/git_stability.hpp"
#include "hkq/hk_reduction.hpp"
#include "hkq/kempf_ness.hpp"
#include "hkq/moment_maps.hpp"
#include "hkq/strata.hpp"

namespace py = pybind11;
using namespace hkq;

namespace {

// ints, floats (exact binary value), str and fractions.Fraction.
Rational to_rational(const py::handle& h) {
  if (py::isinstance<py::bool_>(h)) throw py::type_error("booleans are not rationals");
  if (py::isinstance<py::int_>(h)) return parse_rational(py::str(h).cast<std::string>());
  if (py::isinstance<py::float_>(h)) return from_double(h.cast<double>());
  return parse_rational(py::str(h).cast<std::string>());
}

py::object to_fraction(const Rational& q) {
  return py::module_::import("fractions").attr("Fraction")(to_string(q));
}

ExactComplex to_exact_complex(const py::handle& h) {
  if (PyComplex_Check(h.ptr())) {
    const auto c = h.cast<std::complex<double>>();
    return {from_double(c.real()), from_double(c.imag())};
  }
  if (py::isinstance<py::tuple>(h) || py::isinstance<py::list>(h)) {
    auto seq = h.cast<py::sequence>();
    if (seq.size() != 2) throw py::value_error("complex entries are (re, im) pairs");
    return {to_rational(seq[0]), to_rational(seq[1])};
  }
  return {to_rational(h), Rational(0)};
}

ExactAmbientPoint exact_point(const py::sequence& coords) {
  ExactAmbientPoint p;
  for (const auto& c : coords) p.coords.push_back(to_exact_complex(c));
  return p;
}

CotangentPoint cotangent(const std::vector<Complex>& x, const std::vector<Complex>& z) { return {x, z}; }

std::vector<Rational> to_rationals(const py::sequence& s) {
  std::vector<Rational> out;
  for (const auto& e : s) out.push_back(to_rational(e));
  return out;
}

py::object certificate(const std::optional<Cocharacter>& c) {
  if (!c) return py::none();
  py::list out;
  for (const auto& q : c->exact_value()) out.append(py::int_(py::str(to_string(q))));
  return out;
}

py::dict stabilizer_dict(const StabilizerInfo& s) {
  py::dict d;
  py::list inv;
  for (const auto& f : s.finite_invariants) inv.append(py::int_(py::str(f.str())));
  d["subtorus_rank"] = s.subtorus_rank;
  d["finite_invariants"] = inv;
  d["order"] = s.finite() ? py::object(py::int_(py::str(s.finite_order().str()))) : py::none();
  return d;
}

py::dict kn_dict(const KNOutcome& o) {
  py::dict d;
  d["status"] = to_string(o.status);
  d["iterations"] = o.iterations;
  d["residual"] = o.residual;
  d["xi_star"] = o.status == KNStatus::converged ? py::cast(o.xi_star) : py::none();
  d["representative"] = o.status == KNStatus::converged ? py::cast(o.representative.coords) : py::none();
  d["certificate"] = certificate(o.certificate);
  return d;
}

}  // namespace

PYBIND11_MODULE(_hkq, m) {
  m.doc() = "Exact GIT, Kempf-Ness and hyperkahler reduction for torus actions on T*C^n";

  // translators run last-registered first, so the base class goes first
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<EnumerationBoundExceeded>(m, "EnumerationBoundExceeded", PyExc_RuntimeError);
  py::register_exception<UndecidedError>(m, "UndecidedError", PyExc_RuntimeError);

  py::class_<WeightSystem>(m, "WeightSystem")
      .def(py::init([](std::size_t rank, std::vector<Weight> weights, const py::sequence& theta) {
             return WeightSystem(rank, std::move(weights), to_rationals(theta));
           }),
           py::arg("rank"), py::arg("weights"), py::arg("theta"))
      .def_static("from_json", [](const std::string& text) { return parse_weights(text); })
      .def_property_readonly("rank", &WeightSystem::rank)
      .def_property_readonly("size", &WeightSystem::size)
      .def_property_readonly("weights", &WeightSystem::weights)
      .def_property_readonly("theta",
                             [](const WeightSystem& w) {
                               py::list out;
                               for (const auto& t : w.theta()) out.append(to_fraction(t));
                               return out;
                             })
      .def("doubled", &doubled_weights)
      .def("__eq__", [](const WeightSystem& a, const WeightSystem& b) { return a == b; })
      .def("__repr__", [](const WeightSystem& w) {
        std::ostringstream s;
        s << "WeightSystem(rank=" << w.rank() << ", n=" << w.size() << ")";
        return s.str();
      });

  m.def("hirzebruch_weights",
        [](long long n, const py::object& c0, const py::object& c1) {
          return hirzebruch_weights(n, to_rational(c0), to_rational(c1));
        },
        py::arg("n"), py::arg("c0") = 1, py::arg("c1") = 1);

  // --- stability
  m.def("unstable_maximal_supports", &unstable_maximal_supports, py::arg("w"),
        py::arg("bound") = kDefaultEnumerationBound);
  m.def("unstable_components", &unstable_components, py::arg("w"), py::arg("bound") = kDefaultEnumerationBound);
  m.def("semistable_supports", &semistable_supports, py::arg("w"), py::arg("bound") = kDefaultEnumerationBound);
  m.def("quotient_compact", &quotient_compact);
  m.def("quotient_smooth", [](const WeightSystem& w, std::size_t bound) {
    const SmoothnessResult r = quotient_smooth(w, bound);
    return py::make_tuple(r.smooth, r.offending_support ? py::cast(*r.offending_support) : py::none());
  }, py::arg("w"), py::arg("bound") = kDefaultEnumerationBound);
  m.def("stabilizer", [](const WeightSystem& w, const IndexSet& s) { return stabilizer_dict(stabilizer(w, s)); });
  m.def("classify_point",
        [](const WeightSystem& w, const py::sequence& coords, std::optional<double> threshold) {
          const ExactAmbientPoint p = exact_point(coords);
          const StabilityVerdict v = threshold ? classify_point(w, to_numeric(p), *threshold) : classify_point(w, p);
          return py::make_tuple(to_string(v.status), certificate(v.certificate));
        },
        py::arg("w"), py::arg("coords"), py::arg("threshold") = py::none(),
        "Exact classification unless a numeric support threshold is given.");
  m.def("mu_weight", [](const WeightSystem& w, const py::sequence& coords, const py::sequence& xi) {
    const MuWeight mw = mu_weight(w, exact_point(coords), Cocharacter::exact(to_rationals(xi)));
    return mw.infinite ? py::object(py::float_(INFINITY)) : to_fraction(mw.value);
  });
  m.def("kahler_strata", [](const WeightSystem& w, std::size_t bound) {
    py::list out;
    for (const auto& s : kahler_strata(w, bound)) {
      py::dict d;
      d["stabilizer"] = stabilizer_dict(s.stabilizer);
      d["open"] = s.open;
      d["supports"] = s.supports;
      out.append(d);
    }
    return out;
  }, py::arg("w"), py::arg("bound") = kDefaultEnumerationBound);

  // --- moment maps
  m.def("mu", [](const WeightSystem& w, const std::vector<Complex>& v) { return mu(w, AmbientPoint{v}).value; });
  m.def("hol_moment", [](const WeightSystem& w, const std::vector<Complex>& x, const std::vector<Complex>& z) {
    const auto v = hol_moment(w, cotangent(x, z)).value;
    std::vector<Complex> out;
    for (std::size_t a = 0; a + 1 < v.size(); a += 2) out.emplace_back(v[a], v[a + 1]);
    return out;
  });
  m.def("mu_hyperkahler", [](const WeightSystem& w, const std::vector<Complex>& x, const std::vector<Complex>& z) {
    return mu_hyperkahler(w, cotangent(x, z)).value;
  });
  m.def("psi", [](const std::vector<Complex>& x, const std::vector<Complex>& z) { return psi(cotangent(x, z)); });

  // --- Kempf-Ness
  m.def("solve_kahler", [](const WeightSystem& w, const std::vector<Complex>& v, double tol) {
    KNOptions o;
    o.tolerance = tol;
    return kn_dict(solve_kahler(w, AmbientPoint{v}, o));
  }, py::arg("w"), py::arg("v"), py::arg("tol") = 1e-10);
  m.def("solve_hyperkahler",
        [](const WeightSystem& w, const std::vector<Complex>& x, const std::vector<Complex>& z, double tol) {
          KNOptions o;
          o.tolerance = tol;
          const KNHyperkahlerOutcome r = solve_hyperkahler(w, cotangent(x, z), o);
          py::dict d = kn_dict(r.kahler);
          const bool ok = r.kahler.status == KNStatus::converged;
          d["representative"] = ok ? py::make_tuple(r.representative.x, r.representative.z) : py::object(py::none());
          d["hyperkahler_residual"] = ok ? py::object(py::float_(r.hyperkahler_residual)) : py::none();
          return d;
        },
        py::arg("w"), py::arg("x"), py::arg("z"), py::arg("tol") = 1e-10);

  // --- reduction
  m.def("reduced_frame", [](const WeightSystem& w, const std::vector<Complex>& x, const std::vector<Complex>& z) {
    const ReducedFrame f = horizontal_frame(w, cotangent(x, z));
    py::dict d;
    d["dimension"] = f.dimension();
    d["ambient_dimension"] = f.ambient_dim();
    d["quaternion_deviation"] = quaternion_check(f);
    d["horizontal_basis"] = f.horizontal_basis();
    d["metric_gram"] = f.metric_gram();
    d["omega_I_gram"] = f.form_gram(Quaternion::I);
    d["omega_J_gram"] = f.form_gram(Quaternion::J);
    d["omega_K_gram"] = f.form_gram(Quaternion::K);
    return d;
  });

  // --- strata
  m.def("hk_candidate_strata", [](const WeightSystem& w, std::size_t bound, unsigned threads) {
    py::list out;
    for (const auto& c : hk_candidate_strata(w, bound, threads)) {
      py::dict d;
      d["support_x"] = c.support_x;
      d["support_z"] = c.support_z;
      d["stabilizer"] = stabilizer_dict(c.stabilizer);
      d["status"] = to_string(c.status);
      out.append(d);
    }
    return out;
  }, py::arg("w"), py::arg("bound") = kDefaultStrataBound, py::arg("threads") = 1);
  m.def("hirzebruch_suite",
        [](long long n, const py::object& c0, const py::object& c1, std::uint64_t seed) {
          const HirzebruchReport r = hirzebruch_suite(n, to_rational(c0), to_rational(c1), seed);
          py::dict d;
          d["passed"] = r.passed();
          d["residual_order"] = py::int_(py::str(r.residual_order.str()));
          py::list checks;
          for (const auto& c : r.checks) checks.append(py::make_tuple(c.name, c.passed, c.detail));
          d["checks"] = checks;
          return d;
        },
        py::arg("n"), py::arg("c0") = 1, py::arg("c1") = 1, py::arg("seed") = 0);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, "Runs a CLI command line in-process; returns (exit_code, stdout, stderr).");
}
