#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "opspace/acceptance.hpp"
#include "opspace/atlas.hpp"
#include "opspace/cli.hpp"
#include "opspace/duality.hpp"
#include "opspace/norms.hpp"
#include "opspace/report.hpp"

#include <sstream>

namespace py = pybind11;
using PySpace = std::shared_ptr<opspace::MatrixSpace>;
using namespace opspace;

namespace {

LevelElement as_element(const SpacePtr& space, const CMat& m) {
  // Same checks as file input.
  return element_from_json(space, matrix_to_json(m));
}

MatrixFunctional as_functional(const SpacePtr& space, const std::vector<std::vector<CMat>>& reps) {
  Json j = {{"representatives", Json::array()}};
  for (const auto& row : reps) {
    Json r = Json::array();
    for (const CMat& m : row) r.push_back(matrix_to_json(m));
    j["representatives"].push_back(r);
  }
  return functional_from_json(space, j);
}

std::vector<std::vector<CMat>> reps_of(const MatrixFunctional& f) {
  std::vector<std::vector<CMat>> out(static_cast<std::size_t>(f.size()));
  for (Index i = 0; i < f.size(); ++i)
    for (Index j = 0; j < f.size(); ++j) out[static_cast<std::size_t>(i)].push_back(f.rep(i, j));
  return out;
}

py::object optional_matrix(const std::optional<LevelElement>& x) {
  if (!x) return py::none();
  return py::cast(x->concrete());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Matrix-ordered operator spaces: norms, cones and dual SDP checks";

  py::register_exception<Error>(m, "OpspaceError", PyExc_ValueError);

  py::class_<MatrixSpace, std::shared_ptr<MatrixSpace>>(m, "Space")
      .def_property_readonly("name", &MatrixSpace::name)
      .def_property_readonly("dim", &MatrixSpace::dim)
      .def_property_readonly("ambient_dim", &MatrixSpace::ambient_dim)
      .def_property_readonly("basis", [](const MatrixSpace& s) { return s.basis(); })
      .def("contains_identity", &MatrixSpace::contains_identity, py::arg("tol") = 1e-10)
      .def("distance", &MatrixSpace::distance)
      .def("__repr__", [](const MatrixSpace& s) {
        return "<Space " + s.name() + " dim=" + std::to_string(s.dim()) + " in M_" +
               std::to_string(s.ambient_dim()) + ">";
      });

  // SpacePtr is shared_ptr<const MatrixSpace>; the holder type drops const.
  auto unconst = [](const SpacePtr& s) { return std::const_pointer_cast<MatrixSpace>(s); };

  m.def("example", [unconst](const std::string& selector) { return unconst(make_example(selector)); },
        py::arg("selector"));
  m.def("span",
        [unconst](const std::vector<CMat>& gens, double tol, const std::string& name) {
          return unconst(build_space(gens, tol, name));
        },
        py::arg("generators"), py::arg("tol") = 1e-10, py::arg("name") = "user");

  m.def("norm", [](const PySpace& s, const CMat& x) { return level_norm(as_element(s, x)); },
        py::arg("space"), py::arg("x"));

  m.def("cone_member",
        [](const PySpace& s, const CMat& x, double tol) {
          const ConeMembershipResult r = cone_member(as_element(s, x), tol);
          return py::dict(py::arg("member") = to_string(r.member), py::arg("min_eigenvalue") = r.min_eigenvalue);
        },
        py::arg("space"), py::arg("x"), py::arg("tol") = kDefaultTol);

  m.def("regnorm",
        [](const PySpace& s, const CMat& x, double tol) {
          const RegResult r = reg_norm(as_element(s, x), tol);
          return py::dict(py::arg("value") = r.infinite ? std::numeric_limits<double>::infinity() : r.value,
                          py::arg("infinite") = r.infinite, py::arg("undecided") = r.undecided,
                          py::arg("a") = optional_matrix(r.a), py::arg("d") = optional_matrix(r.d),
                          py::arg("psd_residual") = r.psd_residual);
        },
        py::arg("space"), py::arg("x"), py::arg("tol") = kDefaultTol);

  m.def("nu",
        [](const PySpace& s, const CMat& x, int grid, double tol) {
          const NuResult r = nu(as_element(s, x), grid, tol);
          return py::dict(py::arg("lower") = r.lower, py::arg("upper") = r.upper,
                          py::arg("undecided") = r.undecided);
        },
        py::arg("space"), py::arg("x"), py::arg("grid") = 64, py::arg("tol") = kDefaultTol);

  m.def("dualnorm",
        [](const PySpace& s, const std::vector<std::vector<CMat>>& reps, int samples, std::uint64_t seed) {
          const DualNormResult r = dual_cb_norm(as_functional(s, reps), samples, seed);
          return py::dict(py::arg("value") = r.value, py::arg("lower") = r.lower, py::arg("upper") = r.upper,
                          py::arg("sampled_lower") = r.sampled_lower, py::arg("undecided") = r.undecided);
        },
        py::arg("space"), py::arg("representatives"), py::arg("samples") = 64, py::arg("seed") = 0);

  m.def("cp_check",
        [](const PySpace& s, const std::vector<std::vector<CMat>>& reps, double tol) {
          const CpResult r = cp_membership(as_functional(s, reps), tol);
          return py::dict(py::arg("verdict") = to_string(r.verdict),
                          py::arg("choi_min_eigenvalue") = r.choi_min_eigenvalue,
                          py::arg("violation") = optional_matrix(r.violation),
                          py::arg("violation_eigenvalue") = r.violation_eigenvalue);
        },
        py::arg("space"), py::arg("representatives"), py::arg("tol") = kDefaultTol);

  m.def("extend",
        [](const PySpace& s, const std::vector<std::vector<CMat>>& reps, const std::string& mode, double tol) {
          if (mode != "cp" && mode != "ucp") throw Error("mode must be cp or ucp");
          const ExtendResult r =
              arveson_extend(as_functional(s, reps), mode == "cp" ? ExtendMode::cp : ExtendMode::ucp, tol);
          return py::dict(py::arg("feasible") = r.feasible, py::arg("undecided") = r.undecided,
                          py::arg("choi") = r.choi, py::arg("restriction_residual") = r.restriction_residual);
        },
        py::arg("space"), py::arg("representatives"), py::arg("mode") = "cp", py::arg("tol") = kDefaultTol);

  m.def("kraus_functional",
        [](const PySpace& s, const std::vector<CMat>& kraus) { return reps_of(kraus_functional(s, kraus)); },
        py::arg("space"), py::arg("kraus"));

  m.def("regularity",
        [](const PySpace& s, const std::vector<Index>& levels, int samples, std::uint64_t seed) {
          const RegularityProfile r = regularity_profile(s, levels, samples, seed);
          return py::dict(py::arg("empirical_K") = r.empirical_K, py::arg("non_regular") = r.non_regular,
                          py::arg("samples") = r.samples, py::arg("undecided") = r.undecided,
                          py::arg("condition1_violations") = r.condition1_violations);
        },
        py::arg("space"), py::arg("levels") = std::vector<Index>{1, 2}, py::arg("samples") = 50,
        py::arg("seed") = 0);

  m.def("l1_probe",
        [](int samples, std::uint64_t seed) {
          const L1ProbeReport r = l1_two_probe(samples, seed);
          return py::dict(py::arg("unit_norm") = r.unit_norm, py::arg("estimate") = r.estimate,
                          py::arg("max_gap") = r.max_gap);
        },
        py::arg("samples") = 20, py::arg("seed") = 0);

  m.def("selftest",
        [](bool quick) {
          AcceptanceOptions o;
          o.quick = quick;
          py::list out;
          for (const CriterionResult& c : run_acceptance(o))
            out.append(py::dict(py::arg("id") = c.id, py::arg("name") = c.name, py::arg("pass") = c.pass,
                                py::arg("detail") = c.detail));
          return out;
        },
        py::arg("quick") = true);

  // Whole command line, as the binary would run it.
  m.def("run", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
