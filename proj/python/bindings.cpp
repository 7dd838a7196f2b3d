#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stark/airy.hpp"
#include "stark/asympt.hpp"
#include "stark/branchcut.hpp"
#include "stark/determinant.hpp"
#include "stark/potential.hpp"
#include "stark/roots.hpp"
#include "stark/smatrix.hpp"

namespace py = pybind11;
using namespace stark;

namespace {

Family fam(const std::string& s) { return parse_family(s); }

py::dict airy_dict(cplx z) {
  const AiryValue v = airy_eval(z);
  py::dict d;
  d["ai"] = v.ai_value();
  d["aip"] = v.aip_value();
  d["bi"] = v.bi_value();
  d["bip"] = v.bip_value();
  d["ai_exponent"] = v.ai_exponent;
  d["bi_exponent"] = v.bi_exponent;
  d["scaled_wronskian"] = v.scaled_wronskian();
  d["accuracy_loss"] = v.accuracy_loss;
  return d;
}

py::dict det_dict(const DeterminantSample& s) {
  py::dict d;
  d["det"] = s.det_value;
  d["log_abs"] = s.det.log_abs();
  d["arg"] = s.det.arg();
  d["matrix_dim"] = s.matrix_dim;
  d["condition_estimate"] = s.condition_estimate;
  d["singular"] = s.singular;
  d["refinement_change"] = s.refinement_change;
  d["ode_continued"] = s.ode_continued;
  return d;
}

GridSpec grid_from(int panels, int order, bool auto_refine) {
  GridSpec g;
  g.panels = panels;
  g.order = order;
  g.auto_refine = auto_refine;
  return g;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Stark operator resonances: Airy functions, Fredholm determinants, S-matrix, root finding";

  py::register_exception<AccuracyError>(m, "AccuracyError", PyExc_ArithmeticError);
  py::register_exception<SingularError>(m, "SingularError", PyExc_ArithmeticError);
  py::register_exception<BoundaryZeroError>(m, "BoundaryZeroError", PyExc_ArithmeticError);
  py::register_exception<FitError>(m, "FitError", PyExc_ValueError);

  m.def("branch_power", &branch_power, py::arg("lam"), py::arg("alpha"));
  m.def("minus_ik_power", &minus_ik_power, py::arg("k"), py::arg("p"));

  py::class_<SpectralPoint>(m, "SpectralPoint")
      .def(py::init<cplx>(), py::arg("lam"))
      .def_static("polar", &SpectralPoint::polar, py::arg("modulus"), py::arg("arg"))
      .def_property_readonly("lam", &SpectralPoint::lambda)
      .def_property_readonly("phi", &SpectralPoint::phi)
      .def_property_readonly("k", &SpectralPoint::k)
      .def_property_readonly("z", &SpectralPoint::z);

  m.def("airy_eval", &airy_dict, py::arg("z"),
        "Ai, Ai', Bi, Bi' at z as unscaled values (may overflow) plus the scaling exponents.");
  m.def("airy_ai", [](cplx z) { return airy_ai(z).value(); }, py::arg("z"));

  py::class_<Potential>(m, "Potential")
      .def(py::init<>())
      .def_readwrite("gamma", &Potential::gamma)
      .def_readwrite("c_star", &Potential::c_star)
      .def_readwrite("p", &Potential::p)
      .def_readwrite("nu", &Potential::nu)
      .def("__call__", &Potential::operator(), py::arg("x"))
      .def("scaled", &Potential::scaled, py::arg("eps"))
      .def("validate", &Potential::validate, py::arg("require_condition_c") = false)
      .def("set_polynomial", [](Potential& V, std::vector<double> c) { V.smooth = SmoothPart::polynomial(c); })
      .def_static("reference_smooth", &Potential::reference_smooth)
      .def_static("power_law", &Potential::power_law, py::arg("c"), py::arg("p"), py::arg("gamma") = 1.0)
      .def_static("constant", &Potential::constant, py::arg("v"), py::arg("gamma") = 1.0)
      .def_static("zero", [] { return Potential{}; });

  m.def("fourier_half", &fourier_half, py::arg("V"), py::arg("k"));
  m.def("condition_c_constant", &condition_c_constant, py::arg("V"));
  m.def(
      "condition_c_fit",
      [](const Potential& V, const std::vector<cplx>& ks) {
        const ConditionCFit f = condition_c_fit(V, ks);
        py::dict d;
        d["c_p_estimate"] = f.c_p_estimate;
        d["remainder_exponent"] = f.remainder_exponent;
        d["effective_p"] = f.effective_p;
        d["satisfied"] = f.satisfied;
        return d;
      },
      py::arg("V"), py::arg("k_grid"));

  m.def(
      "fredholm_det",
      [](const Potential& V, cplx lam, const std::string& branch, int panels, int order, bool auto_refine) {
        const Branch b = branch == "minus" ? Branch::minus : Branch::plus;
        const GridSpec g = panels > 0 ? grid_from(panels, order, auto_refine) : default_grid_spec(V, lam);
        return det_dict(fredholm_det(V, lam, g, b));
      },
      py::arg("V"), py::arg("lam"), py::arg("branch") = "plus", py::arg("panels") = 0, py::arg("order") = 16,
      py::arg("auto_refine") = false);

  m.def(
      "s_matrix",
      [](const Potential& V, cplx lam, bool det_ratio) {
        SMatrixOptions o;
        o.det_ratio = det_ratio;
        const SMatrixSample s = s_matrix(V, lam, o);
        py::dict d;
        d["s"] = s.s();
        d["log_abs_s"] = s.s_stationary.log_abs();
        d["det_ratio"] = s.det_ratio_available ? py::cast(s.s_det_ratio.value()) : py::none();
        d["a0"] = s.a0.value();
        d["a1"] = s.a1.value();
        d["xi"] = s.xi.value();
        return d;
      },
      py::arg("V"), py::arg("lam"), py::arg("det_ratio") = true);
  m.def("a0", &a0, py::arg("V"), py::arg("lam"));

  m.def(
      "forbidden_domain_scan",
      [](const Potential& V, double phi_min, double phi_max, double r_min, double r_max, int n_phi, int n_r) {
        ScanSpec s{phi_min, phi_max, r_min, r_max, n_phi, n_r, 8};
        const ScanReport r = forbidden_domain_scan(V, s);
        py::dict d;
        d["total_winding"] = r.total_winding;
        d["cells_with_winding"] = r.cells_with_winding;
        d["max_log_bound_ratio"] = r.max_log_bound_ratio;
        d["cells"] = r.cells.size();
        return d;
      },
      py::arg("V"), py::arg("phi_min"), py::arg("phi_max"), py::arg("r_min") = 30.0, py::arg("r_max") = 120.0,
      py::arg("n_phi") = 6, py::arg("n_r") = 8);

  m.def("map_z_lambda", [](cplx z, const std::string& f) { return map_z_lambda(z, fam(f)); }, py::arg("z"),
        py::arg("family") = "plus");
  m.def("map_lambda_z", [](cplx l) { return map_lambda_z(SpectralPoint(l)); }, py::arg("lam"));

  m.def(
      "model_roots",
      [](double b, cplx z_star, int n_lo, int n_hi, const std::string& family, py::object g_coef, double g_beta) {
        ModelParams P{b, z_star, std::nullopt};
        if (!g_coef.is_none()) P.g = Perturbation{g_coef.cast<cplx>(), g_beta};
        py::list out;
        for (const auto& r : model_roots(P, n_lo, n_hi, fam(family))) {
          py::dict d;
          d["n"] = r.n;
          d["z"] = r.z;
          d["residual"] = r.residual;
          d["converged"] = r.converged;
          d["basin_escape"] = r.basin_escape;
          out.append(d);
        }
        return out;
      },
      py::arg("b"), py::arg("z_star"), py::arg("n_lo"), py::arg("n_hi"), py::arg("family") = "plus",
      py::arg("g_coef") = py::none(), py::arg("g_beta") = 0.5);
  m.def(
      "predicted_model_root",
      [](double b, cplx z_star, int n, const std::string& f) {
        return predicted_model_root(ModelParams{b, z_star, std::nullopt}, n, fam(f));
      },
      py::arg("b"), py::arg("z_star"), py::arg("n"), py::arg("family") = "plus");

  m.def(
      "brute_force_roots",
      [](const std::function<cplx(cplx)>& f, double x0, double x1, double y0, double y1, int nx, int ny, double tol) {
        BruteForceOptions o;
        o.nx = nx;
        o.ny = ny;
        o.tol = tol;
        // the callback holds the GIL; run the census on one thread
        const char* prev = std::getenv("STARK_THREADS");
        const std::string saved = prev ? prev : "";
        setenv("STARK_THREADS", "1", 1);
        BruteForceResult r;
        try {
          r = brute_force_roots_plain(f, Rect{x0, x1, y0, y1}, o);
        } catch (...) {
          prev ? setenv("STARK_THREADS", saved.c_str(), 1) : unsetenv("STARK_THREADS");
          throw;
        }
        prev ? setenv("STARK_THREADS", saved.c_str(), 1) : unsetenv("STARK_THREADS");
        py::list out;
        for (const auto& fr : r.roots) out.append(py::make_tuple(fr.z, fr.multiplicity));
        return out;
      },
      py::arg("f"), py::arg("x0"), py::arg("x1"), py::arg("y0"), py::arg("y1"), py::arg("nx") = 8, py::arg("ny") = 8,
      py::arg("tol") = 1e-4);

  m.def(
      "find_resonances",
      [](const Potential& V, int n_lo, int n_hi, const std::string& family, const std::string& mode) {
        ResonanceOptions o;
        o.mode = mode == "full" ? ResonanceMode::full : ResonanceMode::born;
        py::list out;
        for (const auto& r : find_resonances(V, n_lo, n_hi, fam(family), o)) {
          py::dict d;
          d["n"] = r.n;
          d["lam"] = r.lambda;
          d["z"] = r.z;
          d["residual"] = r.residual;
          d["model_residual"] = r.model_residual;
          d["multiplicity"] = r.multiplicity;
          d["prediction"] = r.prediction;
          d["abs_error"] = r.abs_error;
          d["converged"] = r.converged;
          out.append(d);
        }
        return out;
      },
      py::arg("V"), py::arg("n_lo"), py::arg("n_hi"), py::arg("family") = "plus", py::arg("mode") = "born");

  py::class_<AsymptoticConstants>(m, "AsymptoticConstants")
      .def_static("from_p", [](double p, cplx c) { return AsymptoticConstants::from(p, c); }, py::arg("p"),
                  py::arg("c_p"))
      .def_static("from_potential", [](const Potential& V) { return AsymptoticConstants::from(V); }, py::arg("V"))
      .def_readonly("p", &AsymptoticConstants::p)
      .def_readonly("c_p", &AsymptoticConstants::c_p)
      .def_readonly("b", &AsymptoticConstants::b)
      .def_readonly("z_star_plus", &AsymptoticConstants::z_star_plus)
      .def_readonly("z_star_minus", &AsymptoticConstants::z_star_minus)
      .def_readonly("r", &AsymptoticConstants::r)
      .def_readonly("rho_r", &AsymptoticConstants::rho_r);
  m.def("predicted_resonance",
        [](const AsymptoticConstants& c, int n, const std::string& f) { return predicted_resonance(c, n, fam(f)); },
        py::arg("consts"), py::arg("n"), py::arg("family") = "plus");
  m.def("counting_prediction", &counting_prediction, py::arg("r"));
  m.def("zworski_count", &zworski_count, py::arg("r"), py::arg("gamma"));
}
