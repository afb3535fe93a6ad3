#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dwellflux/approximation.hpp"
#include "dwellflux/ffcf.hpp"
#include "dwellflux/freemotion.hpp"
#include "dwellflux/specfun.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace dwell;

namespace {

py::dict moment_dict(const MomentReport& r) {
  return py::dict("order"_a = r.order, "value"_a = r.value, "est_error"_a = r.est_error,
                  "route"_a = to_string(r.route));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dwell times and flux-flux correlation functions for free wavepackets";
  m.attr("__version__") = "0.1.0";

  static py::exception<ConvergenceError> convergence(m, "ConvergenceError", PyExc_RuntimeError);
  (void)convergence;

  py::class_<UnitSystem>(m, "UnitSystem")
      .def(py::init<>())
      .def(py::init<double, double>(), "hbar"_a, "mass"_a)
      .def_readonly("hbar", &UnitSystem::hbar)
      .def_readonly("mass", &UnitSystem::mass);

  py::class_<Region>(m, "Region")
      .def(py::init<double, double>(), "x1"_a, "x2"_a)
      .def_property_readonly("x1", &Region::x1)
      .def_property_readonly("x2", &Region::x2)
      .def_property_readonly("width", &Region::width);

  py::class_<MomentumAmplitude>(m, "MomentumAmplitude")
      .def("__call__", &MomentumAmplitude::operator(), "k"_a)
      .def_property_readonly("k_min", &MomentumAmplitude::k_min)
      .def_property_readonly("k_max", &MomentumAmplitude::k_max)
      .def_property_readonly("x_center", &MomentumAmplitude::x_center);

  m.def("gauss_cut_packet", &make_gauss_cut_packet, "alpha"_a, "k0"_a, "dk"_a, "x0"_a,
        "units"_a = UnitSystem{});
  m.def("norm_squared", &norm_squared, "psi"_a);
  m.def("position_wavefunction", &position_wavefunction, "psi"_a, "x"_a, "t"_a, "units"_a = UnitSystem{});
  m.def("initial_overlap", &initial_overlap, "psi"_a, "region"_a, "units"_a = UnitSystem{});

  m.def("erfi", &erfi, "z"_a);
  m.def("f_kernel", &f_kernel, "x"_a, "tau"_a, "units"_a = UnitSystem{});

  m.def(
      "dwell_eigenvalues",
      [](double k, const Region& r, const UnitSystem& u) {
        const auto e = dwell_eigenvalues(k, r, u);
        return py::make_tuple(e.t_minus, e.t_plus);
      },
      "k"_a, "region"_a, "units"_a = UnitSystem{});
  m.def(
      "onshell_moments",
      [](double k, const Region& r, const UnitSystem& u) {
        const auto d = onshell_moments(k, r, u);
        return py::dict("k"_a = d.k, "t_plus"_a = d.t_plus, "t_minus"_a = d.t_minus, "m1"_a = d.m1,
                        "m2"_a = d.m2, "m3"_a = d.m3);
      },
      "k"_a, "region"_a, "units"_a = UnitSystem{});
  m.def("pm_third_moment", &pm_third_moment, "k"_a, "region"_a, "units"_a = UnitSystem{});
  m.def(
      "find_branch_roots",
      [](double tau, const Region& r, const UnitSystem& u, double lo, double hi) {
        std::vector<py::tuple> out;
        for (const auto& b : find_branch_roots(tau, r, u, lo, hi))
          out.push_back(py::make_tuple(b.branch == Branch::kPlus ? "+" : "-", b.k_root, b.slope));
        return out;
      },
      "tau"_a, "region"_a, "units"_a, "k_lo"_a, "k_hi"_a);
  m.def("dwell_distribution", &dwell_distribution, "psi"_a, "region"_a, "units"_a, "tau"_a);
  m.def("heuristic_distribution", &heuristic_distribution, "psi"_a, "region"_a, "units"_a, "tau"_a);
  m.def("wavepacket_dwell_moments", &wavepacket_dwell_moments, "psi"_a, "region"_a, "units"_a, "n"_a);
  m.def(
      "distribution_moment",
      [](const MomentumAmplitude& psi, const Region& r, const UnitSystem& u, int n, double tol) {
        const auto e = DwellDistribution(psi, r, u).moment(n, tol);
        return py::make_tuple(e.value, e.est_error);
      },
      "psi"_a, "region"_a, "units"_a, "n"_a, "rel_tol"_a = 1e-6);

  m.def("kernel_diag", &kernel_diag, "k"_a, "tau"_a, "region"_a, "units"_a = UnitSystem{});
  m.def("kernel_diag_fd", &kernel_diag_fd, "k"_a, "tau"_a, "region"_a, "units"_a = UnitSystem{});
  m.def(
      "kernel_moment",
      [](double k, const Region& r, const UnitSystem& u, int order) { return moment_dict(kernel_moment(k, r, u, order)); },
      "k"_a, "region"_a, "units"_a, "order"_a);
  m.def(
      "pm_moment_oracle",
      [](double k, const Region& r, const UnitSystem& u, int order) {
        return moment_dict(pm_moment_oracle(k, r, u, order));
      },
      "k"_a, "region"_a, "units"_a, "order"_a);

  py::class_<CorrelationFunction>(m, "CorrelationFunction")
      .def(py::init([](const MomentumAmplitude& psi, const Region& r, const UnitSystem& u, double cutoff,
                       double tau_max) {
             CorrelationOptions o;
             o.tau_min_cutoff = cutoff;
             o.tau_max = tau_max;
             return CorrelationFunction(psi, r, u, o);
           }),
           "psi"_a, "region"_a, "units"_a = UnitSystem{}, "tau_min_cutoff"_a = 0.0, "tau_max"_a = 0.0)
      .def("__call__", &CorrelationFunction::operator(), "tau"_a, py::call_guard<py::gil_scoped_release>())
      .def("self_part", &CorrelationFunction::self_part, "tau"_a)
      .def(
          "moments",
          [](const CorrelationFunction& c) {
            std::array<MomentReport, 3> r;
            {
              py::gil_scoped_release release;
              r = c.moments();
            }
            return std::vector<py::dict>{moment_dict(r[0]), moment_dict(r[1]), moment_dict(r[2])};
          })
      .def("hump",
           [](const CorrelationFunction& c) {
             HumpReport h;
             {
               py::gil_scoped_release release;
               h = c.hump();
             }
             return py::dict("tau_peak"_a = h.tau_peak, "peak_value"_a = h.peak_value,
                             "tau_left"_a = h.tau_left, "tau_right"_a = h.tau_right, "area"_a = h.area,
                             "est_error"_a = h.est_error);
           })
      .def_property_readonly("tau_min_cutoff", &CorrelationFunction::tau_min_cutoff)
      .def_property_readonly("tau_max", &CorrelationFunction::tau_max);

  m.def("flux_expectation", &flux_expectation, "psi"_a, "x"_a, "t"_a, "units"_a = UnitSystem{});
  m.def("cross_flux_polarization", &cross_flux_polarization, "psi"_a, "phi"_a, "x"_a, "t"_a,
        "units"_a = UnitSystem{});
  m.def("cross_flux_direct", &cross_flux_direct, "psi"_a, "phi"_a, "x"_a, "t"_a, "units"_a = UnitSystem{});
  m.def(
      "gram_schmidt_basis",
      [](const MomentumAmplitude& psi, int order) {
        const auto b = gram_schmidt_basis(psi, order);
        return py::make_tuple(b.states, b.gram_deviation, b.max_overlap);
      },
      "psi"_a, "order"_a);
  m.def(
      "approximation_error",
      [](const MomentumAmplitude& psi, const Region& r, const UnitSystem& u, int order) {
        ApproximationError e;
        {
          py::gil_scoped_release release;
          e = approximation_error(psi, r, u, order);
        }
        return py::dict("tau_d"_a = e.tau_d, "moment_c0"_a = e.moment_c0, "moment_c01"_a = e.moment_c01,
                        "rel_error_c0"_a = e.rel_error_c0, "rel_error_c01"_a = e.rel_error_c01,
                        "flux_mass_x1"_a = e.flux_mass_x1, "flux_mass_x2"_a = e.flux_mass_x2);
      },
      "psi"_a, "region"_a, "units"_a = UnitSystem{}, "basis_order"_a = 0);
}
