#include <cmath>
#include <optional>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "levyk/decay_analysis.hpp"
#include "levyk/errors.hpp"
#include "levyk/exp_moments.hpp"
#include "levyk/kernels.hpp"
#include "levyk/levy_models.hpp"
#include "levyk/profile_analysis.hpp"
#include "levyk/schrodinger.hpp"
#include "levyk/version.hpp"

namespace py = pybind11;
using namespace levyk;

namespace {

py::dict grid_dict(const KernelGrid& g) {
  py::dict d;
  d["points"] = g.points;
  d["values"] = g.values;
  d["errors"] = g.errors;
  d["flags"] = g.flags;
  return d;
}

py::dict fit_dict(const DecayFit& f) {
  py::dict d;
  d["rate"] = f.rate;
  d["power"] = f.power;
  d["constant"] = f.constant;
  d["x_lo"] = f.x_lo;
  d["x_hi"] = f.x_hi;
  d["rms_residual"] = f.rms_residual;
  d["n_points"] = f.n_points;
  d["flagged"] = f.flagged;
  return d;
}

std::vector<double> e1(int dim) {
  std::vector<double> v(dim, 0.0);
  v[0] = 1.0;
  return v;
}

}  // namespace

PYBIND11_MODULE(_levyk, m) {
  m.doc() = "Heat kernels, resolvents and decay rates of radial Levy processes.";
  m.attr("__version__") = kVersion;

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<UnsupportedProfile>(m, "UnsupportedProfile", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
  py::register_exception<NonIntegrableSymbol>(m, "NonIntegrableSymbol", base.ptr());

  py::class_<PureStable>(m, "PureStable").def(py::init<double>(), py::arg("beta"));
  py::class_<TemperedStable>(m, "TemperedStable")
      .def(py::init([](double beta, double kappa, double eta, double delta) {
             return TemperedStable{beta, kappa, eta, delta};
           }),
           py::arg("beta"), py::arg("kappa"), py::arg("eta"), py::arg("delta"));
  py::class_<RelativisticStable>(m, "RelativisticStable")
      .def(py::init([](double beta, double mass) { return RelativisticStable{beta, mass}; }),
           py::arg("beta"), py::arg("m"));
  py::class_<CustomTabulated>(m, "CustomTabulated")
      .def(py::init([](std::vector<double> r, std::vector<double> v) { return CustomTabulated{r, v}; }),
           py::arg("radii"), py::arg("values"));

  py::class_<LevyModel>(m, "LevyModel")
      .def(py::init([](int dim, ProfileSpec profile, double comparability, bool closed_form) {
             return LevyModel::create(dim, std::move(profile), comparability, closed_form);
           }),
           py::arg("dim"), py::arg("profile"), py::arg("comparability") = 1.0, py::arg("closed_form") = true)
      .def_property_readonly("dim", &LevyModel::dim)
      .def_property_readonly("kappa", &LevyModel::kappa)
      .def("profile_at", &LevyModel::profile_at, py::arg("r"))
      .def("density", &LevyModel::density, py::arg("r"))
      .def("tail_mass", &LevyModel::tail_mass, py::arg("r"));

  m.def("psi", [](const LevyModel& model, double s) { return psi_radial(model, s).value; },
        py::arg("model"), py::arg("s"), "Characteristic exponent at radius s.");
  m.def("omega", [](const LevyModel& model, double s) { return omega_radial(model, s).value; },
        py::arg("model"), py::arg("s"), "Exponential-moment function; inf when divergent.");
  m.def("omega_star", [](const LevyModel& model) { return omega_star(model); }, py::arg("model"));
  m.def("gamma_alpha", [](const LevyModel& model, double alpha) { return gamma_alpha(model, alpha, e1(model.dim())); },
        py::arg("model"), py::arg("alpha"));

  m.def("heat_kernel", [](const LevyModel& model, double t, std::vector<double> x) {
    return grid_dict(heat_kernel(model, t, x));
  }, py::arg("model"), py::arg("t"), py::arg("points"));
  m.def("resolvent", [](const LevyModel& model, double alpha, std::vector<double> x, const std::string& method) {
    if (method == "freq") return grid_dict(resolvent_freq(model, alpha, x));
    if (method == "time") return grid_dict(resolvent_time(model, alpha, x));
    throw DomainError("method must be 'freq' or 'time'");
  }, py::arg("model"), py::arg("alpha"), py::arg("points"), py::arg("method") = "freq");

  m.def("kf", [](const LevyModel& model, double r, std::optional<std::vector<double>> probes) {
    const KfReport k = kf(model, r, probes ? *probes : default_kf_probes());
    py::dict d;
    d["kf"] = k.kf;
    d["argmax_probe"] = k.argmax_probe;
    d["trend"] = trend_name(k.trend);
    d["probes"] = k.probes;
    d["values"] = k.values;
    return d;
  }, py::arg("model"), py::arg("r"), py::arg("probes") = py::none());

  m.def("classify_profile", [](ProfileSpec profile, std::vector<double> probes, int dim) {
    const ProfileClassification c = classify_profile(profile, probes, dim);
    py::dict d;
    d["class"] = profile_class_name(c.kind);
    d["kappa"] = c.kind == ProfileClass::exponential ? py::object(py::float_(c.kappa)) : py::object(py::none());
    d["limit_estimate"] = c.limit_estimate;
    return d;
  }, py::arg("profile"), py::arg("probes"), py::arg("dim") = 1);

  m.def("fit_exponential_rate", [](std::vector<double> x, std::vector<double> v, bool power_correction) {
    return fit_dict(fit_exponential_rate(x, v, power_correction));
  }, py::arg("points"), py::arg("values"), py::arg("power_correction") = true);

  m.def("transition_sweep", [](const LevyModel& model, std::vector<double> alphas, std::vector<double> points) {
    const TransitionCurve c = transition_sweep(model, alphas, points);
    py::dict d;
    d["alphas"] = c.alphas;
    d["fitted_rates"] = c.fitted_rates;
    d["predicted_rates"] = c.predicted_rates;
    d["omega_star"] = c.omega_star;
    return d;
  }, py::arg("model"), py::arg("alphas"), py::arg("points"));

  py::class_<SquareWell>(m, "SquareWell")
      .def(py::init([](double depth, double radius) { return SquareWell{depth, radius}; }),
           py::arg("depth"), py::arg("radius"));
  py::class_<GaussianWell>(m, "GaussianWell")
      .def(py::init([](double depth, double width) { return GaussianWell{depth, width}; }),
           py::arg("depth"), py::arg("width"));

  m.def("find_bound_state", [](const LevyModel& model, std::variant<SquareWell, GaussianWell> well, double h) -> py::object {
    const PotentialSpec v = std::visit([](auto w) -> PotentialSpec { return w; }, well);
    const auto r = find_bound_state(model, v, BsGrid{h, 0.0});
    if (!r) return py::none();
    py::dict d;
    d["lambda"] = r->lambda;
    d["lambda_error"] = r->lambda_error;
    d["x"] = r->x;
    d["phi"] = r->phi;
    d["tail_fit"] = fit_dict(r->tail_fit);
    d["predicted_rate"] = std::isnan(r->predicted_rate) ? py::object(py::none()) : py::object(py::float_(r->predicted_rate));
    return d;
  }, py::arg("model"), py::arg("potential"), py::arg("h") = 0.02);
}
