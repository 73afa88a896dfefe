#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qmcts/config.hpp"
#include "qmcts/error.hpp"
#include "qmcts/estimator.hpp"
#include "qmcts/io.hpp"
#include "qmcts/kernels.hpp"
#include "qmcts/lattice.hpp"
#include "qmcts/normal.hpp"
#include "qmcts/observables.hpp"
#include "qmcts/potential.hpp"
#include "qmcts/rate_fit.hpp"
#include "qmcts/reference.hpp"
#include "qmcts/splitting.hpp"
#include "qmcts/torus.hpp"

namespace py = pybind11;
using namespace qmcts;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

py::array_t<double> to_matrix(const std::vector<double>& v, std::size_t rows, std::size_t cols) {
  py::array_t<double> a({rows, cols});
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

ExperimentConfig config_from(const py::dict& kwargs) {
  ExperimentConfig cfg;
  for (const auto& [k, v] : kwargs) set_key(cfg, py::str(k), py::str(v));
  cfg.validate();
  return cfg;
}

py::dict field_dict(const FieldEstimate& f) {
  py::dict d;
  d["x"] = to_array(f.grid.nodes());
  d["S"] = to_array(f.mean_S);
  d["J"] = to_array(f.mean_J);
  d["per_shift_S"] = to_matrix(f.S, f.R, f.grid.size());
  d["per_shift_J"] = to_matrix(f.J, f.R, f.grid.size());
  return d;
}

}  // namespace

PYBIND11_MODULE(_qmcts, m) {
  m.doc() = "Randomly shifted lattice time-splitting solver for the Schrodinger equation";

  static py::exception<Error> exc(m, "QmctsError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(exc, (std::string(category_name(e.category())) + ": " + e.what()).c_str());
    }
  });

  m.attr("__version__") = build_version();

  // normal map
  m.def("Phi", &Phi, py::arg("y"));
  m.def("inv_Phi", &inv_Phi, py::arg("u"));

  // grids and single solves
  m.def("grid_nodes", [](std::size_t M) { return to_array(TorusGrid(M).nodes()); }, py::arg("M"));
  m.def(
      "cosine_potential",
      [](double alpha, std::size_t m_, double offset, const std::vector<double>& xi, std::size_t M) {
        return to_array(evaluate(build_cosine_potential(alpha, m_, offset), xi, TorusGrid(M)));
      },
      py::arg("alpha"), py::arg("m"), py::arg("offset"), py::arg("xi"), py::arg("M"),
      "V(xi, x_k) of offset + sum_j j^-alpha xi_j cos(j x) at the grid nodes");
  m.def(
      "solve",
      [](const std::vector<double>& xi, const py::kwargs& kwargs) {
        const auto cfg = config_from(kwargs);
        const Problem p = make_problem(cfg);
        const auto V = evaluate(p.potential, xi, p.grid);
        const WaveField out = propagate(p.initial, p.scheme, cfg.tau, cfg.nsteps(), V);
        py::dict d;
        d["x"] = to_array(p.grid.nodes());
        d["psi"] = std::vector<Complex>(out.values().begin(), out.values().end());
        d["S"] = to_array(position_density(out).values);
        d["J"] = to_array(current_density(out).values);
        return d;
      },
      py::arg("xi"), "One trajectory at parameter xi; configuration keys as keyword arguments.");

  // lattice
  m.def("lambda_star", &lambda_star, py::arg("p"), py::arg("delta"));
  m.def("theta_for", &theta_for, py::arg("b"), py::arg("lambda_star"));
  m.def("rho", &rho, py::arg("theta"), py::arg("lam"));
  m.def(
      "cbc",
      [](double alpha, std::size_t m_, std::uint64_t N, double p, double delta, double T) {
        const auto decay = decay_sequences(build_cosine_potential(alpha, m_, 1.0));
        const auto spec = build_weight_spec(decay.b, p, delta, T);
        const auto res = cbc_construct(m_, N, spec, GaussianWeightKernel(spec.theta));
        return py::make_tuple(res.gv.z, res.squared_error);
      },
      py::arg("alpha"), py::arg("m"), py::arg("N"), py::arg("p") = 1.0, py::arg("delta") = 0.1, py::arg("T") = 1.0,
      "CBC generating vector for the cosine family; returns (z, squared errors per coordinate).");
  m.def(
      "lattice_points",
      [](const std::vector<std::uint64_t>& z, std::uint64_t N, const std::vector<double>& shift) {
        GeneratingVector gv{z, N};
        validate(gv);
        return to_matrix(lattice_points(gv, shift), N, z.size());
      },
      py::arg("z"), py::arg("N"), py::arg("shift"));
  m.def(
      "random_shifts",
      [](std::size_t R, std::size_t m_, std::uint64_t seed) {
        return to_matrix(random_shifts(R, m_, seed).shifts, R, m_);
      },
      py::arg("R"), py::arg("m"), py::arg("seed"));
  m.def(
      "mc_points",
      [](std::size_t n, std::size_t m_, std::uint64_t seed) { return to_matrix(mc_points(n, m_, seed), n, m_); },
      py::arg("n"), py::arg("m"), py::arg("seed"));

  // estimators
  m.def(
      "estimate",
      [](const py::kwargs& kwargs) {
        const auto cfg = config_from(kwargs);
        const auto r = estimate(cfg);
        py::dict d;
        d["observable"] = kind_name(r.kind);
        d["x0"] = r.x0;
        d["per_shift"] = to_array(r.per_shift);
        d["mean"] = r.mean;
        d["std_error"] = r.std_error;
        d["fields"] = field_dict(r.fields);
        d["config_hash"] = r.config_hash;
        if (r.generating_vector) d["z"] = r.generating_vector->z;
        return d;
      },
      "Run the configured estimator; configuration keys as keyword arguments.");
  m.def(
      "standard_error", [](const std::vector<double>& v) { return standard_error(v); }, py::arg("values"));
  m.def(
      "reference",
      [](const py::kwargs& kwargs) {
        const auto r = reference_solution(config_from(kwargs));
        py::dict d;
        d["x"] = to_array(r.S.grid.nodes());
        d["S"] = to_array(r.S.values);
        d["J"] = to_array(r.J.values);
        d["nodes_used"] = r.nodes_used;
        return d;
      },
      "Tensor Gauss-Hermite reference of the expected S and J (m <= 4).");
  m.def(
      "gauss_hermite",
      [](std::size_t n) {
        const auto r = gauss_hermite(n);
        return py::make_tuple(to_array(r.nodes), to_array(r.weights));
      },
      py::arg("n"));
  m.def(
      "fit_rate",
      [](const std::vector<double>& x, const std::vector<double>& err, std::size_t window, bool time) {
        if (x.size() != err.size()) throw py::value_error("x and err differ in length");
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < x.size(); ++i) pts.emplace_back(x[i], err[i]);
        const auto f = fit_rate(pts, window, time ? FitOrientation::time : FitOrientation::samples);
        return py::make_tuple(f.slope, f.intercept);
      },
      py::arg("x"), py::arg("err"), py::arg("window") = 0, py::arg("time") = false,
      "Least-squares log-log slope; returns (slope, intercept).");
}
