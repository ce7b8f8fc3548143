#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ihse/collision.hpp"
#include "ihse/core.hpp"
#include "ihse/errors.hpp"
#include "ihse/io.hpp"
#include "ihse/jacobian_lab.hpp"
#include "ihse/measure_mc.hpp"
#include "ihse/scattering.hpp"
#include "ihse/simulator.hpp"
#include "ihse/tct.hpp"

namespace py = pybind11;
using namespace ihse;

namespace {

// Results cross the boundary as plain dicts, in the same layout as the CLI output.
py::object to_py(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null: return py::none();
    case Json::value_t::boolean: return py::bool_(j.get<bool>());
    case Json::value_t::number_integer: return py::int_(j.get<long long>());
    case Json::value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
    case Json::value_t::number_float: return py::float_(j.get<double>());
    case Json::value_t::string: {
      const auto s = j.get<std::string>();
      if (s == "inf" || s == "-inf" || s == "nan") return py::float_(read_number(j));
      return py::str(s);
    }
    case Json::value_t::array: {
      py::list out;
      for (const auto& v : j) out.append(to_py(v));
      return std::move(out);
    }
    case Json::value_t::object: {
      py::dict out;
      for (const auto& [k, v] : j.items()) out[py::str(k)] = to_py(v);
      return std::move(out);
    }
    default: return py::none();
  }
}

ModelParams params(double eps0, int dim) {
  ModelParams p{eps0, dim};
  p.validate();
  return p;
}

PairIndex pair(std::size_t i, std::size_t j) {
  if (i < 1 || j <= i) throw Error(ErrorCode::Usage, "pair must satisfy 1 <= i < j");
  return {i - 1, j - 1};
}

Tolerances tolerances(const py::dict& d) {
  Tolerances t;
  for (const auto& [k, v] : d) {
    const auto key = k.cast<std::string>();
    const auto value = v.cast<double>();
    if (key == "contact_tol") t.contact_tol = value;
    else if (key == "grazing_tol") t.grazing_tol = value;
    else if (key == "simultaneity_tol") t.simultaneity_tol = value;
    else if (key == "crit_tol") t.crit_tol = value;
    else throw Error(ErrorCode::Usage, "unknown tolerance " + key);
  }
  return t;
}

PyObject* g_error_type = nullptr;

}  // namespace

PYBIND11_MODULE(_ihse, m) {
  m.doc() = "Inelastic hard spheres with emission: collision laws, flows and numerical checks";

  // The error code is prefixed to the message so Python callers can dispatch on it.
  g_error_type = py::exception<Error>(m, "IhseError", PyExc_RuntimeError).release().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(g_error_type, (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<Configuration>(m, "Configuration")
      .def(py::init<Mat, Mat>(), py::arg("positions"), py::arg("velocities"))
      .def_property_readonly("positions", &Configuration::positions)
      .def_property_readonly("velocities", &Configuration::velocities)
      .def_property_readonly("dimension", &Configuration::dimension)
      .def("__len__", &Configuration::size)
      .def("state_vector", &Configuration::state_vector)
      .def_static("from_state_vector", &Configuration::from_state_vector)
      .def("to_dict", [](const Configuration& c) { return to_py(to_json(c)); })
      .def("__repr__", [](const Configuration& c) { return "Configuration(" + to_json(c).dump() + ")"; });

  m.def("validate_configuration",
        [](const Configuration& c, double tol) { return to_py(to_json(validate_configuration(c, tol))); },
        py::arg("cfg"), py::arg("tol") = kDefaultContactTol);
  m.def("free_transport", &free_transport, py::arg("cfg"), py::arg("t"));
  m.def("conserved_quantities", [](const Configuration& c) {
    const auto q = conserved_quantities(c);
    return py::make_tuple(q.momentum, q.kinetic_energy);
  });

  m.def("grazing_discriminant",
        [](const Configuration& c, std::size_t i, std::size_t j) { return grazing_discriminant(c, pair(i, j)); },
        py::arg("cfg"), py::arg("i"), py::arg("j"));
  m.def("pair_collision_time",
        [](const Configuration& c, std::size_t i, std::size_t j) { return pair_collision_time(c, pair(i, j)); },
        py::arg("cfg"), py::arg("i"), py::arg("j"));
  m.def("first_collision",
        [](const Configuration& c, double horizon, double simultaneity_tol) -> py::object {
          const auto fc = first_collision(c, horizon, simultaneity_tol);
          if (!fc) return py::none();
          return py::dict(py::arg("time") = fc->time, py::arg("pair") = py::make_tuple(fc->pair.i + 1, fc->pair.j + 1),
                          py::arg("unique") = fc->unique);
        },
        py::arg("cfg"), py::arg("horizon"), py::arg("simultaneity_tol") = kDefaultSimultaneityTol);
  m.def("collision_time_gradients",
        [](const Configuration& c, std::size_t i, std::size_t j) {
          const auto g = collision_time_gradients(c, pair(i, j));
          return py::dict(py::arg("time") = g.time, py::arg("omega") = g.omega, py::arg("grad_x") = g.grad_x,
                          py::arg("grad_v") = g.grad_v);
        },
        py::arg("cfg"), py::arg("i"), py::arg("j"));

  m.def("scatter",
        [](const Vec& vi, const Vec& vj, const Vec& omega, double eps0) {
          return to_py(to_json(scatter(vi, vj, omega, params(eps0, static_cast<int>(vi.size())))));
        },
        py::arg("v_i"), py::arg("v_j"), py::arg("omega"), py::arg("eps0"));
  m.def("sigma_direction", &sigma_direction, py::arg("v_i"), py::arg("v_j"), py::arg("omega"));
  m.def("emission_velocity_jacobian", &emission_velocity_jacobian, py::arg("v_i"), py::arg("v_j"),
        py::arg("omega"), py::arg("eps0"));

  m.def("classify_tct_domain",
        [](const Configuration& c, double tau, double eps0, const py::dict& tol) {
          return to_py(to_json(classify_tct_domain(c, tau, params(eps0, c.dimension()), tolerances(tol))));
        },
        py::arg("cfg"), py::arg("tau"), py::arg("eps0"), py::arg("tol") = py::dict());
  m.def("tct_flow",
        [](const Configuration& c, double tau, double eps0, const py::dict& tol) {
          return to_py(to_json(tct_flow(c, tau, params(eps0, c.dimension()), tolerances(tol))));
        },
        py::arg("cfg"), py::arg("tau"), py::arg("eps0"), py::arg("tol") = py::dict());
  m.def("analytic_flow_jacobian_det",
        [](const Configuration& c, double tau, double eps0) {
          return to_py(to_json(analytic_flow_jacobian_det(c, tau, params(eps0, c.dimension()))));
        },
        py::arg("cfg"), py::arg("tau"), py::arg("eps0"));

  m.def("fd_jacobian",
        [](const std::function<Vec(const Vec&)>& f, const Vec& x, double h) { return fd_jacobian(f, x, h); },
        py::arg("map"), py::arg("point"), py::arg("h") = kDefaultFdStep);
  m.def("tensor_sum_det",
        [](double lambda, double mu, double nu, const Vec& u, const Vec& omega) {
          const auto r = tensor_sum_det({lambda, mu, nu, u, omega});
          return py::make_tuple(r.formula, r.direct);
        },
        py::arg("lambda_"), py::arg("mu"), py::arg("nu"), py::arg("u"), py::arg("omega"));
  m.def("verify_scattering_measure",
        [](std::size_t samples, double eps0, int dim, std::uint64_t seed) {
          py::list out;
          for (const auto& c : verify_scattering_measure(samples, params(eps0, dim), seed)) out.append(to_py(to_json(c)));
          return out;
        },
        py::arg("samples"), py::arg("eps0"), py::arg("dim") = 2, py::arg("seed") = 0);
  m.def("verify_flow_jacobian",
        [](const Configuration& c, double tau, double eps0, double h) {
          return to_py(to_json(verify_flow_jacobian(c, tau, params(eps0, c.dimension()), h)));
        },
        py::arg("cfg"), py::arg("tau"), py::arg("eps0"), py::arg("h") = kDefaultFdStep);

  m.def("simulate",
        [](const Configuration& c, double T, double eps0, std::size_t max_events) {
          SimOptions opts;
          opts.max_events = max_events;
          const ModelParams p = params(eps0, c.dimension());
          const SimReport r = simulate(c, T, p, opts);
          py::dict out = to_py(to_json(r));
          out["bounds"] = to_py(to_json(check_collision_bounds(r, p, c, max_events)));
          return out;
        },
        py::arg("cfg"), py::arg("T"), py::arg("eps0"), py::arg("max_events") = SimOptions{}.max_events);

  m.def("estimate_pathological_measure",
        [](const std::string& family, std::size_t n, double delta, std::optional<double> mu, double R1, double R2,
           double eps0, std::size_t samples, std::uint64_t seed, int k) {
          PathologicalSetSpec spec;
          if (family != "E" && family != "P") throw Error(ErrorCode::Usage, "family must be E or P");
          spec.family = family == "E" ? PathologicalFamily::E : PathologicalFamily::P;
          spec.n_particles = n;
          spec.k = k;
          spec.delta = delta;
          spec.mu = mu;
          spec.R1 = R1;
          spec.R2 = R2;
          spec.params = params(eps0, 2);
          return to_py(to_json(estimate_pathological_measure(spec, samples, seed)));
        },
        py::arg("family"), py::arg("n_particles"), py::arg("delta"), py::arg("mu") = py::none(), py::arg("R1") = 2.5,
        py::arg("R2") = 1.0, py::arg("eps0") = 0.1, py::arg("samples") = 100000, py::arg("seed") = 0, py::arg("k") = 0);
  m.def("ensemble_volume_evolution",
        [](const Configuration& c, double radius, double tau, double eps0) {
          return to_py(to_json(ensemble_volume_evolution(c, radius, tau, params(eps0, c.dimension()))));
        },
        py::arg("center"), py::arg("radius"), py::arg("tau"), py::arg("eps0"));

  m.attr("SCHEMA_VERSION") = kSchemaVersion;
}
