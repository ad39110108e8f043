#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bjj/dynamics.hpp"
#include "bjj/errors.hpp"
#include "bjj/geomphase.hpp"
#include "bjj/model.hpp"
#include "bjj/oracles.hpp"
#include "bjj/portrait.hpp"
#include "bjj/spacecurve.hpp"

namespace py = pybind11;
using namespace bjj;

namespace {

template <class F>
py::array_t<double> column(const Trajectory& traj, F field) {
    const auto& samples = traj.samples();
    py::array_t<double> out(static_cast<py::ssize_t>(samples.size()));
    auto view = out.mutable_unchecked<1>();
    for (std::size_t i = 0; i < samples.size(); ++i) view(static_cast<py::ssize_t>(i)) = field(samples[i]);
    return out;
}

IntegratorConfig make_config(const std::string& method, double dt, double rtol, double atol, double max_time,
                             double output_dt) {
    IntegratorConfig cfg;
    if (method == "rk4") {
        cfg.method = Method::Rk4;
    } else if (method != "adaptive") {
        throw Error(ErrorKind::InvalidArgument, "method must be 'adaptive' or 'rk4'");
    }
    cfg.dt = dt;
    cfg.rel_tol = rtol;
    cfg.abs_tol = atol;
    cfg.max_time = max_time;
    cfg.output_dt = output_dt;
    return cfg;
}

#define BJJ_CONFIG_ARGS                                                                                \
    py::arg("method") = "adaptive", py::arg("dt") = 1e-3, py::arg("rtol") = 1e-10, py::arg("atol") = 1e-10, \
        py::arg("max_time") = 0.0, py::arg("output_dt") = 1e-3

}  // namespace

PYBIND11_MODULE(_bjj, m) {
    m.doc() = "Bosonic Josephson junction dynamics, geometric phases and space-curve geometry";

    static PyObject* error_type = py::exception<Error>(m, "Error", PyExc_RuntimeError).release().ptr();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::handle(error_type)(e.what());
            exc.attr("kind") = std::string(to_string(e.kind()));
            PyErr_SetObject(error_type, exc.ptr());
        }
    });

    py::class_<TrapParams>(m, "TrapParams")
        .def(py::init([](double v, double lambda, double delta_e) { return TrapParams{v, lambda, delta_e}; }),
             py::arg("v") = 1.0, py::arg("lambda_") = 0.0, py::arg("delta_e") = 0.0)
        .def_readwrite("v", &TrapParams::v)
        .def_readwrite("lambda_", &TrapParams::lambda)
        .def_readwrite("delta_e", &TrapParams::delta_e)
        .def("__repr__", [](const TrapParams& p) {
            return "TrapParams(v=" + py::repr(py::float_(p.v)).cast<std::string>() +
                   ", lambda_=" + py::repr(py::float_(p.lambda)).cast<std::string>() +
                   ", delta_e=" + py::repr(py::float_(p.delta_e)).cast<std::string>() + ")";
        });

    py::class_<State>(m, "State")
        .def(py::init([](double z, double phi) { return State{z, phi}; }), py::arg("z") = 0.0, py::arg("phi") = 0.0)
        .def_readwrite("z", &State::z)
        .def_readwrite("phi", &State::phi)
        .def_property_readonly("alpha", &State::alpha)
        .def("__repr__", [](const State& s) {
            return "State(z=" + py::repr(py::float_(s.z)).cast<std::string>() +
                   ", phi=" + py::repr(py::float_(s.phi)).cast<std::string>() + ")";
        });

    py::enum_<Stability>(m, "Stability")
        .value("CENTER", Stability::Center)
        .value("SADDLE", Stability::Saddle)
        .value("DEGENERATE", Stability::Degenerate);

    py::class_<FixedPoint>(m, "FixedPoint")
        .def_readonly("state", &FixedPoint::state)
        .def_readonly("stability", &FixedPoint::stability);

    m.def("hamiltonian", &model::hamiltonian, py::arg("params"), py::arg("state"));
    m.def("rhs", [](const TrapParams& p, const State& s) {
        const Velocity v = model::rhs(p, s);
        return py::make_tuple(v.first, v.phi);
    }, py::arg("params"), py::arg("state"), "(dz/dt, dphi/dt) in canonical time.");
    m.def("fixed_points", &model::fixed_points, py::arg("params"));
    m.def("classify", &model::classify, py::arg("params"), py::arg("state"));
    m.def("map_hyperfine", [](double a, double b, double g) { return model::map_hyperfine({a, b, g}); },
          py::arg("alpha0"), py::arg("beta0"), py::arg("gamma0"));
    m.def("in_units_of_v", &model::in_units_of_v, py::arg("params"));

    py::class_<Trajectory>(m, "Trajectory")
        .def_property_readonly("params", &Trajectory::params)
        .def_property_readonly("t_end", &Trajectory::t_end)
        .def_property_readonly("energy0", &Trajectory::energy0)
        .def_property_readonly("t", [](const Trajectory& tr) { return column(tr, [](const Sample& s) { return s.t; }); })
        .def_property_readonly("z", [](const Trajectory& tr) { return column(tr, [](const Sample& s) { return s.z; }); })
        .def_property_readonly("phi", [](const Trajectory& tr) { return column(tr, [](const Sample& s) { return s.phi; }); })
        .def_property_readonly("a_d", [](const Trajectory& tr) { return column(tr, [](const Sample& s) { return s.a_d; }); })
        .def_property_readonly("a_s", [](const Trajectory& tr) { return column(tr, [](const Sample& s) { return s.a_s; }); })
        .def("state_at", [](const Trajectory& tr, double t) { return tr.at(t).state(); }, py::arg("t"))
        .def("__len__", [](const Trajectory& tr) { return tr.samples().size(); });

    py::enum_<OrbitKind>(m, "OrbitKind")
        .value("LIBRATION", OrbitKind::Libration)
        .value("ROTATION", OrbitKind::Rotation)
        .value("STATIONARY", OrbitKind::Stationary);

    py::class_<OrbitClass>(m, "OrbitClass")
        .def_readonly("kind", &OrbitClass::kind)
        .def_readonly("trapped", &OrbitClass::trapped)
        .def_readonly("pi_type", &OrbitClass::pi_type);

    py::class_<PeriodResult>(m, "PeriodResult")
        .def_readonly("period", &PeriodResult::period)
        .def_readonly("trajectory", &PeriodResult::trajectory)
        .def_readonly("orbit", &PeriodResult::orbit);

    m.def("integrate",
          [](const TrapParams& p, const State& s0, double t_end, const std::string& method, double dt, double rtol,
             double atol, double max_time, double output_dt) {
              return dynamics::integrate(p, s0, make_config(method, dt, rtol, atol, max_time, output_dt), t_end);
          },
          py::arg("params"), py::arg("state"), py::arg("t_end"), BJJ_CONFIG_ARGS);
    m.def("find_period",
          [](const TrapParams& p, const State& s0, const std::string& method, double dt, double rtol, double atol,
             double max_time, double output_dt) {
              return dynamics::find_period(p, s0, make_config(method, dt, rtol, atol, max_time, output_dt));
          },
          py::arg("params"), py::arg("state"), BJJ_CONFIG_ARGS);
    m.def("energy_drift", &dynamics::energy_drift, py::arg("trajectory"));

    py::class_<PhaseReport>(m, "PhaseReport")
        .def_readonly("t", &PhaseReport::t)
        .def_readonly("delta", &PhaseReport::delta)
        .def_readonly("phi_d_gaugefree", &PhaseReport::phi_d_gaugefree)
        .def_readonly("phi_g", &PhaseReport::phi_g)
        .def_readonly("cyclic", &PhaseReport::cyclic)
        .def_readonly("omega_solid", &PhaseReport::omega_solid);

    m.def("bloch_vector", &geomphase::bloch_vector, py::arg("state"));
    m.def("geometric_phase", py::overload_cast<const Trajectory&, double>(&geomphase::geometric_phase),
          py::arg("trajectory"), py::arg("t"));
    m.def("geometric_phase", py::overload_cast<const Trajectory&, double, double>(&geomphase::geometric_phase),
          py::arg("trajectory"), py::arg("t0"), py::arg("t1"));
    m.def("pancharatnam_phase", &geomphase::pancharatnam_phase, py::arg("trajectory"), py::arg("t0"), py::arg("t1"));
    m.def("horizontal_lift_phase", &geomphase::horizontal_lift_phase, py::arg("trajectory"), py::arg("t0"),
          py::arg("t1"));
    m.def("solid_angle", &geomphase::solid_angle, py::arg("trajectory"));
    m.def("phase_series", &geomphase::phase_series, py::arg("trajectory"), py::arg("n"));

    py::class_<GammaPhases>(m, "GammaPhases")
        .def_readonly("gamma_p", &GammaPhases::gamma_p)
        .def_readonly("gamma_d", &GammaPhases::gamma_d)
        .def_readonly("gamma_g", &GammaPhases::gamma_g);

    m.def("curvature", &spacecurve::curvature, py::arg("params"), py::arg("state"));
    m.def("torsion", &spacecurve::torsion_at, py::arg("params"), py::arg("state"));
    m.def("frenet_gauge", &spacecurve::frenet_gauge, py::arg("params"), py::arg("state"));
    m.def("gamma_phases", py::overload_cast<const Trajectory&, double>(&spacecurve::gamma_phases),
          py::arg("trajectory"), py::arg("t"));
    m.def("fubini_study_length", &spacecurve::fubini_study_length, py::arg("trajectory"), py::arg("t"));

    m.def("hamiltonian_grid",
          [](const TrapParams& p, double phi_min, double phi_max, double z_min, double z_max, std::size_t n_phi,
             std::size_t n_z) {
              const GridSpec g{phi_min, phi_max, z_min, z_max, n_phi, n_z};
              const HamiltonianGrid grid = portrait::hamiltonian_grid(p, g);
              py::array_t<double> out({static_cast<py::ssize_t>(n_z), static_cast<py::ssize_t>(n_phi)});
              std::copy(grid.values.begin(), grid.values.end(), out.mutable_data());
              return out;
          },
          py::arg("params"), py::arg("phi_min") = GridSpec{}.phi_min, py::arg("phi_max") = GridSpec{}.phi_max,
          py::arg("z_min") = GridSpec{}.z_min, py::arg("z_max") = GridSpec{}.z_max, py::arg("n_phi") = 400,
          py::arg("n_z") = 400, "H sampled on the (z, phi) grid; rows follow z, columns follow phi.");
    m.def("separatrix_energy", &portrait::separatrix_energy, py::arg("params"));
    m.def("orbit_contour",
          [](const TrapParams& p, const State& s) {
              const OrbitLevel lvl = portrait::orbit_level(p, s);
              std::vector<std::pair<double, double>> pts;
              for (const State& q : lvl.contour.points) pts.emplace_back(q.z, q.phi);
              return py::make_tuple(lvl.energy, pts, lvl.contour.closed);
          },
          py::arg("params"), py::arg("state"), "(energy, [(z, phi), ...], closed) of the level through state.");

    m.def("pendulum_period", &oracles::pendulum_period, py::arg("params"), py::arg("phi_max"));
}
