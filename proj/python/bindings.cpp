#include <map>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qbm/bath.hpp"
#include "qbm/config.hpp"
#include "qbm/errors.hpp"
#include "qbm/mastereq.hpp"
#include "qbm/oracle.hpp"
#include "qbm/simulation.hpp"

namespace py = pybind11;

namespace {

py::array_t<double> array(const std::vector<double>& v) {
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

qbm::RunConfig make_config(const std::map<std::string, py::object>& settings) {
    qbm::RunConfig c;
    for (const auto& [key, value] : settings) {
        std::string text;
        if (py::isinstance<py::bool_>(value)) {
            text = value.cast<bool>() ? "true" : "false";
        } else if (py::isinstance<py::list>(value) || py::isinstance<py::tuple>(value)) {
            for (auto item : value) text += (text.empty() ? "" : ",") + std::string(py::str(item));
        } else {
            text = py::str(value);
        }
        qbm::apply_setting(c, key, text);
    }
    c.validate();
    return c;
}

py::dict trajectory_dict(const qbm::Trajectory& t) {
    std::vector<double> time, q, p, vq, vp, cqp;
    for (std::size_t n = 0; n < t.states.size(); ++n) {
        const auto& s = t.states[n];
        time.push_back(t.grid.t(n));
        q.push_back(s.q_a);
        p.push_back(s.p_a);
        vq.push_back(s.var_q);
        vp.push_back(s.var_p);
        cqp.push_back(s.cov_qp);
    }
    py::dict d;
    d["t"] = array(time);
    d["q_a"] = array(q);
    d["p_a"] = array(p);
    d["var_q"] = array(vq);
    d["var_p"] = array(vp);
    d["cov_qp"] = array(cqp);
    return d;
}

py::dict simulate(const std::map<std::string, py::object>& settings, double mu, bool coefficients) {
    const qbm::RunConfig c = make_config(settings);
    const qbm::Switches switches = qbm::resolve_switches(c);
    qbm::MuResult r;
    {
        py::gil_scoped_release release;
        r = qbm::simulate_mu(c, switches, mu, {coefficients, coefficients});
    }
    py::dict d = trajectory_dict(r.trajectory);
    if (coefficients) {
        d["Xi"] = array(r.coefficients->Xi);
        d["Upsilon"] = array(r.coefficients->Upsilon);
        d["Gamma"] = array(r.coefficients->Gamma);
        d["Theta"] = array(r.coefficients->Theta);
        d["gamma"] = array(r.coefficients->gamma_small);
        d["det"] = array(r.witness->det);
        d["max_det"] = r.witness->max_det;
        d["min_det"] = r.witness->min_det;
    }
    d["switches"] = qbm::to_string(switches);
    return d;
}

py::dict oracle(const std::map<std::string, py::object>& settings, double mu) {
    const qbm::RunConfig c = make_config(settings);
    qbm::Trajectory t;
    {
        py::gil_scoped_release release;
        const auto bath = qbm::discretize_bath(c.bath, c.oracle_modes, c.omega_max());
        const auto consts = qbm::SystemConstants::make(c.bath, mu, c.switches());
        t = qbm::oracle_trajectory(bath, consts, c.initial, qbm::TimeGrid::covering(c.dt, qbm::resolve_t_end(c)));
    }
    return trajectory_dict(t);
}

}  // namespace

PYBIND11_MODULE(_qbm, m) {
    m.doc() = "Quantum Brownian motion with position and momentum coupling";

    py::register_exception<qbm::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<qbm::DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<qbm::ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
    py::register_exception<qbm::SingularityError>(m, "SingularityError", PyExc_RuntimeError);
    py::register_exception<qbm::RecurrenceError>(m, "RecurrenceError", PyExc_RuntimeError);
    py::register_exception<qbm::CalibrationError>(m, "CalibrationError", PyExc_RuntimeError);

    py::class_<qbm::SpectralDensityParams>(m, "SpectralDensityParams")
        .def(py::init<>())
        .def_readwrite("s", &qbm::SpectralDensityParams::s)
        .def_readwrite("gamma", &qbm::SpectralDensityParams::gamma)
        .def_readwrite("cutoff", &qbm::SpectralDensityParams::cutoff)
        .def_readwrite("mass", &qbm::SpectralDensityParams::mass)
        .def_readwrite("omega_s", &qbm::SpectralDensityParams::omega_s)
        .def_readwrite("beta", &qbm::SpectralDensityParams::beta)
        .def_readwrite("infinite_temperature", &qbm::SpectralDensityParams::infinite_temperature);

    m.def("spectral_density", &qbm::spectral_density, py::arg("omega"), py::arg("params"));
    m.def("dissipation_kernel", &qbm::dissipation_kernel, py::arg("t"), py::arg("params"));
    m.def("noise_kernel", &qbm::noise_kernel, py::arg("t"), py::arg("params"));
    m.def("renormalized_frequency", &qbm::renormalized_frequency, py::arg("params"));
    m.def("effective_mass", &qbm::effective_mass, py::arg("params"), py::arg("mu"));

    m.def("simulate", &simulate, py::arg("settings"), py::arg("mu"), py::arg("coefficients") = true,
          "Moments (and coefficients) for one mu. settings holds config keys; unset switches are calibrated.");
    m.def("oracle", &oracle, py::arg("settings"), py::arg("mu"), "Finite-bath reference moments for one mu.");
    m.def(
        "markov_limit",
        [](double C, double mu) {
            const auto l = qbm::markov_limit(C, mu);
            const auto k = l.kossakowski();
            py::dict d;
            d["rate"] = l.rate;
            d["Gamma"] = l.Gamma;
            d["Theta"] = l.Theta;
            d["gamma"] = l.gamma_small;
            d["det"] = k.determinant();
            return d;
        },
        py::arg("C"), py::arg("mu"));
}
