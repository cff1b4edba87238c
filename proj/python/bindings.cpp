#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "splitadj/error.hpp"
#include "splitadj/experiments.hpp"
#include "splitadj/kernel.hpp"
#include "splitadj/models.hpp"
#include "splitadj/rush_larsen.hpp"
#include "splitadj/stepper.hpp"
#include "splitadj/system.hpp"
#include "splitadj/tableau.hpp"

namespace py = pybind11;
using namespace splitadj;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) { return {a.data(), a.data() + a.size()}; }

Array to_array(const std::vector<double>& v) {
    Array out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

Array field_array(const StateField& f) {
    Array out({static_cast<py::ssize_t>(f.components()), static_cast<py::ssize_t>(f.points())});
    std::copy(f.data().begin(), f.data().end(), out.mutable_data());
    return out;
}

// Holds a kernel and the stepper built on it.
struct PyStepper {
    std::shared_ptr<const Kernel> kernel;
    std::shared_ptr<PointStepper> stepper;
    std::unique_ptr<Workspace> ws;

    PyStepper(const RhsSystem& sys, const std::string& scheme)
        : kernel(std::make_shared<const Kernel>(sys)), stepper(make_stepper(kernel, scheme)),
          ws(stepper->make_workspace()) {}

    std::vector<double> params_or_default(const std::optional<Array>& p) const {
        return p ? to_vector(*p) : kernel->system().param_values();
    }

    Array step(const Array& y, double t0, double dt, const std::optional<Array>& params) {
        auto v = to_vector(y);
        stepper->step(v, t0, dt, params_or_default(params), *ws);
        return to_array(v);
    }

    Array tangent(const Array& y0, const Array& ydot, double t0, double dt, const std::optional<Array>& params) {
        auto d = to_vector(ydot);
        stepper->tangent(to_vector(y0), d, t0, dt, params_or_default(params), {}, *ws);
        return to_array(d);
    }

    py::tuple adjoint(const Array& y0, const Array& ybar, double t0, double dt, const std::optional<Array>& params) {
        auto b = to_vector(ybar);
        const auto p = params_or_default(params);
        std::vector<double> pbar(p.size(), 0.0);
        stepper->adjoint(to_vector(y0), b, t0, dt, p, pbar, *ws);
        return py::make_tuple(to_array(b), to_array(pbar));
    }
};

ExperimentConfig make_config(const std::string& experiment, const py::dict& overrides) {
    ExperimentConfig cfg = ExperimentConfig::defaults(experiment);
    for (const auto& item : overrides) {
        const auto key = py::str(item.first).cast<std::string>();
        if (py::isinstance<py::bool_>(item.second)) {
            cfg.set(key, item.second.cast<bool>() ? "true" : "false");
        } else {
            cfg.set(key, py::str(item.second).cast<std::string>());
        }
    }
    return cfg;
}

py::dict result_dict(const ExperimentResult& r) {
    py::dict d;
    d["functional"] = r.functional;
    d["forward_csv"] = r.forward.to_csv();
    d["taylor_csv"] = r.taylor.to_csv();
    py::dict params;
    for (std::size_t i = 0; i < r.param_names.size(); ++i) {
        params[py::str(r.param_names[i])] = r.gradient.params[i];
    }
    d["gradient_params"] = params;
    d["gradient_initial"] = field_array(r.gradient.initial);
    d["final_state"] = field_array(r.final_state);
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Split PDE-ODE solvers with discrete adjoints";

    // Translators run newest first, so the subclass goes last.
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

    py::class_<RhsSystem>(m, "RhsSystem")
        .def_property_readonly("name", &RhsSystem::name)
        .def_property_readonly("dimension", &RhsSystem::dimension)
        .def_property_readonly("state_names", &RhsSystem::state_names)
        .def_property_readonly("param_names", &RhsSystem::param_names)
        .def_property_readonly("param_values", &RhsSystem::param_values)
        .def_property_readonly("initial_values", &RhsSystem::initial_values)
        .def("__str__", [](const RhsSystem& s) { return format_system(s); });

    m.def("parse_system", [](const std::string& text) { return parse_system(text); }, py::arg("text"));
    m.def("model", &models::model_by_name, py::arg("name"));
    m.def("model_names", &models::model_names);
    m.def("scheme_names", &scheme_names);
    m.def("mito_f", [](double s) { return models::mito_f(s); }, py::arg("s"));
    m.def("mito_g", [](double s) { return models::mito_g(s); }, py::arg("s"));

    m.def("phi", &phi, py::arg("z"));
    m.def("phi_prime", &phi_prime, py::arg("z"));

    m.def(
        "tableau",
        [](const std::string& name) {
            const auto t = builtin_tableau(name);
            py::dict d;
            d["name"] = t.name;
            d["stages"] = t.stages;
            d["order"] = t.order;
            d["a"] = t.a;
            d["b"] = t.b;
            d["c"] = t.c;
            return d;
        },
        py::arg("name"));
    m.def(
        "order_conditions",
        [](const std::string& name, int p) {
            const auto r = order_conditions(builtin_tableau(name), p);
            return py::make_tuple(r.pass, r.failed_order, r.condition, r.value);
        },
        py::arg("name"), py::arg("order"));

    m.def(
        "rhs",
        [](const RhsSystem& sys, const Array& y, double t, const std::optional<Array>& params) {
            const Kernel k(sys);
            std::vector<double> out(k.dimension());
            std::vector<double> scratch(k.scratch_size());
            k.rhs(to_vector(y), t, params ? to_vector(*params) : sys.param_values(), out, scratch);
            return to_array(out);
        },
        py::arg("system"), py::arg("y"), py::arg("t") = 0.0, py::arg("params") = py::none());

    py::class_<PyStepper>(m, "Stepper")
        .def(py::init<const RhsSystem&, const std::string&>(), py::arg("system"), py::arg("scheme"))
        .def("step", &PyStepper::step, py::arg("y"), py::arg("t0"), py::arg("dt"), py::arg("params") = py::none())
        .def("tangent", &PyStepper::tangent, py::arg("y0"), py::arg("ydot"), py::arg("t0"), py::arg("dt"),
             py::arg("params") = py::none())
        .def("adjoint", &PyStepper::adjoint, py::arg("y0"), py::arg("ybar"), py::arg("t0"), py::arg("dt"),
             py::arg("params") = py::none());

    m.def(
        "converge_ode",
        [](const py::dict& overrides) { return run_converge_ode(make_config("converge-ode", overrides)).to_csv(); },
        py::arg("overrides") = py::dict());
    m.def(
        "converge_split",
        [](const py::dict& overrides) {
            return run_converge_split(make_config("converge-split", overrides)).to_csv();
        },
        py::arg("overrides") = py::dict());
    m.def(
        "run_mito",
        [](const py::dict& overrides, bool taylor) {
            return result_dict(run_mito(make_config("mito", overrides), taylor));
        },
        py::arg("overrides") = py::dict(), py::arg("taylor") = true);
    m.def(
        "run_fhn2d",
        [](const py::dict& overrides, bool taylor) {
            return result_dict(run_fhn2d(make_config("fhn2d", overrides), taylor));
        },
        py::arg("overrides") = py::dict(), py::arg("taylor") = true);
}
