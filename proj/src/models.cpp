#include "splitadj/models.hpp"

#include <cmath>
#include <numbers>

#include "splitadj/error.hpp"

namespace splitadj::models {

Expr mito_f(const Expr& s, const MitoConstants& k) {
    const Expr ramp = (k.f_star / 2.0) * (1.0 - cos((s - k.c_minus) / (k.c_plus - k.c_minus) * std::numbers::pi));
    return piecewise({{s < k.c_minus, constant(0.0)}, {s > k.c_plus, constant(k.f_star)}}, ramp);
}

Expr mito_g(const Expr& s, const MitoConstants& k) {
    const Expr ramp = (k.g_star / 2.0) * (1.0 - cos(s / k.c_plus * std::numbers::pi));
    return piecewise({{s > k.c_plus, constant(k.g_star)}}, ramp);
}

double mito_f(double s, const MitoConstants& k) {
    if (s < k.c_minus) {
        return 0.0;
    }
    if (s > k.c_plus) {
        return k.f_star;
    }
    return (k.f_star / 2.0) * (1.0 - std::cos((s - k.c_minus) / (k.c_plus - k.c_minus) * std::numbers::pi));
}

double mito_g(double s, const MitoConstants& k) {
    if (s > k.c_plus) {
        return k.g_star;
    }
    return (k.g_star / 2.0) * (1.0 - std::cos(s / k.c_plus * std::numbers::pi));
}

RhsSystem mito_system(const MitoConstants& k) {
    const Expr u = state(0);
    const Expr n1 = state(1);
    const Expr n2 = state(2);
    const Expr f = mito_f(u, k);
    const Expr g = mito_g(u, k);
    return RhsSystem("mito", {"u", "N1", "N2", "N3"}, {0.0, 1.0, 0.0, 0.0}, {{"d2", k.d2}},
                     {param(0) * g * n2, -(f * n1), f * n1 - g * n2, g * n2});
}

StateField mito_initial(const StructuredTriMesh& mesh) {
    const std::size_t n = mesh.num_vertices();
    const auto weights = lumped_mass(mesh);
    std::vector<double> m(n);
    double integral = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        const auto& x = mesh.vertex(p);
        const double x0 = 4.0 * x[0] - 1.0;
        const double x1 = 4.0 * x[1] - 1.0;
        m[p] = std::exp(-0.5 * (x0 * x0 + x1 * x1)) / (2.0 * std::numbers::pi);
        integral += weights[p] * m[p];
    }
    StateField field(n, 4);
    for (std::size_t p = 0; p < n; ++p) {
        field.at(p, 0) = 30.0 / integral * m[p];
        field.at(p, 1) = 1.0;
    }
    return field;
}

double conservation_check(const StateField& state, const StateField& initial) {
    if (state.components() != 4 || initial.components() != 4 || state.points() != initial.points()) {
        throw InvalidArgument("conservation check needs two mito states of equal size");
    }
    double worst = 0.0;
    for (std::size_t p = 0; p < state.points(); ++p) {
        const double now = state.at(p, 1) + state.at(p, 2) + state.at(p, 3);
        const double then = initial.at(p, 1) + initial.at(p, 2) + initial.at(p, 3);
        worst = std::max(worst, std::fabs(now - then));
    }
    return worst;
}

RhsSystem fhn_system(const FhnConstants& k) {
    const Expr v = state(0);
    const Expr s = state(1);
    const std::vector<Parameter> params = {{"c1", k.c1}, {"a", k.a},   {"v_amp", k.v_amp}, {"c2", k.c2},
                                           {"b", k.b},   {"c3", k.c3}, {"dummy", 1.0}};
    const Expr c1 = param(0), a = param(1), amp = param(2), c2 = param(3), b = param(4), c3 = param(5);
    const Expr dv = c1 * v * (v - a) * (amp - v) / (amp * amp) - c2 * s;
    const Expr ds = b * (v - c3 * s);
    return RhsSystem("fhn", {"v", "s"}, {0.0, 0.0}, params, {dv, ds});
}

StateField fhn_initial(const StructuredTriMesh& mesh) {
    StateField field(mesh.num_vertices(), 2);
    for (std::size_t p = 0; p < mesh.num_vertices(); ++p) {
        const double x = mesh.vertex(p)[0] / 50.0;
        field.at(p, 0) = 10.0 * x * x + 10.0;
    }
    return field;
}

double CardiacConstants::fiber() const {
    const double gi = g_if / (chi * c_m);
    const double ge = g_ef / (chi * c_m);
    return gi * ge / (gi + ge);
}

double CardiacConstants::sheet() const {
    const double gi = g_if / (chi * c_m);
    const double ge = g_es / (chi * c_m);
    return gi * ge / (gi + ge);
}

RhsSystem stiff38_system() {
    constexpr std::uint32_t m = 38;
    std::vector<std::string> names;
    std::vector<double> init;
    std::vector<Expr> rhs;
    for (std::uint32_t i = 0; i < m; ++i) {
        names.push_back("y" + std::to_string(i));
        init.push_back(1.0 + 0.01 * i);
        // Rates from 1 to 1000 per unit time, cyclic nonlinear coupling.
        const double rate = std::pow(10.0, 3.0 * i / (m - 1));
        const Expr y = state(i);
        const Expr prev = state((i + m - 1) % m);
        const Expr next = state((i + 1) % m);
        rhs.push_back(-(rate * y) + param(0) * sin(prev) + 0.5 * cos(next) - 0.01 * pow(y, 3.0));
    }
    return RhsSystem("stiff38", names, init, {{"k", 1.0}}, rhs);
}

RhsSystem splitting_system() {
    const Expr v = state(0);
    const Expr s = state(1);
    return RhsSystem("splitting", {"v", "s"}, {0.5, 0.0}, {{"r", 1.0}, {"c", 0.5}, {"e", 0.2}},
                     {param(0) * v * (1.0 - v) - param(1) * s, param(2) * (v - s)});
}

void verify_test_problem(const TestProblem& p) {
    if (p.system.dimension() != 1) {
        throw InvalidArgument("test problems are scalar");
    }
    const auto params = p.system.param_values();
    for (int i = 0; i <= 16; ++i) {
        const double t = p.horizon * i / 16.0;
        const double y = p.exact(t);
        const double f = evaluate(p.system.rhs(0), std::span<const double>(&y, 1), t, params);
        if (std::fabs(f - p.exact_rate(t)) > 1e-12) {
            throw InvalidArgument("exact solution of " + p.name + " does not satisfy its equation at t = " +
                                  std::to_string(t));
        }
    }
}

TestProblem quadratic_decay() {
    const Expr y = state(0);
    TestProblem p{"quadratic",
                  RhsSystem("quadratic", {"y"}, {1.0}, {}, {-(y * y)}),
                  [](double t) { return 1.0 / (1.0 + t); },
                  [](double t) { return -1.0 / ((1.0 + t) * (1.0 + t)); },
                  1.0};
    verify_test_problem(p);
    return p;
}

TestProblem cubic_decay() {
    const Expr y = state(0);
    TestProblem p{"cubic",
                  RhsSystem("cubic", {"y"}, {1.0}, {}, {-(y * y * y)}),
                  [](double t) { return 1.0 / std::sqrt(1.0 + 2.0 * t); },
                  [](double t) { return -std::pow(1.0 + 2.0 * t, -1.5); },
                  1.0};
    verify_test_problem(p);
    return p;
}

std::vector<std::string> model_names() { return {"mito", "fhn", "stiff38", "splitting", "quadratic", "cubic"}; }

RhsSystem model_by_name(const std::string& name) {
    if (name == "mito") {
        return mito_system();
    }
    if (name == "fhn") {
        return fhn_system();
    }
    if (name == "stiff38") {
        return stiff38_system();
    }
    if (name == "splitting") {
        return splitting_system();
    }
    if (name == "quadratic") {
        return quadratic_decay().system;
    }
    if (name == "cubic") {
        return cubic_decay().system;
    }
    throw InvalidArgument("unknown model '" + name + "'");
}

} // namespace splitadj::models
