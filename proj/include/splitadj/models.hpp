#pragma once

#include <functional>
#include <string>
#include <vector>

#include "splitadj/mesh.hpp"
#include "splitadj/pointcloud.hpp"
#include "splitadj/system.hpp"

namespace splitadj::models {

// Mitochondria swelling model: states (u, N1, N2, N3).
struct MitoConstants {
    double c_minus = 20.0;
    double c_plus = 200.0;
    double f_star = 1.0;
    double g_star = 0.1;
    double d1 = 2e-6; // PDE step
    double d2 = 30.0;
    double q = 3.0; // PDE step
};

Expr mito_f(const Expr& s, const MitoConstants& k = {});
Expr mito_g(const Expr& s, const MitoConstants& k = {});
double mito_f(double s, const MitoConstants& k = {});
double mito_g(double s, const MitoConstants& k = {});

/// u' = d2 g(u) N2, N1' = -f(u) N1, N2' = f(u) N1 - g(u) N2, N3' = g(u) N2. Parameter: d2.
RhsSystem mito_system(const MitoConstants& k = {});

/// u0 = 30 M / (lumped integral of M) with the Gaussian M centred at x = (1/4, 1/4);
/// N1 = 1, N2 = N3 = 0 on every vertex.
StateField mito_initial(const StructuredTriMesh& mesh);

/// max over points of |N1 + N2 + N3 - (N1 + N2 + N3)(initial)|.
double conservation_check(const StateField& state, const StateField& initial);

// FitzHugh-Nagumo cell model in mV and ms: states (v, s).
//   v' = c1 v (v - a)(v_amp - v) / v_amp^2 - c2 s
//   s' = b (v - c3 s)
// Resting state (0, 0). "dummy" is a parameter that enters no equation.
struct FhnConstants {
    double c1 = 2.0;
    double a = 13.0;
    double v_amp = 100.0;
    double c2 = 0.1;
    double b = 0.013;
    double c3 = 1.0;
};

RhsSystem fhn_system(const FhnConstants& k = {});

/// v0 = 10 (x/50)^2 + 10, s0 = 0.
StateField fhn_initial(const StructuredTriMesh& mesh);

/// Monodomain conductivities (mm^2/ms) from harmonic means of the intra- and
/// extracellular conductivities scaled by chi * C_m.
struct CardiacConstants {
    double chi = 140.0;
    double c_m = 0.01;
    double g_if = 0.174;
    double g_ef = 0.625;
    double g_es = 0.236;

    double fiber() const;
    double sheet() const;
};

/// 38-component stiff synthetic system standing in for a large cell model.
RhsSystem stiff38_system();

/// Small reaction system for splitting-order studies: v' = v(1 - v) - 0.5 s, s' = 0.2 (v - s).
RhsSystem splitting_system();

/// Scalar problem with a closed-form solution.
struct TestProblem {
    std::string name;
    RhsSystem system;
    std::function<double(double)> exact;
    std::function<double(double)> exact_rate; // d/dt of exact
    double horizon = 1.0;
};

/// Throws InvalidArgument unless exact_rate(t) = f(exact(t)) within 1e-12 at sampled times.
void verify_test_problem(const TestProblem& p);

/// y' = -y^2, y(0) = 1, y = 1 / (1 + t).
TestProblem quadratic_decay();
/// y' = -y^3, y(0) = 1, y = (1 + 2t)^(-1/2).
TestProblem cubic_decay();

/// Builtin model names: mito, fhn, stiff38, splitting, quadratic, cubic.
std::vector<std::string> model_names();
RhsSystem model_by_name(const std::string& name);

} // namespace splitadj::models
