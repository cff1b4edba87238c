#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "splitadj/mesh.hpp"

namespace splitadj {

struct LinearSolverOptions {
    double tolerance = 1e-10; // relative residual
    int max_iterations = 20000;
};

struct PdeStats {
    std::size_t newton_iterations = 0;
    std::size_t linear_iterations = 0;
    double residual = 0.0;
};

/// A nodal PDE step u* -> u^dagger on one shared component, with its tangent
/// and adjoint. Parameters are local to the operator and identified by name.
class PdeOperator {
public:
    virtual ~PdeOperator() = default;

    virtual std::string name() const = 0;
    virtual std::size_t size() const = 0;
    virtual std::vector<std::string> parameter_names() const = 0;
    virtual std::vector<double> default_parameters() const = 0;

    /// u holds u* on entry and u^dagger on return.
    virtual PdeStats step(std::span<double> u, double t0, double dt, std::span<const double> params) = 0;

    /// udot: direction at u_in on entry, at u_out on return.
    virtual void tangent(std::span<const double> u_in, std::span<const double> u_out, std::span<double> udot,
                         double t0, double dt, std::span<const double> params,
                         std::span<const double> param_dot) = 0;

    /// ubar: co-state at u_out on entry, at u_in on return; param_bar accumulates (empty to skip).
    virtual void adjoint(std::span<const double> u_in, std::span<const double> u_out, std::span<double> ubar,
                         double t0, double dt, std::span<const double> params, std::span<double> param_bar) = 0;
};

/// Crank-Nicolson step of v_t = div(G grad v) with G = diag(g_f, g_s):
/// (Mass + dt/2 K) v^dagger = (Mass - dt/2 K) v*, K = g_f K_x + g_s K_y.
/// Parameters: g_f, g_s. Solved by CG with a Jacobi preconditioner.
class MonodomainOperator : public PdeOperator {
public:
    MonodomainOperator(const StructuredTriMesh& mesh, double g_f, double g_s, LinearSolverOptions options = {});

    std::string name() const override { return "monodomain"; }
    std::size_t size() const override { return n_; }
    std::vector<std::string> parameter_names() const override { return {"g_f", "g_s"}; }
    std::vector<double> default_parameters() const override { return {g_f_, g_s_}; }

    PdeStats step(std::span<double> u, double t0, double dt, std::span<const double> params) override;
    void tangent(std::span<const double> u_in, std::span<const double> u_out, std::span<double> udot, double t0,
                 double dt, std::span<const double> params, std::span<const double> param_dot) override;
    void adjoint(std::span<const double> u_in, std::span<const double> u_out, std::span<double> ubar, double t0,
                 double dt, std::span<const double> params, std::span<double> param_bar) override;

    const SparseMatrix& mass() const { return mass_; }
    const SparseMatrix& stiffness_x() const { return kx_; }
    const SparseMatrix& stiffness_y() const { return ky_; }

private:
    void prepare(double dt, std::span<const double> params);
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs, const Eigen::VectorXd* guess, PdeStats& stats);

    std::size_t n_;
    double g_f_, g_s_;
    LinearSolverOptions options_;
    SparseMatrix mass_, kx_, ky_;
    SparseMatrix a_, b_;
    double cached_dt_ = -1.0;
    double cached_gf_ = 0.0, cached_gs_ = 0.0;
    struct Solver;
    std::shared_ptr<Solver> solver_;
};

/// Mitochondria calcium diffusion step with nodal nonlinearity A(u) = |u|^(q-2) u:
/// Mass (u - u*) + dt d1 K A((u + u*) / 2) = 0 with homogeneous Neumann boundaries.
/// Parameter: d1. Newton with BiCGSTAB + Jacobi inner solves.
class MitoDiffusionOperator : public PdeOperator {
public:
    MitoDiffusionOperator(const StructuredTriMesh& mesh, double d1 = 2e-6, double q = 3.0,
                          LinearSolverOptions options = {}, double newton_tolerance = 1e-10,
                          std::size_t newton_max_iterations = 30);

    std::string name() const override { return "mito-diffusion"; }
    std::size_t size() const override { return n_; }
    std::vector<std::string> parameter_names() const override { return {"d1"}; }
    std::vector<double> default_parameters() const override { return {d1_}; }

    PdeStats step(std::span<double> u, double t0, double dt, std::span<const double> params) override;
    void tangent(std::span<const double> u_in, std::span<const double> u_out, std::span<double> udot, double t0,
                 double dt, std::span<const double> params, std::span<const double> param_dot) override;
    void adjoint(std::span<const double> u_in, std::span<const double> u_out, std::span<double> ubar, double t0,
                 double dt, std::span<const double> params, std::span<double> param_bar) override;

    /// Nonlinear residual, for independent checks.
    Eigen::VectorXd residual(std::span<const double> u_in, std::span<const double> u_out, double dt,
                             double d1) const;

    double q() const { return q_; }
    const SparseMatrix& mass() const { return mass_; }
    const SparseMatrix& stiffness() const { return k_; }

private:
    double nonlinearity(double u) const;
    double nonlinearity_derivative(double u) const;
    // Mass + scale * K * diag(dA), or its transpose.
    SparseMatrix jacobian(const Eigen::VectorXd& da, double scale, bool transpose) const;
    Eigen::VectorXd solve(const SparseMatrix& a, const Eigen::VectorXd& rhs, PdeStats& stats) const;

    std::size_t n_;
    double d1_, q_;
    LinearSolverOptions options_;
    double newton_tolerance_;
    std::size_t newton_max_iterations_;
    SparseMatrix mass_, k_;
};

} // namespace splitadj
