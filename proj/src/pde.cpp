#include "splitadj/pde.hpp"

#include <cmath>

#include <Eigen/IterativeLinearSolvers>

#include "splitadj/error.hpp"

namespace splitadj {

namespace {

using Vec = Eigen::VectorXd;

Vec to_vec(std::span<const double> s) { return Eigen::Map<const Vec>(s.data(), static_cast<Eigen::Index>(s.size())); }

void from_vec(const Vec& v, std::span<double> s) { std::copy(v.data(), v.data() + v.size(), s.begin()); }

void check_size(std::size_t expected, std::size_t got, const char* what) {
    if (expected != got) {
        throw InvalidArgument(std::string(what) + ": expected " + std::to_string(expected) + " values, got " +
                              std::to_string(got));
    }
}

} // namespace

struct MonodomainOperator::Solver {
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
};

MonodomainOperator::MonodomainOperator(const StructuredTriMesh& mesh, double g_f, double g_s,
                                       LinearSolverOptions options)
    : n_(mesh.num_vertices()), g_f_(g_f), g_s_(g_s), options_(options), mass_(assemble_mass(mesh)),
      kx_(assemble_axis_stiffness(mesh, 0)), ky_(assemble_axis_stiffness(mesh, 1)),
      solver_(std::make_shared<Solver>()) {}

void MonodomainOperator::prepare(double dt, std::span<const double> params) {
    check_size(2, params.size(), "monodomain parameters");
    const double gf = params[0];
    const double gs = params[1];
    if (!(gf >= 0.0 && gs >= 0.0)) {
        throw InvalidArgument("conductivities must be non-negative");
    }
    if (dt == cached_dt_ && gf == cached_gf_ && gs == cached_gs_) {
        return;
    }
    const SparseMatrix k = gf * kx_ + gs * ky_;
    a_ = mass_ + (0.5 * dt) * k;
    b_ = mass_ - (0.5 * dt) * k;
    solver_->cg.setTolerance(options_.tolerance);
    solver_->cg.setMaxIterations(options_.max_iterations);
    solver_->cg.compute(a_);
    cached_dt_ = dt;
    cached_gf_ = gf;
    cached_gs_ = gs;
}

Vec MonodomainOperator::solve(const Vec& rhs, const Vec* guess, PdeStats& stats) {
    if (rhs.squaredNorm() == 0.0) {
        return Vec::Zero(rhs.size());
    }
    Vec x = guess ? solver_->cg.solveWithGuess(rhs, *guess) : Vec(solver_->cg.solve(rhs));
    if (solver_->cg.info() != Eigen::Success) {
        throw LinearSolveFailure("CG did not converge (relative error " + std::to_string(solver_->cg.error()) + ")");
    }
    stats.linear_iterations += static_cast<std::size_t>(solver_->cg.iterations());
    return x;
}

PdeStats MonodomainOperator::step(std::span<double> u, double, double dt, std::span<const double> params) {
    check_size(n_, u.size(), "monodomain state");
    PdeStats stats;
    if (dt == 0.0) {
        return stats;
    }
    prepare(dt, params);
    const Vec v = to_vec(u);
    const Vec rhs = b_ * v;
    from_vec(solve(rhs, &v, stats), u);
    return stats;
}

void MonodomainOperator::tangent(std::span<const double> u_in, std::span<const double> u_out, std::span<double> udot,
                                 double, double dt, std::span<const double> params,
                                 std::span<const double> param_dot) {
    check_size(n_, udot.size(), "monodomain direction");
    if (dt == 0.0) {
        return;
    }
    prepare(dt, params);
    Vec rhs = b_ * to_vec(udot);
    if (!param_dot.empty()) {
        check_size(2, param_dot.size(), "monodomain parameter direction");
        const Vec sum = to_vec(u_in) + to_vec(u_out);
        if (param_dot[0] != 0.0) {
            rhs -= (0.5 * dt * param_dot[0]) * (kx_ * sum);
        }
        if (param_dot[1] != 0.0) {
            rhs -= (0.5 * dt * param_dot[1]) * (ky_ * sum);
        }
    }
    PdeStats stats;
    from_vec(solve(rhs, nullptr, stats), udot);
}

void MonodomainOperator::adjoint(std::span<const double> u_in, std::span<const double> u_out, std::span<double> ubar,
                                 double, double dt, std::span<const double> params, std::span<double> param_bar) {
    check_size(n_, ubar.size(), "monodomain co-state");
    if (dt == 0.0) {
        return;
    }
    prepare(dt, params);
    PdeStats stats;
    const Vec lambda = solve(to_vec(ubar), nullptr, stats);
    if (!param_bar.empty()) {
        check_size(2, param_bar.size(), "monodomain parameter co-state");
        const Vec sum = to_vec(u_in) + to_vec(u_out);
        param_bar[0] += -0.5 * dt * lambda.dot(kx_ * sum);
        param_bar[1] += -0.5 * dt * lambda.dot(ky_ * sum);
    }
    from_vec(b_ * lambda, ubar);
}

MitoDiffusionOperator::MitoDiffusionOperator(const StructuredTriMesh& mesh, double d1, double q,
                                             LinearSolverOptions options, double newton_tolerance,
                                             std::size_t newton_max_iterations)
    : n_(mesh.num_vertices()), d1_(d1), q_(q), options_(options), newton_tolerance_(newton_tolerance),
      newton_max_iterations_(newton_max_iterations), mass_(assemble_mass(mesh)),
      k_(assemble_stiffness(mesh, Conductivity{})) {
    if (!(q >= 2.0)) {
        throw InvalidArgument("exponent q must be at least 2");
    }
}

double MitoDiffusionOperator::nonlinearity(double u) const {
    return q_ == 2.0 ? u : std::pow(std::fabs(u), q_ - 2.0) * u;
}

double MitoDiffusionOperator::nonlinearity_derivative(double u) const {
    return q_ == 2.0 ? 1.0 : (q_ - 1.0) * std::pow(std::fabs(u), q_ - 2.0);
}

SparseMatrix MitoDiffusionOperator::jacobian(const Vec& da, double scale, bool transpose) const {
    SparseMatrix kd = k_;
    for (Eigen::Index r = 0; r < kd.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(kd, r); it; ++it) {
            // K diag(da) scales columns; its transpose diag(da) K scales rows.
            it.valueRef() *= scale * da[transpose ? it.row() : it.col()];
        }
    }
    return SparseMatrix(mass_ + kd);
}

Vec MitoDiffusionOperator::solve(const SparseMatrix& a, const Vec& rhs, PdeStats& stats) const {
    if (rhs.squaredNorm() == 0.0) {
        return Vec::Zero(rhs.size());
    }
    Eigen::BiCGSTAB<SparseMatrix, Eigen::DiagonalPreconditioner<double>> solver;
    solver.setTolerance(options_.tolerance);
    solver.setMaxIterations(options_.max_iterations);
    solver.compute(a);
    Vec x = solver.solve(rhs);
    if (solver.info() != Eigen::Success) {
        throw LinearSolveFailure("BiCGSTAB did not converge (relative error " + std::to_string(solver.error()) +
                                 ")");
    }
    stats.linear_iterations += static_cast<std::size_t>(solver.iterations());
    return x;
}

Vec MitoDiffusionOperator::residual(std::span<const double> u_in, std::span<const double> u_out, double dt,
                                    double d1) const {
    const Vec a = to_vec(u_in);
    const Vec u = to_vec(u_out);
    Vec nl(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        nl[static_cast<Eigen::Index>(i)] = nonlinearity(0.5 * (u[static_cast<Eigen::Index>(i)] + a[static_cast<Eigen::Index>(i)]));
    }
    return mass_ * (u - a) + (dt * d1) * (k_ * nl);
}

PdeStats MitoDiffusionOperator::step(std::span<double> u, double, double dt, std::span<const double> params) {
    check_size(n_, u.size(), "mito state");
    check_size(1, params.size(), "mito parameters");
    PdeStats stats;
    if (dt == 0.0) {
        return stats;
    }
    const double d1 = params[0];
    const Vec u_star = to_vec(u);
    Vec x = u_star;
    Vec da(n_);
    for (;;) {
        const Vec r = residual(u, std::span<const double>(x.data(), n_), dt, d1);
        stats.residual = r.lpNorm<Eigen::Infinity>();
        if (stats.residual <= newton_tolerance_) {
            break;
        }
        if (stats.newton_iterations >= newton_max_iterations_ || !std::isfinite(stats.residual)) {
            throw NewtonFailure(0, stats.newton_iterations, stats.residual);
        }
        for (std::size_t i = 0; i < n_; ++i) {
            const auto e = static_cast<Eigen::Index>(i);
            da[e] = nonlinearity_derivative(0.5 * (x[e] + u_star[e]));
        }
        const SparseMatrix jac = jacobian(da, 0.5 * dt * d1, false);
        x -= solve(jac, r, stats);
        ++stats.newton_iterations;
    }
    from_vec(x, u);
    return stats;
}

void MitoDiffusionOperator::tangent(std::span<const double> u_in, std::span<const double> u_out,
                                    std::span<double> udot, double, double dt, std::span<const double> params,
                                    std::span<const double> param_dot) {
    check_size(n_, udot.size(), "mito direction");
    check_size(1, params.size(), "mito parameters");
    if (dt == 0.0) {
        return;
    }
    const double d1 = params[0];
    const double s = 0.5 * dt * d1;
    Vec da(n_);
    Vec nl(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        const auto e = static_cast<Eigen::Index>(i);
        const double avg = 0.5 * (u_in[i] + u_out[i]);
        da[e] = nonlinearity_derivative(avg);
        nl[e] = nonlinearity(avg);
    }
    const Vec v = to_vec(udot);
    // -(dR/du*) v = Mass v - s K diag(da) v
    Vec rhs = mass_ * v - s * (k_ * da.cwiseProduct(v));
    if (!param_dot.empty() && param_dot[0] != 0.0) {
        rhs -= (dt * param_dot[0]) * (k_ * nl);
    }
    PdeStats stats;
    from_vec(solve(jacobian(da, s, false), rhs, stats), udot);
}

void MitoDiffusionOperator::adjoint(std::span<const double> u_in, std::span<const double> u_out,
                                    std::span<double> ubar, double, double dt, std::span<const double> params,
                                    std::span<double> param_bar) {
    check_size(n_, ubar.size(), "mito co-state");
    check_size(1, params.size(), "mito parameters");
    if (dt == 0.0) {
        return;
    }
    const double d1 = params[0];
    const double s = 0.5 * dt * d1;
    Vec da(n_);
    Vec nl(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        const auto e = static_cast<Eigen::Index>(i);
        const double avg = 0.5 * (u_in[i] + u_out[i]);
        da[e] = nonlinearity_derivative(avg);
        nl[e] = nonlinearity(avg);
    }
    PdeStats stats;
    const Vec lambda = solve(jacobian(da, s, true), to_vec(ubar), stats);
    if (!param_bar.empty()) {
        param_bar[0] += -dt * lambda.dot(k_ * nl);
    }
    // -(dR/du*)^T lambda = Mass lambda - s diag(da) K lambda
    const Vec out = mass_ * lambda - s * da.cwiseProduct(k_ * lambda);
    from_vec(out, ubar);
}

} // namespace splitadj
