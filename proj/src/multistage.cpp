#include "splitadj/multistage.hpp"

#include <algorithm>
#include <cmath>

#include "splitadj/error.hpp"

namespace splitadj {

MultistageWorkspace::MultistageWorkspace(std::size_t stages, std::size_t m, std::size_t p, std::size_t scratch_size)
    : k(stages * m), w(stages * m), jac(m * m), matrix(m * m), residual(m), f(m), stage_jac(stages * m * m),
      stage_pjac(stages * m * p), mu(stages * m), z(stages * m), tmp(m), scratch(scratch_size),
      last_step(stages) {}

MultistageStepper::MultistageStepper(std::shared_ptr<const Kernel> kernel, ButcherTableau tableau,
                                     NewtonParams newton)
    : PointStepper(std::move(kernel)), tableau_(std::move(tableau)), newton_(newton) {
    const ValidationReport report = validate(tableau_);
    if (!report.ok()) {
        throw InvalidArgument("tableau '" + tableau_.name + "': " + report.errors.front().what);
    }
    newton_.validate();
    if (!tableau_.is_explicit() && dimension() > kDenseSizeCap) {
        throw InvalidArgument("system dimension " + std::to_string(dimension()) +
                              " exceeds the dense Newton cap of " + std::to_string(kDenseSizeCap));
    }
}

std::unique_ptr<Workspace> MultistageStepper::make_workspace() const {
    return std::make_unique<MultistageWorkspace>(tableau_.stages, dimension(), num_params(),
                                                 kernel_->scratch_size());
}

void MultistageStepper::solve_stages(std::span<const double> y0, double t0, double dt,
                                     std::span<const double> params, MultistageWorkspace& ws) const {
    const std::size_t s = tableau_.stages;
    const std::size_t m = dimension();
    const Kernel& kern = *kernel_;
    std::span<double> scratch(ws.scratch);
    for (std::size_t i = 0; i < s; ++i) {
        std::span<double> k(ws.k.data() + i * m, m);
        std::span<double> w(ws.w.data() + i * m, m);
        for (std::size_t r = 0; r < m; ++r) {
            double acc = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                acc += tableau_.A(i, j) * ws.k[j * m + r];
            }
            ws.tmp[r] = y0[r] + dt * acc;
        }
        const double ti = t0 + tableau_.c[i] * dt;
        StageStats& st = ws.last_step[i];
        st = {};
        if (tableau_.is_explicit_stage(i)) {
            std::copy(ws.tmp.begin(), ws.tmp.end(), w.begin());
            kern.rhs(w, ti, params, k, scratch);
            ++ws.stats.rhs_evaluations;
            continue;
        }

        const double key = dt * tableau_.A(i, i);
        if (i > 0) {
            std::copy(ws.k.begin() + static_cast<std::ptrdiff_t>((i - 1) * m),
                      ws.k.begin() + static_cast<std::ptrdiff_t>(i * m), k.begin());
        } else {
            kern.rhs(y0, t0, params, k, scratch);
            ++ws.stats.rhs_evaluations;
        }
        auto evaluate_residual = [&]() {
            for (std::size_t r = 0; r < m; ++r) {
                w[r] = ws.tmp[r] + key * k[r];
            }
            kern.rhs(w, ti, params, ws.f, scratch);
            ++ws.stats.rhs_evaluations;
            for (std::size_t r = 0; r < m; ++r) {
                ws.residual[r] = k[r] - ws.f[r];
            }
            return inf_norm(ws.residual);
        };

        double rn = evaluate_residual();
        double previous = rn;
        std::size_t iterations = 0;
        for (;;) {
            if (iterations > 0 && rn <= newton_.tolerance) {
                break;
            }
            if (iterations >= newton_.max_iterations || !std::isfinite(rn)) {
                throw NewtonFailure(i + 1, iterations, rn);
            }
            const bool refresh = newton_.reuse == JacobianReuse::AlwaysRefresh || !ws.have_factor ||
                                 ws.factor_key != key ||
                                 (iterations > 0 && rn > newton_.slow_ratio * previous);
            if (refresh) {
                kern.jacobian(w, ti, params, ws.jac, scratch);
                for (std::size_t r = 0; r < m; ++r) {
                    for (std::size_t c = 0; c < m; ++c) {
                        ws.matrix[r * m + c] = (r == c ? 1.0 : 0.0) - key * ws.jac[r * m + c];
                    }
                }
                ws.have_factor = false;
                ws.lu.factor(ws.matrix, m);
                ws.have_factor = true;
                ws.factor_key = key;
                ++st.jacobian_refreshes;
            }
            ws.lu.solve(ws.residual);
            for (std::size_t r = 0; r < m; ++r) {
                k[r] -= ws.residual[r];
            }
            ++iterations;
            previous = rn;
            rn = evaluate_residual();
        }
        st.newton_iterations = iterations;
        st.residual = rn;
        ws.stats.newton_iterations += iterations;
        ws.stats.jacobian_refreshes += st.jacobian_refreshes;
        ws.stats.factorizations += st.jacobian_refreshes;
    }
}

void MultistageStepper::step(std::span<double> y, double t0, double dt, std::span<const double> params,
                             Workspace& base) const {
    if (dt == 0.0) {
        return;
    }
    auto& ws = static_cast<MultistageWorkspace&>(base);
    if (newton_.reuse == JacobianReuse::ReuseWithinStep) {
        ws.reset();
    }
    solve_stages(y, t0, dt, params, ws);
    const std::size_t m = dimension();
    for (std::size_t r = 0; r < m; ++r) {
        double acc = 0.0;
        for (std::size_t i = 0; i < tableau_.stages; ++i) {
            acc += tableau_.b[i] * ws.k[i * m + r];
        }
        y[r] = y[r] + dt * acc;
    }
    ++ws.stats.steps;
}

void MultistageStepper::linearize(double t0, double dt, std::span<const double> params, bool with_params,
                                  MultistageWorkspace& ws) const {
    const std::size_t m = dimension();
    const std::size_t p = num_params();
    for (std::size_t i = 0; i < tableau_.stages; ++i) {
        const double ti = t0 + tableau_.c[i] * dt;
        std::span<const double> w(ws.w.data() + i * m, m);
        kernel_->jacobian(w, ti, params, std::span<double>(ws.stage_jac.data() + i * m * m, m * m), ws.scratch);
        if (with_params && p > 0) {
            kernel_->param_jacobian(w, ti, params, std::span<double>(ws.stage_pjac.data() + i * m * p, m * p),
                                    ws.scratch);
        }
    }
}

void MultistageStepper::tangent(std::span<const double> y0, std::span<double> ydot, double t0, double dt,
                                std::span<const double> params, std::span<const double> param_dot,
                                Workspace& base) const {
    if (dt == 0.0) {
        return;
    }
    auto& ws = static_cast<MultistageWorkspace&>(base);
    const std::size_t s = tableau_.stages;
    const std::size_t m = dimension();
    const std::size_t p = num_params();
    const bool with_params = !param_dot.empty() && p > 0;
    ws.reset();
    solve_stages(y0, t0, dt, params, ws);
    linearize(t0, dt, params, with_params, ws);

    std::vector<double>& kdot = ws.mu;
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t r = 0; r < m; ++r) {
            double acc = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                acc += tableau_.A(i, j) * kdot[j * m + r];
            }
            ws.tmp[r] = ydot[r] + dt * acc;
        }
        const double* J = ws.stage_jac.data() + i * m * m;
        double* out = kdot.data() + i * m;
        for (std::size_t r = 0; r < m; ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < m; ++c) {
                acc += J[r * m + c] * ws.tmp[c];
            }
            if (with_params) {
                const double* P = ws.stage_pjac.data() + i * m * p;
                for (std::size_t q = 0; q < p; ++q) {
                    acc += P[r * p + q] * param_dot[q];
                }
            }
            out[r] = acc;
        }
        if (!tableau_.is_explicit_stage(i)) {
            const double key = dt * tableau_.A(i, i);
            for (std::size_t r = 0; r < m; ++r) {
                for (std::size_t c = 0; c < m; ++c) {
                    ws.matrix[r * m + c] = (r == c ? 1.0 : 0.0) - key * J[r * m + c];
                }
            }
            ws.have_factor = false;
            ws.lu.factor(ws.matrix, m);
            ws.lu.solve(std::span<double>(out, m));
        }
    }
    for (std::size_t r = 0; r < m; ++r) {
        double acc = 0.0;
        for (std::size_t i = 0; i < s; ++i) {
            acc += tableau_.b[i] * kdot[i * m + r];
        }
        ydot[r] = ydot[r] + dt * acc;
    }
}

void MultistageStepper::adjoint(std::span<const double> y0, std::span<double> ybar, double t0, double dt,
                                std::span<const double> params, std::span<double> param_bar,
                                Workspace& base) const {
    if (dt == 0.0) {
        return;
    }
    auto& ws = static_cast<MultistageWorkspace&>(base);
    const std::size_t s = tableau_.stages;
    const std::size_t m = dimension();
    const std::size_t p = num_params();
    const bool with_params = !param_bar.empty() && p > 0;
    ws.reset();
    solve_stages(y0, t0, dt, params, ws);
    linearize(t0, dt, params, with_params, ws);

    for (std::size_t i = s; i-- > 0;) {
        double* mu = ws.mu.data() + i * m;
        for (std::size_t r = 0; r < m; ++r) {
            double acc = 0.0;
            for (std::size_t j = i + 1; j < s; ++j) {
                acc += tableau_.A(j, i) * ws.z[j * m + r];
            }
            mu[r] = dt * tableau_.b[i] * ybar[r] + dt * acc;
        }
        const double* J = ws.stage_jac.data() + i * m * m;
        if (!tableau_.is_explicit_stage(i)) {
            const double key = dt * tableau_.A(i, i);
            for (std::size_t r = 0; r < m; ++r) {
                for (std::size_t c = 0; c < m; ++c) {
                    ws.matrix[r * m + c] = (r == c ? 1.0 : 0.0) - key * J[r * m + c];
                }
            }
            ws.have_factor = false;
            ws.lu.factor(ws.matrix, m);
            ws.lu.solve_transpose(std::span<double>(mu, m));
        }
        double* z = ws.z.data() + i * m;
        for (std::size_t c = 0; c < m; ++c) {
            double acc = 0.0;
            for (std::size_t r = 0; r < m; ++r) {
                acc += J[r * m + c] * mu[r];
            }
            z[c] = acc;
        }
    }
    for (std::size_t c = 0; c < m; ++c) {
        double acc = 0.0;
        for (std::size_t i = 0; i < s; ++i) {
            acc += ws.z[i * m + c];
        }
        ybar[c] = ybar[c] + acc;
    }
    if (with_params) {
        for (std::size_t q = 0; q < p; ++q) {
            double acc = 0.0;
            for (std::size_t i = 0; i < s; ++i) {
                const double* P = ws.stage_pjac.data() + i * m * p;
                const double* mu = ws.mu.data() + i * m;
                for (std::size_t r = 0; r < m; ++r) {
                    acc += P[r * p + q] * mu[r];
                }
            }
            param_bar[q] += acc;
        }
    }
}

} // namespace splitadj
