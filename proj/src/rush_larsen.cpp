#include "splitadj/rush_larsen.hpp"

#include <cmath>

#include "splitadj/error.hpp"

namespace splitadj {

double phi(double z) {
    if (std::fabs(z) < 1e-5) {
        return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0)));
    }
    return std::expm1(z) / z;
}

double phi_prime(double z) {
    if (std::fabs(z) < 1e-2) {
        return 0.5 + z * (1.0 / 3.0 + z * (1.0 / 8.0 + z * (1.0 / 30.0 + z * (1.0 / 144.0 + z * (1.0 / 840.0)))));
    }
    return (std::expm1(z) * (z - 1.0) + z) / (z * z);
}

RlVariant parse_rl_variant(std::string_view name) {
    if (name == "rl1") {
        return RlVariant::RL1;
    }
    if (name == "grl1") {
        return RlVariant::GRL1;
    }
    if (name == "rl2") {
        return RlVariant::RL2;
    }
    if (name == "grl2") {
        return RlVariant::GRL2;
    }
    throw InvalidArgument("unknown Rush-Larsen variant '" + std::string(name) + "'");
}

std::string to_string(RlVariant v) {
    switch (v) {
    case RlVariant::RL1: return "rl1";
    case RlVariant::GRL1: return "grl1";
    case RlVariant::RL2: return "rl2";
    case RlVariant::GRL2: return "grl2";
    }
    return "?";
}

RushLarsenWorkspace::RushLarsenWorkspace(std::size_t m, std::size_t p, std::size_t scratch_size)
    : fd(2 * m), half(m), lin(2 * m + 2 * m * m), plin(2 * m * p), db1(m), dp1(m * m), dm1(m * p), db2(m),
      dp2(m * m), dm2(m * p), tmp(m), scratch(scratch_size) {}

RushLarsenStepper::RushLarsenStepper(std::shared_ptr<const Kernel> kernel, RlVariant variant)
    : PointStepper(std::move(kernel)), variant_(variant) {
    const bool generalized = variant == RlVariant::GRL1 || variant == RlVariant::GRL2;
    exponential_.resize(dimension());
    for (std::size_t i = 0; i < dimension(); ++i) {
        exponential_[i] = generalized || kernel_->linear_in_self()[i];
    }
}

std::unique_ptr<Workspace> RushLarsenStepper::make_workspace() const {
    return std::make_unique<RushLarsenWorkspace>(dimension(), num_params(), kernel_->scratch_size());
}

void RushLarsenStepper::update(std::span<const double> b, std::span<const double> p, double t, double h,
                               std::span<const double> params, std::span<double> out,
                               RushLarsenWorkspace& ws) const {
    const std::size_t m = dimension();
    kernel_->rhs_and_diagonal(p, t, params, ws.fd, ws.scratch);
    ++ws.stats.rhs_evaluations;
    const double* f = ws.fd.data();
    const double* d = ws.fd.data() + m;
    for (std::size_t i = 0; i < m; ++i) {
        if (exponential_[i]) {
            const double z = h * d[i];
            out[i] = std::exp(z) * b[i] + h * phi(z) * (f[i] - d[i] * p[i]);
        } else {
            out[i] = b[i] + h * f[i];
        }
    }
}

void RushLarsenStepper::derivatives(std::span<const double> b, std::span<const double> p, double t, double h,
                                    std::span<const double> params, bool with_params, std::span<double> db,
                                    std::span<double> dp, std::span<double> dm, RushLarsenWorkspace& ws) const {
    const std::size_t m = dimension();
    const std::size_t np = num_params();
    kernel_->linearization(p, t, params, ws.lin, ws.scratch);
    const double* f = ws.lin.data();
    const double* d = f + m;
    const double* jac = d + m;
    const double* ddiag = jac + m * m;
    const double* dfdm = nullptr;
    const double* dddm = nullptr;
    if (with_params) {
        kernel_->param_linearization(p, t, params, ws.plin, ws.scratch);
        dfdm = ws.plin.data();
        dddm = dfdm + m * np;
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (exponential_[i]) {
            const double z = h * d[i];
            const double ez = std::exp(z);
            const double ph = phi(z);
            const double r = f[i] - d[i] * p[i];
            const double c = h * (ez * b[i] - ph * p[i] + h * phi_prime(z) * r);
            db[i] = ez;
            for (std::size_t j = 0; j < m; ++j) {
                const double dfij = jac[i * m + j] - (i == j ? d[i] : 0.0);
                dp[i * m + j] = c * ddiag[i * m + j] + h * ph * dfij;
            }
            if (with_params) {
                for (std::size_t k = 0; k < np; ++k) {
                    dm[i * np + k] = c * dddm[i * np + k] + h * ph * dfdm[i * np + k];
                }
            }
        } else {
            db[i] = 1.0;
            for (std::size_t j = 0; j < m; ++j) {
                dp[i * m + j] = h * jac[i * m + j];
            }
            if (with_params) {
                for (std::size_t k = 0; k < np; ++k) {
                    dm[i * np + k] = h * dfdm[i * np + k];
                }
            }
        }
    }
}

void RushLarsenStepper::step(std::span<double> y, double t0, double dt, std::span<const double> params,
                             Workspace& base) const {
    if (dt == 0.0) {
        return;
    }
    auto& ws = static_cast<RushLarsenWorkspace&>(base);
    if (two_stage()) {
        update(y, y, t0, 0.5 * dt, params, ws.half, ws);
        update(std::span<const double>(y.data(), y.size()), ws.half, t0 + 0.5 * dt, dt, params, ws.tmp, ws);
    } else {
        update(y, y, t0, dt, params, ws.tmp, ws);
    }
    std::copy(ws.tmp.begin(), ws.tmp.end(), y.begin());
    ++ws.stats.steps;
}

void RushLarsenStepper::tangent(std::span<const double> y0, std::span<double> ydot, double t0, double dt,
                                std::span<const double> params, std::span<const double> param_dot,
                                Workspace& base) const {
    if (dt == 0.0) {
        return;
    }
    auto& ws = static_cast<RushLarsenWorkspace&>(base);
    const std::size_t m = dimension();
    const std::size_t np = num_params();
    const bool with_params = !param_dot.empty() && np > 0;

    auto apply = [&](const std::vector<double>& db, const std::vector<double>& dp, const std::vector<double>& dm,
                     std::span<const double> xb, std::span<const double> xp, std::span<double> out) {
        for (std::size_t i = 0; i < m; ++i) {
            double acc = db[i] * xb[i];
            for (std::size_t j = 0; j < m; ++j) {
                acc += dp[i * m + j] * xp[j];
            }
            if (with_params) {
                for (std::size_t k = 0; k < np; ++k) {
                    acc += dm[i * np + k] * param_dot[k];
                }
            }
            out[i] = acc;
        }
    };

    if (!two_stage()) {
        derivatives(y0, y0, t0, dt, params, with_params, ws.db1, ws.dp1, ws.dm1, ws);
        apply(ws.db1, ws.dp1, ws.dm1, ydot, ydot, ws.tmp);
        std::copy(ws.tmp.begin(), ws.tmp.end(), ydot.begin());
        return;
    }
    update(y0, y0, t0, 0.5 * dt, params, ws.half, ws);
    derivatives(y0, y0, t0, 0.5 * dt, params, with_params, ws.db1, ws.dp1, ws.dm1, ws);
    derivatives(y0, ws.half, t0 + 0.5 * dt, dt, params, with_params, ws.db2, ws.dp2, ws.dm2, ws);
    std::vector<double> half_dot(m);
    apply(ws.db1, ws.dp1, ws.dm1, ydot, ydot, half_dot);
    apply(ws.db2, ws.dp2, ws.dm2, ydot, half_dot, ws.tmp);
    std::copy(ws.tmp.begin(), ws.tmp.end(), ydot.begin());
}

void RushLarsenStepper::adjoint(std::span<const double> y0, std::span<double> ybar, double t0, double dt,
                                std::span<const double> params, std::span<double> param_bar,
                                Workspace& base) const {
    if (dt == 0.0) {
        return;
    }
    auto& ws = static_cast<RushLarsenWorkspace&>(base);
    const std::size_t m = dimension();
    const std::size_t np = num_params();
    const bool with_params = !param_bar.empty() && np > 0;

    // out_b = db o x, out_p = dp^T x, param_bar += dm^T x
    auto transpose = [&](const std::vector<double>& dp, const std::vector<double>& dm, std::span<const double> x,
                         std::span<double> out_p) {
        for (std::size_t j = 0; j < m; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                acc += dp[i * m + j] * x[i];
            }
            out_p[j] = acc;
        }
        if (with_params) {
            for (std::size_t k = 0; k < np; ++k) {
                double acc = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    acc += dm[i * np + k] * x[i];
                }
                param_bar[k] += acc;
            }
        }
    };

    if (!two_stage()) {
        derivatives(y0, y0, t0, dt, params, with_params, ws.db1, ws.dp1, ws.dm1, ws);
        transpose(ws.dp1, ws.dm1, ybar, ws.tmp);
        for (std::size_t j = 0; j < m; ++j) {
            ybar[j] = ws.db1[j] * ybar[j] + ws.tmp[j];
        }
        return;
    }
    update(y0, y0, t0, 0.5 * dt, params, ws.half, ws);
    derivatives(y0, y0, t0, 0.5 * dt, params, with_params, ws.db1, ws.dp1, ws.dm1, ws);
    derivatives(y0, ws.half, t0 + 0.5 * dt, dt, params, with_params, ws.db2, ws.dp2, ws.dm2, ws);
    std::vector<double> half_bar(m);
    transpose(ws.dp2, ws.dm2, ybar, half_bar);
    transpose(ws.dp1, ws.dm1, half_bar, ws.tmp);
    for (std::size_t j = 0; j < m; ++j) {
        ybar[j] = ws.db2[j] * ybar[j] + ws.db1[j] * half_bar[j] + ws.tmp[j];
    }
}

} // namespace splitadj
