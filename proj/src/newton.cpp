#include "splitadj/newton.hpp"

#include <cmath>
#include <vector>

#include "splitadj/dense_lu.hpp"
#include "splitadj/error.hpp"

namespace splitadj {

JacobianReuse parse_jacobian_reuse(std::string_view name) {
    if (name == "always-refresh") {
        return JacobianReuse::AlwaysRefresh;
    }
    if (name == "reuse-within-step") {
        return JacobianReuse::ReuseWithinStep;
    }
    if (name == "reuse-across-steps-until-slow") {
        return JacobianReuse::ReuseAcrossStepsUntilSlow;
    }
    throw InvalidArgument("unknown Jacobian reuse policy '" + std::string(name) + "'");
}

std::string to_string(JacobianReuse policy) {
    switch (policy) {
    case JacobianReuse::AlwaysRefresh: return "always-refresh";
    case JacobianReuse::ReuseWithinStep: return "reuse-within-step";
    case JacobianReuse::ReuseAcrossStepsUntilSlow: return "reuse-across-steps-until-slow";
    }
    return "?";
}

void NewtonParams::validate() const {
    if (!(tolerance > 0.0)) {
        throw InvalidArgument("Newton tolerance must be positive");
    }
    if (max_iterations < 1) {
        throw InvalidArgument("Newton needs at least one iteration");
    }
    if (!(slow_ratio > 0.0)) {
        throw InvalidArgument("slow-convergence ratio must be positive");
    }
}

double inf_norm(std::span<const double> v) {
    double n = 0.0;
    for (double x : v) {
        const double a = std::fabs(x);
        if (a > n || std::isnan(a)) {
            n = a;
        }
    }
    return n;
}

NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian, std::span<double> x,
                          const NewtonParams& params) {
    params.validate();
    const std::size_t m = x.size();
    if (m == 0 || m > kDenseSizeCap) {
        throw InvalidArgument("Newton system size " + std::to_string(m) + " outside 1.." +
                              std::to_string(kDenseSizeCap));
    }
    std::vector<double> r(m);
    std::vector<double> jac(m * m);
    DenseLU lu;
    NewtonResult result;
    residual(x, r);
    result.residual = inf_norm(r);
    for (;;) {
        if (result.iterations > 0 && result.residual <= params.tolerance) {
            return result;
        }
        if (result.iterations >= params.max_iterations || !std::isfinite(result.residual)) {
            throw NewtonFailure(0, result.iterations, result.residual);
        }
        jacobian(x, jac);
        lu.factor(jac, m);
        ++result.factorizations;
        lu.solve(r);
        for (std::size_t i = 0; i < m; ++i) {
            x[i] -= r[i];
        }
        ++result.iterations;
        residual(x, r);
        result.residual = inf_norm(r);
    }
}

} // namespace splitadj
