#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>

namespace splitadj {

enum class JacobianReuse {
    AlwaysRefresh,
    ReuseWithinStep,
    ReuseAcrossStepsUntilSlow,
};

JacobianReuse parse_jacobian_reuse(std::string_view name);
std::string to_string(JacobianReuse policy);

struct NewtonParams {
    double tolerance = 1e-10; // absolute, infinity norm of the residual
    std::size_t max_iterations = 30;
    JacobianReuse reuse = JacobianReuse::AlwaysRefresh;
    double slow_ratio = 0.5; // refresh when |r_k+1| > slow_ratio * |r_k|

    void validate() const;
};

struct NewtonResult {
    std::size_t iterations = 0;
    std::size_t factorizations = 0;
    double residual = 0.0;
};

using ResidualFn = std::function<void(std::span<const double> x, std::span<double> r)>;
using JacobianFn = std::function<void(std::span<const double> x, std::span<double> jac)>;

/// Dense Newton iteration with LU inner solves, refreshing the Jacobian
/// every iteration. At least one update is always taken. x holds the guess
/// on entry and the solution on return.
///
/// Throws NewtonFailure on nonconvergence and SingularMatrix on a zero pivot.
NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian, std::span<double> x,
                          const NewtonParams& params = {});

double inf_norm(std::span<const double> v);

} // namespace splitadj
