#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "splitadj/kernel.hpp"
#include "splitadj/newton.hpp"

namespace splitadj {

struct StepStats {
    std::size_t steps = 0;
    std::size_t newton_iterations = 0;
    std::size_t jacobian_refreshes = 0;
    std::size_t factorizations = 0;
    std::size_t rhs_evaluations = 0;

    StepStats& operator+=(const StepStats& o);
};

/// Per-thread mutable state of a point stepper.
class Workspace {
public:
    virtual ~Workspace() = default;

    /// Drops any reused Jacobian so the next step starts fresh.
    virtual void reset() {}

    StepStats stats;
};

/// One time step of a pointwise ODE system together with its tangent-linear
/// and adjoint maps.
///
/// params are the kernel's parameter values. tangent() propagates ydot from
/// the entry state y0 (param_dot may be empty for zero). adjoint() maps ybar
/// at the exit state to ybar at the entry state and accumulates into
/// param_bar (which may be empty to skip parameter derivatives).
class PointStepper {
public:
    explicit PointStepper(std::shared_ptr<const Kernel> kernel);
    virtual ~PointStepper() = default;

    const Kernel& kernel() const { return *kernel_; }
    std::shared_ptr<const Kernel> kernel_ptr() const { return kernel_; }
    std::size_t dimension() const { return kernel_->dimension(); }
    std::size_t num_params() const { return kernel_->num_params(); }

    virtual std::string name() const = 0;
    virtual std::unique_ptr<Workspace> make_workspace() const = 0;

    virtual void step(std::span<double> y, double t0, double dt, std::span<const double> params,
                      Workspace& ws) const = 0;

    virtual void tangent(std::span<const double> y0, std::span<double> ydot, double t0, double dt,
                         std::span<const double> params, std::span<const double> param_dot,
                         Workspace& ws) const = 0;

    virtual void adjoint(std::span<const double> y0, std::span<double> ybar, double t0, double dt,
                         std::span<const double> params, std::span<double> param_bar, Workspace& ws) const = 0;

protected:
    std::shared_ptr<const Kernel> kernel_;
};

/// Builds a multistage or Rush-Larsen stepper from a scheme name: a builtin
/// tableau name or one of rl1, grl1, rl2, grl2. newton only affects implicit tableaux.
std::shared_ptr<PointStepper> make_stepper(std::shared_ptr<const Kernel> kernel, const std::string& scheme,
                                           const NewtonParams& newton = {});

std::vector<std::string> scheme_names();

} // namespace splitadj
