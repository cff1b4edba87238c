#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "splitadj/dense_lu.hpp"
#include "splitadj/newton.hpp"
#include "splitadj/stepper.hpp"
#include "splitadj/tableau.hpp"

namespace splitadj {

struct StageStats {
    std::size_t newton_iterations = 0;
    std::size_t jacobian_refreshes = 0;
    double residual = 0.0;
};

class MultistageWorkspace : public Workspace {
public:
    MultistageWorkspace(std::size_t stages, std::size_t m, std::size_t p, std::size_t scratch);

    void reset() override { have_factor = false; }

    std::vector<double> k;        // stage values, s x m
    std::vector<double> w;        // stage arguments, s x m
    std::vector<double> jac;      // m x m
    std::vector<double> matrix;   // I - dt a_ii J
    std::vector<double> residual; // m
    std::vector<double> f;        // m
    std::vector<double> stage_jac;   // s x m x m, filled by linearize()
    std::vector<double> stage_pjac;  // s x m x p
    std::vector<double> mu;          // s x m
    std::vector<double> z;           // s x m
    std::vector<double> tmp;         // m
    std::vector<double> scratch;
    DenseLU lu;
    bool have_factor = false;
    double factor_key = 0.0; // dt * a_ii of the current factorization
    std::vector<StageStats> last_step;
};

/// Multistage Runge-Kutta step with a lower-triangular tableau. Implicit
/// stages are solved by dense Newton with LU.
class MultistageStepper : public PointStepper {
public:
    MultistageStepper(std::shared_ptr<const Kernel> kernel, ButcherTableau tableau, NewtonParams newton = {});

    const ButcherTableau& tableau() const { return tableau_; }
    const NewtonParams& newton() const { return newton_; }

    std::string name() const override { return tableau_.name; }
    std::unique_ptr<Workspace> make_workspace() const override;

    void step(std::span<double> y, double t0, double dt, std::span<const double> params,
              Workspace& ws) const override;
    void tangent(std::span<const double> y0, std::span<double> ydot, double t0, double dt,
                 std::span<const double> params, std::span<const double> param_dot, Workspace& ws) const override;
    void adjoint(std::span<const double> y0, std::span<double> ybar, double t0, double dt,
                 std::span<const double> params, std::span<double> param_bar, Workspace& ws) const override;

    /// Solves all stages from y0 into ws.k / ws.w without forming y1.
    void solve_stages(std::span<const double> y0, double t0, double dt, std::span<const double> params,
                      MultistageWorkspace& ws) const;

private:
    void linearize(double t0, double dt, std::span<const double> params, bool with_params,
                   MultistageWorkspace& ws) const;

    ButcherTableau tableau_;
    NewtonParams newton_;
};

} // namespace splitadj
