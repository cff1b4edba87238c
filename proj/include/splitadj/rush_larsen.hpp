#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "splitadj/stepper.hpp"

namespace splitadj {

/// (e^z - 1) / z, with phi(0) = 1. Overflows to +inf for z above ~709.
double phi(double z);

/// d phi / dz.
double phi_prime(double z);

enum class RlVariant { RL1, GRL1, RL2, GRL2 };

RlVariant parse_rl_variant(std::string_view name);
std::string to_string(RlVariant v);

class RushLarsenWorkspace : public Workspace {
public:
    RushLarsenWorkspace(std::size_t m, std::size_t p, std::size_t scratch);

    std::vector<double> fd;     // [f, diagonal]
    std::vector<double> half;   // y^(1/2)
    std::vector<double> lin;    // [f, d, jac, d diag/dy]
    std::vector<double> plin;   // [df/dm, d diag/dm]
    std::vector<double> db1, dp1, dm1; // half-step derivatives
    std::vector<double> db2, dp2, dm2; // full-step derivatives
    std::vector<double> tmp;
    std::vector<double> scratch;
};

/// Rush-Larsen exponential integrators.
///
/// The exponential update of component i with base b, linearization point p
/// and step h is
///
///     e^z b_i + h phi(z) (f_i(p) - J_i(p) p_i),   z = h J_i(p),
///
/// which equals b_i + h f_i phi(z) when b = p. RL1 and RL2 use it only for
/// components whose right-hand side is linear in themselves and take an
/// Euler update b_i + h f_i(p) otherwise; GRL1 and GRL2 use it everywhere.
/// The two-stage variants take a half step from y0 to y^(1/2) and then a full
/// step from base y0 linearized at (y^(1/2), t0 + dt/2).
class RushLarsenStepper : public PointStepper {
public:
    RushLarsenStepper(std::shared_ptr<const Kernel> kernel, RlVariant variant);

    RlVariant variant() const { return variant_; }
    const std::vector<bool>& exponential_components() const { return exponential_; }

    std::string name() const override { return to_string(variant_); }
    std::unique_ptr<Workspace> make_workspace() const override;

    void step(std::span<double> y, double t0, double dt, std::span<const double> params,
              Workspace& ws) const override;
    void tangent(std::span<const double> y0, std::span<double> ydot, double t0, double dt,
                 std::span<const double> params, std::span<const double> param_dot, Workspace& ws) const override;
    void adjoint(std::span<const double> y0, std::span<double> ybar, double t0, double dt,
                 std::span<const double> params, std::span<double> param_bar, Workspace& ws) const override;

private:
    bool two_stage() const { return variant_ == RlVariant::RL2 || variant_ == RlVariant::GRL2; }

    // out_i = E_i(b, p, h) with f and diagonal evaluated at p.
    void update(std::span<const double> b, std::span<const double> p, double t, double h,
                std::span<const double> params, std::span<double> out, RushLarsenWorkspace& ws) const;

    // Derivatives of E(b, p, h): db (m, diagonal), dp (m x m), dm (m x P).
    void derivatives(std::span<const double> b, std::span<const double> p, double t, double h,
                     std::span<const double> params, bool with_params, std::span<double> db, std::span<double> dp,
                     std::span<double> dm, RushLarsenWorkspace& ws) const;

    RlVariant variant_;
    std::vector<bool> exponential_;
};

} // namespace splitadj
