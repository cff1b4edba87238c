#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "splitadj/expr.hpp"
#include "splitadj/kernel.hpp"
#include "splitadj/tape.hpp"

namespace splitadj {

/// J = sum over samples s of j_s(y(t_s)). Every sample time must have a mark on the tape.
class Functional {
public:
    virtual ~Functional() = default;

    virtual std::vector<double> times() const = 0;
    virtual double value(const StateField& y, std::size_t sample) const = 0;
    /// ybar += dj_s/dy at y.
    virtual void add_gradient(const StateField& y, std::size_t sample, StateField& ybar) const = 0;
};

/// j_s(y) = sum_p w_p g(y_p) for a pointwise integrand g of the state components.
/// Empty weights give the point-measure sum; lumped mass weights give an integral.
class PointIntegralFunctional : public Functional {
public:
    PointIntegralFunctional(Expr integrand, std::size_t components, std::vector<double> weights,
                            std::vector<double> times, int threads = 0);

    static PointIntegralFunctional point_measure(Expr integrand, std::size_t components, std::vector<double> times);

    std::vector<double> times() const override { return times_; }
    double value(const StateField& y, std::size_t sample) const override;
    void add_gradient(const StateField& y, std::size_t sample, StateField& ybar) const override;

    const Expr& integrand() const { return integrand_; }
    void set_threads(int threads) { threads_ = threads; }

private:
    Expr integrand_;
    std::size_t components_;
    std::vector<double> weights_;
    std::vector<double> times_;
    Program gradient_;
    int threads_;
};

/// j(y) = <seed, y> at one time; the seed of a dot-product test.
class LinearFunctional : public Functional {
public:
    LinearFunctional(StateField seed, double time) : seed_(std::move(seed)), time_(time) {}

    std::vector<double> times() const override { return {time_}; }
    double value(const StateField& y, std::size_t sample) const override;
    void add_gradient(const StateField& y, std::size_t sample, StateField& ybar) const override;

private:
    StateField seed_;
    double time_;
};

/// J evaluated on the marks of a recorded tape.
double evaluate_functional(const Tape& tape, const Functional& functional);

struct SweepOptions {
    bool parameters = true; // accumulate parameter derivatives
    /// When non-empty, only blocks bound to one of these tape parameters
    /// compute parameter derivatives; the others are left at zero.
    std::vector<std::size_t> parameter_subset;
    /// When non-empty, the initial-field gradient is divided pointwise by these
    /// weights (lumped mass), giving the L2 Riesz representative.
    std::vector<double> riesz_weights;
};

struct Gradient {
    std::vector<double> params; // indexed like the tape's ParameterSet
    StateField initial;         // dJ/dy at the last Assign (or at the first step)
    PhaseTimes times;
};

/// Backward substitution through the recorded steps: seeds dJ/dy at every
/// sampled mark, applies each step's adjoint in reverse order from its
/// entry checkpoint.
Gradient reverse_sweep(Tape& tape, const Functional& functional, const SweepOptions& options = {});

/// Forward tangent-linear sweep; returns dJ[param_dot, initial_dot]. initial_dot
/// is the direction of the assigned initial field and may be empty for zero.
double tangent_sweep(Tape& tape, const Functional& functional, std::span<const double> param_dot,
                     const StateField* initial_dot);

struct TaylorRow {
    double step = 0.0;
    double r0 = 0.0;
    double r0_order = 0.0; // NaN on the first rung
    double r1 = 0.0;
    double r1_order = 0.0;
};

struct TaylorResult {
    std::vector<TaylorRow> rows;
    /// Every R1 is at roundoff level relative to J (e.g. J linear in the control).
    bool saturated = false;
};

/// R0(h) = |J(h) - J0|, R1(h) = |J(h) - J0 - h dJ|, with observed orders between
/// consecutive rungs of a geometric ladder of at least three steps.
TaylorResult taylor_test(const std::function<double(double)>& perturbed, double j0, double dj_delta,
                         std::span<const double> steps);

} // namespace splitadj
