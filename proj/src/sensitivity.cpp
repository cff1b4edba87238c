#include "splitadj/sensitivity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <omp.h>

#include "splitadj/error.hpp"

namespace splitadj {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int thread_count(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

void check_shape(const StateField& a, const StateField& b, const char* what) {
    if (a.points() != b.points() || a.components() != b.components()) {
        throw InvalidArgument(std::string(what) + ": state shapes differ");
    }
}

std::vector<double> gather_params(std::span<const double> global, const std::vector<std::size_t>& map) {
    std::vector<double> local(map.size(), 0.0);
    bool any = false;
    for (std::size_t k = 0; k < map.size(); ++k) {
        local[k] = global.empty() ? 0.0 : global[map[k]];
        any = any || local[k] != 0.0;
    }
    return any ? local : std::vector<double>{};
}

bool wants_params(const SweepOptions& options, const std::vector<std::size_t>& map) {
    if (!options.parameters || map.empty()) {
        return false;
    }
    if (options.parameter_subset.empty()) {
        return true;
    }
    for (std::size_t i : map) {
        if (std::find(options.parameter_subset.begin(), options.parameter_subset.end(), i) !=
            options.parameter_subset.end()) {
            return true;
        }
    }
    return false;
}

} // namespace

PointIntegralFunctional::PointIntegralFunctional(Expr integrand, std::size_t components, std::vector<double> weights,
                                                 std::vector<double> times, int threads)
    : integrand_(std::move(integrand)), components_(components), weights_(std::move(weights)),
      times_(std::move(times)), threads_(threads) {
    const IndexBounds b = index_bounds(integrand_);
    if (b.max_state >= static_cast<long>(components_)) {
        throw InvalidArgument("integrand references an undeclared state component");
    }
    if (b.max_param >= 0) {
        throw InvalidArgument("functional integrands may not reference parameters");
    }
    if (times_.empty()) {
        throw InvalidArgument("functional needs at least one evaluation time");
    }
    std::vector<Expr> partials;
    for (std::size_t c = 0; c < components_; ++c) {
        partials.push_back(differentiate(integrand_, Symbol::state(static_cast<std::uint32_t>(c))));
    }
    gradient_ = Program::compile(partials);
}

PointIntegralFunctional PointIntegralFunctional::point_measure(Expr integrand, std::size_t components,
                                                               std::vector<double> times) {
    return {std::move(integrand), components, {}, std::move(times)};
}

double PointIntegralFunctional::value(const StateField& y, std::size_t sample) const {
    if (sample >= times_.size() || y.components() != components_) {
        throw InvalidArgument("functional sample or state shape mismatch");
    }
    return assemble_point_functional(y, integrand_, weights_, {}, threads_);
}

void PointIntegralFunctional::add_gradient(const StateField& y, std::size_t sample, StateField& ybar) const {
    if (sample >= times_.size() || y.components() != components_) {
        throw InvalidArgument("functional sample or state shape mismatch");
    }
    check_shape(y, ybar, "functional gradient");
    if (!weights_.empty() && weights_.size() != y.points()) {
        throw InvalidArgument("weight count does not match point count");
    }
    const long n = static_cast<long>(y.points());
    const std::size_t m = components_;
#pragma omp parallel num_threads(thread_count(threads_))
    {
        std::vector<double> state(m);
        std::vector<double> regs(gradient_.register_count());
        std::vector<double> out(m);
#pragma omp for schedule(static)
        for (long pi = 0; pi < n; ++pi) {
            const auto p = static_cast<std::size_t>(pi);
            y.gather(p, state);
            gradient_.run(state, y.time, {}, regs, out);
            const double w = weights_.empty() ? 1.0 : weights_[p];
            for (std::size_t c = 0; c < m; ++c) {
                ybar.at(p, c) += w * out[c];
            }
        }
    }
}

double LinearFunctional::value(const StateField& y, std::size_t) const {
    check_shape(seed_, y, "linear functional");
    double acc = 0.0;
    for (std::size_t i = 0; i < y.data().size(); ++i) {
        acc += seed_.data()[i] * y.data()[i];
    }
    return acc;
}

void LinearFunctional::add_gradient(const StateField&, std::size_t, StateField& ybar) const {
    check_shape(seed_, ybar, "linear functional");
    for (std::size_t i = 0; i < ybar.data().size(); ++i) {
        ybar.data()[i] += seed_.data()[i];
    }
}

double evaluate_functional(const Tape& tape, const Functional& functional) {
    const auto times = functional.times();
    double total = 0.0;
    for (std::size_t s = 0; s < times.size(); ++s) {
        total += functional.value(tape.mark_at(times[s]).state, s);
    }
    return total;
}

namespace {

// Mark index of every functional sample, validated up front.
std::vector<const Mark*> sample_marks(const Tape& tape, const Functional& functional) {
    std::vector<const Mark*> out;
    for (double t : functional.times()) {
        out.push_back(&tape.mark_at(t));
    }
    return out;
}

StateField zero_like(const StateField& f) {
    StateField z(f.points(), f.components(), f.time);
    return z;
}

const StateField& reference_state(const Tape& tape) {
    if (tape.marks().empty()) {
        throw InvalidArgument("tape has no recorded states");
    }
    return tape.marks().front().state;
}

} // namespace

Gradient reverse_sweep(Tape& tape, const Functional& functional, const SweepOptions& options) {
    const auto start = Clock::now();
    const auto samples = sample_marks(tape, functional);
    const auto& steps = tape.steps();

    Gradient grad;
    grad.params.assign(tape.parameters().size(), 0.0);
    StateField ybar = zero_like(reference_state(tape));
    bool have_initial = false;

    for (std::size_t pos = steps.size() + 1; pos-- > 0;) {
        for (std::size_t s = 0; s < samples.size(); ++s) {
            if (samples[s]->position == pos) {
                functional.add_gradient(samples[s]->state, s, ybar);
            }
        }
        if (pos == 0) {
            break;
        }
        const TapeStep& step = steps[pos - 1];
        if (std::holds_alternative<AssignStep>(step)) {
            if (!have_initial) {
                grad.initial = ybar;
                have_initial = true;
            }
            ybar.fill(0.0);
        } else if (const auto* o = std::get_if<OdeStep>(&step)) {
            const auto t0 = Clock::now();
            const auto params = tape.ode_params(o->block);
            const auto& map = tape.ode_param_map(o->block);
            std::vector<double> pbar(wants_params(options, map) ? params.size() : 0, 0.0);
            tape.ode(o->block).adjoint(o->entry, ybar, o->t0, o->dt, params, pbar);
            for (std::size_t k = 0; k < pbar.size(); ++k) {
                grad.params[map[k]] += pbar[k];
            }
            grad.times.ode += seconds_since(t0);
        } else {
            const auto& p = std::get<PdeStep>(step);
            const std::size_t comp = tape.pde_component(p.block);
            const auto t_copy = Clock::now();
            std::vector<double> ubar(ybar.points());
            copy_from_component(ybar, comp, ubar);
            grad.times.merge += seconds_since(t_copy);
            const auto t0 = Clock::now();
            const auto params = tape.pde_params(p.block);
            const auto& map = tape.pde_param_map(p.block);
            std::vector<double> pbar(wants_params(options, map) ? params.size() : 0, 0.0);
            tape.pde(p.block).adjoint(p.entry, p.exit, ubar, p.t0, p.dt, params, pbar);
            for (std::size_t k = 0; k < pbar.size(); ++k) {
                grad.params[map[k]] += pbar[k];
            }
            grad.times.pde += seconds_since(t0);
            const auto t_back = Clock::now();
            copy_into_component(ybar, comp, ubar);
            grad.times.merge += seconds_since(t_back);
        }
    }
    if (!have_initial) {
        grad.initial = ybar;
    }
    if (!options.riesz_weights.empty()) {
        if (options.riesz_weights.size() != grad.initial.points()) {
            throw InvalidArgument("Riesz weights do not match the point count");
        }
        for (std::size_t c = 0; c < grad.initial.components(); ++c) {
            auto comp = grad.initial.component(c);
            for (std::size_t p = 0; p < comp.size(); ++p) {
                comp[p] /= options.riesz_weights[p];
            }
        }
    }
    grad.initial.time = reference_state(tape).time;
    grad.times.total = seconds_since(start);
    return grad;
}

double tangent_sweep(Tape& tape, const Functional& functional, std::span<const double> param_dot,
                     const StateField* initial_dot) {
    if (!param_dot.empty() && param_dot.size() != tape.parameters().size()) {
        throw InvalidArgument("parameter direction has the wrong size");
    }
    const auto samples = sample_marks(tape, functional);
    const auto& steps = tape.steps();
    const StateField& ref = reference_state(tape);
    StateField ydot = zero_like(ref);
    if (initial_dot) {
        check_shape(ref, *initial_dot, "initial direction");
    }
    // The direction enters at the last Assign step, or before the first step.
    std::size_t entry = 0;
    bool has_assign = false;
    for (std::size_t pos = 0; pos < steps.size(); ++pos) {
        if (std::holds_alternative<AssignStep>(steps[pos])) {
            entry = pos;
            has_assign = true;
        }
    }
    if (!has_assign && initial_dot) {
        ydot.data() = initial_dot->data();
    }

    double dj = 0.0;
    StateField g = zero_like(ref);
    const auto inject = [&](std::size_t pos) {
        for (std::size_t s = 0; s < samples.size(); ++s) {
            if (samples[s]->position != pos) {
                continue;
            }
            g.fill(0.0);
            functional.add_gradient(samples[s]->state, s, g);
            for (std::size_t i = 0; i < g.data().size(); ++i) {
                dj += g.data()[i] * ydot.data()[i];
            }
        }
    };

    for (std::size_t pos = 0; pos < steps.size(); ++pos) {
        inject(pos);
        const TapeStep& step = steps[pos];
        if (std::holds_alternative<AssignStep>(step)) {
            ydot.fill(0.0);
            if (pos == entry && initial_dot) {
                ydot.data() = initial_dot->data();
            }
        } else if (const auto* o = std::get_if<OdeStep>(&step)) {
            const auto params = tape.ode_params(o->block);
            const auto pdot = gather_params(param_dot, tape.ode_param_map(o->block));
            tape.ode(o->block).tangent(o->entry, ydot, o->t0, o->dt, params, pdot);
        } else {
            const auto& p = std::get<PdeStep>(step);
            const std::size_t comp = tape.pde_component(p.block);
            std::vector<double> udot(ydot.points());
            copy_from_component(ydot, comp, udot);
            const auto params = tape.pde_params(p.block);
            const auto pdot = gather_params(param_dot, tape.pde_param_map(p.block));
            tape.pde(p.block).tangent(p.entry, p.exit, udot, p.t0, p.dt, params, pdot);
            copy_into_component(ydot, comp, udot);
        }
    }
    inject(steps.size());
    return dj;
}

TaylorResult taylor_test(const std::function<double(double)>& perturbed, double j0, double dj_delta,
                         std::span<const double> steps) {
    if (steps.size() < 3) {
        throw InvalidArgument("a Taylor test needs at least three step sizes");
    }
    const double ratio = steps[1] / steps[0];
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw InvalidArgument("Taylor steps must decrease geometrically");
    }
    for (std::size_t i = 1; i < steps.size(); ++i) {
        if (std::fabs(steps[i] / steps[i - 1] - ratio) > 1e-12 * ratio) {
            throw InvalidArgument("Taylor steps must decrease geometrically");
        }
    }
    TaylorResult result;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    bool saturated = true;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const double h = steps[i];
        const double j = perturbed(h);
        TaylorRow row;
        row.step = h;
        row.r0 = std::fabs(j - j0);
        row.r1 = std::fabs(j - j0 - h * dj_delta);
        row.r0_order = nan;
        row.r1_order = nan;
        if (i > 0) {
            const auto& prev = result.rows.back();
            const double base = std::log(steps[i - 1] / h);
            row.r0_order = std::log(prev.r0 / row.r0) / base;
            row.r1_order = std::log(prev.r1 / row.r1) / base;
        }
        saturated = saturated && row.r1 <= 1e-13 * std::max(1.0, std::fabs(j0));
        result.rows.push_back(row);
    }
    result.saturated = saturated;
    return result;
}

} // namespace splitadj
