#include "splitadj/tape.hpp"

#include <chrono>
#include <cmath>

#include "splitadj/error.hpp"

namespace splitadj {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

} // namespace

std::size_t ParameterSet::add(std::string name, double value) {
    if (name.empty()) {
        throw InvalidArgument("parameter name must not be empty");
    }
    if (find(name)) {
        throw InvalidArgument("duplicate parameter '" + name + "'");
    }
    names_.push_back(std::move(name));
    values_.push_back(value);
    return names_.size() - 1;
}

std::optional<std::size_t> ParameterSet::find(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

std::size_t ParameterSet::index(std::string_view name) const {
    if (auto i = find(name)) {
        return *i;
    }
    throw InvalidArgument("unknown parameter '" + std::string(name) + "'");
}

Tape::Tape(ParameterSet parameters) : params_(std::move(parameters)) {}

std::vector<std::size_t> Tape::bind(const std::vector<std::string>& names, const std::vector<double>& defaults) {
    std::vector<std::size_t> map;
    map.reserve(names.size());
    for (std::size_t k = 0; k < names.size(); ++k) {
        auto i = params_.find(names[k]);
        map.push_back(i ? *i : params_.add(names[k], defaults.at(k)));
    }
    return map;
}

std::size_t Tape::add_ode(std::shared_ptr<PointIntegralSolver> solver) {
    if (!solver) {
        throw InvalidArgument("null ODE solver");
    }
    const Kernel& k = solver->stepper().kernel();
    auto map = bind(k.system().param_names(), k.system().param_values());
    odes_.push_back({std::move(solver), std::move(map)});
    return odes_.size() - 1;
}

std::size_t Tape::add_pde(std::shared_ptr<PdeOperator> op, std::size_t component) {
    if (!op) {
        throw InvalidArgument("null PDE operator");
    }
    auto map = bind(op->parameter_names(), op->default_parameters());
    pdes_.push_back({std::move(op), component, std::move(map)});
    return pdes_.size() - 1;
}

std::vector<double> Tape::ode_params(std::size_t block) const {
    std::vector<double> out;
    for (std::size_t i : odes_.at(block).map) {
        out.push_back(params_.value(i));
    }
    return out;
}

std::vector<double> Tape::pde_params(std::size_t block) const {
    std::vector<double> out;
    for (std::size_t i : pdes_.at(block).map) {
        out.push_back(params_.value(i));
    }
    return out;
}

void Tape::clear() {
    steps_.clear();
    marks_.clear();
    forward_ = {};
}

void Tape::assign(StateField& field, const StateField& value) {
    field = value;
    if (recording_) {
        steps_.emplace_back(AssignStep{});
    }
}

StepStats Tape::ode_step(std::size_t block, StateField& field, double dt) {
    auto& b = odes_.at(block);
    const auto start = Clock::now();
    if (recording_) {
        steps_.emplace_back(OdeStep{block, field.time, dt, field});
    }
    const auto params = ode_params(block);
    StepStats stats = b.solver->step(field, field.time, dt, params);
    const double elapsed = seconds_since(start);
    forward_.ode += elapsed;
    forward_.total += elapsed;
    return stats;
}

PdeStats Tape::pde_step(std::size_t block, StateField& field, double t0, double dt) {
    auto& b = pdes_.at(block);
    if (b.component >= field.components() || b.op->size() != field.points()) {
        throw InvalidArgument("PDE block does not match the state field");
    }
    const auto start = Clock::now();
    std::vector<double> u(field.points());
    copy_from_component(field, b.component, u);
    const double t_copy = seconds_since(start);

    const auto solve_start = Clock::now();
    std::vector<double> entry;
    if (recording_) {
        entry = u;
    }
    const auto params = pde_params(block);
    PdeStats stats = b.op->step(u, t0, dt, params);
    const double t_solve = seconds_since(solve_start);

    const auto merge_start = Clock::now();
    copy_into_component(field, b.component, u);
    const double t_back = seconds_since(merge_start);
    if (recording_) {
        steps_.emplace_back(PdeStep{block, t0, dt, std::move(entry), std::move(u)});
    }
    forward_.pde += t_solve;
    forward_.merge += t_copy + t_back;
    forward_.total += seconds_since(start);
    return stats;
}

void Tape::mark(const StateField& field) {
    if (recording_) {
        marks_.push_back({steps_.size(), field.time, field});
    }
}

const Mark& Tape::mark_at(double t) const {
    for (const auto& m : marks_) {
        if (std::fabs(m.time - t) <= 1e-9 * std::max(1.0, std::fabs(t))) {
            return m;
        }
    }
    throw InvalidArgument("no state recorded at t = " + std::to_string(t));
}

void SplitConfig::validate() const {
    if (!(theta >= 0.0 && theta <= 1.0)) {
        throw InvalidArgument("theta must lie in [0, 1]");
    }
    if (!(dt > 0.0)) {
        throw InvalidArgument("time step must be positive");
    }
}

void split_step(Tape& tape, std::size_t ode, std::size_t pde, StateField& field, const SplitConfig& config) {
    config.validate();
    const double t0 = field.time;
    const double first = config.theta * config.dt;
    if (first > 0.0) {
        tape.ode_step(ode, field, first);
    }
    tape.pde_step(pde, field, t0, config.dt);
    if (config.theta < 1.0) {
        field.time = t0 + first;
        tape.ode_step(ode, field, config.dt - first);
    }
    field.time = t0 + config.dt;
}

} // namespace splitadj
