#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "splitadj/pde.hpp"
#include "splitadj/pointcloud.hpp"

namespace splitadj {

/// Named scalar parameters shared by every block on a tape.
class ParameterSet {
public:
    std::size_t add(std::string name, double value);
    std::optional<std::size_t> find(std::string_view name) const;
    std::size_t index(std::string_view name) const;

    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<double>& values() const { return values_; }
    double value(std::size_t i) const { return values_.at(i); }
    double value(std::string_view name) const { return values_[index(name)]; }
    void set(std::size_t i, double v) { values_.at(i) = v; }
    void set(std::string_view name, double v) { values_[index(name)] = v; }

private:
    std::vector<std::string> names_;
    std::vector<double> values_;
};

struct AssignStep {};

struct OdeStep {
    std::size_t block;
    double t0;
    double dt;
    StateField entry;
};

struct PdeStep {
    std::size_t block;
    double t0;
    double dt;
    std::vector<double> entry;
    std::vector<double> exit;
};

using TapeStep = std::variant<AssignStep, OdeStep, PdeStep>;

/// Snapshot of the state at a time a functional may sample.
struct Mark {
    std::size_t position; // number of steps recorded before the mark
    double time;
    StateField state;
};

/// Wall-clock seconds per phase. merge is the copy of the shared component
/// into and out of the PDE work vector.
struct PhaseTimes {
    double total = 0.0;
    double ode = 0.0;
    double pde = 0.0;
    double merge = 0.0;
};

/// Ordered record of the solve steps of a split forward run, with the entry
/// state of every step as checkpoint. Stage values are never stored.
class Tape {
public:
    explicit Tape(ParameterSet parameters = {});

    ParameterSet& parameters() { return params_; }
    const ParameterSet& parameters() const { return params_; }

    /// Registers an ODE collection; its kernel parameters are bound to tape
    /// parameters of the same name, added with the kernel's defaults if absent.
    std::size_t add_ode(std::shared_ptr<PointIntegralSolver> solver);
    /// Registers a PDE operator acting on the given state component.
    std::size_t add_pde(std::shared_ptr<PdeOperator> op, std::size_t component);

    PointIntegralSolver& ode(std::size_t block) { return *odes_.at(block).solver; }
    PdeOperator& pde(std::size_t block) { return *pdes_.at(block).op; }
    std::size_t pde_component(std::size_t block) const { return pdes_.at(block).component; }

    std::vector<double> ode_params(std::size_t block) const;
    std::vector<double> pde_params(std::size_t block) const;
    const std::vector<std::size_t>& ode_param_map(std::size_t block) const { return odes_.at(block).map; }
    const std::vector<std::size_t>& pde_param_map(std::size_t block) const { return pdes_.at(block).map; }

    void set_recording(bool on) { recording_ = on; }
    bool recording() const { return recording_; }

    /// Drops recorded steps and marks; blocks and parameters stay.
    void clear();

    /// field := value, recorded as the initial-condition control.
    void assign(StateField& field, const StateField& value);
    /// Steps from field.time to field.time + dt.
    StepStats ode_step(std::size_t block, StateField& field, double dt);
    /// Steps the shared component over [t0, t0 + dt]; field.time is left alone.
    PdeStats pde_step(std::size_t block, StateField& field, double t0, double dt);
    /// Stores a snapshot at field.time for functionals.
    void mark(const StateField& field);

    const std::vector<TapeStep>& steps() const { return steps_; }
    const std::vector<Mark>& marks() const { return marks_; }
    /// The mark recorded at time t (within 1e-9 relative), or InvalidArgument.
    const Mark& mark_at(double t) const;

    PhaseTimes& forward_times() { return forward_; }
    const PhaseTimes& forward_times() const { return forward_; }

private:
    struct OdeBlock {
        std::shared_ptr<PointIntegralSolver> solver;
        std::vector<std::size_t> map;
    };
    struct PdeBlock {
        std::shared_ptr<PdeOperator> op;
        std::size_t component;
        std::vector<std::size_t> map;
    };

    std::vector<std::size_t> bind(const std::vector<std::string>& names, const std::vector<double>& defaults);

    ParameterSet params_;
    std::vector<OdeBlock> odes_;
    std::vector<PdeBlock> pdes_;
    std::vector<TapeStep> steps_;
    std::vector<Mark> marks_;
    bool recording_ = true;
    PhaseTimes forward_;
};

struct SplitConfig {
    double theta = 0.5;
    double dt = 0.1;

    void validate() const;
};

/// One theta-splitting step: ODE over theta*dt, PDE over dt on the shared
/// component, then ODE over (1 - theta)*dt when theta < 1. Zero-length ODE
/// sub-steps are skipped.
void split_step(Tape& tape, std::size_t ode, std::size_t pde, StateField& field, const SplitConfig& config);

} // namespace splitadj
