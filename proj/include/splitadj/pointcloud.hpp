#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "splitadj/expr.hpp"
#include "splitadj/stepper.hpp"

namespace splitadj {

inline constexpr std::size_t kDefaultChunkSize = 256;

/// Points with 1D or 2D coordinates, partitioned into fixed-size chunks.
struct PointSet {
    std::size_t dim = 2;
    std::vector<std::array<double, 2>> coords;
    std::size_t chunk_size = kDefaultChunkSize;

    std::size_t size() const { return coords.size(); }
    std::size_t num_chunks() const { return (coords.size() + chunk_size - 1) / chunk_size; }
};

/// |X| x m values in component-major layout: value (point p, component c) at data[c * points + p].
class StateField {
public:
    StateField() = default;
    StateField(std::size_t points, std::size_t components, double time = 0.0);

    std::size_t points() const { return points_; }
    std::size_t components() const { return components_; }

    std::span<double> component(std::size_t c) { return {data_.data() + c * points_, points_}; }
    std::span<const double> component(std::size_t c) const { return {data_.data() + c * points_, points_}; }

    double& at(std::size_t point, std::size_t c) { return data_[c * points_ + point]; }
    double at(std::size_t point, std::size_t c) const { return data_[c * points_ + point]; }

    void gather(std::size_t point, std::span<double> y) const;
    void scatter(std::size_t point, std::span<const double> y);

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    void fill(double v);

    double time = 0.0;

private:
    std::size_t points_ = 0;
    std::size_t components_ = 0;
    std::vector<double> data_;
};

/// FNV-1a over the raw bytes of the values.
std::uint64_t field_hash(const StateField& f);

/// Binary snapshot: uint64 points, uint64 components, double time, then
/// point-major values (all components of point 0 first), little endian host order.
void write_snapshot(const StateField& f, const std::string& path);
StateField read_snapshot(const std::string& path);
void write_csv(const StateField& f, const std::string& path, const std::vector<std::string>& names = {});

/// Steps an ODE collection at every point, in parallel over fixed chunks.
///
/// Results do not depend on the thread count. A point failure aborts the step
/// and is rethrown as PointFailure for the lowest failing point index.
class PointIntegralSolver {
public:
    explicit PointIntegralSolver(std::shared_ptr<const PointStepper> stepper,
                                 std::size_t chunk_size = kDefaultChunkSize);

    const PointStepper& stepper() const { return *stepper_; }
    std::size_t chunk_size() const { return chunk_size_; }

    /// 0 selects the OpenMP default.
    void set_threads(int threads) { threads_ = threads; }
    int threads() const { return threads_; }

    StepStats step(StateField& field, double t0, double dt, std::span<const double> params);

    /// ydot holds the direction at the entry state y0 and is overwritten with the propagated one.
    void tangent(const StateField& y0, StateField& ydot, double t0, double dt, std::span<const double> params,
                 std::span<const double> param_dot);

    /// ybar holds the co-state at the exit and is overwritten with the one at the entry state y0;
    /// parameter derivatives accumulate into param_bar (empty to skip).
    void adjoint(const StateField& y0, StateField& ybar, double t0, double dt, std::span<const double> params,
                 std::span<double> param_bar);

private:
    void ensure_workspaces(std::size_t chunks);
    template <typename Body>
    void for_each_chunk(std::size_t points, Body&& body);

    std::shared_ptr<const PointStepper> stepper_;
    std::size_t chunk_size_;
    int threads_ = 0;
    std::vector<std::unique_ptr<Workspace>> workspaces_;
};

/// sum_p w_p g(y_p) over points with weights (empty weights mean 1), combined in chunk order.
/// The integrand may reference states, t and parameters.
double assemble_point_functional(const StateField& field, const Expr& integrand, std::span<const double> weights = {},
                                 std::span<const double> params = {}, int threads = 0,
                                 std::size_t chunk_size = kDefaultChunkSize);

/// Applies a pointwise map to the state vector of every point.
void apply_scalar_map(StateField& field, const std::function<void(std::span<double>)>& map, int threads = 0,
                      std::size_t chunk_size = kDefaultChunkSize);

void copy_into_component(StateField& field, std::size_t c, std::span<const double> source);
void copy_from_component(const StateField& field, std::size_t c, std::span<double> target);

} // namespace splitadj
