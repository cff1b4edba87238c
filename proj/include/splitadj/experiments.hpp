#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "splitadj/models.hpp"
#include "splitadj/pointcloud.hpp"
#include "splitadj/sensitivity.hpp"

namespace splitadj {

struct ExperimentConfig {
    std::string experiment = "mito"; // mito, fhn2d, converge-ode, converge-split, taylor, bench
    std::string model = "mito";      // mito or fhn, for taylor and bench
    std::size_t nx = 16;
    double t_end = 5.0;
    double dt = 0.5;
    double theta = 0.5;
    std::string scheme = "esdirk4";
    int threads = 0;
    std::string out_dir = ".";
    std::uint64_t seed = 42;
    bool timing = true;
    std::size_t rungs = 5;
    double taylor_step = 0.5;
    std::size_t repeats = 3;
    std::size_t points = 10000; // scaling rows
    double newton_tol = 1e-10;
    double linear_tol = 1e-10;

    /// Desk-scale defaults of one experiment.
    static ExperimentConfig defaults(const std::string& experiment);

    /// Sets one field from text; throws InvalidArgument for unknown keys or bad values.
    void set(std::string_view key, std::string_view value);
    void validate() const;
    std::size_t steps() const;
};

/// Applies `key = value` lines ('#' comments) on top of base.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base);
ExperimentConfig load_config(const std::string& path, ExperimentConfig base);

/// A CSV table with a fixed column list.
class Report {
public:
    Report() = default;
    explicit Report(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_row(std::vector<std::string> cells);

    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }
    std::string cell(std::size_t row, std::string_view column) const;

    std::string to_csv() const;
    void write_csv(const std::string& path) const;

    static std::string number(double v);
    static std::string integer(std::size_t v);
    /// "NA" when timing is disabled.
    static std::string seconds(double v, bool timing);

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

/// Columns step,R0,order,R1,order.
Report taylor_report(const TaylorResult& result);

/// Observed orders of every named scheme (or cfg.scheme unless "all") on
/// y' = -y^2 over the ladder dt, dt/2, dt/4, dt/8. Columns scheme,dt,error,order.
Report run_converge_ode(const ExperimentConfig& cfg);

/// Splitting order at theta = cfg.theta (or both 1/2 and 0 when theta < 0) on a
/// small reaction-diffusion problem against a dt/16 self-reference of the finest
/// rung. Columns theta,dt,error,order.
Report run_converge_split(const ExperimentConfig& cfg);

struct ExperimentResult {
    Report forward;
    Report taylor;
    double functional = 0.0;
    Gradient gradient;
    std::vector<std::string> param_names;
    StateField final_state;
    TaylorResult taylor_result;
};

/// Mitochondria experiment: theta splitting with ESDIRK4 (cfg.scheme), J = integral
/// of N3(T), gradient with respect to u0, Taylor ladder along a random u0 direction.
ExperimentResult run_mito(const ExperimentConfig& cfg, bool with_taylor = true);

/// Monodomain FitzHugh-Nagumo experiment: J = sum over 5 equidistant times of the
/// integral of v^2 + s^2, gradient with respect to g_f (and v0), Taylor ladder in g_f.
ExperimentResult run_fhn2d(const ExperimentConfig& cfg, bool with_taylor = true);

/// Phase timings of forward and adjoint runs, minima over cfg.repeats.
/// Columns phase,forward_s,adjoint_s,ratio with phases total, ode, pde, merge.
Report run_bench(const ExperimentConfig& cfg);

/// Pointwise forward and adjoint of a model (no PDE) at several thread counts on
/// cfg.points random states, steps of size dt. Columns threads,points,forward_s,
/// adjoint_s,ratio,speedup,hash; the hash covers the final state and co-state.
Report run_scaling(const ExperimentConfig& cfg, const std::string& model = "fhn", const std::string& scheme = "grl1",
                   const std::vector<int>& threads = {1, 2, 4, 8}, std::size_t steps = 10, double dt = 0.1);

} // namespace splitadj
