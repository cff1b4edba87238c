#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "splitadj/error.hpp"
#include "splitadj/experiments.hpp"
#include "splitadj/models.hpp"
#include "splitadj/system.hpp"

namespace fs = std::filesystem;
using namespace splitadj;

namespace {

struct Flags {
    std::string config;
    std::string experiment;
    std::string model;
    std::string scheme;
    std::string out;
    std::optional<int> threads;
    std::optional<double> theta;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> nx;
    std::optional<double> t_end;
    std::optional<double> dt;
    std::optional<std::size_t> points;
    bool no_timing = false;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "key = value configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--experiment", f.experiment, "mito, fhn2d, converge-ode, converge-split, bench");
    cmd->add_option("--model", f.model, "model name");
    cmd->add_option("--scheme", f.scheme, "ODE scheme name");
    cmd->add_option("--threads", f.threads, "worker threads (0 = OpenMP default)");
    cmd->add_option("--theta", f.theta, "splitting parameter in [0, 1]");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--seed", f.seed, "random seed");
    cmd->add_option("--nx", f.nx, "cells per side");
    cmd->add_option("--T", f.t_end, "final time");
    cmd->add_option("--dt", f.dt, "time step");
    cmd->add_option("--points", f.points, "points for scaling rows");
    cmd->add_flag("--no-timing", f.no_timing, "omit wall-clock columns");
}

ExperimentConfig resolve(const Flags& f, const std::string& default_experiment) {
    const std::string name = f.experiment.empty() ? default_experiment : f.experiment;
    ExperimentConfig cfg = ExperimentConfig::defaults(name);
    if (!f.config.empty()) {
        cfg = load_config(f.config, cfg);
    }
    if (!f.model.empty()) {
        cfg.model = f.model;
    }
    if (!f.scheme.empty()) {
        cfg.scheme = f.scheme;
    }
    if (!f.out.empty()) {
        cfg.out_dir = f.out;
    }
    if (f.threads) {
        cfg.threads = *f.threads;
    }
    if (f.theta) {
        cfg.theta = *f.theta;
    }
    if (f.seed) {
        cfg.seed = *f.seed;
    }
    if (f.nx) {
        cfg.nx = *f.nx;
    }
    if (f.t_end) {
        cfg.t_end = *f.t_end;
    }
    if (f.dt) {
        cfg.dt = *f.dt;
    }
    if (f.points) {
        cfg.points = *f.points;
    }
    if (f.no_timing) {
        cfg.timing = false;
    }
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    return cfg;
}

std::string path_in(const ExperimentConfig& cfg, const std::string& file) {
    return (fs::path(cfg.out_dir) / file).string();
}

bool is_fhn(const ExperimentConfig& cfg) { return cfg.experiment == "fhn2d" || cfg.model == "fhn"; }

ExperimentResult run_split_experiment(const ExperimentConfig& cfg, bool taylor) {
    return is_fhn(cfg) ? run_fhn2d(cfg, taylor) : run_mito(cfg, taylor);
}

std::vector<std::string> state_names(const ExperimentConfig& cfg) {
    return is_fhn(cfg) ? std::vector<std::string>{"v", "s"} : std::vector<std::string>{"u", "N1", "N2", "N3"};
}

void write_gradient(const ExperimentConfig& cfg, const ExperimentResult& res) {
    Report params({"parameter", "dJ"});
    for (std::size_t i = 0; i < res.param_names.size(); ++i) {
        params.add_row({res.param_names[i], Report::number(res.gradient.params[i])});
    }
    params.write_csv(path_in(cfg, "gradient_params.csv"));
    write_snapshot(res.gradient.initial, path_in(cfg, "gradient_initial.bin"));
    write_csv(res.gradient.initial, path_in(cfg, "gradient_initial.csv"), state_names(cfg));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Operator-splitting solver with discrete adjoints"};
    app.require_subcommand(1);
    Flags flags;

    auto* solve = app.add_subcommand("solve", "forward run: per-step report and final state");
    auto* gradient = app.add_subcommand("gradient", "forward and adjoint run: gradients");
    auto* taylor = app.add_subcommand("taylor", "Taylor remainder test of the gradient");
    auto* converge = app.add_subcommand("converge", "ODE scheme or splitting convergence study");
    auto* bench = app.add_subcommand("bench", "adjoint/forward phase timings and thread scaling");
    auto* exporter = app.add_subcommand("export", "print a builtin model in text form");
    for (auto* cmd : {solve, gradient, taylor, converge, bench}) {
        add_common(cmd, flags);
    }
    std::string export_model = "mito";
    std::string export_out;
    exporter->add_option("--model", export_model, "model name")->check(CLI::IsMember(models::model_names()));
    exporter->add_option("--out", export_out, "output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) {
            const auto cfg = resolve(flags, "mito");
            auto res = run_split_experiment(cfg, false);
            res.forward.write_csv(path_in(cfg, "forward.csv"));
            write_snapshot(res.final_state, path_in(cfg, "final_state.bin"));
            write_csv(res.final_state, path_in(cfg, "final_state.csv"), state_names(cfg));
            std::printf("J = %.12g\n", res.functional);
        } else if (*gradient) {
            const auto cfg = resolve(flags, "mito");
            auto res = run_split_experiment(cfg, false);
            write_gradient(cfg, res);
            std::printf("J = %.12g\n", res.functional);
        } else if (*taylor) {
            const auto cfg = resolve(flags, "mito");
            auto res = run_split_experiment(cfg, true);
            res.taylor.write_csv(path_in(cfg, "taylor.csv"));
            std::cout << res.taylor.to_csv();
        } else if (*converge) {
            const auto cfg = resolve(flags, "converge-ode");
            const Report r = cfg.experiment == "converge-split" ? run_converge_split(cfg) : run_converge_ode(cfg);
            r.write_csv(path_in(cfg, "converge.csv"));
            std::cout << r.to_csv();
        } else if (*bench) {
            const auto cfg = resolve(flags, "bench");
            const Report b = run_bench(cfg);
            b.write_csv(path_in(cfg, "bench.csv"));
            std::cout << b.to_csv();
            const Report s = run_scaling(cfg);
            s.write_csv(path_in(cfg, "scaling.csv"));
            std::cout << s.to_csv();
        } else if (*exporter) {
            const std::string text = format_system(models::model_by_name(export_model));
            if (export_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream(export_out) << text;
            }
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
