#include "splitadj/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "splitadj/error.hpp"
#include "splitadj/pde.hpp"
#include "splitadj/tape.hpp"

namespace splitadj {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

double to_double(std::string_view key, std::string_view v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw InvalidArgument("bad number for '" + std::string(key) + "': " + std::string(v));
    }
    return out;
}

std::uint64_t to_unsigned(std::string_view key, std::string_view v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw InvalidArgument("bad integer for '" + std::string(key) + "': " + std::string(v));
    }
    return out;
}

bool to_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no" || v == "off") {
        return false;
    }
    throw InvalidArgument("bad boolean for '" + std::string(key) + "': " + std::string(v));
}

std::size_t step_count(double t_end, double dt) {
    const double n = t_end / dt;
    const double r = std::round(n);
    if (r < 1.0 || std::fabs(n - r) > 1e-9 * r) {
        throw InvalidArgument("final time must be a whole number of time steps");
    }
    return static_cast<std::size_t>(r);
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double lumped_integral(const StateField& f, std::size_t c, const std::vector<double>& weights) {
    double acc = 0.0;
    const auto comp = f.component(c);
    for (std::size_t p = 0; p < comp.size(); ++p) {
        acc += weights[p] * comp[p];
    }
    return acc;
}

// A split PDE-ODE problem recorded on a tape.
struct SplitProblem {
    StructuredTriMesh mesh;
    std::vector<double> lumped;
    std::shared_ptr<PointIntegralSolver> solver;
    Tape tape;
    std::size_t ode = 0;
    std::size_t pde = 0;
    SplitConfig split;
    std::size_t steps = 0;

    SplitProblem(StructuredTriMesh m, const RhsSystem& sys, const ExperimentConfig& cfg,
                 std::shared_ptr<PdeOperator> op, std::size_t component)
        : mesh(std::move(m)), lumped(lumped_mass(mesh)) {
        NewtonParams newton;
        newton.tolerance = cfg.newton_tol;
        auto kernel = std::make_shared<const Kernel>(sys);
        solver = std::make_shared<PointIntegralSolver>(make_stepper(kernel, cfg.scheme, newton));
        solver->set_threads(cfg.threads);
        ode = tape.add_ode(solver);
        pde = tape.add_pde(std::move(op), component);
        split.theta = cfg.theta;
        split.dt = cfg.dt;
        steps = step_count(cfg.t_end, cfg.dt);
    }

    // Records a full forward run with a mark at every step boundary.
    void forward(const StateField& init) {
        tape.clear();
        StateField field(init.points(), init.components(), 0.0);
        tape.assign(field, init);
        field.time = 0.0;
        tape.mark(field);
        for (std::size_t n = 0; n < steps; ++n) {
            split_step(tape, ode, pde, field, split);
            field.time = static_cast<double>(n + 1) * split.dt;
            tape.mark(field);
        }
    }

    const StateField& final_state() const { return tape.marks().back().state; }
};

LinearSolverOptions linear_options(const ExperimentConfig& cfg) {
    LinearSolverOptions o;
    o.tolerance = cfg.linear_tol;
    return o;
}

std::vector<double> taylor_steps(const ExperimentConfig& cfg) {
    std::vector<double> steps;
    for (std::size_t i = 0; i < cfg.rungs; ++i) {
        steps.push_back(cfg.taylor_step / static_cast<double>(std::size_t{1} << i));
    }
    return steps;
}

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace

ExperimentConfig ExperimentConfig::defaults(const std::string& experiment) {
    ExperimentConfig c;
    c.experiment = experiment;
    if (experiment == "mito" || experiment == "bench") {
        return c;
    }
    if (experiment == "fhn2d") {
        c.model = "fhn";
        c.nx = 32;
        c.t_end = 10.0;
        c.dt = 0.1;
        c.scheme = "grl1";
        c.rungs = 4;
        c.taylor_step = 0.005;
        return c;
    }
    if (experiment == "converge-ode") {
        c.model = "quadratic";
        c.t_end = 1.0;
        c.dt = 0.1;
        c.scheme = "all";
        c.rungs = 4;
        c.newton_tol = 1e-13;
        return c;
    }
    if (experiment == "converge-split") {
        c.model = "splitting";
        c.nx = 8;
        c.t_end = 1.0;
        c.dt = 0.1;
        c.theta = -1.0;
        c.scheme = "rk4";
        c.rungs = 3;
        c.linear_tol = 1e-13;
        return c;
    }
    if (experiment == "taylor") {
        return c;
    }
    throw InvalidArgument("unknown experiment '" + experiment + "'");
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key == "experiment") {
        experiment = std::string(value);
    } else if (key == "model") {
        model = std::string(value);
    } else if (key == "nx") {
        nx = to_unsigned(key, value);
    } else if (key == "T" || key == "t_end") {
        t_end = to_double(key, value);
    } else if (key == "dt" || key == "kappa") {
        dt = to_double(key, value);
    } else if (key == "theta") {
        theta = to_double(key, value);
    } else if (key == "scheme") {
        scheme = std::string(value);
    } else if (key == "threads") {
        threads = static_cast<int>(to_unsigned(key, value));
    } else if (key == "out") {
        out_dir = std::string(value);
    } else if (key == "seed") {
        seed = to_unsigned(key, value);
    } else if (key == "timing") {
        timing = to_bool(key, value);
    } else if (key == "rungs") {
        rungs = to_unsigned(key, value);
    } else if (key == "taylor_step") {
        taylor_step = to_double(key, value);
    } else if (key == "repeats") {
        repeats = to_unsigned(key, value);
    } else if (key == "points") {
        points = to_unsigned(key, value);
    } else if (key == "newton_tol") {
        newton_tol = to_double(key, value);
    } else if (key == "linear_tol") {
        linear_tol = to_double(key, value);
    } else {
        throw InvalidArgument("unknown config key '" + std::string(key) + "'");
    }
}

void ExperimentConfig::validate() const {
    static const std::vector<std::string> experiments = {"mito",  "fhn2d", "converge-ode", "converge-split",
                                                         "taylor", "bench"};
    if (std::find(experiments.begin(), experiments.end(), experiment) == experiments.end()) {
        throw InvalidArgument("unknown experiment '" + experiment + "'");
    }
    const auto names = scheme_names();
    if (scheme != "all" && std::find(names.begin(), names.end(), scheme) == names.end()) {
        throw InvalidArgument("unknown scheme '" + scheme + "'");
    }
    if (nx == 0 || !(t_end > 0.0) || !(dt > 0.0) || rungs == 0 || !(taylor_step > 0.0) || repeats == 0 ||
        points == 0 || !(newton_tol > 0.0) || !(linear_tol > 0.0)) {
        throw InvalidArgument("numeric configuration values must be positive");
    }
    const bool both = experiment == "converge-split" && theta < 0.0;
    if (!both && !(theta >= 0.0 && theta <= 1.0)) {
        throw InvalidArgument("theta must lie in [0, 1]");
    }
    if (threads < 0) {
        throw InvalidArgument("thread count must be non-negative");
    }
}

std::size_t ExperimentConfig::steps() const { return step_count(t_end, dt); }

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("expected 'key = value'", line_no);
        }
        base.set(line.substr(0, eq), line.substr(eq + 1));
    }
    return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument("cannot open config file " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

void Report::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size()) {
        throw InvalidArgument("report row has " + std::to_string(cells.size()) + " cells, expected " +
                              std::to_string(columns_.size()));
    }
    rows_.push_back(std::move(cells));
}

std::string Report::cell(std::size_t row, std::string_view column) const {
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        if (columns_[c] == column) {
            return rows_.at(row)[c];
        }
    }
    throw InvalidArgument("no column '" + std::string(column) + "'");
}

std::string Report::to_csv() const {
    std::string out;
    const auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out += i ? "," : "";
            out += cells[i];
        }
        out += '\n';
    };
    line(columns_);
    for (const auto& r : rows_) {
        line(r);
    }
    return out;
}

void Report::write_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InvalidArgument("cannot write " + path);
    }
    out << to_csv();
}

std::string Report::number(double v) {
    if (std::isnan(v)) {
        return "";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string Report::integer(std::size_t v) { return std::to_string(v); }

std::string Report::seconds(double v, bool timing) {
    if (!timing) {
        return "NA";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

Report taylor_report(const TaylorResult& result) {
    Report r({"step", "R0", "order", "R1", "order"});
    for (const auto& row : result.rows) {
        r.add_row({Report::number(row.step), Report::number(row.r0), Report::number(row.r0_order),
                   Report::number(row.r1), Report::number(row.r1_order)});
    }
    return r;
}

Report run_converge_ode(const ExperimentConfig& cfg) {
    cfg.validate();
    const models::TestProblem problem = cfg.model == "cubic" ? models::cubic_decay() : models::quadratic_decay();
    auto kernel = std::make_shared<const Kernel>(problem.system);
    NewtonParams newton;
    newton.tolerance = cfg.newton_tol;
    const std::vector<std::string> schemes =
        cfg.scheme == "all" ? scheme_names() : std::vector<std::string>{cfg.scheme};
    Report report({"scheme", "dt", "error", "order"});
    const double exact = problem.exact(cfg.t_end);
    for (const auto& name : schemes) {
        auto stepper = make_stepper(kernel, name, newton);
        auto ws = stepper->make_workspace();
        double prev_err = std::numeric_limits<double>::quiet_NaN();
        double prev_dt = 0.0;
        for (std::size_t r = 0; r < cfg.rungs; ++r) {
            const double dt = cfg.dt / static_cast<double>(std::size_t{1} << r);
            const std::size_t n = step_count(cfg.t_end, dt);
            double y = problem.system.initial_values()[0];
            ws->reset();
            for (std::size_t i = 0; i < n; ++i) {
                stepper->step(std::span<double>(&y, 1), static_cast<double>(i) * dt, dt, {}, *ws);
            }
            const double err = std::fabs(y - exact);
            const double order = r == 0 ? std::numeric_limits<double>::quiet_NaN()
                                        : std::log(prev_err / err) / std::log(prev_dt / dt);
            report.add_row({name, Report::number(dt), Report::number(err), Report::number(order)});
            prev_err = err;
            prev_dt = dt;
        }
    }
    return report;
}

namespace {

StateField splitting_initial(const StructuredTriMesh& mesh) {
    StateField f(mesh.num_vertices(), 2);
    for (std::size_t p = 0; p < mesh.num_vertices(); ++p) {
        const auto& x = mesh.vertex(p);
        f.at(p, 0) = 0.5 + 0.25 * std::cos(std::numbers::pi * x[0]) * std::cos(std::numbers::pi * x[1]);
        f.at(p, 1) = 0.1 * std::cos(std::numbers::pi * x[0]);
    }
    return f;
}

StateField run_splitting(const ExperimentConfig& cfg, double theta, double dt) {
    ExperimentConfig c = cfg;
    c.theta = theta;
    c.dt = dt;
    const auto mesh = StructuredTriMesh::unit_square(cfg.nx);
    auto op = std::make_shared<MonodomainOperator>(mesh, 0.05, 0.05, linear_options(cfg));
    SplitProblem prob(mesh, models::splitting_system(), c, op, 0);
    prob.tape.set_recording(false);
    StateField field = splitting_initial(mesh);
    for (std::size_t n = 0; n < prob.steps; ++n) {
        split_step(prob.tape, prob.ode, prob.pde, field, prob.split);
        field.time = static_cast<double>(n + 1) * dt;
    }
    return field;
}

} // namespace

Report run_converge_split(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::vector<double> thetas = cfg.theta < 0.0 ? std::vector<double>{0.5, 0.0} : std::vector<double>{cfg.theta};
    const double finest = cfg.dt / static_cast<double>(std::size_t{1} << (cfg.rungs - 1));
    Report report({"theta", "dt", "error", "order"});
    for (double theta : thetas) {
        const StateField ref = run_splitting(cfg, theta, finest / 16.0);
        double prev_err = 0.0;
        double prev_dt = 0.0;
        for (std::size_t r = 0; r < cfg.rungs; ++r) {
            const double dt = cfg.dt / static_cast<double>(std::size_t{1} << r);
            const StateField sol = run_splitting(cfg, theta, dt);
            double err = 0.0;
            for (std::size_t i = 0; i < sol.data().size(); ++i) {
                err = std::max(err, std::fabs(sol.data()[i] - ref.data()[i]));
            }
            const double order = r == 0 ? std::numeric_limits<double>::quiet_NaN()
                                        : std::log(prev_err / err) / std::log(prev_dt / dt);
            report.add_row({Report::number(theta), Report::number(dt), Report::number(err), Report::number(order)});
            prev_err = err;
            prev_dt = dt;
        }
    }
    return report;
}

namespace {

std::unique_ptr<SplitProblem> mito_problem(const ExperimentConfig& cfg) {
    const models::MitoConstants k;
    const auto mesh = StructuredTriMesh::unit_square(cfg.nx);
    auto op = std::make_shared<MitoDiffusionOperator>(mesh, k.d1, k.q, linear_options(cfg), cfg.newton_tol);
    return std::make_unique<SplitProblem>(mesh, models::mito_system(k), cfg, op, 0);
}

std::unique_ptr<SplitProblem> fhn_problem(const ExperimentConfig& cfg) {
    const models::CardiacConstants cc;
    const StructuredTriMesh mesh(0.0, 50.0, 0.0, 50.0, cfg.nx, cfg.nx);
    auto op = std::make_shared<MonodomainOperator>(mesh, cc.fiber(), cc.sheet(), linear_options(cfg));
    return std::make_unique<SplitProblem>(mesh, models::fhn_system(), cfg, op, 0);
}

PointIntegralFunctional mito_functional(const SplitProblem& prob, double t_end) {
    return {state(3), 4, prob.lumped, {t_end}};
}

PointIntegralFunctional fhn_functional(const SplitProblem& prob, double t_end) {
    std::vector<double> times;
    for (int i = 1; i <= 5; ++i) {
        times.push_back(t_end * i / 5.0);
    }
    return {state(0) * state(0) + state(1) * state(1), 2, prob.lumped, times};
}

} // namespace

ExperimentResult run_mito(const ExperimentConfig& cfg, bool with_taylor) {
    cfg.validate();
    auto prob = mito_problem(cfg);
    const StateField init = models::mito_initial(prob->mesh);
    const auto functional = mito_functional(*prob, cfg.t_end);
    prob->forward(init);

    ExperimentResult res;
    res.forward = Report({"time", "u_integral", "n3_integral", "conservation"});
    for (const auto& m : prob->tape.marks()) {
        res.forward.add_row({Report::number(m.time), Report::number(lumped_integral(m.state, 0, prob->lumped)),
                             Report::number(lumped_integral(m.state, 3, prob->lumped)),
                             Report::number(models::conservation_check(m.state, init))});
    }
    res.functional = evaluate_functional(prob->tape, functional);
    res.final_state = prob->final_state();
    SweepOptions opts;
    opts.parameters = false;
    res.gradient = reverse_sweep(prob->tape, functional, opts);
    res.param_names = prob->tape.parameters().names();
    if (!with_taylor) {
        return res;
    }

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> delta(init.points());
    for (auto& d : delta) {
        d = unit(rng);
    }
    double dj = 0.0;
    for (std::size_t p = 0; p < delta.size(); ++p) {
        dj += res.gradient.initial.at(p, 0) * delta[p];
    }
    const auto perturbed = [&](double h) {
        StateField x = init;
        for (std::size_t p = 0; p < delta.size(); ++p) {
            x.at(p, 0) += h * delta[p];
        }
        prob->forward(x);
        return evaluate_functional(prob->tape, functional);
    };
    const auto steps = taylor_steps(cfg);
    res.taylor_result = taylor_test(perturbed, res.functional, dj, steps);
    res.taylor = taylor_report(res.taylor_result);
    return res;
}

ExperimentResult run_fhn2d(const ExperimentConfig& cfg, bool with_taylor) {
    cfg.validate();
    auto prob = fhn_problem(cfg);
    const StateField init = models::fhn_initial(prob->mesh);
    const auto functional = fhn_functional(*prob, cfg.t_end);
    prob->forward(init);

    ExperimentResult res;
    res.forward = Report({"time", "v_integral", "v_max", "s_integral"});
    for (const auto& m : prob->tape.marks()) {
        const auto v = m.state.component(0);
        res.forward.add_row({Report::number(m.time), Report::number(lumped_integral(m.state, 0, prob->lumped)),
                             Report::number(*std::max_element(v.begin(), v.end())),
                             Report::number(lumped_integral(m.state, 1, prob->lumped))});
    }
    res.functional = evaluate_functional(prob->tape, functional);
    res.final_state = prob->final_state();
    res.gradient = reverse_sweep(prob->tape, functional);
    res.param_names = prob->tape.parameters().names();
    if (!with_taylor) {
        return res;
    }

    auto& params = prob->tape.parameters();
    const std::size_t gf = params.index("g_f");
    const double g0 = params.value(gf);
    std::mt19937_64 rng(cfg.seed);
    const double delta = std::uniform_real_distribution<double>(0.5, 1.5)(rng);
    const double dj = res.gradient.params[gf] * delta;
    const auto perturbed = [&](double h) {
        params.set(gf, g0 + h * delta);
        prob->forward(init);
        const double j = evaluate_functional(prob->tape, functional);
        params.set(gf, g0);
        return j;
    };
    const auto steps = taylor_steps(cfg);
    res.taylor_result = taylor_test(perturbed, res.functional, dj, steps);
    res.taylor = taylor_report(res.taylor_result);
    return res;
}

Report run_bench(const ExperimentConfig& cfg) {
    cfg.validate();
    const bool fhn = cfg.model == "fhn";
    auto prob = fhn ? fhn_problem(cfg) : mito_problem(cfg);
    const StateField init = fhn ? models::fhn_initial(prob->mesh) : models::mito_initial(prob->mesh);
    const auto functional = fhn ? fhn_functional(*prob, cfg.t_end) : mito_functional(*prob, cfg.t_end);
    SweepOptions opts;
    if (fhn) {
        opts.parameter_subset = {prob->tape.parameters().index("g_f")};
    } else {
        opts.parameters = false;
    }
    const double inf = std::numeric_limits<double>::infinity();
    PhaseTimes fwd{inf, inf, inf, inf};
    PhaseTimes adj{inf, inf, inf, inf};
    const auto keep_min = [](PhaseTimes& best, const PhaseTimes& t) {
        best.total = std::min(best.total, t.total);
        best.ode = std::min(best.ode, t.ode);
        best.pde = std::min(best.pde, t.pde);
        best.merge = std::min(best.merge, t.merge);
    };
    for (std::size_t r = 0; r < cfg.repeats; ++r) {
        prob->forward(init);
        keep_min(fwd, prob->tape.forward_times());
        keep_min(adj, reverse_sweep(prob->tape, functional, opts).times);
    }
    Report report({"phase", "forward_s", "adjoint_s", "ratio"});
    const auto row = [&](const char* name, double f, double a) {
        report.add_row({name, Report::seconds(f, cfg.timing), Report::seconds(a, cfg.timing),
                        cfg.timing ? Report::number(a / f) : "NA"});
    };
    row("total", fwd.total, adj.total);
    row("ode", fwd.ode, adj.ode);
    row("pde", fwd.pde, adj.pde);
    row("merge", fwd.merge, adj.merge);
    return report;
}

Report run_scaling(const ExperimentConfig& cfg, const std::string& model, const std::string& scheme,
                   const std::vector<int>& threads, std::size_t steps, double dt) {
    const RhsSystem sys = models::model_by_name(model);
    auto kernel = std::make_shared<const Kernel>(sys);
    NewtonParams newton;
    newton.tolerance = cfg.newton_tol;
    auto stepper = make_stepper(kernel, scheme, newton);
    const auto params = sys.param_values();
    const std::size_t m = sys.dimension();

    StateField init(cfg.points, m);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t p = 0; p < cfg.points; ++p) {
        for (std::size_t c = 0; c < m; ++c) {
            const double scale = model == "fhn" ? (c == 0 ? 100.0 : 10.0) : 1.0;
            init.at(p, c) = sys.initial_values()[c] + scale * unit(rng);
        }
    }
    Report report({"threads", "points", "forward_s", "adjoint_s", "ratio", "speedup", "hash"});
    double serial = 0.0;
    for (int t : threads) {
        PointIntegralSolver solver(stepper);
        solver.set_threads(t);
        double best_f = std::numeric_limits<double>::infinity();
        double best_a = best_f;
        StateField out;
        StateField bar;
        for (std::size_t r = 0; r < cfg.repeats; ++r) {
            std::vector<StateField> checkpoints;
            StateField field = init;
            auto start = Clock::now();
            for (std::size_t n = 0; n < steps; ++n) {
                checkpoints.push_back(field);
                solver.step(field, static_cast<double>(n) * dt, dt, params);
            }
            best_f = std::min(best_f, seconds_since(start));
            StateField ybar(cfg.points, m);
            ybar.fill(1.0);
            start = Clock::now();
            for (std::size_t n = steps; n-- > 0;) {
                solver.adjoint(checkpoints[n], ybar, static_cast<double>(n) * dt, dt, params, {});
            }
            best_a = std::min(best_a, seconds_since(start));
            out = std::move(field);
            bar = std::move(ybar);
        }
        if (serial == 0.0) {
            serial = best_f;
        }
        const std::uint64_t h = field_hash(out) ^ (field_hash(bar) * 1099511628211ULL);
        report.add_row({Report::integer(static_cast<std::size_t>(t)), Report::integer(cfg.points),
                        Report::seconds(best_f, cfg.timing), Report::seconds(best_a, cfg.timing),
                        cfg.timing ? Report::number(best_a / best_f) : "NA",
                        cfg.timing ? Report::number(serial / best_f) : "NA", hex(h)});
    }
    return report;
}

} // namespace splitadj
