#include "splitadj/pointcloud.hpp"

#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <utility>

#include <omp.h>

#include "splitadj/error.hpp"
#include "splitadj/kernel.hpp"

namespace splitadj {

StateField::StateField(std::size_t points, std::size_t components, double t)
    : time(t), points_(points), components_(components), data_(points * components, 0.0) {}

void StateField::gather(std::size_t point, std::span<double> y) const {
    for (std::size_t c = 0; c < components_; ++c) {
        y[c] = data_[c * points_ + point];
    }
}

void StateField::scatter(std::size_t point, std::span<const double> y) {
    for (std::size_t c = 0; c < components_; ++c) {
        data_[c * points_ + point] = y[c];
    }
}

void StateField::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

std::uint64_t field_hash(const StateField& f) {
    std::uint64_t h = 1469598103934665603ULL;
    const auto* bytes = reinterpret_cast<const unsigned char*>(f.data().data());
    const std::size_t n = f.data().size() * sizeof(double);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ULL;
    }
    return h;
}

void write_snapshot(const StateField& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InvalidArgument("cannot write snapshot '" + path + "'");
    }
    const std::uint64_t n = f.points();
    const std::uint64_t m = f.components();
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(&m), sizeof m);
    out.write(reinterpret_cast<const char*>(&f.time), sizeof f.time);
    std::vector<double> row(m);
    for (std::size_t p = 0; p < n; ++p) {
        f.gather(p, row);
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(m * sizeof(double)));
    }
}

StateField read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InvalidArgument("cannot read snapshot '" + path + "'");
    }
    std::uint64_t n = 0;
    std::uint64_t m = 0;
    double t = 0.0;
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    in.read(reinterpret_cast<char*>(&m), sizeof m);
    in.read(reinterpret_cast<char*>(&t), sizeof t);
    if (!in) {
        throw InvalidArgument("truncated snapshot header in '" + path + "'");
    }
    StateField f(n, m, t);
    std::vector<double> row(m);
    for (std::size_t p = 0; p < n; ++p) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(m * sizeof(double)));
        if (!in) {
            throw InvalidArgument("truncated snapshot data in '" + path + "'");
        }
        f.scatter(p, row);
    }
    return f;
}

void write_csv(const StateField& f, const std::string& path, const std::vector<std::string>& names) {
    std::ofstream out(path);
    if (!out) {
        throw InvalidArgument("cannot write '" + path + "'");
    }
    out << "point";
    for (std::size_t c = 0; c < f.components(); ++c) {
        out << "," << (c < names.size() ? names[c] : "y" + std::to_string(c));
    }
    out << "\n" << std::setprecision(17);
    for (std::size_t p = 0; p < f.points(); ++p) {
        out << p;
        for (std::size_t c = 0; c < f.components(); ++c) {
            out << "," << f.at(p, c);
        }
        out << "\n";
    }
}

namespace {

int thread_count(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

struct ChunkFailure {
    std::size_t point;
    std::string what;
};

void rethrow_lowest(const std::vector<std::optional<ChunkFailure>>& failures) {
    for (const auto& f : failures) {
        if (f) {
            throw PointFailure(f->point, f->what);
        }
    }
}

} // namespace

PointIntegralSolver::PointIntegralSolver(std::shared_ptr<const PointStepper> stepper, std::size_t chunk_size)
    : stepper_(std::move(stepper)), chunk_size_(chunk_size) {
    if (!stepper_) {
        throw InvalidArgument("point solver needs a stepper");
    }
    if (chunk_size_ == 0) {
        throw InvalidArgument("chunk size must be positive");
    }
}

void PointIntegralSolver::ensure_workspaces(std::size_t chunks) {
    while (workspaces_.size() < chunks) {
        workspaces_.push_back(stepper_->make_workspace());
    }
}

template <typename Body>
void PointIntegralSolver::for_each_chunk(std::size_t points, Body&& body) {
    const std::size_t chunks = (points + chunk_size_ - 1) / chunk_size_;
    ensure_workspaces(chunks);
    std::vector<std::optional<ChunkFailure>> failures(chunks);
    const long n = static_cast<long>(chunks);
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count(threads_))
    for (long ci = 0; ci < n; ++ci) {
        const auto c = static_cast<std::size_t>(ci);
        const std::size_t begin = c * chunk_size_;
        const std::size_t end = std::min(points, begin + chunk_size_);
        std::vector<double> y(stepper_->dimension());
        std::vector<double> v(stepper_->dimension());
        for (std::size_t p = begin; p < end; ++p) {
            try {
                body(c, p, *workspaces_[c], y, v);
            } catch (const std::exception& e) {
                failures[c] = ChunkFailure{p, e.what()};
                break;
            }
        }
    }
    rethrow_lowest(failures);
}

StepStats PointIntegralSolver::step(StateField& field, double t0, double dt, std::span<const double> params) {
    if (field.components() != stepper_->dimension()) {
        throw InvalidArgument("field has " + std::to_string(field.components()) + " components, stepper expects " +
                              std::to_string(stepper_->dimension()));
    }
    const std::size_t chunks = (field.points() + chunk_size_ - 1) / chunk_size_;
    ensure_workspaces(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        workspaces_[c]->stats = {};
    }
    for_each_chunk(field.points(), [&](std::size_t, std::size_t p, Workspace& ws, std::vector<double>& y,
                                       std::vector<double>&) {
        field.gather(p, y);
        stepper_->step(y, t0, dt, params, ws);
        field.scatter(p, y);
    });
    field.time = t0 + dt;
    StepStats total;
    for (std::size_t c = 0; c < chunks; ++c) {
        total += workspaces_[c]->stats;
    }
    return total;
}

void PointIntegralSolver::tangent(const StateField& y0, StateField& ydot, double t0, double dt,
                                  std::span<const double> params, std::span<const double> param_dot) {
    if (y0.points() != ydot.points() || y0.components() != stepper_->dimension() ||
        ydot.components() != stepper_->dimension()) {
        throw InvalidArgument("tangent: field shapes do not match");
    }
    for_each_chunk(y0.points(), [&](std::size_t, std::size_t p, Workspace& ws, std::vector<double>& y,
                                    std::vector<double>& v) {
        y0.gather(p, y);
        ydot.gather(p, v);
        stepper_->tangent(y, v, t0, dt, params, param_dot, ws);
        ydot.scatter(p, v);
    });
    ydot.time = t0 + dt;
}

void PointIntegralSolver::adjoint(const StateField& y0, StateField& ybar, double t0, double dt,
                                  std::span<const double> params, std::span<double> param_bar) {
    if (y0.points() != ybar.points() || y0.components() != stepper_->dimension() ||
        ybar.components() != stepper_->dimension()) {
        throw InvalidArgument("adjoint: field shapes do not match");
    }
    const std::size_t chunks = (y0.points() + chunk_size_ - 1) / chunk_size_;
    const std::size_t np = param_bar.size();
    std::vector<double> partial(chunks * np, 0.0);
    for_each_chunk(y0.points(), [&](std::size_t c, std::size_t p, Workspace& ws, std::vector<double>& y,
                                    std::vector<double>& v) {
        y0.gather(p, y);
        ybar.gather(p, v);
        stepper_->adjoint(y, v, t0, dt, params, std::span<double>(partial.data() + c * np, np), ws);
        ybar.scatter(p, v);
    });
    for (std::size_t c = 0; c < chunks; ++c) {
        for (std::size_t k = 0; k < np; ++k) {
            param_bar[k] += partial[c * np + k];
        }
    }
    ybar.time = t0;
}

double assemble_point_functional(const StateField& field, const Expr& integrand, std::span<const double> weights,
                                 std::span<const double> params, int threads, std::size_t chunk_size) {
    if (chunk_size == 0) {
        throw InvalidArgument("chunk size must be positive");
    }
    if (!weights.empty() && weights.size() != field.points()) {
        throw InvalidArgument("weight count does not match point count");
    }
    const IndexBounds bounds = index_bounds(integrand);
    if (bounds.max_state >= static_cast<long>(field.components())) {
        throw InvalidArgument("integrand references an undeclared state component");
    }
    if (bounds.max_param >= static_cast<long>(params.size())) {
        throw InvalidArgument("integrand references an undeclared parameter");
    }
    const Expr roots[] = {integrand};
    const Program program = Program::compile(roots);
    const std::size_t points = field.points();
    const std::size_t chunks = (points + chunk_size - 1) / chunk_size;
    std::vector<double> partial(chunks, 0.0);
    const long n = static_cast<long>(chunks);
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count(threads))
    for (long ci = 0; ci < n; ++ci) {
        const auto c = static_cast<std::size_t>(ci);
        std::vector<double> y(field.components());
        std::vector<double> regs(program.register_count());
        double out = 0.0;
        double acc = 0.0;
        const std::size_t end = std::min(points, (c + 1) * chunk_size);
        for (std::size_t p = c * chunk_size; p < end; ++p) {
            field.gather(p, y);
            program.run(y, field.time, params, regs, std::span<double>(&out, 1));
            acc += weights.empty() ? out : weights[p] * out;
        }
        partial[c] = acc;
    }
    double total = 0.0;
    for (double v : partial) {
        total += v;
    }
    return total;
}

void apply_scalar_map(StateField& field, const std::function<void(std::span<double>)>& map, int threads,
                      std::size_t chunk_size) {
    if (chunk_size == 0) {
        throw InvalidArgument("chunk size must be positive");
    }
    const std::size_t points = field.points();
    const long n = static_cast<long>((points + chunk_size - 1) / chunk_size);
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count(threads))
    for (long ci = 0; ci < n; ++ci) {
        const auto c = static_cast<std::size_t>(ci);
        std::vector<double> y(field.components());
        const std::size_t end = std::min(points, (c + 1) * chunk_size);
        for (std::size_t p = c * chunk_size; p < end; ++p) {
            field.gather(p, y);
            map(y);
            field.scatter(p, y);
        }
    }
}

void copy_into_component(StateField& field, std::size_t c, std::span<const double> source) {
    if (c >= field.components() || source.size() != field.points()) {
        throw InvalidArgument("copy_into_component: shape mismatch");
    }
    std::copy(source.begin(), source.end(), field.component(c).begin());
}

void copy_from_component(const StateField& field, std::size_t c, std::span<double> target) {
    if (c >= field.components() || target.size() != field.points()) {
        throw InvalidArgument("copy_from_component: shape mismatch");
    }
    const auto src = field.component(c);
    std::copy(src.begin(), src.end(), target.begin());
}

} // namespace splitadj
