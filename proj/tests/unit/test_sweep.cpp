#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "splitadj/error.hpp"
#include "splitadj/mesh.hpp"
#include "splitadj/models.hpp"
#include "splitadj/pde.hpp"
#include "splitadj/sensitivity.hpp"
#include "test_util.hpp"

using namespace splitadj;

namespace {

// An ODE-only tape over a field of points.
struct OdeRun {
    Tape tape;
    std::size_t block = 0;

    OdeRun(const RhsSystem& sys, const std::string& scheme) {
        auto solver = std::make_shared<PointIntegralSolver>(testutil::stepper(sys, scheme));
        block = tape.add_ode(solver);
    }

    StateField run(const StateField& init, double dt, std::size_t steps) {
        tape.clear();
        StateField field(init.points(), init.components());
        tape.assign(field, init);
        tape.mark(field);
        for (std::size_t n = 0; n < steps; ++n) {
            tape.ode_step(block, field, dt);
            field.time = static_cast<double>(n + 1) * dt;
            tape.mark(field);
        }
        return field;
    }
};

// Monodomain FitzHugh-Nagumo on a coarse mesh, theta = 1/2 splitting.
struct SplitRun {
    StructuredTriMesh mesh;
    Tape tape;
    std::size_t ode = 0, pde = 0;
    SplitConfig split;

    SplitRun(const RhsSystem& sys, const std::string& scheme, std::shared_ptr<PdeOperator> op, StructuredTriMesh m,
             double dt)
        : mesh(std::move(m)) {
        auto solver = std::make_shared<PointIntegralSolver>(testutil::stepper(sys, scheme));
        ode = tape.add_ode(solver);
        pde = tape.add_pde(std::move(op), 0);
        split.theta = 0.5;
        split.dt = dt;
    }

    void run(const StateField& init, std::size_t steps) {
        tape.clear();
        StateField field(init.points(), init.components());
        tape.assign(field, init);
        tape.mark(field);
        for (std::size_t n = 0; n < steps; ++n) {
            split_step(tape, ode, pde, field, split);
            field.time = static_cast<double>(n + 1) * split.dt;
            tape.mark(field);
        }
    }
};

LinearSolverOptions tight_linear() {
    LinearSolverOptions o;
    o.tolerance = 1e-13;
    return o;
}

SplitRun fhn_split(std::size_t steps_hint = 0) {
    (void)steps_hint;
    const models::CardiacConstants cc;
    StructuredTriMesh mesh(0.0, 50.0, 0.0, 50.0, 4, 4);
    auto op = std::make_shared<MonodomainOperator>(mesh, cc.fiber(), cc.sheet(), tight_linear());
    return SplitRun(models::fhn_system(), "grl1", op, mesh, 0.1);
}

double field_dot(const StateField& a, const StateField& b) { return testutil::dot(a.data(), b.data()); }

} // namespace

TEST(ParameterSet, AddFindAndErrors) {
    ParameterSet p;
    EXPECT_EQ(p.add("a", 1.0), 0u);
    EXPECT_EQ(p.add("b", 2.0), 1u);
    EXPECT_THROW(p.add("a", 3.0), InvalidArgument);
    EXPECT_THROW(p.add("", 3.0), InvalidArgument);
    EXPECT_EQ(p.index("b"), 1u);
    EXPECT_FALSE(p.find("c"));
    EXPECT_THROW(p.index("c"), InvalidArgument);
    p.set("b", 5.0);
    EXPECT_EQ(p.value("b"), 5.0);
}

TEST(Tape, SharedParameterNamesBindOnce) {
    Tape tape;
    auto s = std::make_shared<PointIntegralSolver>(testutil::stepper(models::fhn_system(), "grl1"));
    tape.add_ode(s);
    tape.add_ode(s);
    EXPECT_EQ(tape.parameters().size(), models::fhn_system().num_params());
    EXPECT_EQ(tape.ode_param_map(0), tape.ode_param_map(1));
}

TEST(ReverseSweep, AssignOnlyGivesStateGradient) {
    Tape tape;
    StateField init(5, 1);
    for (std::size_t p = 0; p < 5; ++p) {
        init.at(p, 0) = 0.5 * p - 1.0;
    }
    StateField field;
    tape.assign(field, init);
    tape.mark(field);
    const auto j = PointIntegralFunctional::point_measure(0.5 * state(0) * state(0), 1, {0.0});
    EXPECT_DOUBLE_EQ(evaluate_functional(tape, j), 0.5 * (1.0 + 0.25 + 0.0 + 0.25 + 1.0));
    const Gradient g = reverse_sweep(tape, j);
    EXPECT_EQ(g.initial.data(), init.data());
    EXPECT_TRUE(g.params.empty());
}

TEST(ReverseSweep, TwoExplicitEulerSteps) {
    const double lambda = -2.0, dt = 0.1;
    OdeRun r(testutil::scalar_linear(lambda), "explicit-euler");
    StateField init(3, 1);
    init.fill(1.5);
    r.run(init, dt, 2);
    const auto j = PointIntegralFunctional::point_measure(state(0), 1, {2 * dt});
    const Gradient g = reverse_sweep(r.tape, j);
    for (double v : g.initial.data()) {
        EXPECT_DOUBLE_EQ(v, (1 + dt * lambda) * (1 + dt * lambda));
    }
    // dJ/dlambda = 3 points * y0 * 2 (1 + dt lambda) dt.
    ASSERT_EQ(g.params.size(), 1u);
    EXPECT_NEAR(g.params[0], 3 * 1.5 * 2 * (1 + dt * lambda) * dt, 1e-15);
}

TEST(ReverseSweep, InteriorSamplesAreInjected) {
    const double lambda = -1.0, dt = 0.25;
    OdeRun r(testutil::scalar_linear(lambda), "explicit-euler");
    StateField init(1, 1);
    init.fill(1.0);
    r.run(init, dt, 4);
    const auto j = PointIntegralFunctional::point_measure(state(0), 1, {dt, 3 * dt});
    const double a = 1 + dt * lambda;
    EXPECT_DOUBLE_EQ(evaluate_functional(r.tape, j), a + a * a * a);
    const Gradient g = reverse_sweep(r.tape, j);
    EXPECT_DOUBLE_EQ(g.initial.at(0, 0), a + a * a * a);
}

TEST(ReverseSweep, UnrecordedSampleTimeThrows) {
    OdeRun r(testutil::scalar_linear(-1.0), "explicit-euler");
    StateField init(1, 1);
    r.run(init, 0.1, 3);
    const auto j = PointIntegralFunctional::point_measure(state(0), 1, {0.15});
    EXPECT_THROW(reverse_sweep(r.tape, j), InvalidArgument);
    EXPECT_THROW(evaluate_functional(r.tape, j), InvalidArgument);
    EXPECT_NO_THROW(r.tape.mark_at(0.1 + 0.2));
}

TEST(Functional, RejectsBadIntegrands) {
    EXPECT_THROW(PointIntegralFunctional::point_measure(state(2), 2, {0.0}), InvalidArgument);
    EXPECT_THROW(PointIntegralFunctional::point_measure(param(0) * state(0), 2, {0.0}), InvalidArgument);
    EXPECT_THROW(PointIntegralFunctional::point_measure(state(0), 2, {}), InvalidArgument);
}

TEST(ReverseSweep, RieszWeightsDivideTheInitialGradient) {
    OdeRun r(testutil::scalar_linear(-1.0), "grl1");
    StateField init(4, 1);
    init.fill(2.0);
    r.run(init, 0.1, 2);
    const std::vector<double> w = {0.5, 1.0, 2.0, 4.0};
    const PointIntegralFunctional j(state(0) * state(0), 1, w, {0.2});
    const Gradient raw = reverse_sweep(r.tape, j);
    SweepOptions opt;
    opt.riesz_weights = w;
    const Gradient riesz = reverse_sweep(r.tape, j, opt);
    for (std::size_t p = 0; p < 4; ++p) {
        EXPECT_DOUBLE_EQ(riesz.initial.at(p, 0), raw.initial.at(p, 0) / w[p]);
    }
    opt.riesz_weights = {1.0};
    EXPECT_THROW(reverse_sweep(r.tape, j, opt), InvalidArgument);
}

TEST(ReverseSweep, UnusedParameterHasExactlyZeroGradient) {
    OdeRun r(models::fhn_system(), "grl1");
    StateField init(16, 2);
    for (std::size_t p = 0; p < 16; ++p) {
        init.at(p, 0) = 5.0 + 3.0 * p;
    }
    r.run(init, 0.1, 20);
    const auto j = PointIntegralFunctional::point_measure(state(0) * state(0) + state(1), 2, {2.0});
    const Gradient g = reverse_sweep(r.tape, j);
    EXPECT_EQ(g.params[r.tape.parameters().index("dummy")], 0.0);
    EXPECT_NE(g.params[r.tape.parameters().index("c1")], 0.0);
}

TEST(ReverseSweep, ParameterSubsetSkipsOtherBlocks) {
    SplitRun r = fhn_split();
    r.run(models::fhn_initial(r.mesh), 5);
    const auto j = PointIntegralFunctional::point_measure(state(0), 2, {0.5});
    const Gradient full = reverse_sweep(r.tape, j);
    SweepOptions opt;
    opt.parameter_subset = {r.tape.parameters().index("g_f")};
    const Gradient sub = reverse_sweep(r.tape, j, opt);
    EXPECT_EQ(sub.params[r.tape.parameters().index("g_f")], full.params[r.tape.parameters().index("g_f")]);
    EXPECT_EQ(sub.params[r.tape.parameters().index("c1")], 0.0);
    EXPECT_EQ(sub.initial.data(), full.initial.data());
    SweepOptions none;
    none.parameters = false;
    const Gradient g = reverse_sweep(r.tape, j, none);
    for (double v : g.params) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(Tape, ForwardReplayFromCheckpointsIsBitwise) {
    for (const char* scheme : {"esdirk4", "grl2"}) {
        OdeRun r(models::fhn_system(), scheme);
        StateField init(300, 2);
        for (std::size_t p = 0; p < 300; ++p) {
            init.at(p, 0) = 0.1 * p;
        }
        r.tape.ode(r.block).set_threads(2);
        r.run(init, 0.1, 10);
        const auto& steps = r.tape.steps();
        const auto& marks = r.tape.marks();
        std::size_t mark = 1;
        for (const auto& s : steps) {
            if (const auto* o = std::get_if<OdeStep>(&s)) {
                StateField y = o->entry;
                r.tape.ode(o->block).step(y, o->t0, o->dt, r.tape.ode_params(o->block));
                EXPECT_EQ(y.data(), marks[mark].state.data()) << scheme;
                ++mark;
            }
        }
        EXPECT_EQ(mark, marks.size());
    }
}

TEST(TangentSweep, FhnConductivityMatchesCentralDifference) {
    SplitRun r = fhn_split();
    const StateField init = models::fhn_initial(r.mesh);
    const auto lumped = lumped_mass(r.mesh);
    const PointIntegralFunctional j(state(0) * state(0) + state(1) * state(1), 2, lumped, {0.5, 1.0});
    const std::size_t gf = r.tape.parameters().index("g_f");
    const double g0 = r.tape.parameters().value(gf);
    auto value_at = [&](double g) {
        r.tape.parameters().set(gf, g);
        r.run(init, 10);
        return evaluate_functional(r.tape, j);
    };
    const double h = 1e-5;
    const double fd = (value_at(g0 + h) - value_at(g0 - h)) / (2.0 * h);
    value_at(g0);
    std::vector<double> dir(r.tape.parameters().size(), 0.0);
    dir[gf] = 1.0;
    const double tlm = tangent_sweep(r.tape, j, dir, nullptr);
    const Gradient g = reverse_sweep(r.tape, j);
    EXPECT_NEAR(tlm, fd, 1e-6 * std::fabs(fd));
    EXPECT_NEAR(g.params[gf], tlm, 1e-10 * std::fabs(tlm));
}

TEST(TangentSweep, DualityOnSplitTapes) {
    std::mt19937_64 rng(77);
    {
        SplitRun r = fhn_split();
        r.run(models::fhn_initial(r.mesh), 10);
        const StateField& fin = r.tape.marks().back().state;
        StateField seed(fin.points(), fin.components());
        seed.data() = testutil::uniform(rng, seed.data().size(), -1.0, 1.0);
        StateField dir = seed;
        dir.data() = testutil::uniform(rng, dir.data().size(), -1.0, 1.0);
        const auto pdot = testutil::uniform(rng, r.tape.parameters().size(), -1.0, 1.0);
        const LinearFunctional j(seed, fin.time);
        const double tlm = tangent_sweep(r.tape, j, pdot, &dir);
        const Gradient g = reverse_sweep(r.tape, j);
        const double adj = field_dot(g.initial, dir) + testutil::dot(g.params, pdot);
        EXPECT_NEAR(tlm, adj, 1e-10 * std::fabs(tlm));
    }
    {
        StructuredTriMesh mesh = StructuredTriMesh::unit_square(4);
        auto op = std::make_shared<MitoDiffusionOperator>(mesh, 2e-6, 3.0, tight_linear(), 1e-12);
        SplitRun r(models::mito_system(), "esdirk4", op, mesh, 0.5);
        r.run(models::mito_initial(mesh), 6);
        const StateField& fin = r.tape.marks().back().state;
        StateField seed(fin.points(), fin.components());
        seed.data() = testutil::uniform(rng, seed.data().size(), -1.0, 1.0);
        StateField dir = seed;
        dir.data() = testutil::uniform(rng, dir.data().size(), -1.0, 1.0);
        const auto pdot = testutil::uniform(rng, r.tape.parameters().size(), -1.0, 1.0);
        const LinearFunctional j(seed, fin.time);
        const double tlm = tangent_sweep(r.tape, j, pdot, &dir);
        const Gradient g = reverse_sweep(r.tape, j);
        const double adj = field_dot(g.initial, dir) + testutil::dot(g.params, pdot);
        EXPECT_NEAR(tlm, adj, 1e-10 * std::fabs(tlm));
    }
}

TEST(Taylor, QuadraticHasExactSecondOrderRemainder) {
    const double m = 1.5, delta = 0.7;
    const std::vector<double> steps = {0.1, 0.05, 0.025, 0.0125};
    const auto res =
        taylor_test([&](double h) { return (m + h * delta) * (m + h * delta); }, m * m, 2.0 * m * delta, steps);
    ASSERT_EQ(res.rows.size(), 4u);
    EXPECT_TRUE(std::isnan(res.rows[0].r0_order));
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(res.rows[i].r1, steps[i] * steps[i] * delta * delta, 1e-15);
    }
    for (std::size_t i = 1; i < 4; ++i) {
        EXPECT_NEAR(res.rows[i].r1_order, 2.0, 1e-9);
        EXPECT_NEAR(res.rows[i].r0_order, 1.0, 0.05);
    }
    EXPECT_FALSE(res.saturated);
}

TEST(Taylor, LinearFunctionalIsSaturated) {
    const std::vector<double> steps = {0.5, 0.25, 0.125};
    const auto res = taylor_test([](double h) { return 3.0 * (2.0 + h); }, 6.0, 3.0, steps);
    EXPECT_TRUE(res.saturated);
    for (const auto& row : res.rows) {
        EXPECT_LE(row.r1, 1e-14);
    }
}

TEST(Taylor, LadderValidation) {
    const auto f = [](double h) { return h; };
    EXPECT_THROW(taylor_test(f, 0.0, 1.0, std::vector<double>{0.1, 0.05}), InvalidArgument);
    EXPECT_THROW(taylor_test(f, 0.0, 1.0, std::vector<double>{0.1, 0.2, 0.4}), InvalidArgument);
}
