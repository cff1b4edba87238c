#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <random>

#include "splitadj/error.hpp"
#include "splitadj/models.hpp"
#include "splitadj/pointcloud.hpp"
#include "test_util.hpp"

using namespace splitadj;

namespace {

StateField random_fhn_field(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    StateField f(n, 2);
    auto v = f.component(0);
    auto s = f.component(1);
    const auto a = testutil::uniform(rng, n, 0.0, 100.0);
    const auto b = testutil::uniform(rng, n, 0.0, 5.0);
    std::copy(a.begin(), a.end(), v.begin());
    std::copy(b.begin(), b.end(), s.begin());
    return f;
}

std::shared_ptr<PointIntegralSolver> solver(const RhsSystem& sys, const std::string& scheme) {
    return std::make_shared<PointIntegralSolver>(testutil::stepper(sys, scheme));
}

} // namespace

TEST(StateField, LayoutIsComponentMajor) {
    StateField f(3, 2, 1.5);
    f.at(1, 1) = 7.0;
    EXPECT_EQ(f.data()[1 * 3 + 1], 7.0);
    EXPECT_EQ(f.component(1).size(), 3u);
    EXPECT_EQ(f.time, 1.5);
    std::vector<double> y(2);
    f.gather(1, y);
    EXPECT_EQ(y, (std::vector<double>{0.0, 7.0}));
    f.scatter(2, std::vector<double>{4.0, 5.0});
    EXPECT_EQ(f.at(2, 0), 4.0);
    EXPECT_EQ(f.at(2, 1), 5.0);
}

TEST(PointSet, ChunksCoverPointsIndependentOfThreads) {
    PointSet ps;
    ps.coords.resize(1000);
    EXPECT_EQ(ps.num_chunks(), 4u);
    ps.chunk_size = 1000;
    EXPECT_EQ(ps.num_chunks(), 1u);
    ps.coords.clear();
    EXPECT_EQ(ps.num_chunks(), 0u);
}

TEST(StepAll, IndependentPoints) {
    const RhsSystem sys("decay", {"y"}, {1.0}, {}, {-state(0)});
    auto s = solver(sys, "explicit-euler");
    StateField f(2, 1);
    f.at(0, 0) = 1.0;
    f.at(1, 0) = 2.0;
    s->step(f, 0.0, 0.1, {});
    EXPECT_DOUBLE_EQ(f.at(0, 0), 0.9);
    EXPECT_DOUBLE_EQ(f.at(1, 0), 1.8);
    EXPECT_DOUBLE_EQ(f.time, 0.1);
}

TEST(StepAll, EmptyFieldIsNoOp) {
    auto s = solver(models::fhn_system(), "grl1");
    StateField f(0, 2);
    const auto stats = s->step(f, 0.0, 0.1, models::fhn_system().param_values());
    EXPECT_EQ(f.points(), 0u);
    EXPECT_EQ(stats.steps, 0u);
}

TEST(StepAll, ThreadCountInvariance) {
    const auto sys = models::fhn_system();
    const auto p = sys.param_values();
    const StateField init = random_fhn_field(10000, 5);
    std::vector<std::uint64_t> hashes;
    for (int threads : {1, 2, 4, 8}) {
        auto s = solver(sys, "grl1");
        s->set_threads(threads);
        StateField f = init;
        for (int n = 0; n < 5; ++n) {
            s->step(f, 0.1 * n, 0.1, p);
        }
        StateField bar = f;
        std::vector<double> pbar(p.size(), 0.0);
        s->adjoint(init, bar, 0.0, 0.1, p, pbar);
        hashes.push_back(field_hash(f) ^ (field_hash(bar) * 1099511628211ull));
    }
    for (auto h : hashes) {
        EXPECT_EQ(h, hashes.front());
    }
}

TEST(StepAll, PermutationInvariance) {
    const auto sys = models::mito_system();
    const auto p = sys.param_values();
    std::mt19937_64 rng(8);
    const std::size_t n = 700;
    StateField f(n, 4);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = testutil::uniform(rng, 4, 0.0, 1.0);
        f.scatter(i, std::vector<double>{300.0 * r[0], r[1], r[2], r[3]});
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    StateField g(n, 4);
    std::vector<double> y(4);
    for (std::size_t i = 0; i < n; ++i) {
        f.gather(perm[i], y);
        g.scatter(i, y);
    }
    auto s = solver(sys, "esdirk3");
    s->step(f, 0.0, 0.5, p);
    s->step(g, 0.0, 0.5, p);
    std::vector<double> a(4), b(4);
    for (std::size_t i = 0; i < n; ++i) {
        f.gather(perm[i], a);
        g.gather(i, b);
        EXPECT_EQ(a, b);
    }
}

TEST(StepAll, FailureReportsPointIndex) {
    // Points at rest converge at once; the one far out needs more Newton steps than allowed.
    const RhsSystem sys("cubic", {"y"}, {0.0}, {}, {-(state(0) * state(0) * state(0))});
    NewtonParams np;
    np.max_iterations = 3;
    auto s = std::make_shared<PointIntegralSolver>(testutil::stepper(sys, "implicit-euler", np));
    StateField f(600, 1);
    f.at(517, 0) = 1000.0;
    try {
        s->step(f, 0.0, 1.0, {});
        FAIL() << "expected a point failure";
    } catch (const PointFailure& e) {
        EXPECT_EQ(e.point(), 517u);
    }
}

TEST(Assemble, ConstantIntegrandCountsPoints) {
    StateField f(7, 1);
    EXPECT_EQ(assemble_point_functional(f, constant(1.0)), 7.0);
    f.fill(2.5);
    EXPECT_EQ(assemble_point_functional(f, state(0)), 2.5 * 7);
}

TEST(Assemble, WeightsAndParameters) {
    StateField f(3, 2);
    f.at(0, 1) = 1.0;
    f.at(1, 1) = 2.0;
    f.at(2, 1) = 3.0;
    const std::vector<double> w = {1.0, 0.5, 0.25};
    EXPECT_DOUBLE_EQ(assemble_point_functional(f, state(1), w), 1.0 + 1.0 + 0.75);
    const std::vector<double> p = {2.0};
    EXPECT_DOUBLE_EQ(assemble_point_functional(f, param(0) * state(1), {}, p), 12.0);
}

TEST(Assemble, ThreadCountInvariance) {
    const StateField f = random_fhn_field(10000, 9);
    const Expr g = state(0) * state(0) + sin(state(1));
    std::vector<double> w(10000);
    std::mt19937_64 rng(2);
    w = testutil::uniform(rng, 10000, 0.0, 1.0);
    const double serial = assemble_point_functional(f, g, w, {}, 1);
    for (int threads : {2, 4, 8}) {
        EXPECT_EQ(testutil::bits(assemble_point_functional(f, g, w, {}, threads)), testutil::bits(serial));
    }
}

TEST(ScalarMap, IdentityAndAffine) {
    StateField f = random_fhn_field(1000, 3);
    const StateField orig = f;
    apply_scalar_map(f, [](std::span<double>) {});
    EXPECT_EQ(f.data(), orig.data());
    apply_scalar_map(
        f,
        [](std::span<double> y) {
            for (double& v : y) {
                v = 2.0 * v + 1.0;
            }
        },
        4);
    for (std::size_t i = 0; i < f.data().size(); ++i) {
        EXPECT_EQ(f.data()[i], 2.0 * orig.data()[i] + 1.0);
    }
}

TEST(ScalarMap, ComponentCopies) {
    StateField f(4, 2);
    const std::vector<double> src = {1, 2, 3, 4};
    copy_into_component(f, 0, src);
    EXPECT_EQ(std::vector<double>(f.component(0).begin(), f.component(0).end()), src);
    std::vector<double> out(4);
    copy_from_component(f, 0, out);
    EXPECT_EQ(out, src);
    EXPECT_THROW(copy_into_component(f, 0, std::vector<double>{1.0}), InvalidArgument);
}

TEST(Snapshot, BinaryRoundTrip) {
    StateField f = random_fhn_field(50, 4);
    f.time = 3.25;
    const auto path = (std::filesystem::temp_directory_path() / "splitadj_snapshot_test.bin").string();
    write_snapshot(f, path);
    const StateField g = read_snapshot(path);
    EXPECT_EQ(g.points(), 50u);
    EXPECT_EQ(g.components(), 2u);
    EXPECT_EQ(g.time, 3.25);
    EXPECT_EQ(g.data(), f.data());
    std::filesystem::remove(path);
    EXPECT_THROW(read_snapshot(path), Error);
}

TEST(Snapshot, CsvHasHeaderAndRows) {
    StateField f(2, 2);
    const auto path = (std::filesystem::temp_directory_path() / "splitadj_snapshot_test.csv").string();
    write_csv(f, path, {"v", "s"});
    std::FILE* fp = std::fopen(path.c_str(), "r");
    ASSERT_NE(fp, nullptr);
    char line[256];
    ASSERT_NE(std::fgets(line, sizeof line, fp), nullptr);
    EXPECT_EQ(std::string(line), "point,v,s\n");
    int rows = 0;
    while (std::fgets(line, sizeof line, fp)) {
        ++rows;
    }
    std::fclose(fp);
    EXPECT_EQ(rows, 2);
    std::filesystem::remove(path);
}
