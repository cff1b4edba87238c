#include <gtest/gtest.h>

#include "splitadj/error.hpp"
#include "splitadj/tableau.hpp"

using namespace splitadj;

namespace {

ButcherTableau explicit_euler() { return {"ee", 1, 1, {0.0}, {1.0}, {0.0}}; }

} // namespace

TEST(Validate, ExplicitEulerIsValid) {
    const auto r = validate(explicit_euler());
    EXPECT_TRUE(r.ok());
    EXPECT_TRUE(r.warnings.empty());
}

TEST(Validate, ReportsUpperTriangularEntry) {
    ButcherTableau t{"bad", 2, 1, {0.0, 0.5, 0.5, 0.0}, {0.5, 0.5}, {0.5, 0.5}};
    const auto r = validate(t);
    ASSERT_FALSE(r.ok());
    ASSERT_EQ(r.errors.size(), 1u);
    EXPECT_EQ(r.errors[0].row, 1u);
    EXPECT_EQ(r.errors[0].col, 2u);
}

TEST(Validate, WeightSumAndShapeErrors) {
    ButcherTableau t{"bad", 1, 1, {0.0}, {0.9}, {0.0}};
    EXPECT_FALSE(validate(t).ok());
    ButcherTableau shape{"bad", 2, 1, {0.0}, {0.5, 0.5}, {0.0, 0.0}};
    EXPECT_FALSE(validate(shape).ok());
}

TEST(Validate, RowSumMismatchIsOnlyAWarning) {
    ButcherTableau t{"odd-c", 2, 1, {0.0, 0.0, 1.0, 0.0}, {0.5, 0.5}, {0.0, 0.7}};
    const auto r = validate(t);
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(Validate, ClassicalRk4) {
    const auto r = validate(builtin_tableau("rk4"));
    EXPECT_TRUE(r.ok());
    EXPECT_TRUE(r.warnings.empty());
}

TEST(OrderConditions, ExplicitEuler) {
    EXPECT_TRUE(order_conditions(explicit_euler(), 1).pass);
    const auto two = order_conditions(explicit_euler(), 2);
    EXPECT_FALSE(two.pass);
    EXPECT_EQ(two.failed_order, 2);
    EXPECT_EQ(two.value, 0.0);
    EXPECT_EQ(two.expected, 0.5);
    EXPECT_NE(two.condition.find("1/2"), std::string::npos) << two.condition;
}

TEST(OrderConditions, Rk4PassesAllEight) { EXPECT_TRUE(order_conditions(builtin_tableau("rk4"), 4).pass); }

TEST(OrderConditions, RejectsOutOfRangeOrder) {
    EXPECT_THROW(order_conditions(explicit_euler(), 0), InvalidArgument);
    EXPECT_THROW(order_conditions(explicit_euler(), 5), InvalidArgument);
}

TEST(Builtin, EveryTableauPassesItsDeclaredOrderOnly) {
    for (const auto& name : builtin_tableau_names()) {
        const auto t = builtin_tableau(name);
        EXPECT_TRUE(validate(t).ok()) << name;
        EXPECT_TRUE(validate(t).warnings.empty()) << name;
        const auto check = order_conditions(t, t.order);
        EXPECT_TRUE(check.pass) << name << ": " << check.condition << " = " << check.value;
        if (t.order < 4) {
            const auto above = order_conditions(t, t.order + 1);
            EXPECT_FALSE(above.pass) << name;
            EXPECT_EQ(above.failed_order, t.order + 1) << name;
        }
    }
}

TEST(Builtin, ImplicitEuler) {
    const auto t = builtin_tableau("implicit-euler");
    EXPECT_EQ(t.stages, 1u);
    EXPECT_EQ(t.a, std::vector<double>{1.0});
    EXPECT_EQ(t.b, std::vector<double>{1.0});
    EXPECT_EQ(t.c, std::vector<double>{1.0});
    EXPECT_EQ(t.order, 1);
}

TEST(Builtin, CrankNicolson) {
    const auto t = builtin_tableau("crank-nicolson");
    EXPECT_EQ(t.stages, 2u);
    EXPECT_EQ(t.a, (std::vector<double>{0.0, 0.0, 0.5, 0.5}));
    EXPECT_EQ(t.b, (std::vector<double>{0.5, 0.5}));
    EXPECT_EQ(t.c, (std::vector<double>{0.0, 1.0}));
    EXPECT_EQ(t.order, 2);
}

TEST(Builtin, EsdirkStructure) {
    for (const char* name : {"esdirk3", "esdirk4"}) {
        const auto t = builtin_tableau(name);
        ASSERT_GE(t.stages, 3u) << name;
        EXPECT_EQ(t.A(0, 0), 0.0) << name;
        const double gamma = t.A(1, 1);
        EXPECT_NE(gamma, 0.0) << name;
        for (std::size_t i = 1; i < t.stages; ++i) {
            EXPECT_EQ(t.A(i, i), gamma) << name << " stage " << i;
        }
    }
    EXPECT_EQ(builtin_tableau("esdirk3").order, 3);
    EXPECT_EQ(builtin_tableau("esdirk4").order, 4);
}

TEST(Builtin, UnknownNameThrows) { EXPECT_THROW(builtin_tableau("heun"), InvalidArgument); }

TEST(StageClass, MatchesDiagonal) {
    for (const auto& name : builtin_tableau_names()) {
        const auto t = builtin_tableau(name);
        const auto classes = stage_classes(t);
        ASSERT_EQ(classes.size(), t.stages);
        for (std::size_t i = 0; i < t.stages; ++i) {
            EXPECT_EQ(classes[i] == StageClass::Explicit, t.A(i, i) == 0.0) << name << " " << i;
        }
    }
    EXPECT_TRUE(builtin_tableau("rk4").is_explicit());
    EXPECT_FALSE(builtin_tableau("crank-nicolson").is_explicit());
}

TEST(TableauText, RoundTrip) {
    for (const auto& name : builtin_tableau_names()) {
        const auto t = builtin_tableau(name);
        const auto u = parse_tableau(format_tableau(t));
        EXPECT_EQ(u.name, t.name);
        EXPECT_EQ(u.stages, t.stages);
        EXPECT_EQ(u.order, t.order);
        EXPECT_EQ(u.a, t.a) << name;
        EXPECT_EQ(u.b, t.b) << name;
        EXPECT_EQ(u.c, t.c) << name;
    }
}

TEST(TableauText, ParsesFileLayout) {
    const auto t = parse_tableau("2 2 midpoint\n0 0\n0.5 0\n0 1\n0 0.5\n");
    EXPECT_EQ(t.name, "midpoint");
    EXPECT_TRUE(order_conditions(t, 2).pass);
    EXPECT_THROW(parse_tableau("2 2 short\n0 0\n0.5 0\n0 1\n"), ParseError);
}
