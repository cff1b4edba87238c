#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace splitadj {

/// Butcher coefficients of an s-stage scheme with a_ij = 0 for j > i.
struct ButcherTableau {
    std::string name;
    std::size_t stages = 0;
    int order = 1;
    std::vector<double> a; // row-major s x s
    std::vector<double> b;
    std::vector<double> c;

    double A(std::size_t i, std::size_t j) const { return a[i * stages + j]; }
    bool is_explicit_stage(std::size_t i) const { return A(i, i) == 0.0; }
    bool is_explicit() const;
};

enum class StageClass { Explicit, DiagonallyImplicit };

std::vector<StageClass> stage_classes(const ButcherTableau& t);

struct Violation {
    std::string what;
    std::size_t row = 0; // 1-based, 0 when not tied to an entry
    std::size_t col = 0;
};

struct ValidationReport {
    std::vector<Violation> errors;
    std::vector<Violation> warnings; // row-sum mismatches

    bool ok() const { return errors.empty(); }
};

ValidationReport validate(const ButcherTableau& t);

struct OrderCheck {
    bool pass = true;
    int failed_order = 0;  // order of the first failing condition
    std::string condition; // e.g. "sum b_i c_i = 1/2"
    double value = 0.0;
    double expected = 0.0;
};

/// Rooted-tree order conditions up to order p (1..4), each within 1e-12.
OrderCheck order_conditions(const ButcherTableau& t, int p);

/// explicit-euler, implicit-euler, crank-nicolson, rk4, esdirk3, esdirk4.
ButcherTableau builtin_tableau(std::string_view name);
std::vector<std::string> builtin_tableau_names();

/// First line `s p name`, then s rows of a, one row of b, one row of c.
ButcherTableau parse_tableau(std::string_view text);
std::string format_tableau(const ButcherTableau& t);

} // namespace splitadj
