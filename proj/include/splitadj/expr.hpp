#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace splitadj {

enum class NodeKind : std::uint8_t {
    Constant,
    Time,
    State,
    Param,
    Neg,
    Add,
    Mul,
    Div,
    Pow,
    Exp,
    Log,
    Sin,
    Cos,
    Abs,
    Piecewise,
};

enum class Compare : std::uint8_t { Less, LessEqual, Greater, GreaterEqual };

class Node;

/// Immutable handle to a node in a pointwise expression DAG.
///
/// Expressions only see the local state y, the time t and the scalar
/// parameters m; there are no spatial-derivative nodes. Handles are cheap to
/// copy and safe to share across threads.
class Expr {
public:
    Expr();
    Expr(double value); // NOLINT(google-explicit-constructor)
    explicit Expr(std::shared_ptr<const Node> node);

    const Node& node() const { return *node_; }
    const Node* get() const { return node_.get(); }
    NodeKind kind() const;

    bool is_constant() const;
    bool is_constant(double value) const;
    double constant_value() const;

private:
    std::shared_ptr<const Node> node_;
};

class Node {
public:
    NodeKind kind = NodeKind::Constant;
    double value = 0.0;           // constant value, or the exponent of Pow
    std::uint32_t index = 0;      // state or parameter index
    std::vector<Expr> args;       // Piecewise: lhs0, rhs0, value0, ..., default
    std::vector<Compare> compares; // one per piecewise case
    std::size_t hash = 0;

    std::size_t num_cases() const { return compares.size(); }
};

struct Condition {
    Compare op;
    Expr lhs;
    Expr rhs;
};

struct Case {
    Condition when;
    Expr value;
};

Expr constant(double value);
Expr time_symbol();
Expr state(std::uint32_t index);
Expr param(std::uint32_t index);

Expr operator-(const Expr& a);
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr pow(const Expr& base, double exponent);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr abs(const Expr& a);
Expr piecewise(std::vector<Case> cases, Expr otherwise);

Condition operator<(const Expr& a, const Expr& b);
Condition operator<=(const Expr& a, const Expr& b);
Condition operator>(const Expr& a, const Expr& b);
Condition operator>=(const Expr& a, const Expr& b);

/// A differentiation variable: a state component or a parameter.
struct Symbol {
    enum class Kind : std::uint8_t { State, Param };
    Kind kind;
    std::uint32_t index;

    static Symbol state(std::uint32_t i) { return {Kind::State, i}; }
    static Symbol param(std::uint32_t i) { return {Kind::Param, i}; }
};

/// Integer-aware power shared by the interpreter and the compiled kernels so
/// both produce bitwise identical results.
inline double power(double base, double exponent) {
    if (exponent == 2.0) {
        return base * base;
    }
    if (exponent == 3.0) {
        return base * base * base;
    }
    if (exponent == -1.0) {
        return 1.0 / base;
    }
    return std::pow(base, exponent);
}

inline bool compare(Compare op, double lhs, double rhs) {
    switch (op) {
    case Compare::Less: return lhs < rhs;
    case Compare::LessEqual: return lhs <= rhs;
    case Compare::Greater: return lhs > rhs;
    case Compare::GreaterEqual: return lhs >= rhs;
    }
    return false;
}

/// Structural equality. Shared subtrees compare equal in O(1).
bool equal(const Expr& a, const Expr& b);

/// True if the expression references the given symbol anywhere, predicates included.
bool depends_on(const Expr& e, Symbol s);

/// Largest state and parameter index referenced, or -1 when absent.
struct IndexBounds {
    long max_state = -1;
    long max_param = -1;
};
IndexBounds index_bounds(const Expr& e);

/// Value-preserving rewrite: constant folding, neutral and absorbing
/// elements, double negation, x + x -> 2*x, decided piecewise predicates.
Expr simplify(const Expr& e);

/// Exact symbolic partial derivative, simplified.
///
/// Piecewise nodes differentiate branchwise with predicates untouched; at a
/// breakpoint the derivative is that of the branch the predicate selects.
/// d|a| uses sign(a) with sign(0) = 0.
Expr differentiate(const Expr& e, Symbol wrt);

/// Conservative linearity test: true iff d e / d y_i has no occurrence of y_i
/// after simplification.
bool is_linear_in(const Expr& e, std::uint32_t state_index);

/// Direct tree interpretation.
double evaluate(const Expr& e, std::span<const double> y, double t, std::span<const double> params);

/// Number of distinct nodes reachable from the roots.
std::size_t node_count(std::span<const Expr> roots);

/// Infix rendering that parse_expression() reads back. Symbols without a name
/// are printed as y<i> / p<k>.
std::string to_string(const Expr& e,
                      std::span<const std::string> state_names = {},
                      std::span<const std::string> param_names = {});

} // namespace splitadj
