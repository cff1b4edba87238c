#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "splitadj/expr.hpp"

namespace splitadj {

struct Parameter {
    std::string name;
    double value = 0.0;
};

/// Right-hand side f(y, t, m) of a pointwise ODE system.
class RhsSystem {
public:
    RhsSystem() = default;
    RhsSystem(std::string name, std::vector<std::string> state_names, std::vector<double> initial,
              std::vector<Parameter> parameters, std::vector<Expr> rhs);

    const std::string& name() const { return name_; }
    std::size_t dimension() const { return state_names_.size(); }
    std::size_t num_params() const { return parameters_.size(); }

    const std::vector<std::string>& state_names() const { return state_names_; }
    const std::vector<double>& initial_values() const { return initial_; }
    const std::vector<Parameter>& parameters() const { return parameters_; }
    const std::vector<Expr>& rhs() const { return rhs_; }
    const Expr& rhs(std::size_t i) const { return rhs_.at(i); }

    std::vector<std::string> param_names() const;
    std::vector<double> param_values() const;

    std::optional<std::size_t> state_index(std::string_view name) const;
    std::optional<std::size_t> param_index(std::string_view name) const;

    /// Throws InvalidArgument when an expression references an undeclared
    /// state or parameter, or when names collide.
    void validate() const;

private:
    std::string name_;
    std::vector<std::string> state_names_;
    std::vector<double> initial_;
    std::vector<Parameter> parameters_;
    std::vector<Expr> rhs_;
};

/// Parse an infix expression over the given state and parameter names.
/// Recognizes t, pi, exp, log, sin, cos, abs, piecewise(cond, a, [cond, b, ...] default)
/// and ^ with a constant exponent.
Expr parse_expression(std::string_view text, const std::vector<std::string>& state_names,
                      const std::vector<std::string>& param_names);

/// Line-oriented model text:
///
///     name fhn
///     state v = 0
///     param a = 0.13
///     dv/dt = v*(v - a)
///
/// '#' starts a comment. Every state needs exactly one equation.
RhsSystem parse_system(std::string_view text);

RhsSystem load_system(const std::string& path);

std::string format_system(const RhsSystem& sys);

} // namespace splitadj
