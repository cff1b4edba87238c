#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "splitadj/expr.hpp"
#include "splitadj/system.hpp"

namespace splitadj {

enum class OpCode : std::uint8_t {
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
    Select, // dst = cmp(r[a], r[b]) ? r[c] : r[d]
};

struct Instruction {
    OpCode op;
    Compare cmp = Compare::Less;
    std::uint32_t dst = 0;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    std::uint32_t c = 0;
    std::uint32_t d = 0;
    double value = 0.0; // Pow exponent
};

/// Straight-line register program evaluating a list of expressions.
///
/// Registers [0, constants().size()) hold the constant pool. Structurally equal
/// subexpressions share one register (value numbering within this program only).
/// Piecewise nodes evaluate every branch and select afterwards.
class Program {
public:
    Program() = default;
    static Program compile(std::span<const Expr> outputs);

    std::size_t register_count() const { return register_count_; }
    std::size_t output_count() const { return outputs_.size(); }
    std::size_t instruction_count() const { return code_.size(); }
    const std::vector<double>& constants() const { return constants_; }
    const std::vector<Instruction>& code() const { return code_; }

    /// regs needs register_count() entries, out needs output_count().
    void run(std::span<const double> y, double t, std::span<const double> params, std::span<double> regs,
             std::span<double> out) const;

private:
    std::vector<double> constants_;
    std::vector<Instruction> code_;
    std::vector<std::uint32_t> outputs_;
    std::size_t register_count_ = 0;
};

/// Compiled entry points of an RhsSystem.
///
/// Matrices are row-major: jacobian(i, j) = df_i/dy_j at out[i*m + j],
/// param_jacobian(i, k) = df_i/dm_k at out[i*P + k].
class Kernel {
public:
    explicit Kernel(RhsSystem sys);

    const RhsSystem& system() const { return sys_; }
    std::size_t dimension() const { return m_; }
    std::size_t num_params() const { return p_; }

    /// Scratch register count large enough for every entry point.
    std::size_t scratch_size() const { return scratch_; }

    void rhs(std::span<const double> y, double t, std::span<const double> params, std::span<double> f,
             std::span<double> scratch) const;
    void diagonal(std::span<const double> y, double t, std::span<const double> params, std::span<double> d,
                  std::span<double> scratch) const;
    /// out = [f (m), diagonal (m)].
    void rhs_and_diagonal(std::span<const double> y, double t, std::span<const double> params,
                          std::span<double> out, std::span<double> scratch) const;
    void jacobian(std::span<const double> y, double t, std::span<const double> params, std::span<double> jac,
                  std::span<double> scratch) const;
    void param_jacobian(std::span<const double> y, double t, std::span<const double> params,
                        std::span<double> jac, std::span<double> scratch) const;

    /// out = [f (m), diagonal (m), jacobian (m*m), d diagonal_i / d y_j (m*m)].
    void linearization(std::span<const double> y, double t, std::span<const double> params,
                       std::span<double> out, std::span<double> scratch) const;
    /// out = [df_i/dm_k (m*P), d diagonal_i / d m_k (m*P)].
    void param_linearization(std::span<const double> y, double t, std::span<const double> params,
                             std::span<double> out, std::span<double> scratch) const;

    /// linear_in_self()[i] is is_linear_in(f_i, i).
    const std::vector<bool>& linear_in_self() const { return linear_; }

    const Expr& diagonal_expr(std::size_t i) const { return diag_.at(i); }
    const Expr& jacobian_expr(std::size_t i, std::size_t j) const { return jac_.at(i * m_ + j); }
    const Expr& param_jacobian_expr(std::size_t i, std::size_t k) const { return pjac_.at(i * p_ + k); }

    const Program& rhs_program() const { return rhs_; }
    const Program& jacobian_program() const { return jac_prog_; }

private:
    RhsSystem sys_;
    std::size_t m_;
    std::size_t p_;
    std::vector<Expr> diag_;
    std::vector<Expr> jac_;
    std::vector<Expr> pjac_;
    std::vector<bool> linear_;
    Program rhs_;
    Program diag_prog_;
    Program rhs_diag_;
    Program jac_prog_;
    Program pjac_prog_;
    Program lin_;
    Program plin_;
    std::size_t scratch_ = 0;
};

} // namespace splitadj
