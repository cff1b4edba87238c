#include "splitadj/kernel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <tuple>
#include <unordered_map>

#include "splitadj/error.hpp"

namespace splitadj {

namespace {

using Key = std::tuple<int, int, std::uint64_t, std::uint32_t, std::uint32_t, std::uint32_t, std::uint32_t>;

} // namespace

namespace detail {

struct ProgramBuilder {
    std::vector<double> constants;
    std::map<std::uint64_t, std::uint32_t> constant_reg;
    std::vector<Instruction> code;
    std::unordered_map<const Node*, std::uint32_t> node_reg;
    std::map<Key, std::uint32_t> value_numbers;
    std::uint32_t next_temp = 0;

    // Constants get registers first; temporaries are renumbered after the pool is known.
    void collect_constants(const Expr& e, std::unordered_map<const Node*, bool>& seen) {
        if (!seen.emplace(e.get(), true).second) {
            return;
        }
        const Node& n = e.node();
        if (n.kind == NodeKind::Constant) {
            const auto bits = std::bit_cast<std::uint64_t>(n.value);
            if (constant_reg.emplace(bits, static_cast<std::uint32_t>(constants.size())).second) {
                constants.push_back(n.value);
            }
            return;
        }
        for (const Expr& a : n.args) {
            collect_constants(a, seen);
        }
    }

    std::uint32_t emit(Instruction ins) {
        const Key key{static_cast<int>(ins.op), static_cast<int>(ins.cmp), std::bit_cast<std::uint64_t>(ins.value),
                      ins.a, ins.b, ins.c, ins.d};
        if (auto it = value_numbers.find(key); it != value_numbers.end()) {
            return it->second;
        }
        ins.dst = next_temp++;
        code.push_back(ins);
        value_numbers.emplace(key, ins.dst);
        return ins.dst;
    }

    std::uint32_t visit(const Expr& e) {
        if (auto it = node_reg.find(e.get()); it != node_reg.end()) {
            return it->second;
        }
        const Node& n = e.node();
        std::uint32_t r = 0;
        switch (n.kind) {
        case NodeKind::Constant:
            r = constant_reg.at(std::bit_cast<std::uint64_t>(n.value));
            break;
        case NodeKind::Time:
            r = emit({OpCode::Time});
            break;
        case NodeKind::State:
            r = emit({OpCode::State, Compare::Less, 0, n.index});
            break;
        case NodeKind::Param:
            r = emit({OpCode::Param, Compare::Less, 0, n.index});
            break;
        case NodeKind::Add:
        case NodeKind::Mul:
        case NodeKind::Div: {
            const std::uint32_t a = visit(n.args[0]);
            const std::uint32_t b = visit(n.args[1]);
            const OpCode op = n.kind == NodeKind::Add ? OpCode::Add
                              : n.kind == NodeKind::Mul ? OpCode::Mul
                                                        : OpCode::Div;
            r = emit({op, Compare::Less, 0, a, b});
            break;
        }
        case NodeKind::Piecewise: {
            const std::size_t cases = n.num_cases();
            std::vector<std::uint32_t> lhs(cases), rhs(cases), val(cases);
            for (std::size_t c = 0; c < cases; ++c) {
                lhs[c] = visit(n.args[3 * c]);
                rhs[c] = visit(n.args[3 * c + 1]);
                val[c] = visit(n.args[3 * c + 2]);
            }
            r = visit(n.args[3 * cases]);
            for (std::size_t c = cases; c-- > 0;) {
                r = emit({OpCode::Select, n.compares[c], 0, lhs[c], rhs[c], val[c], r});
            }
            break;
        }
        default: {
            const std::uint32_t a = visit(n.args[0]);
            OpCode op = OpCode::Neg;
            switch (n.kind) {
            case NodeKind::Neg: op = OpCode::Neg; break;
            case NodeKind::Pow: op = OpCode::Pow; break;
            case NodeKind::Exp: op = OpCode::Exp; break;
            case NodeKind::Log: op = OpCode::Log; break;
            case NodeKind::Sin: op = OpCode::Sin; break;
            case NodeKind::Cos: op = OpCode::Cos; break;
            case NodeKind::Abs: op = OpCode::Abs; break;
            default: throw InvalidArgument("unsupported node kind in compile");
            }
            Instruction ins{op, Compare::Less, 0, a};
            ins.value = n.kind == NodeKind::Pow ? n.value : 0.0;
            r = emit(ins);
        }
        }
        node_reg.emplace(e.get(), r);
        return r;
    }
};

} // namespace detail

Program Program::compile(std::span<const Expr> outputs) {
    detail::ProgramBuilder b;
    std::unordered_map<const Node*, bool> seen;
    for (const Expr& e : outputs) {
        b.collect_constants(e, seen);
    }
    const auto base = static_cast<std::uint32_t>(b.constants.size());
    // Temporaries are numbered from `base` so constant references stay unchanged.
    b.next_temp = base;
    Program p;
    for (const Expr& e : outputs) {
        p.outputs_.push_back(b.visit(e));
    }
    p.constants_ = std::move(b.constants);
    p.code_ = std::move(b.code);
    p.register_count_ = std::max<std::size_t>(b.next_temp, 1);
    return p;
}

void Program::run(std::span<const double> y, double t, std::span<const double> params, std::span<double> regs,
                  std::span<double> out) const {
    double* r = regs.data();
    std::copy(constants_.begin(), constants_.end(), r);
    for (const Instruction& ins : code_) {
        double v = 0.0;
        switch (ins.op) {
        case OpCode::Time: v = t; break;
        case OpCode::State: v = y[ins.a]; break;
        case OpCode::Param: v = params[ins.a]; break;
        case OpCode::Neg: v = -r[ins.a]; break;
        case OpCode::Add: v = r[ins.a] + r[ins.b]; break;
        case OpCode::Mul: v = r[ins.a] * r[ins.b]; break;
        case OpCode::Div: v = r[ins.a] / r[ins.b]; break;
        case OpCode::Pow: v = power(r[ins.a], ins.value); break;
        case OpCode::Exp: v = std::exp(r[ins.a]); break;
        case OpCode::Log: v = std::log(r[ins.a]); break;
        case OpCode::Sin: v = std::sin(r[ins.a]); break;
        case OpCode::Cos: v = std::cos(r[ins.a]); break;
        case OpCode::Abs: v = std::fabs(r[ins.a]); break;
        case OpCode::Select: v = compare(ins.cmp, r[ins.a], r[ins.b]) ? r[ins.c] : r[ins.d]; break;
        }
        r[ins.dst] = v;
    }
    for (std::size_t i = 0; i < outputs_.size(); ++i) {
        out[i] = r[outputs_[i]];
    }
}

Kernel::Kernel(RhsSystem sys) : sys_(std::move(sys)), m_(sys_.dimension()), p_(sys_.num_params()) {
    sys_.validate();
    std::vector<Expr> f;
    for (std::size_t i = 0; i < m_; ++i) {
        f.push_back(simplify(sys_.rhs(i)));
    }
    jac_.reserve(m_ * m_);
    for (std::size_t i = 0; i < m_; ++i) {
        for (std::size_t j = 0; j < m_; ++j) {
            jac_.push_back(differentiate(f[i], Symbol::state(static_cast<std::uint32_t>(j))));
        }
    }
    for (std::size_t i = 0; i < m_; ++i) {
        diag_.push_back(jac_[i * m_ + i]);
        linear_.push_back(!depends_on(diag_[i], Symbol::state(static_cast<std::uint32_t>(i))));
    }
    for (std::size_t i = 0; i < m_; ++i) {
        for (std::size_t k = 0; k < p_; ++k) {
            pjac_.push_back(differentiate(f[i], Symbol::param(static_cast<std::uint32_t>(k))));
        }
    }
    std::vector<Expr> ddiag;
    std::vector<Expr> dparam_diag;
    for (std::size_t i = 0; i < m_; ++i) {
        for (std::size_t j = 0; j < m_; ++j) {
            ddiag.push_back(differentiate(diag_[i], Symbol::state(static_cast<std::uint32_t>(j))));
        }
        for (std::size_t k = 0; k < p_; ++k) {
            dparam_diag.push_back(differentiate(diag_[i], Symbol::param(static_cast<std::uint32_t>(k))));
        }
    }

    // Entry points evaluate the source expressions as written, so the rhs
    // program matches direct interpretation of the system bitwise.
    rhs_ = Program::compile(sys_.rhs());
    diag_prog_ = Program::compile(diag_);
    std::vector<Expr> rd(sys_.rhs());
    rd.insert(rd.end(), diag_.begin(), diag_.end());
    rhs_diag_ = Program::compile(rd);
    jac_prog_ = Program::compile(jac_);
    pjac_prog_ = Program::compile(pjac_);
    std::vector<Expr> lin(rd);
    lin.insert(lin.end(), jac_.begin(), jac_.end());
    lin.insert(lin.end(), ddiag.begin(), ddiag.end());
    lin_ = Program::compile(lin);
    std::vector<Expr> plin(pjac_);
    plin.insert(plin.end(), dparam_diag.begin(), dparam_diag.end());
    plin_ = Program::compile(plin);

    for (const Program* p : {&rhs_, &diag_prog_, &rhs_diag_, &jac_prog_, &pjac_prog_, &lin_, &plin_}) {
        scratch_ = std::max(scratch_, p->register_count());
    }
}

namespace {

void check_sizes(std::span<const double> y, std::size_t m, std::span<const double> params, std::size_t p,
                 std::span<double> out, std::size_t n, std::span<double> scratch, std::size_t s) {
    if (y.size() < m || params.size() < p || out.size() < n || scratch.size() < s) {
        throw InvalidArgument("kernel buffer too small");
    }
}

} // namespace

void Kernel::rhs(std::span<const double> y, double t, std::span<const double> params, std::span<double> f,
                 std::span<double> scratch) const {
    check_sizes(y, m_, params, p_, f, m_, scratch, rhs_.register_count());
    rhs_.run(y, t, params, scratch, f);
}

void Kernel::diagonal(std::span<const double> y, double t, std::span<const double> params, std::span<double> d,
                      std::span<double> scratch) const {
    check_sizes(y, m_, params, p_, d, m_, scratch, diag_prog_.register_count());
    diag_prog_.run(y, t, params, scratch, d);
}

void Kernel::rhs_and_diagonal(std::span<const double> y, double t, std::span<const double> params,
                              std::span<double> out, std::span<double> scratch) const {
    check_sizes(y, m_, params, p_, out, 2 * m_, scratch, rhs_diag_.register_count());
    rhs_diag_.run(y, t, params, scratch, out);
}

void Kernel::jacobian(std::span<const double> y, double t, std::span<const double> params, std::span<double> jac,
                      std::span<double> scratch) const {
    check_sizes(y, m_, params, p_, jac, m_ * m_, scratch, jac_prog_.register_count());
    jac_prog_.run(y, t, params, scratch, jac);
}

void Kernel::param_jacobian(std::span<const double> y, double t, std::span<const double> params,
                            std::span<double> jac, std::span<double> scratch) const {
    check_sizes(y, m_, params, p_, jac, m_ * p_, scratch, pjac_prog_.register_count());
    pjac_prog_.run(y, t, params, scratch, jac);
}

void Kernel::linearization(std::span<const double> y, double t, std::span<const double> params,
                           std::span<double> out, std::span<double> scratch) const {
    check_sizes(y, m_, params, p_, out, 2 * m_ + 2 * m_ * m_, scratch, lin_.register_count());
    lin_.run(y, t, params, scratch, out);
}

void Kernel::param_linearization(std::span<const double> y, double t, std::span<const double> params,
                                 std::span<double> out, std::span<double> scratch) const {
    check_sizes(y, m_, params, p_, out, 2 * m_ * p_, scratch, plin_.register_count());
    plin_.run(y, t, params, scratch, out);
}

} // namespace splitadj
