#include "splitadj/expr.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <functional>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "splitadj/error.hpp"

namespace splitadj {

namespace {

std::size_t hash_combine(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

Expr make(NodeKind kind, std::vector<Expr> args, double value = 0.0, std::uint32_t index = 0,
          std::vector<Compare> compares = {}) {
    auto node = std::make_shared<Node>();
    node->kind = kind;
    node->value = value;
    node->index = index;
    node->args = std::move(args);
    node->compares = std::move(compares);
    std::size_t h = std::hash<int>{}(static_cast<int>(kind));
    h = hash_combine(h, std::hash<std::uint64_t>{}(std::bit_cast<std::uint64_t>(value)));
    h = hash_combine(h, index);
    for (Compare c : node->compares) {
        h = hash_combine(h, static_cast<std::size_t>(c));
    }
    for (const Expr& a : node->args) {
        h = hash_combine(h, a.node().hash);
    }
    node->hash = h;
    return Expr(std::shared_ptr<const Node>(std::move(node)));
}

bool is_unary(NodeKind k) {
    switch (k) {
    case NodeKind::Neg:
    case NodeKind::Pow:
    case NodeKind::Exp:
    case NodeKind::Log:
    case NodeKind::Sin:
    case NodeKind::Cos:
    case NodeKind::Abs:
        return true;
    default:
        return false;
    }
}

double apply_unary(NodeKind k, double a, double exponent) {
    switch (k) {
    case NodeKind::Neg: return -a;
    case NodeKind::Pow: return power(a, exponent);
    case NodeKind::Exp: return std::exp(a);
    case NodeKind::Log: return std::log(a);
    case NodeKind::Sin: return std::sin(a);
    case NodeKind::Cos: return std::cos(a);
    case NodeKind::Abs: return std::fabs(a);
    default: break;
    }
    throw InvalidArgument("not a unary node kind");
}

double apply_binary(NodeKind k, double a, double b) {
    switch (k) {
    case NodeKind::Add: return a + b;
    case NodeKind::Mul: return a * b;
    case NodeKind::Div: return a / b;
    default: break;
    }
    throw InvalidArgument("not a binary node kind");
}

// Local rewrite rules. Arguments are assumed already simplified.
Expr rewrite(NodeKind kind, std::vector<Expr> args, double value, std::vector<Compare> compares) {
    if (is_unary(kind)) {
        const Expr& a = args[0];
        if (a.is_constant()) {
            return constant(apply_unary(kind, a.constant_value(), value));
        }
        if (kind == NodeKind::Neg && a.kind() == NodeKind::Neg) {
            return a.node().args[0];
        }
        if (kind == NodeKind::Pow) {
            if (value == 1.0) {
                return a;
            }
            if (value == 0.0) {
                return constant(1.0);
            }
        }
        return make(kind, std::move(args), value);
    }

    if (kind == NodeKind::Add || kind == NodeKind::Mul || kind == NodeKind::Div) {
        const Expr& a = args[0];
        const Expr& b = args[1];
        if (a.is_constant() && b.is_constant()) {
            return constant(apply_binary(kind, a.constant_value(), b.constant_value()));
        }
        switch (kind) {
        case NodeKind::Add:
            if (a.is_constant(0.0)) {
                return b;
            }
            if (b.is_constant(0.0)) {
                return a;
            }
            if (equal(a, b)) {
                return make(NodeKind::Mul, {constant(2.0), a});
            }
            break;
        case NodeKind::Mul:
            if (a.is_constant(0.0) || b.is_constant(0.0)) {
                return constant(0.0);
            }
            if (a.is_constant(1.0)) {
                return b;
            }
            if (b.is_constant(1.0)) {
                return a;
            }
            if (a.is_constant(-1.0)) {
                return rewrite(NodeKind::Neg, {b}, 0.0, {});
            }
            if (b.is_constant(-1.0)) {
                return rewrite(NodeKind::Neg, {a}, 0.0, {});
            }
            if (b.is_constant()) {
                return make(NodeKind::Mul, {b, a});
            }
            break;
        case NodeKind::Div:
            if (a.is_constant(0.0)) {
                return constant(0.0);
            }
            if (b.is_constant(1.0)) {
                return a;
            }
            break;
        default:
            break;
        }
        return make(kind, std::move(args));
    }

    if (kind == NodeKind::Piecewise) {
        const std::size_t n = compares.size();
        Expr otherwise = args[3 * n];
        std::vector<Expr> kept_args;
        std::vector<Compare> kept_cmp;
        for (std::size_t c = 0; c < n; ++c) {
            const Expr& lhs = args[3 * c];
            const Expr& rhs = args[3 * c + 1];
            if (lhs.is_constant() && rhs.is_constant()) {
                if (compare(compares[c], lhs.constant_value(), rhs.constant_value())) {
                    otherwise = args[3 * c + 2];
                    break;
                }
                continue;
            }
            kept_args.push_back(lhs);
            kept_args.push_back(rhs);
            kept_args.push_back(args[3 * c + 2]);
            kept_cmp.push_back(compares[c]);
        }
        if (kept_cmp.empty()) {
            return otherwise;
        }
        bool all_same = true;
        for (std::size_t c = 0; c < kept_cmp.size() && all_same; ++c) {
            all_same = equal(kept_args[3 * c + 2], otherwise);
        }
        if (all_same) {
            return otherwise;
        }
        kept_args.push_back(otherwise);
        return make(NodeKind::Piecewise, std::move(kept_args), 0.0, 0, std::move(kept_cmp));
    }

    return make(kind, std::move(args), value, 0, std::move(compares));
}

Expr s_add(const Expr& a, const Expr& b) { return rewrite(NodeKind::Add, {a, b}, 0.0, {}); }
Expr s_mul(const Expr& a, const Expr& b) { return rewrite(NodeKind::Mul, {a, b}, 0.0, {}); }
Expr s_div(const Expr& a, const Expr& b) { return rewrite(NodeKind::Div, {a, b}, 0.0, {}); }
Expr s_neg(const Expr& a) { return rewrite(NodeKind::Neg, {a}, 0.0, {}); }
Expr s_sub(const Expr& a, const Expr& b) { return s_add(a, s_neg(b)); }
Expr s_unary(NodeKind k, const Expr& a, double value = 0.0) { return rewrite(k, {a}, value, {}); }

class Simplifier {
public:
    Expr run(const Expr& e) {
        if (auto it = memo_.find(e.get()); it != memo_.end()) {
            return it->second;
        }
        const Node& n = e.node();
        Expr out = e;
        switch (n.kind) {
        case NodeKind::Constant:
        case NodeKind::Time:
        case NodeKind::State:
        case NodeKind::Param:
            break;
        default: {
            std::vector<Expr> args;
            args.reserve(n.args.size());
            for (const Expr& a : n.args) {
                args.push_back(run(a));
            }
            out = rewrite(n.kind, std::move(args), n.value, n.compares);
        }
        }
        memo_.emplace(e.get(), out);
        return out;
    }

private:
    std::unordered_map<const Node*, Expr> memo_;
};

class Differentiator {
public:
    explicit Differentiator(Symbol wrt) : wrt_(wrt) {}

    Expr run(const Expr& e) {
        if (auto it = memo_.find(e.get()); it != memo_.end()) {
            return it->second;
        }
        Expr d = derive(e);
        memo_.emplace(e.get(), d);
        return d;
    }

private:
    Expr derive(const Expr& e) {
        const Node& n = e.node();
        switch (n.kind) {
        case NodeKind::Constant:
        case NodeKind::Time:
            return constant(0.0);
        case NodeKind::State:
            return constant(wrt_.kind == Symbol::Kind::State && wrt_.index == n.index ? 1.0 : 0.0);
        case NodeKind::Param:
            return constant(wrt_.kind == Symbol::Kind::Param && wrt_.index == n.index ? 1.0 : 0.0);
        case NodeKind::Neg:
            return s_neg(run(n.args[0]));
        case NodeKind::Add:
            return s_add(run(n.args[0]), run(n.args[1]));
        case NodeKind::Mul: {
            const Expr& a = n.args[0];
            const Expr& b = n.args[1];
            return s_add(s_mul(run(a), b), s_mul(a, run(b)));
        }
        case NodeKind::Div: {
            const Expr& a = n.args[0];
            const Expr& b = n.args[1];
            Expr da = run(a);
            Expr db = run(b);
            if (db.is_constant(0.0)) {
                return s_div(da, b);
            }
            return s_div(s_sub(s_mul(da, b), s_mul(a, db)), s_mul(b, b));
        }
        case NodeKind::Pow: {
            const Expr& a = n.args[0];
            Expr da = run(a);
            if (da.is_constant(0.0)) {
                return constant(0.0);
            }
            const double p = n.value;
            return s_mul(s_mul(constant(p), s_unary(NodeKind::Pow, a, p - 1.0)), da);
        }
        case NodeKind::Exp:
            return s_mul(e, run(n.args[0]));
        case NodeKind::Log:
            return s_div(run(n.args[0]), n.args[0]);
        case NodeKind::Sin:
            return s_mul(s_unary(NodeKind::Cos, n.args[0]), run(n.args[0]));
        case NodeKind::Cos:
            return s_neg(s_mul(s_unary(NodeKind::Sin, n.args[0]), run(n.args[0])));
        case NodeKind::Abs: {
            const Expr& a = n.args[0];
            Expr da = run(a);
            if (da.is_constant(0.0)) {
                return constant(0.0);
            }
            Expr sign = rewrite(NodeKind::Piecewise,
                                {a, constant(0.0), constant(1.0), a, constant(0.0), constant(-1.0),
                                 constant(0.0)},
                                0.0, {Compare::Greater, Compare::Less});
            return s_mul(sign, da);
        }
        case NodeKind::Piecewise: {
            const std::size_t cases = n.num_cases();
            std::vector<Expr> args;
            args.reserve(n.args.size());
            for (std::size_t c = 0; c < cases; ++c) {
                args.push_back(n.args[3 * c]);
                args.push_back(n.args[3 * c + 1]);
                args.push_back(run(n.args[3 * c + 2]));
            }
            args.push_back(run(n.args[3 * cases]));
            return rewrite(NodeKind::Piecewise, std::move(args), 0.0, n.compares);
        }
        }
        throw InvalidArgument("unsupported node kind in differentiate");
    }

    Symbol wrt_;
    std::unordered_map<const Node*, Expr> memo_;
};

class Interpreter {
public:
    Interpreter(std::span<const double> y, double t, std::span<const double> params)
        : y_(y), t_(t), params_(params) {}

    double run(const Expr& e) {
        const Node* key = e.get();
        if (auto it = memo_.find(key); it != memo_.end()) {
            return it->second;
        }
        const double v = eval(e.node());
        memo_.emplace(key, v);
        return v;
    }

private:
    double eval(const Node& n) {
        switch (n.kind) {
        case NodeKind::Constant: return n.value;
        case NodeKind::Time: return t_;
        case NodeKind::State: return y_[n.index];
        case NodeKind::Param: return params_[n.index];
        case NodeKind::Add: return run(n.args[0]) + run(n.args[1]);
        case NodeKind::Mul: return run(n.args[0]) * run(n.args[1]);
        case NodeKind::Div: return run(n.args[0]) / run(n.args[1]);
        case NodeKind::Piecewise: {
            const std::size_t cases = n.num_cases();
            for (std::size_t c = 0; c < cases; ++c) {
                if (compare(n.compares[c], run(n.args[3 * c]), run(n.args[3 * c + 1]))) {
                    return run(n.args[3 * c + 2]);
                }
            }
            return run(n.args[3 * cases]);
        }
        default:
            return apply_unary(n.kind, run(n.args[0]), n.value);
        }
    }

    std::span<const double> y_;
    double t_;
    std::span<const double> params_;
    std::unordered_map<const Node*, double> memo_;
};

std::string format_number(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    std::string s(buf, end);
    if (ec != std::errc()) {
        s = std::to_string(v);
    }
    return s;
}

class Printer {
public:
    Printer(std::span<const std::string> states, std::span<const std::string> params)
        : states_(states), params_(params) {}

    std::string run(const Expr& e) {
        const Node& n = e.node();
        switch (n.kind) {
        case NodeKind::Constant:
            return n.value < 0.0 || std::signbit(n.value) ? "(" + format_number(n.value) + ")"
                                                          : format_number(n.value);
        case NodeKind::Time:
            return "t";
        case NodeKind::State:
            return n.index < states_.size() ? states_[n.index] : "y" + std::to_string(n.index);
        case NodeKind::Param:
            return n.index < params_.size() ? params_[n.index] : "p" + std::to_string(n.index);
        case NodeKind::Neg:
            return "(-" + run(n.args[0]) + ")";
        case NodeKind::Add:
            if (n.args[1].kind() == NodeKind::Neg) {
                return "(" + run(n.args[0]) + " - " + run(n.args[1].node().args[0]) + ")";
            }
            return "(" + run(n.args[0]) + " + " + run(n.args[1]) + ")";
        case NodeKind::Mul:
            return "(" + run(n.args[0]) + " * " + run(n.args[1]) + ")";
        case NodeKind::Div:
            return "(" + run(n.args[0]) + " / " + run(n.args[1]) + ")";
        case NodeKind::Pow:
            return "(" + run(n.args[0]) + "^" + run(constant(n.value)) + ")";
        case NodeKind::Exp: return "exp(" + run(n.args[0]) + ")";
        case NodeKind::Log: return "log(" + run(n.args[0]) + ")";
        case NodeKind::Sin: return "sin(" + run(n.args[0]) + ")";
        case NodeKind::Cos: return "cos(" + run(n.args[0]) + ")";
        case NodeKind::Abs: return "abs(" + run(n.args[0]) + ")";
        case NodeKind::Piecewise: {
            std::string s = "piecewise(";
            const std::size_t cases = n.num_cases();
            for (std::size_t c = 0; c < cases; ++c) {
                s += run(n.args[3 * c]) + " " + op_text(n.compares[c]) + " " + run(n.args[3 * c + 1]);
                s += ", " + run(n.args[3 * c + 2]) + ", ";
            }
            s += run(n.args[3 * cases]) + ")";
            return s;
        }
        }
        return "?";
    }

private:
    static const char* op_text(Compare c) {
        switch (c) {
        case Compare::Less: return "<";
        case Compare::LessEqual: return "<=";
        case Compare::Greater: return ">";
        case Compare::GreaterEqual: return ">=";
        }
        return "?";
    }

    std::span<const std::string> states_;
    std::span<const std::string> params_;
};

} // namespace

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double value) : node_(constant(value).node_) {}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {
    if (!node_) {
        throw InvalidArgument("null expression node");
    }
}

NodeKind Expr::kind() const { return node_->kind; }

bool Expr::is_constant() const { return node_->kind == NodeKind::Constant; }

bool Expr::is_constant(double value) const {
    return node_->kind == NodeKind::Constant && node_->value == value;
}

double Expr::constant_value() const {
    if (!is_constant()) {
        throw InvalidArgument("expression is not a constant");
    }
    return node_->value;
}

Expr constant(double value) {
    auto node = std::make_shared<Node>();
    node->kind = NodeKind::Constant;
    node->value = value;
    node->hash = hash_combine(std::hash<int>{}(0), std::hash<std::uint64_t>{}(std::bit_cast<std::uint64_t>(value)));
    node->hash = hash_combine(node->hash, 0);
    return Expr(std::shared_ptr<const Node>(std::move(node)));
}

Expr time_symbol() { return make(NodeKind::Time, {}); }
Expr state(std::uint32_t index) { return make(NodeKind::State, {}, 0.0, index); }
Expr param(std::uint32_t index) { return make(NodeKind::Param, {}, 0.0, index); }

Expr operator-(const Expr& a) { return make(NodeKind::Neg, {a}); }
Expr operator+(const Expr& a, const Expr& b) { return make(NodeKind::Add, {a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return make(NodeKind::Add, {a, -b}); }
Expr operator*(const Expr& a, const Expr& b) { return make(NodeKind::Mul, {a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return make(NodeKind::Div, {a, b}); }
Expr pow(const Expr& base, double exponent) { return make(NodeKind::Pow, {base}, exponent); }
Expr exp(const Expr& a) { return make(NodeKind::Exp, {a}); }
Expr log(const Expr& a) { return make(NodeKind::Log, {a}); }
Expr sin(const Expr& a) { return make(NodeKind::Sin, {a}); }
Expr cos(const Expr& a) { return make(NodeKind::Cos, {a}); }
Expr abs(const Expr& a) { return make(NodeKind::Abs, {a}); }

Expr piecewise(std::vector<Case> cases, Expr otherwise) {
    std::vector<Expr> args;
    std::vector<Compare> cmps;
    args.reserve(3 * cases.size() + 1);
    for (Case& c : cases) {
        args.push_back(std::move(c.when.lhs));
        args.push_back(std::move(c.when.rhs));
        args.push_back(std::move(c.value));
        cmps.push_back(c.when.op);
    }
    args.push_back(std::move(otherwise));
    return make(NodeKind::Piecewise, std::move(args), 0.0, 0, std::move(cmps));
}

Condition operator<(const Expr& a, const Expr& b) { return {Compare::Less, a, b}; }
Condition operator<=(const Expr& a, const Expr& b) { return {Compare::LessEqual, a, b}; }
Condition operator>(const Expr& a, const Expr& b) { return {Compare::Greater, a, b}; }
Condition operator>=(const Expr& a, const Expr& b) { return {Compare::GreaterEqual, a, b}; }

bool equal(const Expr& a, const Expr& b) {
    if (a.get() == b.get()) {
        return true;
    }
    const Node& x = a.node();
    const Node& y = b.node();
    if (x.hash != y.hash || x.kind != y.kind || x.index != y.index ||
        std::bit_cast<std::uint64_t>(x.value) != std::bit_cast<std::uint64_t>(y.value) ||
        x.compares != y.compares || x.args.size() != y.args.size()) {
        return false;
    }
    for (std::size_t i = 0; i < x.args.size(); ++i) {
        if (!equal(x.args[i], y.args[i])) {
            return false;
        }
    }
    return true;
}

bool depends_on(const Expr& e, Symbol s) {
    std::unordered_set<const Node*> seen;
    std::function<bool(const Expr&)> visit = [&](const Expr& x) -> bool {
        if (!seen.insert(x.get()).second) {
            return false;
        }
        const Node& n = x.node();
        if (n.kind == NodeKind::State && s.kind == Symbol::Kind::State && n.index == s.index) {
            return true;
        }
        if (n.kind == NodeKind::Param && s.kind == Symbol::Kind::Param && n.index == s.index) {
            return true;
        }
        for (const Expr& a : n.args) {
            if (visit(a)) {
                return true;
            }
        }
        return false;
    };
    return visit(e);
}

IndexBounds index_bounds(const Expr& e) {
    IndexBounds b;
    std::unordered_set<const Node*> seen;
    std::function<void(const Expr&)> visit = [&](const Expr& x) {
        if (!seen.insert(x.get()).second) {
            return;
        }
        const Node& n = x.node();
        if (n.kind == NodeKind::State) {
            b.max_state = std::max(b.max_state, static_cast<long>(n.index));
        } else if (n.kind == NodeKind::Param) {
            b.max_param = std::max(b.max_param, static_cast<long>(n.index));
        }
        for (const Expr& a : n.args) {
            visit(a);
        }
    };
    visit(e);
    return b;
}

Expr simplify(const Expr& e) { return Simplifier{}.run(e); }

Expr differentiate(const Expr& e, Symbol wrt) {
    return simplify(Differentiator{wrt}.run(simplify(e)));
}

bool is_linear_in(const Expr& e, std::uint32_t state_index) {
    return !depends_on(differentiate(e, Symbol::state(state_index)), Symbol::state(state_index));
}

double evaluate(const Expr& e, std::span<const double> y, double t, std::span<const double> params) {
    return Interpreter{y, t, params}.run(e);
}

std::size_t node_count(std::span<const Expr> roots) {
    std::unordered_set<const Node*> seen;
    std::function<void(const Expr&)> visit = [&](const Expr& x) {
        if (!seen.insert(x.get()).second) {
            return;
        }
        for (const Expr& a : x.node().args) {
            visit(a);
        }
    };
    for (const Expr& r : roots) {
        visit(r);
    }
    return seen.size();
}

std::string to_string(const Expr& e, std::span<const std::string> state_names,
                      std::span<const std::string> param_names) {
    return Printer{state_names, param_names}.run(e);
}

} // namespace splitadj
