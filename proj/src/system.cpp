#include "splitadj/system.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "splitadj/error.hpp"

namespace splitadj {

RhsSystem::RhsSystem(std::string name, std::vector<std::string> state_names, std::vector<double> initial,
                     std::vector<Parameter> parameters, std::vector<Expr> rhs)
    : name_(std::move(name)), state_names_(std::move(state_names)), initial_(std::move(initial)),
      parameters_(std::move(parameters)), rhs_(std::move(rhs)) {
    if (initial_.empty()) {
        initial_.assign(state_names_.size(), 0.0);
    }
    validate();
}

std::vector<std::string> RhsSystem::param_names() const {
    std::vector<std::string> out;
    out.reserve(parameters_.size());
    for (const Parameter& p : parameters_) {
        out.push_back(p.name);
    }
    return out;
}

std::vector<double> RhsSystem::param_values() const {
    std::vector<double> out;
    out.reserve(parameters_.size());
    for (const Parameter& p : parameters_) {
        out.push_back(p.value);
    }
    return out;
}

std::optional<std::size_t> RhsSystem::state_index(std::string_view name) const {
    for (std::size_t i = 0; i < state_names_.size(); ++i) {
        if (state_names_[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> RhsSystem::param_index(std::string_view name) const {
    for (std::size_t i = 0; i < parameters_.size(); ++i) {
        if (parameters_[i].name == name) {
            return i;
        }
    }
    return std::nullopt;
}

void RhsSystem::validate() const {
    const std::size_t m = state_names_.size();
    if (m == 0) {
        throw InvalidArgument("system '" + name_ + "' has no states");
    }
    if (rhs_.size() != m) {
        throw InvalidArgument("system '" + name_ + "': " + std::to_string(rhs_.size()) +
                              " equations for " + std::to_string(m) + " states");
    }
    if (initial_.size() != m) {
        throw InvalidArgument("system '" + name_ + "': initial value count mismatch");
    }
    std::set<std::string> names;
    for (const std::string& s : state_names_) {
        if (!names.insert(s).second) {
            throw InvalidArgument("duplicate name '" + s + "'");
        }
    }
    for (const Parameter& p : parameters_) {
        if (!names.insert(p.name).second) {
            throw InvalidArgument("duplicate name '" + p.name + "'");
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        const IndexBounds b = index_bounds(rhs_[i]);
        if (b.max_state >= static_cast<long>(m)) {
            throw InvalidArgument("equation " + std::to_string(i) + " references state index " +
                                  std::to_string(b.max_state) + " beyond dimension " + std::to_string(m));
        }
        if (b.max_param >= static_cast<long>(parameters_.size())) {
            throw InvalidArgument("equation " + std::to_string(i) + " references parameter index " +
                                  std::to_string(b.max_param) + " beyond " +
                                  std::to_string(parameters_.size()) + " parameters");
        }
    }
}

namespace {

bool is_reserved(std::string_view s) {
    static const std::set<std::string_view> reserved = {"t", "pi", "exp", "log", "sin",
                                                        "cos", "abs", "piecewise"};
    return reserved.count(s) != 0;
}

bool is_identifier(std::string_view s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) {
        return false;
    }
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) {
            return false;
        }
    }
    return true;
}

class ExprParser {
public:
    ExprParser(std::string_view text, const std::vector<std::string>& states,
               const std::vector<std::string>& params, std::size_t line)
        : text_(text), states_(states), params_(params), line_(line) {}

    Expr parse() {
        Expr e = expression();
        skip_ws();
        if (pos_ != text_.size()) {
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        }
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + " at column " + std::to_string(pos_ + 1), line_);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            fail(std::string("expected '") + c + "'");
        }
    }

    Expr expression() {
        Expr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = lhs + term();
            } else if (accept('-')) {
                lhs = lhs - term();
            } else {
                return lhs;
            }
        }
    }

    Expr term() {
        Expr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = lhs * unary();
            } else if (accept('/')) {
                lhs = lhs / unary();
            } else {
                return lhs;
            }
        }
    }

    Expr unary() {
        if (accept('-')) {
            Expr operand = unary();
            if (operand.is_constant()) {
                return constant(-operand.constant_value());
            }
            return -operand;
        }
        if (accept('+')) {
            return unary();
        }
        return power_expr();
    }

    Expr power_expr() {
        Expr base = primary();
        if (accept('^')) {
            Expr exponent = simplify(unary());
            if (!exponent.is_constant()) {
                fail("exponent must be a constant");
            }
            return pow(base, exponent.constant_value());
        }
        return base;
    }

    Expr primary() {
        skip_ws();
        if (pos_ >= text_.size()) {
            fail("unexpected end of expression");
        }
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = expression();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return constant(number());
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::string id = identifier();
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '(') {
                return call(id);
            }
            return symbol(id);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    double number() {
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc()) {
            fail("malformed number");
        }
        pos_ += static_cast<std::size_t>(ptr - begin);
        return v;
    }

    std::string identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    Expr symbol(const std::string& id) {
        if (id == "t") {
            return time_symbol();
        }
        if (id == "pi") {
            return constant(std::numbers::pi);
        }
        for (std::size_t i = 0; i < states_.size(); ++i) {
            if (states_[i] == id) {
                return state(static_cast<std::uint32_t>(i));
            }
        }
        for (std::size_t i = 0; i < params_.size(); ++i) {
            if (params_[i] == id) {
                return param(static_cast<std::uint32_t>(i));
            }
        }
        fail("unknown symbol '" + id + "'");
    }

    Condition condition() {
        Expr lhs = expression();
        skip_ws();
        Compare op;
        if (accept('<')) {
            op = accept('=') ? Compare::LessEqual : Compare::Less;
        } else if (accept('>')) {
            op = accept('=') ? Compare::GreaterEqual : Compare::Greater;
        } else {
            fail("expected comparison");
        }
        Expr rhs = expression();
        return {op, lhs, rhs};
    }

    Expr call(const std::string& fn) {
        expect('(');
        if (fn == "piecewise") {
            std::vector<Case> cases;
            for (;;) {
                // A case starts with a condition; the default is a bare expression.
                const std::size_t save = pos_;
                bool is_condition = true;
                Condition cond;
                try {
                    cond = condition();
                } catch (const ParseError&) {
                    is_condition = false;
                }
                if (!is_condition) {
                    pos_ = save;
                    Expr otherwise = expression();
                    expect(')');
                    if (cases.empty()) {
                        fail("piecewise needs at least one condition");
                    }
                    return piecewise(std::move(cases), otherwise);
                }
                expect(',');
                Expr value = expression();
                expect(',');
                cases.push_back({cond, value});
            }
        }
        Expr arg = expression();
        expect(')');
        if (fn == "exp") {
            return exp(arg);
        }
        if (fn == "log") {
            return log(arg);
        }
        if (fn == "sin") {
            return sin(arg);
        }
        if (fn == "cos") {
            return cos(arg);
        }
        if (fn == "abs") {
            return abs(arg);
        }
        fail("unknown function '" + fn + "'");
    }

    std::string_view text_;
    const std::vector<std::string>& states_;
    const std::vector<std::string>& params_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_number(std::string_view s, std::size_t line) {
    s = trim(s);
    double v = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    if (!s.empty() && s.front() == '+') {
        ++begin;
    }
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
        throw ParseError("malformed number '" + std::string(s) + "'", line);
    }
    return v;
}

std::string format_value(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return ec == std::errc() ? std::string(buf, end) : std::to_string(v);
}

} // namespace

Expr parse_expression(std::string_view text, const std::vector<std::string>& state_names,
                      const std::vector<std::string>& param_names) {
    return ExprParser(text, state_names, param_names, 1).parse();
}

RhsSystem parse_system(std::string_view text) {
    struct Equation {
        std::string state;
        std::string body;
        std::size_t line;
    };
    std::string name = "model";
    std::vector<std::string> states;
    std::vector<double> initial;
    std::vector<Parameter> params;
    std::vector<Equation> equations;

    auto check_name = [&](const std::string& n, std::size_t line) {
        if (!is_identifier(n)) {
            throw ParseError("invalid name '" + n + "'", line);
        }
        if (is_reserved(n)) {
            throw ParseError("'" + n + "' is reserved", line);
        }
    };

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t stop = text.find('\n', start);
        if (stop == std::string_view::npos) {
            stop = text.size();
        }
        ++line_no;
        std::string_view line = text.substr(start, stop - start);
        start = stop + 1;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            if (stop == text.size()) {
                break;
            }
            continue;
        }
        auto keyword_rest = [&](std::string_view kw) -> std::optional<std::string_view> {
            if (line.size() > kw.size() && line.substr(0, kw.size()) == kw &&
                std::isspace(static_cast<unsigned char>(line[kw.size()]))) {
                return trim(line.substr(kw.size()));
            }
            return std::nullopt;
        };
        if (auto rest = keyword_rest("name")) {
            name = std::string(*rest);
        } else if (auto rest = keyword_rest("state")) {
            const auto eq = rest->find('=');
            const std::string n(trim(rest->substr(0, eq)));
            check_name(n, line_no);
            states.push_back(n);
            initial.push_back(eq == std::string_view::npos ? 0.0 : parse_number(rest->substr(eq + 1), line_no));
        } else if (auto rest = keyword_rest("param")) {
            const auto eq = rest->find('=');
            if (eq == std::string_view::npos) {
                throw ParseError("parameter needs a value", line_no);
            }
            const std::string n(trim(rest->substr(0, eq)));
            check_name(n, line_no);
            params.push_back({n, parse_number(rest->substr(eq + 1), line_no)});
        } else if (line.front() == 'd') {
            const auto eq = line.find('=');
            const auto slash = line.find("/dt");
            if (eq == std::string_view::npos || slash == std::string_view::npos || slash > eq ||
                trim(line.substr(slash + 3, eq - slash - 3)).size() != 0) {
                throw ParseError("expected d<name>/dt = <expression>", line_no);
            }
            equations.push_back({std::string(trim(line.substr(1, slash - 1))),
                                 std::string(line.substr(eq + 1)), line_no});
        } else {
            throw ParseError("unrecognized line '" + std::string(line) + "'", line_no);
        }
        if (stop == text.size()) {
            break;
        }
    }

    std::vector<std::string> param_names;
    for (const Parameter& p : params) {
        param_names.push_back(p.name);
    }
    std::vector<std::optional<Expr>> rhs(states.size());
    for (const Equation& eq : equations) {
        std::size_t idx = states.size();
        for (std::size_t i = 0; i < states.size(); ++i) {
            if (states[i] == eq.state) {
                idx = i;
            }
        }
        if (idx == states.size()) {
            throw ParseError("equation for undeclared state '" + eq.state + "'", eq.line);
        }
        if (rhs[idx]) {
            throw ParseError("second equation for state '" + eq.state + "'", eq.line);
        }
        rhs[idx] = ExprParser(eq.body, states, param_names, eq.line).parse();
    }
    std::vector<Expr> exprs;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (!rhs[i]) {
            throw ParseError("state '" + states[i] + "' has no equation", line_no);
        }
        exprs.push_back(*rhs[i]);
    }
    try {
        return RhsSystem(name, states, initial, params, exprs);
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what(), line_no);
    }
}

RhsSystem load_system(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument("cannot open model file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_system(ss.str());
}

std::string format_system(const RhsSystem& sys) {
    std::ostringstream out;
    out << "name " << sys.name() << "\n";
    for (std::size_t i = 0; i < sys.dimension(); ++i) {
        out << "state " << sys.state_names()[i] << " = " << format_value(sys.initial_values()[i]) << "\n";
    }
    for (const Parameter& p : sys.parameters()) {
        out << "param " << p.name << " = " << format_value(p.value) << "\n";
    }
    const std::vector<std::string> pnames = sys.param_names();
    for (std::size_t i = 0; i < sys.dimension(); ++i) {
        out << "d" << sys.state_names()[i] << "/dt = " << to_string(sys.rhs(i), sys.state_names(), pnames)
            << "\n";
    }
    return out.str();
}

} // namespace splitadj
