#include "splitadj/tableau.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "splitadj/error.hpp"

namespace splitadj {

bool ButcherTableau::is_explicit() const {
    for (std::size_t i = 0; i < stages; ++i) {
        if (!is_explicit_stage(i)) {
            return false;
        }
    }
    return true;
}

std::vector<StageClass> stage_classes(const ButcherTableau& t) {
    std::vector<StageClass> out;
    for (std::size_t i = 0; i < t.stages; ++i) {
        out.push_back(t.is_explicit_stage(i) ? StageClass::Explicit : StageClass::DiagonallyImplicit);
    }
    return out;
}

ValidationReport validate(const ButcherTableau& t) {
    ValidationReport r;
    const std::size_t s = t.stages;
    if (s == 0) {
        r.errors.push_back({"no stages"});
        return r;
    }
    if (t.a.size() != s * s || t.b.size() != s || t.c.size() != s) {
        r.errors.push_back({"coefficient array sizes do not match stage count"});
        return r;
    }
    if (t.order < 1) {
        r.errors.push_back({"declared order must be at least 1"});
    }
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = i + 1; j < s; ++j) {
            if (t.A(i, j) != 0.0) {
                r.errors.push_back({"a(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                        ") is above the diagonal",
                                    i + 1, j + 1});
            }
        }
    }
    double bsum = 0.0;
    for (double bi : t.b) {
        bsum += bi;
    }
    if (std::fabs(bsum - 1.0) > 1e-14) {
        r.errors.push_back({"sum of b is " + std::to_string(bsum) + ", not 1"});
    }
    for (std::size_t i = 0; i < s; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < s; ++j) {
            row += t.A(i, j);
        }
        if (std::fabs(row - t.c[i]) > 1e-14) {
            r.warnings.push_back({"c(" + std::to_string(i + 1) + ") differs from the row sum of a", i + 1, 0});
        }
    }
    return r;
}

OrderCheck order_conditions(const ButcherTableau& t, int p) {
    if (p < 1 || p > 4) {
        throw InvalidArgument("order conditions are available for p in 1..4");
    }
    const std::size_t s = t.stages;
    const auto& b = t.b;
    const auto& c = t.c;
    std::vector<double> ac(s, 0.0);  // sum_j a_ij c_j
    std::vector<double> ac2(s, 0.0); // sum_j a_ij c_j^2
    std::vector<double> aac(s, 0.0); // sum_j a_ij sum_k a_jk c_k
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = 0; j < s; ++j) {
            ac[i] += t.A(i, j) * c[j];
            ac2[i] += t.A(i, j) * c[j] * c[j];
        }
    }
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = 0; j < s; ++j) {
            aac[i] += t.A(i, j) * ac[j];
        }
    }
    auto sum = [&](auto&& term) {
        double v = 0.0;
        for (std::size_t i = 0; i < s; ++i) {
            v += term(i);
        }
        return v;
    };
    struct Cond {
        int order;
        const char* text;
        double value;
        double expected;
    };
    const Cond conds[] = {
        {1, "sum b_i = 1", sum([&](std::size_t i) { return b[i]; }), 1.0},
        {2, "sum b_i c_i = 1/2", sum([&](std::size_t i) { return b[i] * c[i]; }), 0.5},
        {3, "sum b_i c_i^2 = 1/3", sum([&](std::size_t i) { return b[i] * c[i] * c[i]; }), 1.0 / 3.0},
        {3, "sum b_i a_ij c_j = 1/6", sum([&](std::size_t i) { return b[i] * ac[i]; }), 1.0 / 6.0},
        {4, "sum b_i c_i^3 = 1/4", sum([&](std::size_t i) { return b[i] * c[i] * c[i] * c[i]; }), 0.25},
        {4, "sum b_i c_i a_ij c_j = 1/8", sum([&](std::size_t i) { return b[i] * c[i] * ac[i]; }), 0.125},
        {4, "sum b_i a_ij c_j^2 = 1/12", sum([&](std::size_t i) { return b[i] * ac2[i]; }), 1.0 / 12.0},
        {4, "sum b_i a_ij a_jk c_k = 1/24", sum([&](std::size_t i) { return b[i] * aac[i]; }), 1.0 / 24.0},
    };
    for (const Cond& cond : conds) {
        if (cond.order > p) {
            break;
        }
        if (std::fabs(cond.value - cond.expected) > 1e-12) {
            return {false, cond.order, cond.text, cond.value, cond.expected};
        }
    }
    return {};
}

namespace {

ButcherTableau make(std::string name, int order, std::size_t s, std::vector<double> a, std::vector<double> b,
                    std::vector<double> c) {
    return {std::move(name), s, order, std::move(a), std::move(b), std::move(c)};
}

ButcherTableau esdirk3() {
    // L-stable root of 6g^3 - 18g^2 + 9g - 1 = 0.
    const double g = 0.43586652150845899941601945;
    const double a32 = (0.5 - g) / (2.0 * g);
    const double a31 = 1.0 - g - a32;
    const double b2 = 1.0 / (12.0 * g * (1.0 - 2.0 * g));
    const double b3 = 0.5 - g - 2.0 * g * b2;
    const double b1 = 1.0 - g - b2 - b3;
    return make("esdirk3", 3, 4,
                {0, 0, 0, 0,
                 g, g, 0, 0,
                 a31, a32, g, 0,
                 b1, b2, b3, g},
                {b1, b2, b3, g}, {0.0, 2.0 * g, 1.0, 1.0});
}

ButcherTableau esdirk4() {
    // ARK4(3)6L[2]SA implicit part, gamma = 1/4.
    const double g = 0.25;
    const double a31 = 8611.0 / 62500.0;
    const double a32 = -1743.0 / 31250.0;
    const double a41 = 5012029.0 / 34652500.0;
    const double a42 = -654441.0 / 2922500.0;
    const double a43 = 174375.0 / 388108.0;
    const double a51 = 15267082809.0 / 155376265600.0;
    const double a52 = -71443401.0 / 120774400.0;
    const double a53 = 730878875.0 / 902184768.0;
    const double a54 = 2285395.0 / 8070912.0;
    const double b1 = 82889.0 / 524892.0;
    const double b3 = 15625.0 / 83664.0;
    const double b4 = 69875.0 / 102672.0;
    const double b5 = -2260.0 / 8211.0;
    return make("esdirk4", 4, 6,
                {0, 0, 0, 0, 0, 0,
                 g, g, 0, 0, 0, 0,
                 a31, a32, g, 0, 0, 0,
                 a41, a42, a43, g, 0, 0,
                 a51, a52, a53, a54, g, 0,
                 b1, 0.0, b3, b4, b5, g},
                {b1, 0.0, b3, b4, b5, g}, {0.0, 0.5, 83.0 / 250.0, 31.0 / 50.0, 17.0 / 20.0, 1.0});
}

} // namespace

ButcherTableau builtin_tableau(std::string_view name) {
    if (name == "explicit-euler") {
        return make("explicit-euler", 1, 1, {0.0}, {1.0}, {0.0});
    }
    if (name == "implicit-euler") {
        return make("implicit-euler", 1, 1, {1.0}, {1.0}, {1.0});
    }
    if (name == "crank-nicolson") {
        return make("crank-nicolson", 2, 2, {0.0, 0.0, 0.5, 0.5}, {0.5, 0.5}, {0.0, 1.0});
    }
    if (name == "rk4") {
        return make("rk4", 4, 4,
                    {0, 0, 0, 0,
                     0.5, 0, 0, 0,
                     0, 0.5, 0, 0,
                     0, 0, 1, 0},
                    {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0}, {0.0, 0.5, 0.5, 1.0});
    }
    if (name == "esdirk3") {
        return esdirk3();
    }
    if (name == "esdirk4") {
        return esdirk4();
    }
    throw InvalidArgument("unknown tableau '" + std::string(name) + "'");
}

std::vector<std::string> builtin_tableau_names() {
    return {"explicit-euler", "implicit-euler", "crank-nicolson", "rk4", "esdirk3", "esdirk4"};
}

ButcherTableau parse_tableau(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> std::string {
        while (std::getline(in, line)) {
            ++line_no;
            if (auto h = line.find('#'); h != std::string::npos) {
                line.resize(h);
            }
            if (line.find_first_not_of(" \t\r") != std::string::npos) {
                return line;
            }
        }
        throw ParseError("unexpected end of tableau", line_no);
    };
    auto numbers = [&](const std::string& l, std::size_t expect) {
        std::istringstream ls(l);
        std::vector<double> v;
        std::string tok;
        while (ls >> tok) {
            double x = 0.0;
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
            if (ec != std::errc() || ptr != tok.data() + tok.size()) {
                throw ParseError("malformed number '" + tok + "'", line_no);
            }
            v.push_back(x);
        }
        if (v.size() != expect) {
            throw ParseError("expected " + std::to_string(expect) + " values, found " + std::to_string(v.size()),
                             line_no);
        }
        return v;
    };

    ButcherTableau t;
    {
        std::istringstream hs(next_line());
        long s = 0;
        if (!(hs >> s >> t.order >> t.name) || s < 1) {
            throw ParseError("header must be `s p name`", line_no);
        }
        t.stages = static_cast<std::size_t>(s);
    }
    for (std::size_t i = 0; i < t.stages; ++i) {
        const auto row = numbers(next_line(), t.stages);
        t.a.insert(t.a.end(), row.begin(), row.end());
    }
    t.b = numbers(next_line(), t.stages);
    t.c = numbers(next_line(), t.stages);
    const ValidationReport report = validate(t);
    if (!report.ok()) {
        throw ParseError("invalid tableau: " + report.errors.front().what, line_no);
    }
    return t;
}

std::string format_tableau(const ButcherTableau& t) {
    auto num = [](double v) {
        char buf[64];
        auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        return std::string(buf, end);
    };
    std::ostringstream out;
    out << t.stages << " " << t.order << " " << t.name << "\n";
    auto row = [&](const double* v) {
        for (std::size_t j = 0; j < t.stages; ++j) {
            out << (j ? " " : "") << num(v[j]);
        }
        out << "\n";
    };
    for (std::size_t i = 0; i < t.stages; ++i) {
        row(&t.a[i * t.stages]);
    }
    row(t.b.data());
    row(t.c.data());
    return out.str();
}

} // namespace splitadj
