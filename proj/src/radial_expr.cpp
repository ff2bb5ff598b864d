#include "radialcap/radial_expr.hpp"

#include "radialcap/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <variant>

namespace radialcap {

struct Expr::Node {
    struct Number { double value; };
    struct Variable {};
    struct Call { Func f; std::shared_ptr<const Node> arg; };
    struct Negate { std::shared_ptr<const Node> arg; };
    struct Binary { BinaryOp op; std::shared_ptr<const Node> lhs, rhs; };

    std::variant<Number, Variable, Call, Negate, Binary> data;
    bool constant = false;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

constexpr std::array<std::pair<std::string_view, Func>, 10> kFunctions{{
    {"sin", Func::Sin},   {"cos", Func::Cos},   {"sinh", Func::Sinh}, {"cosh", Func::Cosh},
    {"tanh", Func::Tanh}, {"coth", Func::Coth}, {"exp", Func::Exp},   {"log", Func::Log},
    {"sqrt", Func::Sqrt}, {"abs", Func::Abs},
}};

std::optional<Func> lookup_function(std::string_view name) {
    for (const auto& [n, f] : kFunctions)
        if (n == name) return f;
    return std::nullopt;
}

char op_char(BinaryOp op) {
    switch (op) {
    case BinaryOp::Add: return '+';
    case BinaryOp::Sub: return '-';
    case BinaryOp::Mul: return '*';
    case BinaryOp::Div: return '/';
    case BinaryOp::Pow: return '^';
    }
    return '?';
}

void print_node(const Expr::Node& n, std::string& out) {
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Expr::Node::Number>) {
                std::array<char, 32> buf{};
                auto res = std::to_chars(buf.data(), buf.data() + buf.size(), d.value);
                if (d.value < 0) out += '(';
                out.append(buf.data(), res.ptr);
                if (d.value < 0) out += ')';
            } else if constexpr (std::is_same_v<T, Expr::Node::Variable>) {
                out += 'r';
            } else if constexpr (std::is_same_v<T, Expr::Node::Call>) {
                out += func_name(d.f);
                out += '(';
                print_node(*d.arg, out);
                out += ')';
            } else if constexpr (std::is_same_v<T, Expr::Node::Negate>) {
                out += "(-";
                print_node(*d.arg, out);
                out += ')';
            } else {
                out += '(';
                print_node(*d.lhs, out);
                out += ' ';
                out += op_char(d.op);
                out += ' ';
                print_node(*d.rhs, out);
                out += ')';
            }
        },
        n.data);
}

std::string node_string(const Expr::Node& n) {
    std::string s;
    print_node(n, s);
    return s;
}

bool nodes_equal(const Expr::Node& a, const Expr::Node& b) {
    if (a.data.index() != b.data.index()) return false;
    return std::visit(
        [&](const auto& da) -> bool {
            using T = std::decay_t<decltype(da)>;
            const auto& db = std::get<T>(b.data);
            if constexpr (std::is_same_v<T, Expr::Node::Number>) {
                return da.value == db.value;
            } else if constexpr (std::is_same_v<T, Expr::Node::Variable>) {
                return true;
            } else if constexpr (std::is_same_v<T, Expr::Node::Call>) {
                return da.f == db.f && nodes_equal(*da.arg, *db.arg);
            } else if constexpr (std::is_same_v<T, Expr::Node::Negate>) {
                return nodes_equal(*da.arg, *db.arg);
            } else {
                return da.op == db.op && nodes_equal(*da.lhs, *db.lhs) &&
                       nodes_equal(*da.rhs, *db.rhs);
            }
        },
        a.data);
}

[[noreturn]] void domain_fail(const Expr::Node& n, double r, const std::string& detail) {
    throw DomainError(r, node_string(n), detail);
}

// Product in which an exact zero wins over an infinite factor: a vanishing
// derivative term stays absent even after the other factor has overflowed.
double mul0(double a, double b) { return a == 0.0 || b == 0.0 ? 0.0 : a * b; }

// phi(u) with phi' and phi'' at u.value, pushed through the chain rule.
Jet2 chain(const Jet2& u, double f0, double f1, double f2) {
    return {f0, mul0(f1, u.d1), mul0(mul0(f2, u.d1), u.d1) + mul0(f1, u.d2)};
}

Jet2 apply(Func f, const Jet2& u, const Expr::Node& n, double r) {
    const double x = u.value;
    switch (f) {
    case Func::Sin: {
        const double s = std::sin(x), c = std::cos(x);
        return chain(u, s, c, -s);
    }
    case Func::Cos: {
        const double s = std::sin(x), c = std::cos(x);
        return chain(u, c, -s, -c);
    }
    case Func::Sinh: {
        const double s = std::sinh(x), c = std::cosh(x);
        return chain(u, s, c, s);
    }
    case Func::Cosh: {
        const double s = std::sinh(x), c = std::cosh(x);
        return chain(u, c, s, c);
    }
    case Func::Tanh: {
        const double t = std::tanh(x), sech2 = 1.0 - t * t;
        return chain(u, t, sech2, -2.0 * t * sech2);
    }
    case Func::Coth: {
        if (x == 0.0) domain_fail(n, r, "pole of coth at 0");
        const double c = 1.0 / std::tanh(x), k = 1.0 - c * c;
        return chain(u, c, k, -2.0 * c * k);
    }
    case Func::Exp: {
        const double e = std::exp(x);
        return chain(u, e, e, e);
    }
    case Func::Log: {
        if (!(x > 0.0)) domain_fail(n, r, "log of a non-positive value");
        return chain(u, std::log(x), 1.0 / x, -1.0 / (x * x));
    }
    case Func::Sqrt: {
        if (!(x > 0.0)) domain_fail(n, r, "sqrt needs a positive argument");
        const double s = std::sqrt(x);
        return chain(u, s, 0.5 / s, -0.25 / (s * x));
    }
    case Func::Abs: {
        if (x == 0.0) domain_fail(n, r, "abs is not differentiable at 0");
        const double sg = x > 0.0 ? 1.0 : -1.0;
        return chain(u, std::fabs(x), sg, 0.0);
    }
    }
    return u;
}

Jet2 divide(const Jet2& a, const Jet2& b, const Expr::Node& n, double r) {
    if (b.value == 0.0) domain_fail(n, r, "division by zero");
    const double q = a.value / b.value;
    const double q1 = (a.d1 - mul0(q, b.d1)) / b.value;
    const double q2 = (a.d2 - 2.0 * mul0(q1, b.d1) - mul0(q, b.d2)) / b.value;
    return {q, q1, q2};
}

Jet2 power(const Jet2& a, const Jet2& b, bool exponent_constant, const Expr::Node& n, double r) {
    if (exponent_constant) {
        const double k = b.value;
        if (k == 0.0) return Jet2::constant(1.0);
        if (k == 1.0) return a;
        const bool integral = std::nearbyint(k) == k;
        if (a.value < 0.0 && !integral)
            domain_fail(n, r, "negative base with non-integer exponent");
        if (a.value == 0.0 && k < 2.0 && !(integral && k > 0.0))
            domain_fail(n, r, "zero base with exponent below 2");
        const double v = std::pow(a.value, k);
        const double p1 = k * std::pow(a.value, k - 1.0);
        const double p2 = k * (k - 1.0) * std::pow(a.value, k - 2.0);
        return chain(a, v, p1, p2);
    }
    if (!(a.value > 0.0)) domain_fail(n, r, "variable exponent needs a positive base");
    const Jet2 la = chain(a, std::log(a.value), 1.0 / a.value, -1.0 / (a.value * a.value));
    const Jet2 e = la * b;
    const double ev = std::exp(e.value);
    return chain(e, ev, ev, ev);
}

Jet2 eval_node(const Expr::Node& n, double r) {
    Jet2 out = std::visit(
        [&](const auto& d) -> Jet2 {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Expr::Node::Number>) {
                return Jet2::constant(d.value);
            } else if constexpr (std::is_same_v<T, Expr::Node::Variable>) {
                return Jet2::variable(r);
            } else if constexpr (std::is_same_v<T, Expr::Node::Call>) {
                return apply(d.f, eval_node(*d.arg, r), n, r);
            } else if constexpr (std::is_same_v<T, Expr::Node::Negate>) {
                return -eval_node(*d.arg, r);
            } else {
                const Jet2 a = eval_node(*d.lhs, r);
                const Jet2 b = eval_node(*d.rhs, r);
                switch (d.op) {
                case BinaryOp::Add: return a + b;
                case BinaryOp::Sub: return a - b;
                case BinaryOp::Mul: return a * b;
                case BinaryOp::Div: return divide(a, b, n, r);
                case BinaryOp::Pow: return power(a, b, d.rhs->constant, n, r);
                }
                return a;
            }
        },
        n.data);
    if (std::isnan(out.value) || std::isnan(out.d1) || std::isnan(out.d2))
        domain_fail(n, r, "not a number");
    return out;
}

// Recursive-descent parser over UTF-8 text.
class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expr run() {
        Expr e = expr();
        skip_ws();
        if (pos_ != text_.size())
            fail("operator or end of input");
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() &&
               (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                text_[pos_] == '\r'))
            ++pos_;
    }

    [[noreturn]] void fail(const std::string& expected) const {
        std::string found = pos_ < text_.size() ? std::string(text_.substr(pos_, 8))
                                                : std::string("end of input");
        throw SyntaxError(pos_, expected, found);
    }

    // Consumes "-" or U+2212.
    bool accept_minus() {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '-') {
            ++pos_;
            return true;
        }
        if (text_.substr(pos_, 3) == "\xE2\x88\x92") {
            pos_ += 3;
            return true;
        }
        return false;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr expr() {
        Expr lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = Expr::binary(BinaryOp::Add, lhs, term());
            else if (accept_minus())
                lhs = Expr::binary(BinaryOp::Sub, lhs, term());
            else
                return lhs;
        }
    }

    Expr term() {
        Expr lhs = factor();
        for (;;) {
            if (accept('*'))
                lhs = Expr::binary(BinaryOp::Mul, lhs, factor());
            else if (accept('/'))
                lhs = Expr::binary(BinaryOp::Div, lhs, factor());
            else
                return lhs;
        }
    }

    Expr factor() {
        Expr base = unary();
        if (accept('^')) return Expr::binary(BinaryOp::Pow, base, factor());
        return base;
    }

    Expr unary() {
        if (accept_minus()) return Expr::negate(atom());
        return atom();
    }

    Expr atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("number, 'r', function call or '('");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr inner = expr();
            if (!accept(')')) fail("')'");
            return inner;
        }
        if ((c >= '0' && c <= '9') || c == '.') return number();
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') return identifier();
        fail("number, 'r', function call or '('");
    }

    Expr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_, ++n;
            return n;
        };
        std::size_t n = digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            n += digits();
        }
        if (n == 0) fail("digit");
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (digits() == 0) fail("exponent digits");
        }
        double value = 0.0;
        const char* first = text_.data() + start;
        const char* last = text_.data() + pos_;
        auto res = std::from_chars(first, last, value);
        if (res.ec != std::errc() || res.ptr != last) {
            pos_ = start;
            fail("representable number");
        }
        return Expr::number(value);
    }

    Expr identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                c == '_')
                ++pos_;
            else
                break;
        }
        const std::string_view name = text_.substr(start, pos_ - start);
        if (name == "r") return Expr::variable();
        const auto f = lookup_function(name);
        if (!f) throw UnknownIdentifier(std::string(name), start);
        if (!accept('(')) fail("'(' after " + std::string(name));
        Expr arg = expr();
        if (!accept(')')) fail("')'");
        return Expr::call(*f, arg);
    }
};

} // namespace

Jet2 operator+(const Jet2& a, const Jet2& b) {
    return {a.value + b.value, a.d1 + b.d1, a.d2 + b.d2};
}
Jet2 operator-(const Jet2& a, const Jet2& b) {
    return {a.value - b.value, a.d1 - b.d1, a.d2 - b.d2};
}
Jet2 operator-(const Jet2& a) { return {-a.value, -a.d1, -a.d2}; }
Jet2 operator*(const Jet2& a, const Jet2& b) {
    return {a.value * b.value, mul0(a.d1, b.value) + mul0(a.value, b.d1),
            mul0(a.d2, b.value) + 2.0 * mul0(a.d1, b.d1) + mul0(a.value, b.d2)};
}

std::string_view func_name(Func f) {
    for (const auto& [n, g] : kFunctions)
        if (g == f) return n;
    return "?";
}

Expr Expr::number(double value) {
    return Expr(std::make_shared<const Node>(Node{Node::Number{value}, true}));
}

Expr Expr::variable() { return Expr(std::make_shared<const Node>(Node{Node::Variable{}, false})); }

Expr Expr::call(Func f, Expr arg) {
    const bool c = arg.node_->constant;
    return Expr(std::make_shared<const Node>(Node{Node::Call{f, std::move(arg.node_)}, c}));
}

Expr Expr::negate(Expr arg) {
    const bool c = arg.node_->constant;
    return Expr(std::make_shared<const Node>(Node{Node::Negate{std::move(arg.node_)}, c}));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
    const bool c = lhs.node_->constant && rhs.node_->constant;
    return Expr(std::make_shared<const Node>(
        Node{Node::Binary{op, std::move(lhs.node_), std::move(rhs.node_)}, c}));
}

Jet2 Expr::jet(double r) const { return eval_node(*node_, r); }

bool Expr::is_constant() const { return node_->constant; }

std::string Expr::to_string() const { return node_string(*node_); }

bool operator==(const Expr& a, const Expr& b) { return nodes_equal(*a.node_, *b.node_); }

Expr parse(std::string_view text) { return Parser(text).run(); }

} // namespace radialcap
