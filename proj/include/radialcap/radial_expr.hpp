#pragma once

// Smooth radial functions f(r) written in a small expression language and
// evaluated with exact first and second derivatives (second-order forward
// mode). These carry the warping function w and the bound functions g,
// lambda and h.

#include <memory>
#include <string>
#include <string_view>

namespace radialcap {

/// Value and first two derivatives with respect to r.
struct Jet2 {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;

    static constexpr Jet2 constant(double c) { return {c, 0.0, 0.0}; }
    static constexpr Jet2 variable(double r) { return {r, 1.0, 0.0}; }
};

Jet2 operator+(const Jet2& a, const Jet2& b);
Jet2 operator-(const Jet2& a, const Jet2& b);
Jet2 operator-(const Jet2& a);
Jet2 operator*(const Jet2& a, const Jet2& b);

enum class Func { Sin, Cos, Sinh, Cosh, Tanh, Coth, Exp, Log, Sqrt, Abs };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

std::string_view func_name(Func f);

/// Immutable expression tree over the variable r. Copies share structure.
class Expr {
public:
    struct Node;

    static Expr number(double value);
    static Expr variable();
    static Expr call(Func f, Expr arg);
    static Expr negate(Expr arg);
    static Expr binary(BinaryOp op, Expr lhs, Expr rhs);

    /// Throws DomainError when r leaves the domain of some subexpression.
    Jet2 jet(double r) const;
    double operator()(double r) const { return jet(r).value; }

    /// True if the tree does not mention r.
    bool is_constant() const;

    /// Canonical, fully parenthesised form. parse(to_string()) reproduces
    /// the tree exactly.
    std::string to_string() const;

    const Node& root() const { return *node_; }

    friend bool operator==(const Expr& a, const Expr& b);

private:
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    std::shared_ptr<const Node> node_;
};

/// Parses `text` per the grammar
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := unary ("^" factor)?
///   unary  := ("-")? atom
///   atom   := number | "r" | ident "(" expr ")" | "(" expr ")"
/// The Unicode minus sign U+2212 is accepted wherever "-" is.
/// Throws SyntaxError or UnknownIdentifier.
Expr parse(std::string_view text);

inline Jet2 eval_jet2(const Expr& e, double r) { return e.jet(r); }

} // namespace radialcap
