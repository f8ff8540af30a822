#pragma once

#include <memory>
#include <string>

namespace capgeo {

// Arithmetic expression in the variables x, y, u. Supports + - * / ^,
// parentheses, the constants pi and e, and the usual one-argument functions
// (sin, cos, tan, exp, log, sqrt, abs, sinh, cosh, tanh, asin, acos, atan).
// Used by the metric definition files for conformal factors and revolution
// profiles.
class Expr {
public:
    static Expr parse(const std::string& text);

    double eval(double x, double y = 0.0, double u = 0.0) const;
    const std::string& source() const { return source_; }

    Expr() = default;
    Expr(const Expr&);
    Expr& operator=(const Expr&);
    Expr(Expr&&) noexcept;
    Expr& operator=(Expr&&) noexcept;
    ~Expr();

    struct Node;

private:
    std::unique_ptr<Node> root_;
    std::string source_;
};

}  // namespace capgeo
