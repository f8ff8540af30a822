#include "capgeo/expr.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <vector>

#include "capgeo/errors.hpp"

namespace capgeo {

namespace {

enum class Op {
    Const, VarX, VarY, VarU,
    Add, Sub, Mul, Div, Pow, Neg,
    Sin, Cos, Tan, Exp, Log, Sqrt, Abs, Sinh, Cosh, Tanh, Asin, Acos, Atan
};

}  // namespace

struct Expr::Node {
    Op op = Op::Const;
    double value = 0.0;
    std::unique_ptr<Node> a, b;

    std::unique_ptr<Node> clone() const {
        auto n = std::make_unique<Node>();
        n->op = op;
        n->value = value;
        if (a) n->a = a->clone();
        if (b) n->b = b->clone();
        return n;
    }
};

namespace {

using NodePtr = std::unique_ptr<Expr::Node>;

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr run() {
        auto n = expr();
        skip_ws();
        if (pos_ != s_.size())
            throw ConfigError("expression: trailing input at '" + s_.substr(pos_) + "'");
        return n;
    }

private:
    const std::string& s_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    static NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
        auto n = std::make_unique<Expr::Node>();
        n->op = op;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }
    static NodePtr number(double v) {
        auto n = std::make_unique<Expr::Node>();
        n->op = Op::Const;
        n->value = v;
        return n;
    }

    NodePtr expr() {
        auto n = term();
        for (;;) {
            if (eat('+')) n = make(Op::Add, std::move(n), term());
            else if (eat('-')) n = make(Op::Sub, std::move(n), term());
            else return n;
        }
    }

    NodePtr term() {
        auto n = unary();
        for (;;) {
            if (eat('*')) n = make(Op::Mul, std::move(n), unary());
            else if (eat('/')) n = make(Op::Div, std::move(n), unary());
            else return n;
        }
    }

    NodePtr unary() {
        if (eat('-')) return make(Op::Neg, unary());
        if (eat('+')) return unary();
        return power();
    }

    NodePtr power() {
        auto base = atom();
        if (eat('^')) return make(Op::Pow, std::move(base), unary());
        return base;
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= s_.size()) throw ConfigError("expression: unexpected end of input");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t used = 0;
            double v = std::stod(s_.substr(pos_), &used);
            pos_ += used;
            return number(v);
        }
        if (c == '(') {
            ++pos_;
            auto n = expr();
            if (!eat(')')) throw ConfigError("expression: expected ')'");
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            std::string name = s_.substr(start, pos_ - start);
            if (name == "x") return make(Op::VarX);
            if (name == "y") return make(Op::VarY);
            if (name == "u" || name == "t") return make(Op::VarU);
            if (name == "pi") return number(3.141592653589793238462643383279);
            if (name == "e") return number(2.718281828459045235360287471353);
            static const std::vector<std::pair<const char*, Op>> fns = {
                {"sinh", Op::Sinh}, {"cosh", Op::Cosh}, {"tanh", Op::Tanh},
                {"asin", Op::Asin}, {"acos", Op::Acos}, {"atan", Op::Atan},
                {"sin", Op::Sin},   {"cos", Op::Cos},   {"tan", Op::Tan},
                {"exp", Op::Exp},   {"log", Op::Log},   {"sqrt", Op::Sqrt},
                {"abs", Op::Abs}};
            for (const auto& [fname, op] : fns) {
                if (name == fname) {
                    if (!eat('(')) throw ConfigError("expression: expected '(' after " + name);
                    auto arg = expr();
                    if (!eat(')')) throw ConfigError("expression: expected ')'");
                    return make(op, std::move(arg));
                }
            }
            throw ConfigError("expression: unknown identifier '" + name + "'");
        }
        throw ConfigError(std::string("expression: unexpected character '") + c + "'");
    }
};

double eval_node(const Expr::Node& n, double x, double y, double u) {
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::VarX: return x;
        case Op::VarY: return y;
        case Op::VarU: return u;
        case Op::Add: return eval_node(*n.a, x, y, u) + eval_node(*n.b, x, y, u);
        case Op::Sub: return eval_node(*n.a, x, y, u) - eval_node(*n.b, x, y, u);
        case Op::Mul: return eval_node(*n.a, x, y, u) * eval_node(*n.b, x, y, u);
        case Op::Div: return eval_node(*n.a, x, y, u) / eval_node(*n.b, x, y, u);
        case Op::Pow: return std::pow(eval_node(*n.a, x, y, u), eval_node(*n.b, x, y, u));
        case Op::Neg: return -eval_node(*n.a, x, y, u);
        case Op::Sin: return std::sin(eval_node(*n.a, x, y, u));
        case Op::Cos: return std::cos(eval_node(*n.a, x, y, u));
        case Op::Tan: return std::tan(eval_node(*n.a, x, y, u));
        case Op::Exp: return std::exp(eval_node(*n.a, x, y, u));
        case Op::Log: return std::log(eval_node(*n.a, x, y, u));
        case Op::Sqrt: return std::sqrt(eval_node(*n.a, x, y, u));
        case Op::Abs: return std::fabs(eval_node(*n.a, x, y, u));
        case Op::Sinh: return std::sinh(eval_node(*n.a, x, y, u));
        case Op::Cosh: return std::cosh(eval_node(*n.a, x, y, u));
        case Op::Tanh: return std::tanh(eval_node(*n.a, x, y, u));
        case Op::Asin: return std::asin(eval_node(*n.a, x, y, u));
        case Op::Acos: return std::acos(eval_node(*n.a, x, y, u));
        case Op::Atan: return std::atan(eval_node(*n.a, x, y, u));
    }
    return 0.0;
}

}  // namespace

Expr Expr::parse(const std::string& text) {
    Expr e;
    e.root_ = Parser(text).run();
    e.source_ = text;
    return e;
}

double Expr::eval(double x, double y, double u) const {
    if (!root_) throw ConfigError("expression: empty");
    return eval_node(*root_, x, y, u);
}

Expr::Expr(const Expr& o) : source_(o.source_) {
    if (o.root_) root_ = o.root_->clone();
}

Expr& Expr::operator=(const Expr& o) {
    if (this != &o) {
        root_ = o.root_ ? o.root_->clone() : nullptr;
        source_ = o.source_;
    }
    return *this;
}

Expr::Expr(Expr&&) noexcept = default;
Expr& Expr::operator=(Expr&&) noexcept = default;
Expr::~Expr() = default;

}  // namespace capgeo
