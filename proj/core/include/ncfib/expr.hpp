#pragma once

// Tiny arithmetic expression grammar shared by every text format:
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := primary ['^' ['-'] integer]
//   primary:= integer | identifier | '(' expr ')'
// Evaluation is generic over the value ring so that the same grammar
// yields scalars, algebra elements and differential forms.

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ncfib {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExprNode {
    enum class Kind { Integer, Symbol, Add, Sub, Neg, Mul, Div, Pow };
    Kind kind;
    std::string text;  // digits for Integer, name for Symbol
    int exponent = 0;  // Pow only
    std::vector<std::unique_ptr<ExprNode>> children;
};

std::unique_ptr<ExprNode> parse_expr(std::string_view text);

template <class R>
struct ExprOps {
    std::function<R(const std::string&)> integer;
    std::function<R(const std::string&)> symbol;
    std::function<R(const R&, const R&)> divide;
    std::function<R(const R&, int)> power;
};

template <class R>
R evaluate(const ExprNode& n, const ExprOps<R>& ops)
{
    using K = ExprNode::Kind;
    switch (n.kind) {
    case K::Integer:
        return ops.integer(n.text);
    case K::Symbol:
        return ops.symbol(n.text);
    case K::Add:
        return evaluate(*n.children[0], ops) + evaluate(*n.children[1], ops);
    case K::Sub:
        return evaluate(*n.children[0], ops) - evaluate(*n.children[1], ops);
    case K::Neg:
        return -evaluate(*n.children[0], ops);
    case K::Mul:
        return evaluate(*n.children[0], ops) * evaluate(*n.children[1], ops);
    case K::Div:
        return ops.divide(evaluate(*n.children[0], ops), evaluate(*n.children[1], ops));
    case K::Pow:
        return ops.power(evaluate(*n.children[0], ops), n.exponent);
    }
    throw ParseError("bad expression node");
}

template <class R>
R evaluate(std::string_view text, const ExprOps<R>& ops)
{
    return evaluate(*parse_expr(text), ops);
}

}  // namespace ncfib
