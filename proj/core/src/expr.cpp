#include "ncfib/expr.hpp"

#include <cctype>

namespace ncfib {

namespace {

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    std::unique_ptr<ExprNode> parse()
    {
        auto e = expr();
        skip();
        if (pos_ != s_.size())
            fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw ParseError(what + " at offset " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    bool eat(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static std::unique_ptr<ExprNode> binary(ExprNode::Kind k, std::unique_ptr<ExprNode> a, std::unique_ptr<ExprNode> b)
    {
        auto n = std::make_unique<ExprNode>();
        n->kind = k;
        n->children.push_back(std::move(a));
        n->children.push_back(std::move(b));
        return n;
    }

    std::unique_ptr<ExprNode> expr()
    {
        std::unique_ptr<ExprNode> lhs;
        if (eat('-')) {
            lhs = std::make_unique<ExprNode>();
            lhs->kind = ExprNode::Kind::Neg;
            lhs->children.push_back(term());
        }
        else {
            eat('+');
            lhs = term();
        }
        for (;;) {
            if (eat('+'))
                lhs = binary(ExprNode::Kind::Add, std::move(lhs), term());
            else if (eat('-'))
                lhs = binary(ExprNode::Kind::Sub, std::move(lhs), term());
            else
                return lhs;
        }
    }

    std::unique_ptr<ExprNode> term()
    {
        auto lhs = factor();
        for (;;) {
            if (eat('*'))
                lhs = binary(ExprNode::Kind::Mul, std::move(lhs), factor());
            else if (eat('/'))
                lhs = binary(ExprNode::Kind::Div, std::move(lhs), factor());
            else
                return lhs;
        }
    }

    std::unique_ptr<ExprNode> factor()
    {
        auto base = primary();
        if (eat('^')) {
            bool neg = eat('-');
            skip();
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                ++pos_;
            if (start == pos_)
                fail("expected integer exponent");
            auto n = std::make_unique<ExprNode>();
            n->kind = ExprNode::Kind::Pow;
            n->exponent = std::stoi(std::string(s_.substr(start, pos_ - start)));
            if (neg)
                n->exponent = -n->exponent;
            n->children.push_back(std::move(base));
            return n;
        }
        return base;
    }

    std::unique_ptr<ExprNode> primary()
    {
        skip();
        if (pos_ >= s_.size())
            fail("unexpected end of input");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            auto e = expr();
            if (!eat(')'))
                fail("expected ')'");
            return e;
        }
        auto n = std::make_unique<ExprNode>();
        std::size_t start = pos_;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                ++pos_;
            n->kind = ExprNode::Kind::Integer;
        }
        else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            n->kind = ExprNode::Kind::Symbol;
        }
        else {
            fail(std::string("unexpected character '") + c + "'");
        }
        n->text = std::string(s_.substr(start, pos_ - start));
        return n;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

std::unique_ptr<ExprNode> parse_expr(std::string_view text)
{
    return Parser(text).parse();
}

}  // namespace ncfib
