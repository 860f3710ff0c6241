#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

#include "secdyn/errors.hpp"
#include "secdyn/expr.hpp"

namespace secdyn {

namespace detail {

// Recursive descent over
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := ('-'|'+') unary | power
//   power   := primary ('^' exponent)*
//   exponent:= ('-'|'+')? primary            (must fold to an integer)
//   primary := number ['i'] | 'i' | 'z' | '(' expr ')'
class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    ExprTree run() {
        skip_ws();
        if (pos_ == src_.size()) throw SyntaxError(pos_, "empty expression");
        expr();
        skip_ws();
        if (pos_ != src_.size()) throw SyntaxError(pos_, std::string("unexpected '") + src_[pos_] + "'");
        return std::move(tree_);
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    int binary(Op op, int l, int r) { return tree_.add(Node{op, l, r, {}, 0}); }

    int expr() {
        int l = term();
        for (;;) {
            if (eat('+')) l = binary(Op::Add, l, term());
            else if (eat('-')) l = binary(Op::Sub, l, term());
            else return l;
        }
    }
    int term() {
        int l = unary();
        for (;;) {
            if (eat('*')) l = binary(Op::Mul, l, unary());
            else if (eat('/')) l = binary(Op::Div, l, unary());
            else return l;
        }
    }
    int unary() {
        if (eat('-')) return tree_.add(Node{Op::Neg, unary(), -1, {}, 0});
        if (eat('+')) return unary();
        return power();
    }
    int power() {
        int base = primary();
        while (eat('^')) {
            long e = exponent();
            base = tree_.add(Node{Op::Pow, base, -1, {}, e});
        }
        return base;
    }
    long exponent() {
        skip_ws();
        std::size_t start = pos_;
        bool neg = false;
        if (eat('-')) neg = true;
        else eat('+');
        int node = primary();
        if (tree_.depends_on_variable(node))
            throw UnsupportedOperation("exponent at offset " + std::to_string(start) + " depends on z");
        Complex v = tree_.eval(Complex{});
        double re = neg ? -v.real() : v.real();
        if (v.imag() != 0.0 || re != std::round(re) || std::fabs(re) > 4096.0)
            throw UnsupportedOperation("exponent at offset " + std::to_string(start) +
                                       " is not a small integer");
        // Drop the folded exponent subtree; it was appended last.
        tree_.nodes.resize(static_cast<std::size_t>(first_node_of(node)));
        return static_cast<long>(re);
    }
    // The subtree rooted at `node` occupies a contiguous tail of the node list.
    int first_node_of(int node) const {
        int lo = node;
        const Node& n = tree_.nodes[static_cast<std::size_t>(node)];
        if (n.lhs >= 0) lo = std::min(lo, first_node_of(n.lhs));
        if (n.rhs >= 0) lo = std::min(lo, first_node_of(n.rhs));
        return lo;
    }
    int primary() {
        skip_ws();
        if (pos_ == src_.size()) throw SyntaxError(pos_, "unexpected end of input");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            int inner = expr();
            if (!eat(')')) throw SyntaxError(pos_, "expected ')'");
            return inner;
        }
        if (c == 'z') {
            ++pos_;
            return tree_.add(Node{Op::Var, -1, -1, {}, 0});
        }
        if (c == 'i') {
            ++pos_;
            return tree_.add(Node{Op::Const, -1, -1, Complex(0.0, 1.0), 0});
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) throw SyntaxError(pos_, "unknown identifier");
        throw SyntaxError(pos_, std::string("unexpected '") + c + "'");
    }
    int number() {
        std::size_t start = pos_;
        std::size_t end = pos_;
        while (end < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[end])) || src_[end] == '.')) ++end;
        if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
            std::size_t e = end + 1;
            if (e < src_.size() && (src_[e] == '+' || src_[e] == '-')) ++e;
            if (e < src_.size() && std::isdigit(static_cast<unsigned char>(src_[e]))) {
                end = e;
                while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
            }
        }
        double v = 0.0;
        auto res = std::from_chars(src_.data() + start, src_.data() + end, v);
        if (res.ec != std::errc() || res.ptr != src_.data() + end) throw SyntaxError(start, "malformed number");
        pos_ = end;
        Complex value(v, 0.0);
        if (pos_ < src_.size() && src_[pos_] == 'i') {
            ++pos_;
            value = Complex(0.0, v);
        }
        return tree_.add(Node{Op::Const, -1, -1, value, 0});
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    ExprTree tree_;
};

}  // namespace detail

inline ExprTree parse_expression(std::string_view text) { return detail::Parser(text).run(); }

}  // namespace secdyn
