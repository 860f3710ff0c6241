#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include "secdyn/errors.hpp"
#include "secdyn/scalar.hpp"

namespace secdyn {

inline constexpr double kPoleTol = 1e-300;

enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow };

struct Node {
    Op op = Op::Const;
    int lhs = -1;
    int rhs = -1;
    Complex value{};   // Const
    long exponent = 0;  // Pow
};

// Children always precede their parent in `nodes`; the last node is the root.
struct ExprTree {
    std::vector<Node> nodes;

    int add(Node n) {
        nodes.push_back(n);
        return static_cast<int>(nodes.size()) - 1;
    }
    int root() const { return static_cast<int>(nodes.size()) - 1; }

    template <class T>
    T eval(const T& z) const {
        return eval_at(root(), z);
    }

    template <class T>
    T eval_at(int i, const T& z) const {
        using Tr = ScalarTraits<T>;
        const Node& n = nodes[static_cast<std::size_t>(i)];
        switch (n.op) {
            case Op::Const: return Tr::lift(n.value);
            case Op::Var: return z;
            case Op::Neg: return -eval_at(n.lhs, z);
            case Op::Add: return eval_at(n.lhs, z) + eval_at(n.rhs, z);
            case Op::Sub: return eval_at(n.lhs, z) - eval_at(n.rhs, z);
            case Op::Mul: return eval_at(n.lhs, z) * eval_at(n.rhs, z);
            case Op::Div: {
                T num = eval_at(n.lhs, z);
                T den = eval_at(n.rhs, z);
                if (!(Tr::magnitude(den) > kPoleTol)) throw PoleAt(Tr::approx(z));
                return num / den;
            }
            case Op::Pow: {
                T base = eval_at(n.lhs, z);
                long e = n.exponent;
                if (e < 0 && !(Tr::magnitude(base) > kPoleTol)) throw PoleAt(Tr::approx(z));
                T acc = Tr::lift(Complex(1.0, 0.0));
                T b = base;
                for (unsigned long k = static_cast<unsigned long>(e < 0 ? -e : e); k; k >>= 1) {
                    if (k & 1UL) acc = acc * b;
                    if (k > 1) b = b * b;
                }
                if (e < 0) return Tr::lift(Complex(1.0, 0.0)) / acc;
                return acc;
            }
        }
        return Tr::lift(Complex{});
    }

    bool depends_on_variable(int i) const {
        const Node& n = nodes[static_cast<std::size_t>(i)];
        if (n.op == Op::Var) return true;
        if (n.lhs >= 0 && depends_on_variable(n.lhs)) return true;
        if (n.rhs >= 0 && depends_on_variable(n.rhs)) return true;
        return false;
    }
};

// Complex literal formatting shared by the printer and the CLI.
inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_complex(Complex c) {
    std::string s = format_real(c.real());
    double im = c.imag();
    if (std::signbit(im) && !std::isnan(im)) {
        s += "-" + format_real(-im);
    } else {
        s += "+" + format_real(im);
    }
    return s + "i";
}

namespace detail {

inline int precedence(const Node& n) {
    switch (n.op) {
        case Op::Add:
        case Op::Sub: return 1;
        case Op::Mul:
        case Op::Div: return 2;
        case Op::Neg: return 3;
        case Op::Pow: return 4;
        case Op::Const:
            // Negative or complex literals are wrapped so they re-parse as one operand.
            if (n.value.imag() != 0.0 || std::signbit(n.value.real())) return 0;
            return 5;
        case Op::Var: return 5;
    }
    return 5;
}

inline std::string literal(Complex c) {
    if (c.imag() == 0.0) return format_real(c.real());
    if (c.real() == 0.0) return format_real(c.imag()) + "i";
    return format_complex(c);
}

inline std::string print_node(const ExprTree& t, int i, int min_prec) {
    const Node& n = t.nodes[static_cast<std::size_t>(i)];
    int p = precedence(n);
    std::string s;
    switch (n.op) {
        case Op::Const: s = literal(n.value); break;
        case Op::Var: s = "z"; break;
        case Op::Neg: s = "-" + print_node(t, n.lhs, 3); break;
        case Op::Add: s = print_node(t, n.lhs, 1) + "+" + print_node(t, n.rhs, 2); break;
        case Op::Sub: s = print_node(t, n.lhs, 1) + "-" + print_node(t, n.rhs, 2); break;
        case Op::Mul: s = print_node(t, n.lhs, 2) + "*" + print_node(t, n.rhs, 3); break;
        case Op::Div: s = print_node(t, n.lhs, 2) + "/" + print_node(t, n.rhs, 3); break;
        case Op::Pow: {
            std::string e = std::to_string(n.exponent);
            if (n.exponent < 0) e = "(" + e + ")";
            s = print_node(t, n.lhs, 5) + "^" + e;
            break;
        }
    }
    if (p < min_prec) return "(" + s + ")";
    return s;
}

}  // namespace detail

inline std::string print(const ExprTree& t) { return detail::print_node(t, t.root(), 0); }

// Dense polynomial, coefficient of z^k at index k.
using Poly = std::vector<Complex>;

inline void trim(Poly& p) {
    while (p.size() > 1 && p.back() == Complex{}) p.pop_back();
    if (p.empty()) p.push_back(Complex{});
}

inline Poly poly_add(const Poly& a, const Poly& b, double sign = 1.0) {
    Poly r(std::max(a.size(), b.size()), Complex{});
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += sign * b[i];
    trim(r);
    return r;
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1, Complex{});
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    trim(r);
    return r;
}

inline bool is_zero(const Poly& p) { return p.size() == 1 && p[0] == Complex{}; }

// num/den with no common-factor cancellation; den is normalized to 1 when constant.
struct Rational {
    Poly num{Complex{}};
    Poly den{Complex(1.0, 0.0)};

    bool is_polynomial() const { return den.size() == 1; }
    int degree() const { return static_cast<int>(num.size()) - 1; }
};

namespace detail {

inline Rational normalize(Rational r) {
    trim(r.num);
    trim(r.den);
    if (r.den.size() == 1) {
        Complex d = r.den[0];
        if (d == Complex{}) throw UnsupportedOperation("expression divides by the zero polynomial");
        if (d != Complex(1.0, 0.0)) {
            for (auto& c : r.num) c /= d;
            r.den = {Complex(1.0, 0.0)};
        }
    }
    return r;
}

inline Rational poly_power(const Rational& b, long e) {
    Rational acc;
    acc.num = {Complex(1.0, 0.0)};
    for (long k = 0; k < (e < 0 ? -e : e); ++k) {
        acc.num = poly_mul(acc.num, b.num);
        acc.den = poly_mul(acc.den, b.den);
    }
    if (e < 0) std::swap(acc.num, acc.den);
    return normalize(acc);
}

inline Rational canonical_at(const ExprTree& t, int i) {
    const Node& n = t.nodes[static_cast<std::size_t>(i)];
    Rational r;
    switch (n.op) {
        case Op::Const: r.num = {n.value}; break;
        case Op::Var: r.num = {Complex{}, Complex(1.0, 0.0)}; break;
        case Op::Neg: {
            r = canonical_at(t, n.lhs);
            for (auto& c : r.num) c = -c;
            break;
        }
        case Op::Add:
        case Op::Sub: {
            Rational a = canonical_at(t, n.lhs), b = canonical_at(t, n.rhs);
            double sign = n.op == Op::Add ? 1.0 : -1.0;
            if (a.den == b.den) {
                r.num = poly_add(a.num, b.num, sign);
                r.den = a.den;
            } else {
                r.num = poly_add(poly_mul(a.num, b.den), poly_mul(b.num, a.den), sign);
                r.den = poly_mul(a.den, b.den);
            }
            break;
        }
        case Op::Mul: {
            Rational a = canonical_at(t, n.lhs), b = canonical_at(t, n.rhs);
            r.num = poly_mul(a.num, b.num);
            r.den = poly_mul(a.den, b.den);
            break;
        }
        case Op::Div: {
            Rational a = canonical_at(t, n.lhs), b = canonical_at(t, n.rhs);
            if (is_zero(b.num)) throw UnsupportedOperation("expression divides by the zero polynomial");
            r.num = poly_mul(a.num, b.den);
            r.den = poly_mul(a.den, b.num);
            break;
        }
        case Op::Pow: return poly_power(canonical_at(t, n.lhs), n.exponent);
    }
    return normalize(r);
}

}  // namespace detail

inline Rational canonical(const ExprTree& t) { return detail::canonical_at(t, t.root()); }

}  // namespace secdyn
