#pragma once

#include <cmath>
#include <complex>

#include "secdyn/jet.hpp"

namespace secdyn {

using Complex = std::complex<double>;

// Adapter used by the expression evaluator so it can run over plain complex
// numbers, jets, and extended-precision complex types alike.
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Complex> {
    static Complex lift(Complex c) { return c; }
    static double magnitude(const Complex& v) { return std::abs(v); }
    static Complex approx(const Complex& v) { return v; }
    static bool finite(const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }
};

template <class C, int N>
struct ScalarTraits<Jet<C, N>> {
    using Base = ScalarTraits<C>;
    static Jet<C, N> lift(Complex c) { return Jet<C, N>(Base::lift(c)); }
    static double magnitude(const Jet<C, N>& v) { return Base::magnitude(v.a[0]); }
    static Complex approx(const Jet<C, N>& v) { return Base::approx(v.a[0]); }
    static bool finite(const Jet<C, N>& v) {
        for (const auto& c : v.a)
            if (!Base::finite(c)) return false;
        return true;
    }
};

inline bool is_finite(Complex v) { return ScalarTraits<Complex>::finite(v); }

}  // namespace secdyn
