#pragma once

// Extended-precision evaluation, used where double precision cannot resolve
// superattracting orbits (the direct potential limit and test oracles).

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include "secdyn/errors.hpp"
#include "secdyn/mero_fn.hpp"
#include "secdyn/scalar.hpp"

namespace secdyn {

template <unsigned Digits>
using PreciseComplexN = boost::multiprecision::cpp_complex<Digits>;

using PreciseReal = boost::multiprecision::cpp_bin_float_50;
using PreciseComplex = PreciseComplexN<50>;
// Enough digits to hold eight secant iterates of points near a root.
using WideComplex = PreciseComplexN<800>;

template <unsigned Digits>
struct ScalarTraits<PreciseComplexN<Digits>> {
    using T = PreciseComplexN<Digits>;
    static T lift(Complex c) { return T(c.real(), c.imag()); }
    static double magnitude(const T& v) { return static_cast<double>(abs(v)); }
    static Complex approx(const T& v) { return {static_cast<double>(v.real()), static_cast<double>(v.imag())}; }
    static bool finite(const T& v) {
        return boost::multiprecision::isfinite(v.real()) && boost::multiprecision::isfinite(v.imag());
    }
};

template <class PC = PreciseComplex>
PC to_precise(Complex c) {
    return ScalarTraits<PC>::lift(c);
}

template <class PC>
Complex to_double(const PC& c) {
    return ScalarTraits<PC>::approx(c);
}

template <class PC>
PC precise_eval(const MeroFn& f, const PC& z) {
    PC v = f.eval_as(z);
    if (!ScalarTraits<PC>::finite(v)) throw PoleAt(to_double(z));
    return v;
}

// Newton polish of a double root estimate to working precision.
template <class PC = PreciseComplex>
PC precise_root(const MeroFn& f, Complex z0) {
    using J = Jet<PC, 1>;
    PC z = to_precise<PC>(z0);
    auto tol = std::numeric_limits<typename PC::value_type>::epsilon() * 16;
    for (int it = 0; it < 64; ++it) {
        J j = f.eval_as(J::variable(z));
        if (j.a[0] == PC(0)) break;
        PC dz = j.a[0] / j.a[1];
        z -= dz;
        if (abs(dz) <= tol * (1 + abs(z))) break;
    }
    return z;
}

template <class PC = PreciseComplex>
struct PrecisePoint {
    PC x, y;
};

// One secant step; coincident coordinates take the Newton step.
template <class PC>
PrecisePoint<PC> precise_secant_step(const MeroFn& f, const PrecisePoint<PC>& p) {
    if (p.x == p.y) {
        using J = Jet<PC, 1>;
        J j = f.eval_as(J::variable(p.x));
        if (j.a[1] == PC(0)) throw Indeterminate("horizontal tangent");
        return {p.x - j.a[0] / j.a[1], p.x};
    }
    PC fx = precise_eval(f, p.x), fy = precise_eval(f, p.y);
    PC d = fx - fy;
    if (d == PC(0)) throw Indeterminate("secant line is horizontal");
    return {p.x - fx * (p.x - p.y) / d, p.x};
}

}  // namespace secdyn
