#pragma once

#include <cstddef>
#include <vector>

#include "secdyn/scalar.hpp"

// Divided differences read off Taylor coefficients c_0..c_K about a center.
// Offsets u, v, w are measured from that center. With h_j the complete
// homogeneous symmetric polynomial,
//   f[u,v]   = sum_{k>=1} c_k h_{k-1}(u,v)
//   f[u,v,w] = sum_{k>=2} c_k h_{k-2}(u,v,w)
// which never divides by u - v.
namespace secdyn::series {

template <class Coeffs>
Complex value(const Coeffs& c, Complex u) {
    Complex s{};
    for (std::size_t k = c.size(); k-- > 0;) s = s * u + c[k];
    return s;
}

template <class Coeffs>
Complex dd1(const Coeffs& c, Complex u, Complex v) {
    Complex s{}, h(1.0, 0.0), upow(1.0, 0.0);
    for (std::size_t k = 1; k < c.size(); ++k) {
        if (k > 1) {
            upow *= u;
            h = upow + v * h;
        }
        s += c[k] * h;
    }
    return s;
}

template <class Coeffs>
Complex dd2(const Coeffs& c, Complex u, Complex v, Complex w) {
    Complex s{}, h2(1.0, 0.0), h3(1.0, 0.0), upow(1.0, 0.0);
    for (std::size_t k = 2; k < c.size(); ++k) {
        if (k > 2) {
            upow *= u;
            h2 = upow + v * h2;
            h3 = h2 + w * h3;
        }
        s += c[k] * h3;
    }
    return s;
}

}  // namespace secdyn::series
