#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "secdyn/errors.hpp"
#include "secdyn/golden.hpp"
#include "secdyn/mero_fn.hpp"
#include "secdyn/series.hpp"

namespace secdyn {

inline constexpr double kPoleMapTol = 1e-300;
inline constexpr double kConvTol = 1e-13;
inline constexpr int kDefaultBudget = 200;
inline constexpr double kEscapeRadius = 1e100;

struct PlanePoint {
    Complex x, y;
    friend bool operator==(const PlanePoint&, const PlanePoint&) = default;
};

inline double linf_distance(const PlanePoint& p, Complex z0) {
    return std::max(std::abs(p.x - z0), std::abs(p.y - z0));
}

inline PlanePoint secant_step(const MeroFn& f, const PlanePoint& p) {
    DividedDifference dd = divided_difference(f, p.x, p.y);
    if (!(std::abs(dd.tf1) > kPoleMapTol)) throw Indeterminate("secant line is horizontal");
    Complex s = dd.tfid / dd.tf1;
    if (!is_finite(s)) throw Indeterminate("secant step overflowed");
    return {s, p.x};
}

using Matrix2 = std::array<std::array<Complex, 2>, 2>;

inline Matrix2 jacobian(const MeroFn& f, const PlanePoint& p) {
    Complex fx, fy, t1, fxxy, fxyy;
    if (near_diagonal(p.x, p.y)) {
        Complex m = 0.5 * (p.x + p.y), u = 0.5 * (p.x - p.y);
        auto c = f.taylor<kMidpointOrder>(m);
        fx = series::value(c, u);
        fy = series::value(c, -u);
        t1 = series::dd1(c, u, -u);
        fxxy = series::dd2(c, u, u, -u);
        fxyy = series::dd2(c, u, -u, -u);
    } else {
        auto jx = f.taylor<1>(p.x);
        auto jy = f.taylor<1>(p.y);
        Complex d = p.x - p.y;
        fx = jx[0];
        fy = jy[0];
        t1 = (fx - fy) / d;
        fxxy = (jx[1] - t1) / d;
        fxyy = (t1 - jy[1]) / d;
    }
    if (!(std::abs(t1) > kPoleMapTol)) throw Indeterminate("secant line is horizontal");
    Complex t1sq = t1 * t1;
    return {{{fy * fxxy / t1sq, fx * fxyy / t1sq}, {Complex(1.0, 0.0), Complex{}}}};
}

// G with S^1(x,y) = z0 + G (x - z0)(y - z0), evaluated as f[x,y,z0]/f[x,y].
inline Complex g_factor(const MeroFn& f, const RootInfo& root, const PlanePoint& p) {
    const auto& c = root.taylor;
    Complex tx = p.x - root.z0, ty = p.y - root.z0;
    double R = root.taylor_radius;
    Complex num, den;
    if (std::max(std::abs(tx), std::abs(ty)) <= R) {
        num = series::dd2(c, tx, ty, Complex{});
        den = series::dd1(c, tx, ty);
    } else if (near_diagonal(p.x, p.y)) {
        Complex m = 0.5 * (p.x + p.y), u = 0.5 * (p.x - p.y);
        Jet<Complex, kMidpointOrder> fj;
        fj.a = f.taylor<kMidpointOrder>(m);
        auto aj = fj / Jet<Complex, kMidpointOrder>::variable(m - root.z0);
        num = series::dd1(aj.a, u, -u);
        den = series::dd1(fj.a, u, -u);
    } else {
        // A(z) = f[z, z0]; G = (A(x) - A(y))/(f(x) - f(y)).
        auto slope = [&](Complex z, Complex t) {
            if (std::abs(t) <= R) return series::dd1(c, t, Complex{});
            return f(z) / t;
        };
        num = slope(p.x, tx) - slope(p.y, ty);
        den = f(p.x) - f(p.y);
    }
    if (!(std::abs(den) > kPoleMapTol)) throw Indeterminate("secant line is horizontal");
    Complex g = num / den;
    if (!is_finite(g)) throw Indeterminate("factor overflowed");
    return g;
}

// (2 f' f''' - 3 f''^2)/(6 f'^2) at the root; G's gradient there is half of it in each slot.
inline Complex g_second(const RootInfo& r) {
    return (2.0 * r.d1 * r.d3 - 3.0 * r.d2 * r.d2) / (6.0 * r.d1 * r.d1);
}

inline std::array<Complex, 2> g_gradient_at_fixed(const RootInfo& r) {
    Complex half = 0.5 * g_second(r);
    return {half, half};
}

enum class OrbitTag { Converged, NonConvergent, Indeterminate };

struct OrbitOutcome {
    OrbitTag tag = OrbitTag::NonConvergent;
    int root_index = -1;
    int steps = 0;
    std::vector<PlanePoint> trace;
};

inline double conv_tol(Complex z0) { return kConvTol * std::max(1.0, std::abs(z0)); }

inline int converged_root(std::span<const RootInfo> roots, const PlanePoint& p) {
    for (std::size_t k = 0; k < roots.size(); ++k)
        if (linf_distance(p, roots[k].z0) <= conv_tol(roots[k].z0)) return static_cast<int>(k);
    return -1;
}

inline OrbitOutcome orbit(const MeroFn& f, std::span<const RootInfo> roots, PlanePoint p,
                          int budget = kDefaultBudget, bool keep_trace = false) {
    OrbitOutcome out;
    if (keep_trace) out.trace.push_back(p);
    for (int n = 0;; ++n) {
        int k = converged_root(roots, p);
        if (k >= 0) {
            out.tag = OrbitTag::Converged;
            out.root_index = k;
            out.steps = n;
            return out;
        }
        if (n == budget) break;
        try {
            p = secant_step(f, p);
        } catch (const Indeterminate&) {
            out.tag = OrbitTag::Indeterminate;
            out.steps = n;
            return out;
        } catch (const PoleAt&) {
            out.tag = OrbitTag::Indeterminate;
            out.steps = n;
            return out;
        }
        if (keep_trace) out.trace.push_back(p);
        if (std::abs(p.x) > kEscapeRadius) {
            out.steps = n + 1;
            return out;
        }
    }
    out.tag = OrbitTag::NonConvergent;
    out.steps = budget;
    return out;
}

inline PlanePoint iterate(const MeroFn& f, PlanePoint p, int n) {
    for (int k = 0; k < n; ++k) p = secant_step(f, p);
    return p;
}

// sum_{k<n} F_{n-k} log|G(S^k p)|, the log modulus of the Fibonacci-weighted product.
inline double g_n_log_product(const MeroFn& f, const RootInfo& root, PlanePoint p, int n) {
    if (n < 0 || n > golden::kMaxFib) throw std::out_of_range("n outside the Fibonacci table");
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        Complex g = g_factor(f, root, p);
        if (std::abs(g) == 0.0) throw ZeroFactor("factor vanishes along the orbit");
        sum += static_cast<double>(golden::fib(n - k)) * std::log(std::abs(g));
        if (k + 1 < n) p = secant_step(f, p);
    }
    return sum;
}

}  // namespace secdyn
