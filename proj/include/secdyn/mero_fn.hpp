#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "secdyn/errors.hpp"
#include "secdyn/expr.hpp"
#include "secdyn/jet.hpp"
#include "secdyn/parser.hpp"
#include "secdyn/scalar.hpp"
#include "secdyn/series.hpp"

namespace secdyn {

inline constexpr double kRootTol = 1e-12;
inline constexpr double kSimpleTol = 1e-8;
inline constexpr double kExceptionalTol = 1e-8;
// Relative separation below which divided differences come from a midpoint expansion.
inline constexpr double kNearDiagonal = 1e-3;
inline constexpr int kMidpointOrder = 7;
inline constexpr int kRootOrder = 24;

struct Jet3 {
    Complex f0, f1, f2, f3;
};

// A rational function of one complex variable. Immutable and cheap to copy.
class MeroFn {
public:
    MeroFn() = default;

    static MeroFn parse(std::string_view text) {
        MeroFn f;
        auto tree = std::make_shared<ExprTree>(parse_expression(text));
        f.canon_ = std::make_shared<Rational>(canonical(*tree));
        f.tree_ = std::move(tree);
        f.text_ = std::string(text);
        return f;
    }

    const std::string& text() const { return text_; }
    std::string printed() const { return print(*tree_); }
    const ExprTree& tree() const { return *tree_; }
    const Rational& canonical_form() const { return *canon_; }
    bool is_polynomial() const { return canon_->is_polynomial(); }
    int degree() const { return canon_->degree(); }

    // Generic evaluation over complex, jet or extended-precision types.
    template <class T>
    T eval_as(const T& z) const {
        return tree_->eval(z);
    }

    Complex operator()(Complex z) const {
        Complex v = tree_->eval(z);
        if (!is_finite(v)) throw PoleAt(z);
        return v;
    }

    template <int N>
    std::array<Complex, N + 1> taylor(Complex center) const {
        auto j = tree_->eval(Jet<Complex, N>::variable(center));
        if (!ScalarTraits<Jet<Complex, N>>::finite(j)) throw PoleAt(center);
        return j.a;
    }

private:
    std::shared_ptr<const ExprTree> tree_;
    std::shared_ptr<const Rational> canon_;
    std::string text_;
};

inline MeroFn parse_function(std::string_view text) { return MeroFn::parse(text); }

inline Jet3 eval_jet(const MeroFn& f, Complex z) {
    auto c = f.taylor<3>(z);
    return {c[0], c[1], 2.0 * c[2], 6.0 * c[3]};
}

struct RootInfo {
    Complex z0, d1, d2, d3;
    bool exceptional = false;
    // Taylor coefficients of f about z0 (c_0 forced to 0) and the radius on
    // which the truncated series is trusted.
    std::vector<Complex> taylor;
    double taylor_radius = 0.0;
};

namespace detail {

inline double trusted_radius(const MeroFn& f, const std::vector<Complex>& c, Complex z0) {
    double c1 = std::abs(c[1]);
    double rho = INFINITY;
    for (std::size_t k = 2; k < c.size(); ++k) {
        double ck = std::abs(c[k]);
        if (ck == 0.0) continue;
        rho = std::min(rho, std::pow(c1 / ck, 1.0 / static_cast<double>(k - 1)));
    }
    if (!std::isfinite(rho)) return std::max(1.0, std::abs(z0));
    bool exact = f.is_polynomial() && f.degree() <= kRootOrder;
    return (exact ? 0.5 : 0.25) * rho;
}

}  // namespace detail

inline RootInfo certify_root(const MeroFn& f, Complex guess) {
    Complex z = guess;
    for (int it = 0; it < 64; ++it) {
        Jet3 j = eval_jet(f, z);
        if (j.f0 == Complex{}) {
            break;
        }
        if (std::abs(j.f1) == 0.0) throw NoConvergence("Newton hit a critical point");
        Complex dz = j.f0 / j.f1;
        z -= dz;
        if (!is_finite(z)) throw NoConvergence("Newton diverged");
        if (std::abs(dz) <= 4e-16 * std::max(1.0, std::abs(z))) {
            break;
        }
    }
    Jet3 j = eval_jet(f, z);
    double scale = std::max(1.0, std::abs(z) * std::abs(j.f1));
    if (!(std::abs(j.f0) <= kRootTol * scale)) throw NoConvergence("Newton did not reach a root in 64 steps");
    if (std::abs(j.f1) <= kSimpleTol) throw NotSimpleRoot("f'(z0) vanishes: root is not simple");
    RootInfo r;
    r.z0 = z;
    r.d1 = j.f1;
    r.d2 = j.f2;
    r.d3 = j.f3;
    r.exceptional = std::abs(j.f2) <= kExceptionalTol * std::abs(j.f1);
    auto c = f.taylor<kRootOrder>(z);
    r.taylor.assign(c.begin(), c.end());
    r.taylor[0] = Complex{};
    r.taylor_radius = detail::trusted_radius(f, r.taylor, z);
    return r;
}

struct Window {
    double re_min = -1, re_max = 1, im_min = -1, im_max = 1;
};

// Certified roots reached by Newton from a grid of seeds, sorted by
// decreasing real part, then decreasing imaginary part.
inline std::vector<RootInfo> find_roots(const MeroFn& f, Window w, int grid = 24) {
    std::vector<RootInfo> out;
    for (int a = 0; a < grid; ++a) {
        for (int b = 0; b < grid; ++b) {
            Complex seed(w.re_min + (a + 0.5) * (w.re_max - w.re_min) / grid,
                         w.im_min + (b + 0.5) * (w.im_max - w.im_min) / grid);
            RootInfo r;
            try {
                r = certify_root(f, seed);
            } catch (const Error&) {
                continue;
            }
            bool dup = std::any_of(out.begin(), out.end(), [&](const RootInfo& q) {
                return std::abs(q.z0 - r.z0) <= 1e-8 * std::max(1.0, std::abs(r.z0));
            });
            if (!dup) out.push_back(std::move(r));
        }
    }
    std::sort(out.begin(), out.end(), [](const RootInfo& a, const RootInfo& b) {
        double tol = 1e-9 * std::max(1.0, std::max(std::abs(a.z0), std::abs(b.z0)));
        if (std::abs(a.z0.real() - b.z0.real()) > tol) return a.z0.real() > b.z0.real();
        return a.z0.imag() > b.z0.imag();
    });
    return out;
}

struct DividedDifference {
    Complex tfid;  // (f(x) y - f(y) x)/(x - y)
    Complex tf1;   // (f(x) - f(y))/(x - y)
};

inline bool near_diagonal(Complex x, Complex y) {
    double scale = std::max({1.0, std::abs(x), std::abs(y)});
    return std::abs(x - y) <= kNearDiagonal * scale;
}

inline DividedDifference divided_difference(const MeroFn& f, Complex x, Complex y) {
    if (!near_diagonal(x, y)) {
        Complex fx = f(x), fy = f(y);
        Complex d = x - y;
        return {(fx * y - fy * x) / d, (fx - fy) / d};
    }
    Complex m = 0.5 * (x + y);
    Complex u = 0.5 * (x - y);
    auto c = f.taylor<kMidpointOrder>(m);
    Complex tf1 = series::dd1(c, u, -u);
    Complex fy = series::value(c, -u);
    return {y * tf1 - fy, tf1};
}

}  // namespace secdyn
