#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "secdyn/dynamics.hpp"
#include "secdyn/errors.hpp"
#include "secdyn/golden.hpp"
#include "secdyn/precise.hpp"

namespace secdyn {

inline constexpr double kSeriesTol = 1e-12;
inline constexpr int kMaxSeriesN = 200;
inline constexpr double kMinTrapRadius = 1e-8;
// Sampled deviation bound |G - G0| < margin |G0|; below the 1/2 needed so
// that unsampled points keep some slack.
inline constexpr double kTrapMargin = 0.45;

struct BottcherContext {
    RootInfo root;
    Complex g0;  // G at the fixed point, f''/(2f')
    Complex w0;  // chosen logarithm of g0
    double r = 0.0;
    double series_tol = kSeriesTol;
    int max_series_n = kMaxSeriesN;
    int branch = 0;
};

struct PotentialSample {
    double h = 0.0;
    double hhat = 0.0;
    int basin = -1;
    int n_used = 0;
    double log_h = -std::numeric_limits<double>::infinity();
};

namespace detail {

inline bool deviation_ok(const MeroFn& f, const RootInfo& root, Complex g0, double rho) {
    constexpr int kShells = 8, kAngles = 64;
    const double bound = kTrapMargin * std::abs(g0);
    for (int s = 1; s <= kShells; ++s) {
        double rad = rho * s / kShells;
        for (int a = 0; a < kAngles; ++a) {
            Complex tx = std::polar(rad, 2.0 * M_PI * a / kAngles);
            for (int b = 0; b < kAngles; ++b) {
                Complex ty = std::polar(rad, 2.0 * M_PI * (b + 0.5) / kAngles);
                try {
                    Complex g = g_factor(f, root, {root.z0 + tx, root.z0 + ty});
                    if (!(std::abs(g - g0) < bound)) return false;
                } catch (const Error&) {
                    return false;
                }
            }
        }
    }
    return true;
}

}  // namespace detail

inline BottcherContext make_context(const MeroFn& f, const RootInfo& root, int branch_index = 0) {
    if (root.exceptional) throw ExceptionalRoot("f''(z0) vanishes; no Bottcher coordinate");
    BottcherContext ctx;
    ctx.root = root;
    ctx.branch = branch_index;
    ctx.g0 = root.d2 / (2.0 * root.d1);
    ctx.w0 = std::log(ctx.g0) + Complex(0.0, 2.0 * M_PI * branch_index);
    const double bound = (2.0 / 3.0) / std::abs(ctx.g0);
    for (double rho = bound; rho >= kMinTrapRadius; rho /= 2.0) {
        if (detail::deviation_ok(f, root, ctx.g0, rho)) {
            ctx.r = std::min(rho, bound);
            return ctx;
        }
    }
    throw RadiusNotFound("no trap radius above 1e-8 validates");
}

inline bool in_trap(const BottcherContext& ctx, const PlanePoint& p) {
    return linf_distance(p, ctx.root.z0) < ctx.r;
}

inline Complex anchored_log(const BottcherContext& ctx, Complex w) {
    if (!(std::abs(w - ctx.g0) < 0.5 * std::abs(ctx.g0)))
        throw OutsideBranchDisk("argument outside the disk where the branch is defined");
    return ctx.w0 + std::log(w / ctx.g0);
}

// exp(sum_{k<n} F_{n-k}/phi^n L(G(S^k p)))
inline Complex partial_product_Hn(const BottcherContext& ctx, const MeroFn& f, PlanePoint p, int n) {
    if (!in_trap(ctx, p)) throw OutsideTrap("point outside the trap bi-disk");
    Complex sum{};
    for (int k = 0; k < n; ++k) {
        sum += golden::fib_over_phi_pow(n - k, n) * anchored_log(ctx, g_factor(f, ctx.root, p));
        if (k + 1 < n) p = secant_step(f, p);
    }
    return std::exp(sum);
}

// Limit of the partial products, via the normalized Fibonacci recurrence
// E_{n+1} = E_n/phi + E_{n-1}/phi^2 + L_n/phi^{n+1}, with H_n = exp(E_n).
inline Complex germ_H(const BottcherContext& ctx, const MeroFn& f, PlanePoint p) {
    if (!in_trap(ctx, p)) throw OutsideTrap("point outside the trap bi-disk");
    using golden::phi;
    const double inv_phi = 1.0 / phi, inv_phi2 = inv_phi * inv_phi;
    Complex prev{};                                              // E_0
    Complex cur = inv_phi * anchored_log(ctx, g_factor(f, ctx.root, p));  // E_1
    double weight = inv_phi;                                     // 1/phi^n
    int settled = 0;
    for (int n = 1; n < ctx.max_series_n; ++n) {
        p = secant_step(f, p);
        weight *= inv_phi;
        Complex next = cur * inv_phi + prev * inv_phi2 + weight * anchored_log(ctx, g_factor(f, ctx.root, p));
        // |H_{n+1}/H_n - 1| to first order.
        double change = std::abs(next - cur);
        prev = cur;
        cur = next;
        // Two quiet steps in a row so an accidental sign change cannot stop early.
        settled = change <= ctx.series_tol ? settled + 1 : 0;
        if (settled >= 2) return std::exp(cur);
    }
    throw NoSeriesConvergence("germ series did not settle within the step budget");
}

struct Modulus {
    double hhat = 0.0;
    int n_index = 0;
    double log_hhat = -std::numeric_limits<double>::infinity();
};

namespace detail {

inline Modulus modulus_from(const BottcherContext& ctx, const MeroFn& f, PlanePoint p, int forced, int budget) {
    double log_sum = 0.0;
    double weight = golden::inv_sqrt5;  // phi^{-k}/sqrt5
    for (int n = 0; n <= budget; ++n) {
        bool use = forced >= 0 ? n == forced : in_trap(ctx, p);
        if (use) {
            if (!in_trap(ctx, p)) throw OutsideTrap("forced index does not land in the trap");
            Complex H = germ_H(ctx, f, p);
            double lh = std::pow(golden::phi, -n) * std::log(std::abs(H)) + log_sum;
            return {std::exp(lh), n, lh};
        }
        Complex g;
        try {
            g = g_factor(f, ctx.root, p);
            if (std::abs(g) == 0.0) return {0.0, n, -std::numeric_limits<double>::infinity()};
            log_sum += weight * std::log(std::abs(g));
            weight /= golden::phi;
            p = secant_step(f, p);
        } catch (const Indeterminate&) {
            throw NotInBasin("orbit is indeterminate");
        } catch (const PoleAt&) {
            throw NotInBasin("orbit hits a pole");
        }
    }
    throw NotInBasin("orbit does not reach the trap within the budget");
}

}  // namespace detail

inline Modulus modulus_Hhat(const BottcherContext& ctx, const MeroFn& f, PlanePoint p, int budget = kDefaultBudget) {
    return detail::modulus_from(ctx, f, p, -1, budget);
}

// Same quantity with the index chosen by the caller (any n with S^n p in the trap).
inline Modulus modulus_Hhat_at(const BottcherContext& ctx, const MeroFn& f, PlanePoint p, int n) {
    return detail::modulus_from(ctx, f, p, n, n);
}

inline int index_of_root(std::span<const RootInfo> roots, Complex z0) {
    for (std::size_t k = 0; k < roots.size(); ++k)
        if (std::abs(roots[k].z0 - z0) <= 1e-10 * std::max(1.0, std::abs(z0))) return static_cast<int>(k);
    return -1;
}

// h from the extended modulus; p must lie in the basin of the context's root.
inline PotentialSample potential_h(const BottcherContext& ctx, const MeroFn& f, std::span<const RootInfo> roots,
                                   PlanePoint p, int budget = kDefaultBudget) {
    int idx = index_of_root(roots, ctx.root.z0);
    OrbitOutcome o = orbit(f, roots, p, budget);
    if (o.tag != OrbitTag::Converged || o.root_index != idx) throw NotInBasin("point is not in this root's basin");
    Modulus m = modulus_Hhat(ctx, f, p, budget);
    PotentialSample s;
    s.basin = idx;
    s.hhat = m.hhat;
    s.n_used = m.n_index;
    double ax = std::abs(p.x - ctx.root.z0), ay = std::abs(p.y - ctx.root.z0);
    if (ax == 0.0 || ay == 0.0 || m.hhat == 0.0) return s;
    using golden::inv_sqrt5;
    s.log_h = m.log_hhat / golden::phi + inv_sqrt5 * std::log(ax) + inv_sqrt5 / golden::phi * std::log(ay);
    s.h = std::exp(s.log_h);
    return s;
}

// log h, or -infinity on the zero equipotential.
inline double green(const BottcherContext& ctx, const MeroFn& f, std::span<const RootInfo> roots, PlanePoint p,
                    int budget = kDefaultBudget) {
    return potential_h(ctx, f, roots, p, budget).log_h;
}

enum class Norm { linf, l2 };

// h = lim |S^n p - (z0,z0)|^{1/phi^n}, estimated from a 320-digit orbit.
// log|.| behaves like a phi^n + b psi^n + c; three consecutive terms
// eliminate c and b, leaving a = log h.
inline double direct_limit_h(const MeroFn& f, std::span<const RootInfo> roots, PlanePoint p, Norm norm,
                             int budget = kDefaultBudget) {
    OrbitOutcome o = orbit(f, roots, p, budget);
    if (o.tag != OrbitTag::Converged) throw NotInBasin("orbit does not converge");
    Complex z0d = roots[static_cast<std::size_t>(o.root_index)].z0;
    using PC = PreciseComplexN<320>;
    using PR = PC::value_type;
    PC z0 = precise_root<PC>(f, z0d);
    // Stop before the displacement reaches the working precision.
    const PR floor = PR(1e-280) * std::max(PR(1), PR(abs(z0)));
    PrecisePoint<PC> q{to_precise<PC>(p.x), to_precise<PC>(p.y)};
    const PR phi = (1 + boost::multiprecision::sqrt(PR(5))) / 2;
    const PR psi = 1 - phi;
    const PR s5 = boost::multiprecision::sqrt(PR(5));
    // Near the fixed point |t_{n+1}| is about |G0| |t_n| |t_{n-1}|.
    const PR g0 = abs(to_precise<PC>(roots[static_cast<std::size_t>(o.root_index)].d2 /
                                     (2.0 * roots[static_cast<std::size_t>(o.root_index)].d1)));
    std::vector<PR> ell;
    PR prev_dy = 0;
    double last = NAN, prev = NAN;
    for (int n = 0; n <= budget + 64; ++n) {
        PR dx = abs(q.x - z0), dy = abs(q.y - z0);
        if (dx < floor || dy < floor) {
            // On the zero equipotential at the start, or landing there much
            // faster than the contraction allows.
            if (n == 0 || g0 * dy * prev_dy > floor * 1e6) return 0.0;
            break;
        }
        PR size = norm == Norm::linf ? std::max(dx, dy) : PR(boost::multiprecision::sqrt(dx * dx + dy * dy));
        ell.push_back(log(size));
        std::size_t m = ell.size() - 1;
        if (m >= 2) {
            PR c = ell[m - 2] + ell[m - 1] - ell[m];
            PR a = ((ell[m] - c) - psi * (ell[m - 1] - c)) / (s5 * pow(phi, static_cast<int>(m) - 1));
            prev = last;
            last = static_cast<double>(exp(a));
        }
        prev_dy = dy;
        try {
            q = precise_secant_step(f, q);
        } catch (const Error&) {
            throw NotInBasin("precise orbit became indeterminate");
        }
    }
    if (!(std::abs(last - prev) <= 1e-9 * std::abs(last)))
        throw EstimatorStalled("direct-limit estimates did not stabilize before the precision floor");
    return last;
}

// DH at the fixed point: (1/sqrt5)(2f'f''' - 3f''^2)/(6f'f'') H(z0,z0) [phi, 1].
inline std::array<Complex, 2> germ_jacobian_at_fixed(const BottcherContext& ctx) {
    const RootInfo& r = ctx.root;
    Complex h0 = std::exp(golden::index_sum_limit * ctx.w0);
    Complex s = golden::inv_sqrt5 * (2.0 * r.d1 * r.d3 - 3.0 * r.d2 * r.d2) / (6.0 * r.d1 * r.d2) * h0;
    return {s * golden::phi, s};
}

// The germ's value at the fixed point in closed form, exp(((5+3 sqrt5)/10) w0).
inline Complex germ_at_fixed(const BottcherContext& ctx) { return std::exp(golden::index_sum_limit * ctx.w0); }

}  // namespace secdyn
