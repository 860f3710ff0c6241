#pragma once

// Numerical invariant checks shared by the `verify` command and the
// acceptance runner. Every check reports its worst sample and the point
// where it occurred.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "secdyn/bottcher.hpp"
#include "secdyn/dynamics.hpp"
#include "secdyn/golden.hpp"
#include "secdyn/precise.hpp"

namespace secdyn {

struct CheckRow {
    std::string name;
    bool pass = false;
    double worst = 0.0;
    double tol = 0.0;
    std::string witness;
    double seconds = 0.0;
};

struct VerifyCounts {
    int factorization = 500;
    int jacobian_off_diagonal = 50;
    int jacobian_diagonal = 20;
    int iterate_identity = 50;
    int germ_equation = 200;
    int modulus_equation = 200;
    int direct_limit = 100;
    int branch = 50;
    int convergence_order = 50;
    int zero_set = 50;

    // Caps every count at n.
    void cap(int n) {
        for (int* c : {&factorization, &jacobian_off_diagonal, &jacobian_diagonal, &iterate_identity, &germ_equation,
                       &modulus_equation, &direct_limit, &branch, &convergence_order, &zero_set})
            *c = std::min(*c, n);
    }
};

inline constexpr std::uint64_t kDefaultSeed = 42;

inline std::string describe(const PlanePoint& p) {
    return "(" + format_complex(p.x) + ", " + format_complex(p.y) + ")";
}

// Worst-sample bookkeeping; NaN counts as a failure.
class Tally {
public:
    Tally(std::string name, double tol) : row_{std::move(name), false, 0.0, tol, "", 0.0} {}

    void add(double err, const std::string& where) {
        ++samples_;
        if (std::isnan(row_.worst)) return;
        if (samples_ == 1 || std::isnan(err) || err > row_.worst) {
            row_.worst = err;
            row_.witness = where;
        }
    }
    void add(double err, const PlanePoint& p) { add(err, describe(p)); }
    void fail(const std::string& where, const std::string& why) {
        row_.worst = INFINITY;
        row_.witness = where + ": " + why;
        failed_ = true;
    }
    bool failed() const { return failed_; }

    CheckRow finish() {
        row_.pass = !failed_ && samples_ > 0 && !std::isnan(row_.worst) && row_.worst <= row_.tol;
        if (samples_ == 0 && !failed_) row_.witness = "no samples";
        return row_;
    }

private:
    CheckRow row_;
    int samples_ = 0;
    bool failed_ = false;
};

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
    Complex disk(Complex center, double radius) {
        double r = radius * std::sqrt(uniform());
        return center + std::polar(r, 2.0 * M_PI * uniform());
    }
    PlanePoint bidisk(Complex center, double radius) { return {disk(center, radius), disk(center, radius)}; }

private:
    std::mt19937_64 rng_;
};

struct VerifyTarget {
    MeroFn f;
    std::vector<RootInfo> roots;
    int index = 0;
    BottcherContext ctx;

    const RootInfo& root() const { return roots[static_cast<std::size_t>(index)]; }
    Complex z0() const { return root().z0; }
};

// Certifies the root nearest the guess and the other roots in the window.
inline VerifyTarget make_target(const MeroFn& f, Complex guess, const Window& window = {-4, 4, -4, 4}) {
    VerifyTarget t{f, find_roots(f, window), 0, {}};
    RootInfo r = certify_root(f, guess);
    t.index = index_of_root(t.roots, r.z0);
    if (t.index < 0) {
        t.roots.push_back(r);
        t.index = static_cast<int>(t.roots.size()) - 1;
    }
    t.ctx = make_context(f, t.root());
    return t;
}

// Radius of a bi-disk of starting points, kept away from the other roots.
inline double basin_radius(const VerifyTarget& t) {
    double r = 1.0;
    for (std::size_t k = 0; k < t.roots.size(); ++k)
        if (static_cast<int>(k) != t.index) r = std::min(r, 0.5 * std::abs(t.roots[k].z0 - t.z0()));
    return r;
}

// Random points whose orbit converges to the target root.
inline std::vector<PlanePoint> basin_points(const VerifyTarget& t, Sampler& s, int n) {
    std::vector<PlanePoint> out;
    double r = basin_radius(t);
    for (int tries = 0; static_cast<int>(out.size()) < n && tries < 100 * n; ++tries) {
        PlanePoint p = s.bidisk(t.z0(), r);
        OrbitOutcome o = orbit(t.f, t.roots, p);
        if (o.tag == OrbitTag::Converged && o.root_index == t.index && o.steps > 0) out.push_back(p);
    }
    return out;
}

inline std::vector<PlanePoint> trap_points(const VerifyTarget& t, Sampler& s, int n) {
    std::vector<PlanePoint> out;
    for (int k = 0; k < n; ++k) out.push_back(s.bidisk(t.z0(), 0.999 * t.ctx.r));
    return out;
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

// Relative error of exp(a) against exp(b).
inline double log_rel_err(double a, double b) { return std::abs(std::expm1(a - b)); }

namespace checks {

// Runs body, turning a library error into a failed row that names the point.
template <class Body>
CheckRow guarded(Tally tally, Body body) {
    PlanePoint at{};
    try {
        body(tally, at);
    } catch (const Error& e) {
        tally.fail(describe(at), e.what());
    }
    return tally.finish();
}

inline std::vector<CheckRow> constants() {
    using namespace golden;
    std::vector<CheckRow> rows;
    {
        Tally t("binet identity", 1e-12);
        for (int j = 0; j <= 40; ++j) {
            double lhs = (phi * static_cast<double>(fib(j + 1)) + static_cast<double>(fib(j))) * inv_sqrt5;
            double rhs = std::pow(phi, j + 1) * inv_sqrt5;
            t.add(rel_err(lhs, rhs), "j=" + std::to_string(j));
        }
        rows.push_back(t.finish());
    }
    {
        Tally t("index sum", 1e-10);
        const int n = 40;
        double sum = 0.0;
        for (int k = 0; k < n; ++k) sum += fib_over_phi_pow(n - k, n);
        t.add(std::abs(sum - index_sum_limit), "n=40");
        rows.push_back(t.finish());
    }
    {
        Tally t("tail series", 1e-9);
        const int J = 60;
        double sum = 0.0;
        for (int j = 1; j <= J; ++j) {
            sum += fib_over_phi_pow(1, j + 1);
            for (int k = 0; k < j; ++k)
                sum += std::abs(fib_over_phi_pow(j + 1 - k, j + 1) - fib_over_phi_pow(j - k, j));
        }
        t.add(std::abs(sum - 2.0), "J=60");
        rows.push_back(t.finish());
    }
    {
        Tally t("limit exponents", 1e-10);
        t.add(std::abs(fib_over_phi_pow(41, 40) - phi * inv_sqrt5), "F(41)/phi^40");
        t.add(std::abs(fib_over_phi_pow(40, 40) - inv_sqrt5), "F(40)/phi^40");
        rows.push_back(t.finish());
    }
    return rows;
}

inline CheckRow factorization(const VerifyTarget& t, Sampler& s, int n) {
    return guarded(Tally("factorization", 1e-12), [&](Tally& tally, PlanePoint& at) {
        for (int k = 0; k < n; ++k) {
            at = s.bidisk(t.z0(), 0.5);
            PlanePoint q = secant_step(t.f, at);
            Complex g = g_factor(t.f, t.root(), at);
            double res = std::abs(q.x - t.z0() - g * (at.x - t.z0()) * (at.y - t.z0()));
            tally.add(res / (1.0 + std::abs(q.x)), at);
        }
    });
}

inline CheckRow jacobian_fd(const VerifyTarget& t, Sampler& s, int off_diagonal, int diagonal) {
    return guarded(Tally("jacobian vs finite differences", 1e-6), [&](Tally& tally, PlanePoint& at) {
        const double h = 1e-6;
        for (int k = 0; k < off_diagonal + diagonal; ++k) {
            at = s.bidisk(t.z0(), 0.5);
            if (k >= off_diagonal) at.y = at.x;
            Matrix2 J = jacobian(t.f, at);
            PlanePoint xp = secant_step(t.f, {at.x + h, at.y}), xm = secant_step(t.f, {at.x - h, at.y});
            PlanePoint yp = secant_step(t.f, {at.x, at.y + h}), ym = secant_step(t.f, {at.x, at.y - h});
            Complex fd[2][2] = {{(xp.x - xm.x) / (2 * h), (yp.x - ym.x) / (2 * h)},
                                {(xp.y - xm.y) / (2 * h), (yp.y - ym.y) / (2 * h)}};
            double scale = 0.0;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) scale = std::max(scale, std::abs(J[i][j]));
            double err = 0.0;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    err = std::max(err, std::abs(fd[i][j] - J[i][j]) / std::max(std::abs(J[i][j]), 1e-8 * scale));
            tally.add(err, at);
        }
    });
}

inline CheckRow jacobian_at_fixed(const VerifyTarget& t) {
    return guarded(Tally("jacobian at fixed point", 1e-12), [&](Tally& tally, PlanePoint& at) {
        at = {t.z0(), t.z0()};
        Matrix2 J = jacobian(t.f, at);
        double err = std::max({std::abs(J[0][0]), std::abs(J[0][1]), std::abs(J[1][0] - 1.0), std::abs(J[1][1])});
        tally.add(err, at);
    });
}

// log|x_n - z0| against the G product, with the orbit run in 800 digits.
inline CheckRow iterate_identity(const VerifyTarget& t, Sampler& s, int n) {
    auto pts = basin_points(t, s, n);
    return guarded(Tally("iterate identity", 1e-8), [&](Tally& tally, PlanePoint& at) {
        WideComplex z0 = precise_root<WideComplex>(t.f, t.z0());
        for (const PlanePoint& p : pts) {
            at = p;
            PrecisePoint<WideComplex> q{to_precise<WideComplex>(p.x), to_precise<WideComplex>(p.y)};
            double lx = std::log(std::abs(p.x - t.z0())), ly = std::log(std::abs(p.y - t.z0()));
            for (int k = 1; k <= 8; ++k) {
                q = precise_secant_step(t.f, q);
                double lhs = static_cast<double>(log(abs(q.x - z0)));
                double rhs = g_n_log_product(t.f, t.root(), p, k) + static_cast<double>(golden::fib(k + 1)) * lx +
                             static_cast<double>(golden::fib(k)) * ly;
                tally.add(std::abs(lhs - rhs), p);
            }
        }
    });
}

inline CheckRow germ_equation(const VerifyTarget& t, Sampler& s, int n) {
    auto pts = trap_points(t, s, n);
    return guarded(Tally("germ functional equation", 1e-9), [&](Tally& tally, PlanePoint& at) {
        for (const PlanePoint& p : pts) {
            at = p;
            double a = std::abs(germ_H(t.ctx, t.f, p));
            double b = std::abs(germ_H(t.ctx, t.f, secant_step(t.f, p)));
            double g = std::abs(g_factor(t.f, t.root(), p));
            tally.add(rel_err(a, std::pow(b, 1.0 / golden::phi) * std::pow(g, golden::inv_sqrt5)), p);
        }
    });
}

inline CheckRow modulus_equation(const VerifyTarget& t, const std::vector<PlanePoint>& pts) {
    return guarded(Tally("modulus functional equation", 1e-8), [&](Tally& tally, PlanePoint& at) {
        for (const PlanePoint& p : pts) {
            at = p;
            Modulus a = modulus_Hhat(t.ctx, t.f, p);
            Modulus b = modulus_Hhat(t.ctx, t.f, secant_step(t.f, p));
            double lg = std::log(std::abs(g_factor(t.f, t.root(), p)));
            tally.add(log_rel_err(a.log_hhat, b.log_hhat / golden::phi + golden::inv_sqrt5 * lg), p);
        }
    });
}

inline CheckRow potential_equation(const VerifyTarget& t, const std::vector<PlanePoint>& pts) {
    return guarded(Tally("potential functional equation", 1e-8), [&](Tally& tally, PlanePoint& at) {
        for (const PlanePoint& p : pts) {
            at = p;
            PotentialSample a = potential_h(t.ctx, t.f, t.roots, p);
            if (!(a.h > 1e-30)) continue;
            PotentialSample b = potential_h(t.ctx, t.f, t.roots, secant_step(t.f, p));
            tally.add(log_rel_err(b.log_h, golden::phi * a.log_h), p);
        }
    });
}

// 0 <= h < 1; the reported value is the largest h seen.
inline CheckRow potential_range(const VerifyTarget& t, const std::vector<PlanePoint>& pts) {
    Tally tally("potential range", 1.0);
    PlanePoint at{};
    try {
        for (const PlanePoint& p : pts) {
            at = p;
            for (const PlanePoint& q : {p, secant_step(t.f, p)}) {
                double h = potential_h(t.ctx, t.f, t.roots, q).h;
                tally.add(h < 0.0 ? NAN : h, q);
            }
        }
    } catch (const Error& e) {
        tally.fail(describe(at), e.what());
    }
    CheckRow row = tally.finish();
    row.pass = row.pass && row.worst < 1.0;
    return row;
}

inline CheckRow direct_limit(const VerifyTarget& t, const std::vector<PlanePoint>& pts) {
    return guarded(Tally("direct limit agreement", 1e-7), [&](Tally& tally, PlanePoint& at) {
        for (const PlanePoint& p : pts) {
            at = p;
            double h = potential_h(t.ctx, t.f, t.roots, p).h;
            double a = direct_limit_h(t.f, t.roots, p, Norm::linf);
            double b = direct_limit_h(t.f, t.roots, p, Norm::l2);
            tally.add(std::max(rel_err(h, a), rel_err(h, b)), p);
        }
    });
}

inline CheckRow branch_modulus(const VerifyTarget& t, Sampler& s, int n) {
    auto pts = trap_points(t, s, n);
    return guarded(Tally("branch independence", 1e-10), [&](Tally& tally, PlanePoint& at) {
        BottcherContext other = make_context(t.f, t.root(), t.ctx.branch + 1);
        for (const PlanePoint& p : pts) {
            at = p;
            tally.add(rel_err(std::abs(germ_H(other, t.f, p)), std::abs(germ_H(t.ctx, t.f, p))), p);
        }
    });
}

inline CheckRow fixed_value(const VerifyTarget& t) {
    return guarded(Tally("germ at fixed point", 1e-10), [&](Tally& tally, PlanePoint& at) {
        at = {t.z0(), t.z0()};
        Complex want = std::exp(golden::index_sum_limit * t.ctx.w0);
        tally.add(std::abs(germ_H(t.ctx, t.f, at) - want) / std::abs(want), at);
    });
}

inline CheckRow germ_derivative(const VerifyTarget& t) {
    return guarded(Tally("germ derivative at fixed point", 1e-5), [&](Tally& tally, PlanePoint& at) {
        const double h = 1e-5;
        Complex z0 = t.z0();
        at = {z0, z0};
        auto dh = germ_jacobian_at_fixed(t.ctx);
        Complex dx = (germ_H(t.ctx, t.f, {z0 + h, z0}) - germ_H(t.ctx, t.f, {z0 - h, z0})) / (2 * h);
        Complex dy = (germ_H(t.ctx, t.f, {z0, z0 + h}) - germ_H(t.ctx, t.f, {z0, z0 - h})) / (2 * h);
        double floor = 1e-8 * std::abs(germ_at_fixed(t.ctx));
        tally.add(std::abs(dx - dh[0]) / std::max(std::abs(dh[0]), floor), at);
        tally.add(std::abs(dy - dh[1]) / std::max(std::abs(dh[1]), floor), at);
    });
}

// Ratios e_{n+1}/e_n^phi along z_0 = y, z_1 = x, S(z_n, z_{n-1}) = (z_{n+1}, z_n),
// for n >= 1 while e_n >= 1e-10. The n = 0 ratio compares two independent
// starting errors and is left out. The orbit runs in 50 digits so that the
// last numerator, far below 1e-10, is still exact.
inline std::vector<double> order_ratios(const VerifyTarget& t, PlanePoint p) {
    PreciseComplex z0 = precise_root(t.f, t.z0());
    PrecisePoint<PreciseComplex> q{to_precise(p.x), to_precise(p.y)};
    std::vector<double> e{std::abs(p.y - t.z0()), std::abs(p.x - t.z0())};
    for (int k = 0; k < 64 && e.back() >= 1e-10; ++k) {
        q = precise_secant_step(t.f, q);
        e.push_back(static_cast<double>(abs(q.x - z0)));
    }
    std::vector<double> r;
    for (std::size_t n = 1; n + 1 < e.size() && e[n] >= 1e-10; ++n) r.push_back(e[n + 1] / std::pow(e[n], golden::phi));
    return r;
}

inline CheckRow convergence_order(const VerifyTarget& t, Sampler& s, int n) {
    return guarded(Tally("convergence order", 10.0), [&](Tally& tally, PlanePoint& at) {
        for (int k = 0; k < n; ++k) {
            at = s.bidisk(t.z0(), 0.05);
            auto r = order_ratios(t, at);
            if (r.empty()) {
                tally.add(1.0, at);
                continue;
            }
            std::vector<double> sorted = r;
            std::sort(sorted.begin(), sorted.end());
            std::size_t m = sorted.size();
            double median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
            tally.add(sorted.back() / median, at);
        }
    });
}

// h vanishes on the lines through the fixed point; the reported value is the largest h there.
inline CheckRow zero_set(const VerifyTarget& t, Sampler& s, int n) {
    return guarded(Tally("zero equipotential", 0.0), [&](Tally& tally, PlanePoint& at) {
        Complex z0 = t.z0();
        double r = basin_radius(t);
        at = {z0, z0};
        tally.add(potential_h(t.ctx, t.f, t.roots, at).h, at);
        for (int k = 0; k < n; ++k) {
            Complex w = s.disk(z0, r);
            if (t.f(w) == Complex(0)) continue;
            for (PlanePoint p : {PlanePoint{z0, w}, PlanePoint{w, z0}}) {
                at = p;
                OrbitOutcome o = orbit(t.f, t.roots, p);
                if (o.tag != OrbitTag::Converged || o.root_index != t.index) continue;
                tally.add(potential_h(t.ctx, t.f, t.roots, p).h, p);
            }
        }
    });
}

// Off the preimages of the zero set h is strictly positive; reported value is the smallest h.
inline CheckRow positive_off_zero_set(const VerifyTarget& t, const std::vector<PlanePoint>& pts) {
    Tally tally("positive off zero set", 0.0);
    double smallest = INFINITY;
    PlanePoint at{};
    std::string where;
    try {
        for (const PlanePoint& p : pts) {
            at = p;
            double h = potential_h(t.ctx, t.f, t.roots, p).h;
            if (h < smallest) smallest = h, where = describe(p);
        }
    } catch (const Error& e) {
        tally.fail(describe(at), e.what());
        return tally.finish();
    }
    CheckRow row = tally.finish();
    row.worst = smallest;
    row.witness = where;
    row.pass = !pts.empty() && smallest > 0.0;
    return row;
}

}  // namespace checks

template <class F>
CheckRow timed(F&& run) {
    auto t0 = std::chrono::steady_clock::now();
    CheckRow row = run();
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

// Every check for one root, constants first.
inline std::vector<CheckRow> verify_all(const VerifyTarget& t, std::uint64_t seed = kDefaultSeed,
                                        const VerifyCounts& counts = {}) {
    std::vector<CheckRow> rows;
    auto t0 = std::chrono::steady_clock::now();
    for (CheckRow& r : checks::constants()) rows.push_back(r);
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (CheckRow& r : rows) r.seconds = dt / static_cast<double>(rows.size());

    Sampler s(seed);
    rows.push_back(timed([&] { return checks::factorization(t, s, counts.factorization); }));
    rows.push_back(timed([&] { return checks::jacobian_fd(t, s, counts.jacobian_off_diagonal, counts.jacobian_diagonal); }));
    rows.push_back(timed([&] { return checks::jacobian_at_fixed(t); }));
    rows.push_back(timed([&] { return checks::iterate_identity(t, s, counts.iterate_identity); }));
    rows.push_back(timed([&] { return checks::germ_equation(t, s, counts.germ_equation); }));
    auto basin = basin_points(t, s, counts.modulus_equation);
    rows.push_back(timed([&] { return checks::modulus_equation(t, basin); }));
    rows.push_back(timed([&] { return checks::potential_equation(t, basin); }));
    rows.push_back(timed([&] { return checks::potential_range(t, basin); }));
    std::vector<PlanePoint> direct(basin.begin(), basin.begin() + std::min<std::ptrdiff_t>(basin.size(), counts.direct_limit));
    rows.push_back(timed([&] { return checks::direct_limit(t, direct); }));
    rows.push_back(timed([&] { return checks::branch_modulus(t, s, counts.branch); }));
    rows.push_back(timed([&] { return checks::fixed_value(t); }));
    rows.push_back(timed([&] { return checks::germ_derivative(t); }));
    rows.push_back(timed([&] { return checks::convergence_order(t, s, counts.convergence_order); }));
    rows.push_back(timed([&] { return checks::zero_set(t, s, counts.zero_set); }));
    auto off = basin_points(t, s, counts.zero_set);
    rows.push_back(timed([&] { return checks::positive_off_zero_set(t, off); }));
    return rows;
}

inline bool all_pass(const std::vector<CheckRow>& rows) {
    return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

}  // namespace secdyn
