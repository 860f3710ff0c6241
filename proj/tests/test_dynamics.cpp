#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "secdyn/dynamics.hpp"
#include "secdyn/golden.hpp"
#include "secdyn/precise.hpp"

using namespace secdyn;

namespace {

const MeroFn& cube() {
    static const MeroFn f = parse_function("z^3-1");
    return f;
}
const MeroFn& product_cubic() {
    static const MeroFn f = parse_function("(z^2-1)*(z-1/2)");
    return f;
}

Complex disk_point(std::mt19937_64& rng, Complex center, double radius) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double r = radius * std::sqrt(u(rng));
    double t = 2.0 * M_PI * u(rng);
    return center + std::polar(r, t);
}

}  // namespace

TEST(Golden, FibonacciTable) {
    EXPECT_EQ(golden::fib(0), 0u);
    EXPECT_EQ(golden::fib(1), 1u);
    for (int n = 2; n <= golden::kMaxFib; ++n) EXPECT_EQ(golden::fib(n), golden::fib(n - 1) + golden::fib(n - 2));
    EXPECT_EQ(golden::fib(92), 7540113804746346429ull);
}

TEST(Golden, BinetIdentity) {
    using golden::phi;
    double s5 = std::sqrt(5.0);
    for (int j = 0; j <= 40; ++j) {
        double lhs = (phi * golden::fib(j + 1) + golden::fib(j)) / s5;
        double rhs = std::pow(phi, j + 1) / s5;
        EXPECT_LE(std::abs(lhs - rhs), 1e-12 * rhs) << j;
    }
}

TEST(Golden, BinetFormMatchesTable) {
    for (int n = 1; n <= 92; ++n)
        for (int m : {n, n + 1}) {
            if (m > 92) continue;
            double table = golden::fib_over_phi_pow(m, n);
            double sign = (m % 2 == 0) ? 1.0 : -1.0;
            double binet = (std::pow(golden::phi, m - n) - sign * std::pow(golden::phi, -m - n)) * golden::inv_sqrt5;
            EXPECT_LE(std::abs(table - binet), 1e-14 * std::abs(binet)) << m << " " << n;
        }
}

TEST(SecantStep, Examples) {
    auto f = parse_function("z^2-1");
    auto a = secant_step(f, {2.0, 3.0});
    EXPECT_NEAR(std::abs(a.x - 1.4), 0.0, 1e-15);
    EXPECT_EQ(a.y, Complex(2.0));
    auto b = secant_step(f, {2.0, 2.0});
    EXPECT_NEAR(std::abs(b.x - 1.25), 0.0, 1e-15);
    EXPECT_EQ(b.y, Complex(2.0));
}

TEST(SecantStep, CollapseAtRoot) {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 50; ++k) {
        Complex y = disk_point(rng, 0.0, 2.0);
        auto p = secant_step(cube(), {1.0, y});
        EXPECT_LE(std::abs(p.x - 1.0), 1e-12);
        EXPECT_LE(std::abs(p.y - 1.0), 1e-12);
        auto q = secant_step(cube(), {y, 1.0});
        EXPECT_LE(std::abs(q.x - 1.0), 1e-12);
        EXPECT_EQ(q.y, y);
    }
}

TEST(SecantStep, IndeterminateWhenHorizontal) {
    EXPECT_THROW(secant_step(parse_function("z^2-1"), {2.0, -2.0}), Indeterminate);
}

TEST(Jacobian, Examples) {
    auto j = jacobian(cube(), {1.0, 1.0});
    EXPECT_EQ(j[0][0], Complex(0.0));
    EXPECT_EQ(j[0][1], Complex(0.0));
    EXPECT_EQ(j[1][0], Complex(1.0));
    EXPECT_EQ(j[1][1], Complex(0.0));
    auto d = jacobian(parse_function("z^2-1"), {2.0, 2.0});
    EXPECT_NEAR(std::abs(d[0][0] - 0.1875), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(d[0][1] - 0.1875), 0.0, 1e-15);
}

TEST(Jacobian, MatchesSpecFormulaOffDiagonal) {
    // Row one from the explicit quotient form, evaluated directly.
    auto f = parse_function("(z^2+1)/(z-3)");
    Complex x(0.3, 0.4), y(-1.1, 0.2);
    auto jx = eval_jet(f, x), jy = eval_jet(f, y);
    Complex D = jx.f0 - jy.f0;
    Complex a = -jy.f0 * (D - jx.f1 * (x - y)) / (D * D);
    Complex b = jx.f0 * (D - jy.f1 * (x - y)) / (D * D);
    auto J = jacobian(f, {x, y});
    EXPECT_LE(std::abs(J[0][0] - a), 1e-13 * std::abs(a));
    EXPECT_LE(std::abs(J[0][1] - b), 1e-13 * std::abs(b));
}

TEST(Jacobian, ContinuousAcrossDiagonal) {
    for (Complex x : {Complex(0.4, 0.3), Complex(-1.2, 0.8), Complex(2.0, -0.5)}) {
        auto d = jacobian(cube(), {x, x});
        for (int j = 1; j <= 12; ++j) {
            auto J = jacobian(cube(), {x, x + std::pow(10.0, -j)});
            double err = std::abs(J[0][0] - d[0][0]) + std::abs(J[0][1] - d[0][1]);
            EXPECT_LE(err, 100.0 * std::pow(10.0, -j) + 1e-13) << j;
        }
    }
}

TEST(GFactor, FixedPointValues) {
    auto r1 = certify_root(cube(), 1.0);
    EXPECT_NEAR(std::abs(g_factor(cube(), r1, {1.0, 1.0}) - 1.0), 0.0, 1e-15);
    auto r2 = certify_root(product_cubic(), 1.0);
    EXPECT_NEAR(std::abs(g_factor(product_cubic(), r2, {1.0, 1.0}) - 2.5), 0.0, 1e-14);
}

TEST(GFactor, LineThroughRoot) {
    auto r = certify_root(cube(), 1.0);
    EXPECT_NEAR(std::abs(g_factor(cube(), r, {2.0, 1.0}) - 4.0 / 7.0), 0.0, 1e-15);
    // Points near the line use the same function; no blow-up.
    Complex g = g_factor(cube(), r, {2.0, 1.0 + 1e-9});
    EXPECT_NEAR(std::abs(g - 4.0 / 7.0), 0.0, 1e-8);
}

TEST(GFactor, GradientAtFixedPoint) {
    auto r = certify_root(cube(), 1.0);
    EXPECT_NEAR(std::abs(g_second(r) + 4.0 / 3.0), 0.0, 1e-14);
    auto dg = g_gradient_at_fixed(r);
    EXPECT_NEAR(std::abs(dg[0] + 2.0 / 3.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(dg[1] + 2.0 / 3.0), 0.0, 1e-14);
    double h = 1e-5;
    Complex gx = (g_factor(cube(), r, {1.0 + h, 1.0}) - g_factor(cube(), r, {1.0 - h, 1.0})) / (2 * h);
    Complex gy = (g_factor(cube(), r, {1.0, 1.0 + h}) - g_factor(cube(), r, {1.0, 1.0 - h})) / (2 * h);
    EXPECT_NEAR(std::abs(gx - dg[0]), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(gy - dg[1]), 0.0, 1e-8);
}

TEST(GFactor, FactorizationIdentity) {
    std::mt19937_64 rng(19);
    for (const MeroFn* f : {&cube(), &product_cubic()}) {
        for (const auto& root : find_roots(*f, Window{-2, 2, -2, 2})) {
            for (int k = 0; k < 500; ++k) {
                PlanePoint p{disk_point(rng, root.z0, 0.5), disk_point(rng, root.z0, 0.5)};
                PlanePoint s = secant_step(*f, p);
                Complex g = g_factor(*f, root, p);
                double res = std::abs(s.x - root.z0 - g * (p.x - root.z0) * (p.y - root.z0));
                EXPECT_LE(res, 1e-12 * (1.0 + std::abs(s.x)));
            }
        }
    }
}

TEST(GFactor, BranchesAgreeWithPreciseQuotient) {
    // Points straddling the Taylor radius and the near-diagonal band, checked
    // against (S^1 - z0)/((x - z0)(y - z0)) in 50-digit arithmetic.
    auto r = certify_root(product_cubic(), 0.5);
    PreciseComplex z0 = precise_root(product_cubic(), r.z0);
    auto oracle = [&](PlanePoint p) {
        PrecisePoint<PreciseComplex> q{to_precise(p.x), to_precise(p.y)};
        auto s = precise_secant_step(product_cubic(), q);
        return to_double(PreciseComplex((s.x - z0) / ((q.x - z0) * (q.y - z0))));
    };
    double R = r.taylor_radius;
    std::vector<PlanePoint> pts;
    for (double a : {0.3, 1.7, 2.9}) {
        Complex dir = std::polar(1.0, a);
        Complex y = r.z0 + 0.1 * R * std::conj(dir);
        pts.push_back({r.z0 + (R * (1 - 1e-9)) * dir, y});
        pts.push_back({r.z0 + (R * (1 + 1e-9)) * dir, y});
        Complex x = r.z0 + 2.0 * R * dir;
        for (double d : {0.5e-3, 0.999e-3, 1.001e-3, 2e-3}) pts.push_back({x, x * (1 + d)});
    }
    for (const auto& p : pts) {
        Complex g = g_factor(product_cubic(), r, p), want = oracle(p);
        EXPECT_LE(std::abs(g - want), 1e-13 * std::abs(want));
    }
}

TEST(Orbit, Examples) {
    auto roots = find_roots(cube(), Window{-2, 2, -2, 2});
    auto o = orbit(cube(), roots, {0.9, 1.1});
    EXPECT_EQ(o.tag, OrbitTag::Converged);
    EXPECT_EQ(o.root_index, 0);
    EXPECT_LE(o.steps, 12);
    auto fixed = orbit(cube(), roots, {1.0, 1.0});
    EXPECT_EQ(fixed.tag, OrbitTag::Converged);
    EXPECT_EQ(fixed.steps, 0);
    auto sq = parse_function("z^2-1");
    auto sroots = find_roots(sq, Window{-2, 2, -2, 2});
    EXPECT_EQ(orbit(sq, sroots, {2.0, -2.0}).tag, OrbitTag::Indeterminate);
}

TEST(Orbit, ConvergedStateWithinTolerance) {
    auto roots = find_roots(cube(), Window{-2, 2, -2, 2});
    std::mt19937_64 rng(23);
    for (int k = 0; k < 200; ++k) {
        PlanePoint p{disk_point(rng, 0.0, 2.0), disk_point(rng, 0.0, 2.0)};
        auto o = orbit(cube(), roots, p, kDefaultBudget, true);
        EXPECT_LE(o.steps, kDefaultBudget);
        if (o.tag != OrbitTag::Converged) continue;
        ASSERT_EQ(o.trace.size(), static_cast<std::size_t>(o.steps) + 1);
        EXPECT_LE(linf_distance(o.trace.back(), roots[o.root_index].z0), kConvTol * 1.0);
    }
}

TEST(GnLogProduct, SmallN) {
    auto r = certify_root(cube(), 1.0);
    PlanePoint p{0.9, 1.1};
    EXPECT_EQ(g_n_log_product(cube(), r, p, 0), 0.0);
    EXPECT_NEAR(g_n_log_product(cube(), r, p, 1), std::log(std::abs(g_factor(cube(), r, p))), 1e-15);
}

TEST(GnLogProduct, IterateIdentityAgainstPreciseOrbit) {
    auto r = certify_root(cube(), 1.0);
    PlanePoint p{0.9, 1.1};
    // Left side from a 800-digit orbit, independent of G.
    PrecisePoint<WideComplex> q{to_precise<WideComplex>(p.x), to_precise<WideComplex>(p.y)};
    WideComplex z0 = precise_root<WideComplex>(cube(), r.z0);
    for (int n = 1; n <= 8; ++n) {
        q = precise_secant_step(cube(), q);
        double lhs = static_cast<double>(log(abs(q.x - z0)));
        double rhs = g_n_log_product(cube(), r, p, n) + golden::fib(n + 1) * std::log(std::abs(p.x - 1.0)) +
                     golden::fib(n) * std::log(std::abs(p.y - 1.0));
        EXPECT_NEAR(lhs, rhs, 1e-8) << n;
    }
}
