// Prints h, the modulus and the orbit length along a horizontal line through
// the basin of z = 1 for z^3 - 1, next to the direct limit of the orbit.

#include <cstdio>

#include "secdyn/secdyn.hpp"

using namespace secdyn;

int main() {
    MeroFn f = parse_function("z^3-1");
    auto roots = find_roots(f, {-2, 2, -2, 2});
    RootInfo root = certify_root(f, 1.0);
    BottcherContext ctx = make_context(f, root);
    std::printf("trap radius %.6g, G at the fixed point %s\n\n", ctx.r, format_complex(ctx.g0).c_str());
    std::printf("%-8s %-22s %-22s %-4s %-22s\n", "x", "h", "hhat", "N", "direct h");
    for (int k = 0; k <= 10; ++k) {
        double x = 0.5 + 0.1 * k;
        PlanePoint p{x, 1.1};
        try {
            PotentialSample s = potential_h(ctx, f, roots, p);
            double d = direct_limit_h(f, roots, p, Norm::linf);
            std::printf("%-8.2f %-22.17g %-22.17g %-4d %-22.17g\n", x, s.h, s.hhat, s.n_used, d);
        } catch (const Error& e) {
            std::printf("%-8.2f %s\n", x, e.what());
        }
    }
}
