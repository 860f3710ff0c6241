#pragma once

// Command-line front end: render, potential, roots, verify.
// Exit codes: 0 success, 1 failed check or numerical error, 2 usage error.

#include <chrono>
#include <cstdio>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "secdyn/bottcher.hpp"
#include "secdyn/complex_io.hpp"
#include "secdyn/config.hpp"
#include "secdyn/render.hpp"
#include "secdyn/verify.hpp"

namespace secdyn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

// Input that could not be understood, as opposed to a numerical failure.
class UsageError : public Error {
public:
    using Error::Error;
};

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    return out;
}

inline std::vector<double> parse_reals(const std::string& s, std::size_t count, const std::string& what) {
    auto parts = split(s, ',');
    if (parts.size() != count) throw UsageError(what + ": expected " + std::to_string(count) + " comma-separated numbers");
    std::vector<double> v;
    for (const auto& p : parts) {
        Complex c = parse_complex(p);
        if (c.imag() != 0.0) throw UsageError(what + ": expected real numbers");
        v.push_back(c.real());
    }
    return v;
}

inline Window parse_window(const std::string& s) {
    auto v = parse_reals(s, 4, "--window");
    return {v[0], v[1], v[2], v[3]};
}

inline PlanePoint parse_point(const std::string& s) {
    auto parts = split(s, ',');
    if (parts.size() != 2) throw UsageError("--point: expected x,y with each coordinate written a+bi");
    return {parse_complex(parts[0]), parse_complex(parts[1])};
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string short_fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// Certified roots in the window, with the requested root guaranteed present.
inline std::vector<RootInfo> roots_with(const MeroFn& f, Complex guess, int& index) {
    auto roots = find_roots(f, {-4, 4, -4, 4});
    RootInfo r = certify_root(f, guess);
    index = index_of_root(roots, r.z0);
    if (index < 0) {
        roots.push_back(r);
        index = static_cast<int>(roots.size()) - 1;
    }
    return roots;
}

struct RenderArgs {
    std::string config;
    std::string fn;
    std::string slice;
    std::string window;
    std::string resolution;
    std::string out;
    std::string format;
    std::string levels;
    int budget = 0;
    unsigned threads = 0;
};

inline int do_render(const RenderArgs& a, std::ostream& out) {
    RenderJob job;
    if (!a.config.empty()) job = load_job(a.config);
    else if (a.fn.empty()) throw UsageError("render needs --config or --fn");
    else job.config.slice.window = {-1, 1, -1, 1};
    if (!a.fn.empty()) job.fn = a.fn;
    RenderConfig& c = job.config;
    if (!a.slice.empty()) c.slice.kind = detail::slice_kind_from(a.slice);
    if (!a.window.empty()) c.slice.window = parse_window(a.window);
    if (!a.resolution.empty()) {
        auto v = parse_reals(a.resolution, 2, "--resolution");
        c.width = static_cast<int>(v[0]);
        c.height = static_cast<int>(v[1]);
    }
    if (a.budget > 0) c.budget = a.budget;
    if (!a.out.empty()) c.out_path = a.out;
    if (!a.format.empty()) c.format = detail::format_from(a.format);
    if (!a.levels.empty()) {
        c.contour_levels.clear();
        for (const auto& p : split(a.levels, ',')) c.contour_levels.push_back(parse_complex(p).real());
    }
    if (c.slice.kind == SliceKind::ComplexLine && a.config.empty())
        throw UsageError("a ComplexLine slice needs base and direction from a config file");
    validate(c);

    MeroFn f = parse_function(job.fn);
    auto roots = job_roots(f, job);
    auto t0 = std::chrono::steady_clock::now();
    FieldGrid g = compute_field(f, roots, c, a.threads);
    double compute_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    draw(g, c);
    double total_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::map<int, long> counts;
    for (int b : g.basin) ++counts[b];
    out << "wrote " << c.out_path << " (" << c.width << "x" << c.height << ", " << to_string(c.format) << ")\n";
    out << "field " << std::fixed << std::setprecision(2) << compute_s << " s, total " << total_s << " s, "
        << (a.threads ? a.threads : worker_count()) << " worker(s)\n";
    out.unsetf(std::ios::floatfield);
    for (const auto& [b, n] : counts) {
        if (b < 0) out << "no convergence: " << n << " px\n";
        else out << "basin " << b << " (" << format_complex(roots[static_cast<std::size_t>(b)].z0) << "): " << n << " px\n";
    }
    return kExitOk;
}

inline int do_potential(const std::string& fn, const std::string& root, const std::string& point, int budget,
                        bool json_out, std::ostream& out) {
    MeroFn f = parse_function(fn);
    Complex guess = parse_complex(root);
    PlanePoint p = parse_point(point);
    int idx = 0;
    auto roots = roots_with(f, guess, idx);
    auto ctx = make_context(f, roots[static_cast<std::size_t>(idx)]);
    OrbitOutcome o = orbit(f, roots, p, budget);
    if (o.tag != OrbitTag::Converged || o.root_index != idx) {
        std::string where = o.tag == OrbitTag::Converged
                                ? "the basin of " + format_complex(roots[static_cast<std::size_t>(o.root_index)].z0)
                                : "no basin";
        throw NotInBasin("point " + describe(p) + " lies in " + where + ", not the basin of " +
                         format_complex(ctx.root.z0));
    }
    PotentialSample s = potential_h(ctx, f, roots, p, budget);
    double direct = direct_limit_h(f, roots, p, Norm::linf, budget);
    double diff = (s.h == 0.0 && direct == 0.0) ? 0.0 : std::abs(s.h - direct) / std::max(std::abs(direct), std::abs(s.h));
    if (json_out) {
        nlohmann::json j{{"fn", fn},
                         {"root", format_complex(ctx.root.z0)},
                         {"point", {format_complex(p.x), format_complex(p.y)}},
                         {"basin", s.basin},
                         {"h", s.h},
                         {"hhat", s.hhat},
                         {"N", s.n_used},
                         {"direct_h", direct},
                         {"direct_rel_diff", diff}};
        out << j.dump(2) << "\n";
    } else {
        out << "root: " << format_complex(ctx.root.z0) << "\n"
            << "point: " << describe(p) << "\n"
            << "basin: " << s.basin << "\n"
            << "h: " << fmt(s.h) << "\n"
            << "hhat: " << fmt(s.hhat) << "\n"
            << "N: " << s.n_used << "\n"
            << "direct h (linf): " << fmt(direct) << "\n"
            << "relative difference: " << short_fmt(diff) << "\n";
    }
    return kExitOk;
}

inline int do_roots(const std::string& fn, const std::string& window, int grid, bool json_out, std::ostream& out) {
    MeroFn f = parse_function(fn);
    Window w = window.empty() ? Window{-4, 4, -4, 4} : parse_window(window);
    auto roots = find_roots(f, w, grid);
    if (json_out) {
        nlohmann::json arr = nlohmann::json::array();
        for (std::size_t k = 0; k < roots.size(); ++k)
            arr.push_back({{"index", k},
                           {"z0", format_complex(roots[k].z0)},
                           {"derivative", format_complex(roots[k].d1)},
                           {"exceptional", roots[k].exceptional}});
        out << nlohmann::json{{"fn", fn}, {"roots", arr}}.dump(2) << "\n";
        return kExitOk;
    }
    out << roots.size() << " simple root(s) of " << f.printed() << "\n";
    for (std::size_t k = 0; k < roots.size(); ++k)
        out << k << "  " << format_complex(roots[k].z0) << "  f' = " << format_complex(roots[k].d1)
            << (roots[k].exceptional ? "  exceptional (f'' = 0)" : "") << "\n";
    return kExitOk;
}

inline int do_verify(const std::string& fn, const std::string& root, std::uint64_t seed, int points, bool json_out,
                     std::ostream& out) {
    MeroFn f = parse_function(fn);
    VerifyTarget t = make_target(f, parse_complex(root));
    VerifyCounts counts;
    if (points > 0) counts.cap(points);
    auto rows = verify_all(t, seed, counts);
    bool ok = all_pass(rows);
    if (json_out) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rows)
            arr.push_back({{"name", r.name},
                           {"pass", r.pass},
                           {"worst", std::isfinite(r.worst) ? nlohmann::json(r.worst) : nlohmann::json(fmt(r.worst))},
                           {"tol", r.tol},
                           {"witness", r.witness},
                           {"seconds", r.seconds}});
        out << nlohmann::json{{"fn", fn}, {"root", format_complex(t.z0())}, {"seed", seed}, {"pass", ok}, {"checks", arr}}
                   .dump(2)
            << "\n";
        return ok ? kExitOk : kExitFailed;
    }
    out << "verify " << f.printed() << " at root " << format_complex(t.z0()) << ", seed " << seed << "\n";
    for (const auto& r : rows) {
        out << (r.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(32) << r.name << std::right
            << " worst " << std::setw(9) << short_fmt(r.worst) << "  tol " << std::setw(7) << short_fmt(r.tol)
            << "  " << std::fixed << std::setprecision(2) << r.seconds << " s";
        out.unsetf(std::ios::floatfield);
        if (!r.pass) out << "  at " << r.witness;
        out << "\n";
    }
    int failed = 0;
    for (const auto& r : rows) failed += r.pass ? 0 : 1;
    if (ok) out << "all " << rows.size() << " checks passed\n";
    else {
        out << failed << " of " << rows.size() << " checks failed:";
        for (const auto& r : rows)
            if (!r.pass) out << " " << r.name;
        out << "\n";
    }
    return ok ? kExitOk : kExitFailed;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Secant-map dynamics: basins, potentials and invariant checks", "secdyn"};
    app.require_subcommand(1, 1);

    RenderArgs ra;
    auto* render = app.add_subcommand("render", "Render a basin/potential image");
    render->add_option("--config", ra.config, "JSON render config");
    render->add_option("--fn", ra.fn, "function of z, overrides the config");
    render->add_option("--slice", ra.slice, "Diagonal, CriticalCubic or RealPlane");
    render->add_option("--window", ra.window, "re_min,re_max,im_min,im_max");
    render->add_option("--resolution", ra.resolution, "width,height");
    render->add_option("--budget", ra.budget, "iteration budget");
    render->add_option("--out", ra.out, "output path");
    render->add_option("--format", ra.format, "PPM or PNG");
    render->add_option("--levels", ra.levels, "contour levels, comma separated");
    render->add_option("--threads", ra.threads, "worker count (default: SECDYN_THREADS or all cores)");

    std::string fn, root, point, window;
    int budget = kDefaultBudget, grid = 24, points = 0;
    std::uint64_t seed = kDefaultSeed;
    bool json_out = false;

    auto* potential = app.add_subcommand("potential", "Potential h and modulus at a point");
    potential->add_option("--fn", fn, "function of z")->required();
    potential->add_option("--root", root, "root guess, a+bi")->required();
    potential->add_option("--point", point, "x,y with each coordinate a+bi")->required();
    potential->add_option("--budget", budget, "iteration budget");
    potential->add_flag("--json", json_out, "machine-readable output");

    auto* roots = app.add_subcommand("roots", "Certify the simple roots in a window");
    roots->add_option("--fn", fn, "function of z")->required();
    roots->add_option("--window", window, "re_min,re_max,im_min,im_max (default -4,4,-4,4)");
    roots->add_option("--grid", grid, "seeds per axis");
    roots->add_flag("--json", json_out, "machine-readable output");

    auto* verify = app.add_subcommand("verify", "Run the invariant checks for one root");
    verify->add_option("--fn", fn, "function of z")->required();
    verify->add_option("--root", root, "root guess, a+bi")->required();
    verify->add_option("--seed", seed, "sampling seed");
    verify->add_option("--points", points, "cap on samples per check");
    verify->add_flag("--json", json_out, "machine-readable output");

    std::vector<const char*> argv{"secdyn"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (render->parsed()) return do_render(ra, out);
        if (potential->parsed()) return do_potential(fn, root, point, budget, json_out, out);
        if (roots->parsed()) return do_roots(fn, window, grid, json_out, out);
        return do_verify(fn, root, seed, points, json_out, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    } catch (const SyntaxError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    } catch (const ComplexSyntax& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    } catch (const UnsupportedOperation& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailed;
    }
}

}  // namespace secdyn::cli
