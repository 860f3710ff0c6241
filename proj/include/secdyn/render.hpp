#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "secdyn/bottcher.hpp"
#include "secdyn/dynamics.hpp"
#include "secdyn/errors.hpp"
#include "secdyn/mero_fn.hpp"

#ifdef SECDYN_WITH_PNG
#include <png.h>
#endif

namespace secdyn {

enum class SliceKind { Diagonal, CriticalCubic, ComplexLine, RealPlane };
enum class ImageFormat { PPM, PNG };

struct SliceSpec {
    SliceKind kind = SliceKind::Diagonal;
    // Slice parameter range; for RealPlane the real part is x and the
    // imaginary part is y.
    Window window{};
    PlanePoint base{};       // ComplexLine
    PlanePoint direction{};  // ComplexLine
    Complex root_sum{};      // CriticalCubic: a + b + c, see bind_slice
};

struct RenderConfig {
    SliceSpec slice;
    int width = 400;
    int height = 400;
    int budget = kDefaultBudget;
    std::vector<double> contour_levels{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<double> palette{60, 200, 320, 120, 0, 260};
    std::string out_path = "out.ppm";
    ImageFormat format = ImageFormat::PPM;
};

struct FieldGrid {
    int width = 0;
    int height = 0;
    std::vector<int> basin;  // -1 where the orbit does not converge
    std::vector<double> h;   // NaN where no potential is available

    FieldGrid() = default;
    FieldGrid(int w, int hgt)
        : width(w), height(hgt), basin(static_cast<std::size_t>(w) * hgt, -1),
          h(static_cast<std::size_t>(w) * hgt, NAN) {}
    std::size_t at(int i, int j) const { return static_cast<std::size_t>(j) * width + i; }
};

// Sum of the roots of a cubic polynomial, used by the critical line x + 2y = a + b + c.
inline Complex cubic_root_sum(const MeroFn& f) {
    const Rational& r = f.canonical_form();
    if (!r.is_polynomial() || r.degree() != 3) throw NotCubic("critical-line slice needs a cubic polynomial");
    return -r.num[2] / r.num[3];
}

inline SliceSpec bind_slice(SliceSpec spec, const MeroFn& f) {
    if (spec.kind == SliceKind::CriticalCubic) spec.root_sum = cubic_root_sum(f);
    return spec;
}

inline PlanePoint slice_point(const SliceSpec& spec, Complex u) {
    switch (spec.kind) {
        case SliceKind::Diagonal: return {u, u};
        case SliceKind::CriticalCubic: return {spec.root_sum - 2.0 * u, u};
        case SliceKind::ComplexLine: return {spec.base.x + u * spec.direction.x, spec.base.y + u * spec.direction.y};
        case SliceKind::RealPlane: return {Complex(u.real(), 0.0), Complex(u.imag(), 0.0)};
    }
    return {u, u};
}

// Slice parameter at the center of pixel (i, j); row 0 is the top (largest imaginary part).
inline Complex pixel_parameter(const RenderConfig& c, int i, int j) {
    const Window& w = c.slice.window;
    return {w.re_min + (i + 0.5) * (w.re_max - w.re_min) / c.width,
            w.im_max - (j + 0.5) * (w.im_max - w.im_min) / c.height};
}

inline void validate(const RenderConfig& c) {
    if (c.width < 1 || c.height < 1) throw ConfigError("resolution must be at least 1x1");
    const Window& w = c.slice.window;
    if (!(w.re_max > w.re_min) || !(w.im_max > w.im_min)) throw ConfigError("window is degenerate");
    if (c.budget < 1) throw ConfigError("budget must be positive");
    for (std::size_t k = 0; k < c.contour_levels.size(); ++k) {
        double v = c.contour_levels[k];
        if (!(v > 0.0 && v < 1.0)) throw ConfigError("contour levels must lie in (0,1)");
        if (k > 0 && !(v > c.contour_levels[k - 1])) throw ConfigError("contour levels must increase strictly");
    }
    if (c.palette.empty()) throw ConfigError("palette is empty");
    if (c.slice.kind == SliceKind::ComplexLine && c.slice.direction == PlanePoint{})
        throw ConfigError("complex line direction is zero");
}

// Worker count: SECDYN_THREADS if set, else the number of logical cores.
inline unsigned worker_count() {
    if (const char* env = std::getenv("SECDYN_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

// h from an already-known modulus; mirrors potential_h without re-running the orbit.
inline std::optional<double> pixel_potential(const BottcherContext& ctx, const MeroFn& f, PlanePoint p, int budget) {
    try {
        Modulus m = modulus_Hhat(ctx, f, p, budget);
        double ax = std::abs(p.x - ctx.root.z0), ay = std::abs(p.y - ctx.root.z0);
        if (ax == 0.0 || ay == 0.0 || m.hhat == 0.0) return 0.0;
        double lh = m.log_hhat / golden::phi + golden::inv_sqrt5 * std::log(ax) +
                    golden::inv_sqrt5 / golden::phi * std::log(ay);
        return std::exp(lh);
    } catch (const Error&) {
        return std::nullopt;
    }
}

inline FieldGrid compute_field(const MeroFn& f, const std::vector<RootInfo>& roots, const RenderConfig& config,
                               unsigned threads = 0) {
    validate(config);
    RenderConfig cfg = config;
    cfg.slice = bind_slice(cfg.slice, f);
    std::vector<std::optional<BottcherContext>> ctx(roots.size());
    for (std::size_t k = 0; k < roots.size(); ++k)
        if (!roots[k].exceptional) ctx[k] = make_context(f, roots[k]);

    FieldGrid grid(cfg.width, cfg.height);
    std::atomic<int> next_row{0};
    auto work = [&] {
        for (int j = next_row++; j < cfg.height; j = next_row++) {
            for (int i = 0; i < cfg.width; ++i) {
                PlanePoint p = slice_point(cfg.slice, pixel_parameter(cfg, i, j));
                OrbitOutcome o = orbit(f, roots, p, cfg.budget);
                if (o.tag != OrbitTag::Converged) continue;
                std::size_t idx = grid.at(i, j);
                grid.basin[idx] = o.root_index;
                const auto& c = ctx[static_cast<std::size_t>(o.root_index)];
                if (!c) continue;
                if (auto h = pixel_potential(*c, f, p, cfg.budget)) grid.h[idx] = *h;
            }
        }
    };
    unsigned n = threads ? threads : worker_count();
    n = std::min<unsigned>(n, static_cast<unsigned>(cfg.height));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return grid;
}

struct Rgb {
    std::uint8_t r, g, b;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline Rgb hsv_to_rgb(double hue, double sat, double val) {
    hue = std::fmod(hue, 360.0);
    if (hue < 0) hue += 360.0;
    double c = val * sat;
    double hp = hue / 60.0;
    double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(hp)) {
        case 0: r = c, g = x; break;
        case 1: r = x, g = c; break;
        case 2: g = c, b = x; break;
        case 3: g = x, b = c; break;
        case 4: r = x, b = c; break;
        default: r = c, b = x; break;
    }
    double m = val - c;
    auto q = [](double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
    return {q(r + m), q(g + m), q(b + m)};
}

inline constexpr double kBrightnessGamma = 0.8;

// Pixels whose edge to the right or below crosses a contour level inside one basin.
inline std::vector<bool> contour_mask(const FieldGrid& g, const std::vector<double>& levels) {
    std::vector<bool> mask(g.basin.size(), false);
    auto crosses = [&](std::size_t a, std::size_t b) {
        if (g.basin[a] < 0 || g.basin[a] != g.basin[b]) return false;
        double ha = g.h[a], hb = g.h[b];
        if (std::isnan(ha) || std::isnan(hb)) return false;
        for (double c : levels)
            if ((ha - c) * (hb - c) < 0.0) return true;
        return false;
    };
    for (int j = 0; j < g.height; ++j) {
        for (int i = 0; i < g.width; ++i) {
            std::size_t a = g.at(i, j);
            if (i + 1 < g.width && crosses(a, g.at(i + 1, j))) mask[a] = true;
            if (j + 1 < g.height && crosses(a, g.at(i, j + 1))) mask[a] = true;
        }
    }
    return mask;
}

inline std::vector<Rgb> shade(const FieldGrid& g, const RenderConfig& c) {
    std::vector<Rgb> px(g.basin.size());
    auto mask = contour_mask(g, c.contour_levels);
    for (std::size_t k = 0; k < px.size(); ++k) {
        int b = g.basin[k];
        if (b < 0) {
            px[k] = {255, 255, 255};
        } else if (mask[k]) {
            px[k] = {0, 0, 0};
        } else {
            double hue = c.palette[static_cast<std::size_t>(b) % c.palette.size()];
            double v = std::isnan(g.h[k]) ? 1.0 : std::pow(g.h[k], kBrightnessGamma);
            px[k] = hsv_to_rgb(hue, 1.0, v);
        }
    }
    return px;
}

inline std::string ppm_bytes(const std::vector<Rgb>& px, int w, int h) {
    std::string out = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    out.reserve(out.size() + px.size() * 3);
    for (const Rgb& p : px) {
        out.push_back(static_cast<char>(p.r));
        out.push_back(static_cast<char>(p.g));
        out.push_back(static_cast<char>(p.b));
    }
    return out;
}

inline void write_ppm(const std::string& path, const std::vector<Rgb>& px, int w, int h) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path + " for writing");
    std::string bytes = ppm_bytes(px, w, h);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw IoError("write to " + path + " failed");
}

inline void write_png(const std::string& path, const std::vector<Rgb>& px, int w, int h) {
#ifdef SECDYN_WITH_PNG
    FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw IoError("cannot open " + path + " for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw IoError("PNG encoding of " + path + " failed");
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int j = 0; j < h; ++j) {
        auto row = reinterpret_cast<png_const_bytep>(px.data() + static_cast<std::size_t>(j) * w);
        png_write_row(png, row);
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    if (std::fclose(fp) != 0) throw IoError("write to " + path + " failed");
#else
    (void)px, (void)w, (void)h;
    throw IoError("PNG output is not available in this build: " + path);
#endif
}

inline void draw(const FieldGrid& g, const RenderConfig& c) {
    auto px = shade(g, c);
    if (c.format == ImageFormat::PNG) write_png(c.out_path, px, g.width, g.height);
    else write_ppm(c.out_path, px, g.width, g.height);
}

}  // namespace secdyn
