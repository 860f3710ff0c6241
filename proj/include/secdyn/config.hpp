#pragma once

// JSON render jobs. Field names follow RenderConfig; see README for the schema.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "secdyn/complex_io.hpp"
#include "secdyn/errors.hpp"
#include "secdyn/mero_fn.hpp"
#include "secdyn/render.hpp"

namespace secdyn {

struct RenderJob {
    std::string fn;
    std::vector<Complex> root_guesses;  // empty: search root_window
    Window root_window{-4, 4, -4, 4};
    RenderConfig config;
};

namespace detail {

using nlohmann::json;

inline Complex complex_from(const json& v, const std::string& field) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_string()) {
        try {
            return parse_complex(v.get<std::string>());
        } catch (const ComplexSyntax& e) {
            throw ConfigError(field + ": " + e.what());
        }
    }
    throw ConfigError(field + ": expected a number or an \"a+bi\" string");
}

inline Window window_from(const json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 4) throw ConfigError(field + ": expected [re_min, re_max, im_min, im_max]");
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>(), v[3].get<double>()};
}

inline PlanePoint point_from(const json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 2) throw ConfigError(field + ": expected [x, y]");
    return {complex_from(v[0], field + "[0]"), complex_from(v[1], field + "[1]")};
}

inline void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw ConfigError("unknown field '" + it.key() + "' in " + where);
    }
}

inline SliceKind slice_kind_from(const std::string& s) {
    if (s == "Diagonal") return SliceKind::Diagonal;
    if (s == "CriticalCubic") return SliceKind::CriticalCubic;
    if (s == "ComplexLine") return SliceKind::ComplexLine;
    if (s == "RealPlane") return SliceKind::RealPlane;
    throw ConfigError("slice.kind: unknown kind '" + s + "'");
}

inline ImageFormat format_from(const std::string& s) {
    if (s == "PPM") return ImageFormat::PPM;
    if (s == "PNG") return ImageFormat::PNG;
    throw ConfigError("format: expected PPM or PNG, got '" + s + "'");
}

}  // namespace detail

inline const char* to_string(SliceKind k) {
    switch (k) {
        case SliceKind::Diagonal: return "Diagonal";
        case SliceKind::CriticalCubic: return "CriticalCubic";
        case SliceKind::ComplexLine: return "ComplexLine";
        case SliceKind::RealPlane: return "RealPlane";
    }
    return "?";
}

inline const char* to_string(ImageFormat f) { return f == ImageFormat::PNG ? "PNG" : "PPM"; }

inline RenderJob parse_job(const std::string& text) {
    using detail::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    RenderJob job;
    try {
        detail::reject_unknown(doc,
                               {"fn", "roots", "root_window", "slice", "resolution", "budget", "contour_levels",
                                "palette", "out_path", "format"},
                               "config");
        if (!doc.contains("fn")) throw ConfigError("missing field 'fn'");
        job.fn = doc.at("fn").get<std::string>();
        if (doc.contains("roots"))
            for (const auto& r : doc.at("roots")) job.root_guesses.push_back(detail::complex_from(r, "roots"));
        if (doc.contains("root_window")) job.root_window = detail::window_from(doc.at("root_window"), "root_window");

        RenderConfig& c = job.config;
        if (!doc.contains("slice")) throw ConfigError("missing field 'slice'");
        const json& s = doc.at("slice");
        detail::reject_unknown(s, {"kind", "window", "base", "direction"}, "slice");
        auto need = [&s](const char* key) -> const json& {
            if (!s.contains(key)) throw ConfigError(std::string("missing field 'slice.") + key + "'");
            return s.at(key);
        };
        c.slice.kind = detail::slice_kind_from(need("kind").get<std::string>());
        c.slice.window = detail::window_from(need("window"), "slice.window");
        if (c.slice.kind == SliceKind::ComplexLine) {
            c.slice.base = detail::point_from(need("base"), "slice.base");
            c.slice.direction = detail::point_from(need("direction"), "slice.direction");
        }
        if (doc.contains("resolution")) {
            const json& r = doc.at("resolution");
            if (!r.is_array() || r.size() != 2) throw ConfigError("resolution: expected [width, height]");
            c.width = r[0].get<int>();
            c.height = r[1].get<int>();
        }
        if (doc.contains("budget")) c.budget = doc.at("budget").get<int>();
        if (doc.contains("contour_levels")) c.contour_levels = doc.at("contour_levels").get<std::vector<double>>();
        if (doc.contains("palette")) c.palette = doc.at("palette").get<std::vector<double>>();
        if (doc.contains("out_path")) c.out_path = doc.at("out_path").get<std::string>();
        if (doc.contains("format")) c.format = detail::format_from(doc.at("format").get<std::string>());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field has the wrong type: ") + e.what());
    }
    validate(job.config);
    return job;
}

inline RenderJob load_job(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_job(ss.str());
}

inline std::string job_to_json(const RenderJob& job) {
    using detail::json;
    const RenderConfig& c = job.config;
    json slice{{"kind", to_string(c.slice.kind)},
               {"window", {c.slice.window.re_min, c.slice.window.re_max, c.slice.window.im_min, c.slice.window.im_max}}};
    if (c.slice.kind == SliceKind::ComplexLine) {
        slice["base"] = {format_complex(c.slice.base.x), format_complex(c.slice.base.y)};
        slice["direction"] = {format_complex(c.slice.direction.x), format_complex(c.slice.direction.y)};
    }
    json doc{{"fn", job.fn},
             {"root_window", {job.root_window.re_min, job.root_window.re_max, job.root_window.im_min, job.root_window.im_max}},
             {"slice", slice},
             {"resolution", {c.width, c.height}},
             {"budget", c.budget},
             {"contour_levels", c.contour_levels},
             {"palette", c.palette},
             {"out_path", c.out_path},
             {"format", to_string(c.format)}};
    if (!job.root_guesses.empty()) {
        json roots = json::array();
        for (Complex z : job.root_guesses) roots.push_back(format_complex(z));
        doc["roots"] = roots;
    }
    return doc.dump(2);
}

// Roots for a job: certified guesses in the given order, else a window search.
inline std::vector<RootInfo> job_roots(const MeroFn& f, const RenderJob& job) {
    if (job.root_guesses.empty()) return find_roots(f, job.root_window);
    std::vector<RootInfo> out;
    for (Complex g : job.root_guesses) {
        RootInfo r = certify_root(f, g);
        bool dup = false;
        for (const auto& o : out) dup = dup || std::abs(o.z0 - r.z0) <= 1e-10 * std::max(1.0, std::abs(r.z0));
        if (!dup) out.push_back(r);
    }
    return out;
}

}  // namespace secdyn
