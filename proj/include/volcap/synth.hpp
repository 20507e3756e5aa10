#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "volcap/camera.hpp"
#include "volcap/error.hpp"
#include "volcap/frame.hpp"
#include "volcap/rng.hpp"

namespace volcap {

enum class SceneGeometry : std::uint8_t { flat_plane, step_edge, sphere_on_plane };

inline const char* to_string(SceneGeometry g) {
    switch (g) {
        case SceneGeometry::flat_plane: return "flat_plane";
        case SceneGeometry::step_edge: return "step_edge";
        case SceneGeometry::sphere_on_plane: return "sphere_on_plane";
    }
    return "?";
}

inline SceneGeometry scene_geometry_from_string(const std::string& s) {
    if (s == "flat_plane") return SceneGeometry::flat_plane;
    if (s == "step_edge") return SceneGeometry::step_edge;
    if (s == "sphere_on_plane") return SceneGeometry::sphere_on_plane;
    throw FormatError("scene config: unknown geometry \"" + s + "\"");
}

/// Correlated dropout: with probability `rate` per frame, a random rectangle
/// covering `fraction` of each image dimension goes invalid at once.
struct BurstDropout {
    double rate = 0.0;
    double fraction = 0.25;
};

struct SceneNoise {
    double gaussian_sigma_mm = 0.0;
    double dropout_rate = 0.0;
    std::optional<BurstDropout> burst;
};

/// A deterministic synthetic capture: geometry, motion, sensor noise, seed.
struct SceneSpec {
    SceneGeometry geometry = SceneGeometry::flat_plane;
    double base_depth_mm = 1000.0;
    double drift_mm_per_frame = 0.0;  // whole scene slides away per frame
    double step_offset_mm = 300.0;    // step_edge: extra depth of the right half
    double sphere_radius_mm = 150.0;  // sphere_on_plane: ball on the optical axis
    SceneNoise noise;
    int frames = 60;
    double fps = 30.0;
    std::uint64_t seed = 0;
    int depth_width = 320;
    int depth_height = 288;
    int color_width = 320;
    int color_height = 288;
};

namespace detail {

/// Depth (mm) the pinhole ray through pixel (u, v) reads off the geometry.
/// Scenes are rendered through the pinhole part of the model only; lens
/// distortion belongs to the reconstruction side, not to frame synthesis.
inline double scene_depth_mm(const SceneSpec& spec, const CameraIntrinsics& s, int u, int v,
                             double base_mm) {
    const double xn = (u - s.cx) / s.fx;  // ray direction at unit depth
    const double yn = (v - s.cy) / s.fy;
    switch (spec.geometry) {
        case SceneGeometry::flat_plane:
            return base_mm;
        case SceneGeometry::step_edge:
            return xn < 0.0 ? base_mm : base_mm + spec.step_offset_mm;
        case SceneGeometry::sphere_on_plane: {
            // Sphere of radius r centered on the axis at the base depth;
            // plane behind it. Depth value is the hit's Z component.
            const double r_m = spec.sphere_radius_mm * 1e-3;
            const double base_m = base_mm * 1e-3;
            const Eigen::Vector3d dir = Eigen::Vector3d(xn, yn, 1.0).normalized();
            const Eigen::Vector3d center(0.0, 0.0, base_m);
            const double b = dir.dot(center);
            const double disc = b * b - center.squaredNorm() + r_m * r_m;
            if (disc >= 0.0) {
                const double s_hit = b - std::sqrt(disc);
                if (s_hit > 0.0) return s_hit * dir.z() * 1000.0;
            }
            return base_mm;
        }
    }
    return base_mm;
}

}  // namespace detail

/// Renders frame `index` of the scene. Pure function of (spec, model, index):
/// the same triple gives bit-identical frames on any platform (fixed RNG, see
/// docs/determinism.md). Noise draws go pixel by pixel in row-major order,
/// Gaussian before dropout; noisy depth clamps to [1, 65535] so noise alone
/// never fabricates the invalid value 0.
inline FramePair generate_frame(const SceneSpec& spec, const CameraModel& model, int index) {
    const std::uint64_t ts_us =
        static_cast<std::uint64_t>(std::llround(index * 1'000'000.0 / spec.fps));
    const auto frame_no = static_cast<std::uint32_t>(index);
    DepthFrame depth(frame_no, ts_us, static_cast<std::uint16_t>(spec.depth_width),
                     static_cast<std::uint16_t>(spec.depth_height));
    ColorFrame color(frame_no, ts_us, static_cast<std::uint16_t>(spec.color_width),
                     static_cast<std::uint16_t>(spec.color_height));

    const double base_mm = spec.base_depth_mm + spec.drift_mm_per_frame * index;
    auto rng = make_rng(spec.seed, static_cast<std::uint64_t>(index));

    const bool noisy = spec.noise.gaussian_sigma_mm > 0.0;
    const bool drops = spec.noise.dropout_rate > 0.0;
    for (int v = 0; v < spec.depth_height; ++v) {
        for (int u = 0; u < spec.depth_width; ++u) {
            double d = detail::scene_depth_mm(spec, model.depth, u, v, base_mm);
            if (noisy) d += gaussian(rng) * spec.noise.gaussian_sigma_mm;
            std::uint16_t value =
                static_cast<std::uint16_t>(std::clamp(std::lround(d), 1L, 65535L));
            if (drops && uniform01(rng) < spec.noise.dropout_rate) value = kInvalidDepth;
            depth.at(v, u) = value;
        }
    }

    if (spec.noise.burst && uniform01(rng) < spec.noise.burst->rate) {
        const int bw = std::max(1, static_cast<int>(spec.depth_width * spec.noise.burst->fraction));
        const int bh = std::max(1, static_cast<int>(spec.depth_height * spec.noise.burst->fraction));
        const int u0 = static_cast<int>(uniform01(rng) * (spec.depth_width - bw));
        const int v0 = static_cast<int>(uniform01(rng) * (spec.depth_height - bh));
        for (int v = v0; v < v0 + bh; ++v)
            for (int u = u0; u < u0 + bw; ++u) depth.at(v, u) = kInvalidDepth;
    }

    // Color: a cheap deterministic gradient; enough to exercise sampling and
    // make exported meshes inspectable.
    for (int v = 0; v < spec.color_height; ++v) {
        for (int u = 0; u < spec.color_width; ++u) {
            std::uint8_t* px = color.rgb(v, u);
            px[0] = static_cast<std::uint8_t>(u * 255 / std::max(1, spec.color_width - 1));
            px[1] = static_cast<std::uint8_t>(v * 255 / std::max(1, spec.color_height - 1));
            px[2] = static_cast<std::uint8_t>(index & 0xFF);
        }
    }

    return FramePair(std::move(depth), std::move(color));
}

inline std::vector<FramePair> generate_scene(const SceneSpec& spec, const CameraModel& model) {
    std::vector<FramePair> pairs;
    pairs.reserve(static_cast<std::size_t>(spec.frames));
    for (int i = 0; i < spec.frames; ++i) pairs.push_back(generate_frame(spec, model, i));
    return pairs;
}

inline SceneSpec parse_scene_spec(const nlohmann::json& j) {
    SceneSpec spec;
    if (j.contains("geometry"))
        spec.geometry = scene_geometry_from_string(j.at("geometry").get<std::string>());
    spec.base_depth_mm = j.value("base_depth_mm", spec.base_depth_mm);
    spec.drift_mm_per_frame = j.value("drift_mm_per_frame", spec.drift_mm_per_frame);
    spec.step_offset_mm = j.value("step_offset_mm", spec.step_offset_mm);
    spec.sphere_radius_mm = j.value("sphere_radius_mm", spec.sphere_radius_mm);
    spec.frames = j.value("frames", spec.frames);
    spec.fps = j.value("fps", spec.fps);
    spec.seed = j.value("seed", spec.seed);
    spec.depth_width = j.value("depth_width", spec.depth_width);
    spec.depth_height = j.value("depth_height", spec.depth_height);
    spec.color_width = j.value("color_width", spec.color_width);
    spec.color_height = j.value("color_height", spec.color_height);
    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        spec.noise.gaussian_sigma_mm = n.value("gaussian_sigma_mm", 0.0);
        spec.noise.dropout_rate = n.value("dropout_rate", 0.0);
        if (n.contains("burst")) {
            BurstDropout b;
            b.rate = n.at("burst").value("rate", 0.0);
            b.fraction = n.at("burst").value("fraction", 0.25);
            spec.noise.burst = b;
        }
    }
    if (spec.frames < 1) throw ValidationError("scene config: frames must be >= 1");
    if (spec.depth_width < 2 || spec.depth_height < 2)
        throw ValidationError("scene config: depth resolution must be at least 2x2");
    return spec;
}

inline SceneSpec load_scene_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scene config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("scene config " + path + ": " + e.what());
    }
    return parse_scene_spec(j);
}

inline nlohmann::json scene_spec_to_json(const SceneSpec& spec) {
    nlohmann::json j{{"geometry", to_string(spec.geometry)},
                     {"base_depth_mm", spec.base_depth_mm},
                     {"drift_mm_per_frame", spec.drift_mm_per_frame},
                     {"frames", spec.frames},
                     {"fps", spec.fps},
                     {"seed", spec.seed},
                     {"depth_width", spec.depth_width},
                     {"depth_height", spec.depth_height},
                     {"color_width", spec.color_width},
                     {"color_height", spec.color_height},
                     {"noise",
                      {{"gaussian_sigma_mm", spec.noise.gaussian_sigma_mm},
                       {"dropout_rate", spec.noise.dropout_rate}}}};
    if (spec.geometry == SceneGeometry::step_edge) j["step_offset_mm"] = spec.step_offset_mm;
    if (spec.geometry == SceneGeometry::sphere_on_plane)
        j["sphere_radius_mm"] = spec.sphere_radius_mm;
    if (spec.noise.burst)
        j["noise"]["burst"] = {{"rate", spec.noise.burst->rate},
                               {"fraction", spec.noise.burst->fraction}};
    return j;
}

}  // namespace volcap
