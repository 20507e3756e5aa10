#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "volcap/camera.hpp"
#include "volcap/error.hpp"
#include "volcap/frame.hpp"

namespace volcap {

// The reconstruction grid: one ray per depth pixel. Row i, column j of an
// rows x cols grid maps to the unit-depth point
//   X = j/(cols-1) - 0.5,  Y = 0.5 - i/(rows-1),  Z = 1
// so X and Y each span [-0.5, 0.5] and row 0 is the top of the image.
struct GridPoint {
    double x = 0;  // X coordinate on the Z=1 plane
    double y = 0;
    int row = 0;
    int col = 0;

    static GridPoint from_indices(int row, int col, int rows, int cols) {
        GridPoint p;
        p.row = row;
        p.col = col;
        p.x = static_cast<double>(col) / (cols - 1) - 0.5;
        p.y = 0.5 - static_cast<double>(row) / (rows - 1);
        return p;
    }
};

/// Applies rational radial + tangential distortion to normalized coordinates.
inline Eigen::Vector2d distort_point(double x, double y, const DistortionModel& d) {
    const double r2 = x * x + y * y;
    const double r4 = r2 * r2;
    const double r6 = r4 * r2;
    const double num = 1.0 + d.k1 * r2 + d.k2 * r4 + d.k3 * r6;
    const double den = 1.0 + d.k4 * r2 + d.k5 * r4 + d.k6 * r6;
    if (std::abs(den) < 1e-12)
        throw SingularityError("distortion denominator vanished at r^2 = " + std::to_string(r2));
    const double radial = num / den;
    const double xd = x * radial + 2.0 * d.p1 * x * y + d.p2 * (r2 + 2.0 * x * x);
    const double yd = y * radial + d.p1 * (r2 + 2.0 * y * y) + 2.0 * d.p2 * x * y;
    return {xd, yd};
}

/// Distorted normalized coordinates to pixel coordinates.
inline Eigen::Vector2d project_to_pixel(double xd, double yd, const CameraIntrinsics& s) {
    return {s.fx * xd + s.cx, s.fy * yd + s.cy};
}

/// Exact inverse of project_to_pixel (pinhole part only; no undistortion).
inline Eigen::Vector2d unproject_pixel(double u, double v, const CameraIntrinsics& s) {
    return {(u - s.cx) / s.fx, (v - s.cy) / s.fy};
}

/// Nearest-integer pixel for a depth lookup. Half-integer coordinates exactly
/// on the far image edge (u = width - 0.5) round down so they stay in range;
/// anything else outside [0, width) x [0, height) is out of image (false).
inline bool round_to_pixel(double u, double v, int width, int height, int& ui, int& vi) {
    double uf = (u == width - 0.5) ? width - 1.0 : std::floor(u + 0.5);
    double vf = (v == height - 0.5) ? height - 1.0 : std::floor(v + 0.5);
    if (uf < 0 || uf >= width || vf < 0 || vf >= height) return false;
    ui = static_cast<int>(uf);
    vi = static_cast<int>(vf);
    return true;
}

/// Depth (millimeters) the grid ray reads from the sensor image, after lens
/// distortion and projection with the depth intrinsics. 0 = invalid (ray
/// projects outside the image, or the sensor reading itself is invalid).
inline std::uint16_t lookup_depth(const GridPoint& p, const DepthFrame& depth,
                                  const CameraModel& model) {
    const Eigen::Vector2d d = distort_point(p.x, p.y, model.depth.distortion);
    const Eigen::Vector2d uv = project_to_pixel(d.x(), d.y(), model.depth);
    int ui, vi;
    if (!round_to_pixel(uv.x(), uv.y(), depth.width, depth.height, ui, vi)) return kInvalidDepth;
    return depth.at(vi, ui);
}

struct ColorSample {
    std::array<std::uint8_t, 3> rgb{0, 0, 0};
    bool clamped = false;  // sample point fell outside the image and was edge-clamped
};

/// Bilinear interpolation at (u, v) with pixel centers on integer coordinates.
/// Out-of-image coordinates clamp to the nearest edge pixel and set `clamped`.
inline ColorSample bilinear_sample(const ColorFrame& img, double u, double v) {
    ColorSample out;
    out.clamped = (u < 0.0 || u > img.width - 1.0 || v < 0.0 || v > img.height - 1.0);
    const double uc = std::clamp(u, 0.0, static_cast<double>(img.width - 1));
    const double vc = std::clamp(v, 0.0, static_cast<double>(img.height - 1));
    const int x0 = static_cast<int>(std::floor(uc));
    const int y0 = static_cast<int>(std::floor(vc));
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fx = uc - x0;
    const double fy = vc - y0;
    const std::uint8_t* p00 = img.rgb(y0, x0);
    const std::uint8_t* p10 = img.rgb(y0, x1);
    const std::uint8_t* p01 = img.rgb(y1, x0);
    const std::uint8_t* p11 = img.rgb(y1, x1);
    for (int c = 0; c < 3; ++c) {
        const double top = p00[c] * (1.0 - fx) + p10[c] * fx;
        const double bottom = p01[c] * (1.0 - fx) + p11[c] * fx;
        const double value = top * (1.0 - fy) + bottom * fy;
        out.rgb[c] = static_cast<std::uint8_t>(std::lround(value));
    }
    return out;
}

/// Pixel coordinates in the color image for a grid ray: color-lens distortion
/// on the unit-plane point, extrinsic transform into the color camera,
/// perspective divide, then color intrinsics.
inline Eigen::Vector2d color_pixel_for_grid_point(const GridPoint& p, const CameraModel& model) {
    const Eigen::Vector2d d = distort_point(p.x, p.y, model.color.distortion);
    const Eigen::Vector3d pc = model.color_extrinsics.apply({d.x(), d.y(), 1.0});
    if (std::abs(pc.z()) < 1e-12)
        throw SingularityError("color projection: point lies on the camera plane (z = 0)");
    return project_to_pixel(pc.x() / pc.z(), pc.y() / pc.z(), model.color);
}

/// Color for a grid ray whose depth reading d (millimeters) is valid.
inline ColorSample lookup_color(const GridPoint& p, std::uint16_t d, const ColorFrame& color,
                                const CameraModel& model) {
    if (d == kInvalidDepth)
        throw ValidationError("lookup_color: depth must be valid");
    const Eigen::Vector2d uv = color_pixel_for_grid_point(p, model);
    return bilinear_sample(color, uv.x(), uv.y());
}

/// World-space vertex (meters) for grid point P at depth d millimeters:
/// (X, Y, 1) scaled by d, millimeters to meters.
inline Eigen::Vector3d grid_vertex_world(const GridPoint& p, std::uint16_t d_mm) {
    const double d = static_cast<double>(d_mm) * 1e-3;
    return {p.x * d, p.y * d, d};
}

/// Precomputed per-grid-point pixel coordinates. The grid is static for a
/// given camera model and resolution, so the distortion/projection work can
/// be done once and reused for every frame. Purely an optimization: results
/// are identical to calling lookup_depth / lookup_color directly.
class ProjectionTable {
public:
    ProjectionTable(int rows, int cols, const CameraModel& model)
        : rows_(rows), cols_(cols), entries_(static_cast<std::size_t>(rows) * cols) {
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < cols; ++j) {
                const GridPoint p = GridPoint::from_indices(i, j, rows, cols);
                Entry& e = entries_[static_cast<std::size_t>(i) * cols + j];
                const Eigen::Vector2d dd = distort_point(p.x, p.y, model.depth.distortion);
                const Eigen::Vector2d duv = project_to_pixel(dd.x(), dd.y(), model.depth);
                e.depth_in_image = round_to_pixel(duv.x(), duv.y(), cols, rows, e.du, e.dv);
                const Eigen::Vector2d cuv = color_pixel_for_grid_point(p, model);
                e.cu = cuv.x();
                e.cv = cuv.y();
                e.x = p.x;
                e.y = p.y;
            }
        }
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    std::uint16_t depth_at(const DepthFrame& depth, int row, int col) const {
        const Entry& e = entry(row, col);
        if (!e.depth_in_image) return kInvalidDepth;
        return depth.at(e.dv, e.du);
    }

    ColorSample color_at(const ColorFrame& color, int row, int col) const {
        const Entry& e = entry(row, col);
        return bilinear_sample(color, e.cu, e.cv);
    }

    Eigen::Vector3d vertex_at(int row, int col, std::uint16_t d_mm) const {
        const Entry& e = entry(row, col);
        const double d = static_cast<double>(d_mm) * 1e-3;
        return {e.x * d, e.y * d, d};
    }

private:
    struct Entry {
        double x, y;    // grid coordinates on the Z=1 plane
        double cu, cv;  // color image sample point
        int du, dv;     // depth image pixel, valid when depth_in_image
        bool depth_in_image;
    };

    const Entry& entry(int row, int col) const {
        return entries_[static_cast<std::size_t>(row) * cols_ + col];
    }

    int rows_, cols_;
    std::vector<Entry> entries_;
};

}  // namespace volcap
