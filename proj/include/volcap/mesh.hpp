#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "volcap/error.hpp"
#include "volcap/frame.hpp"
#include "volcap/projection.hpp"

namespace volcap {

/// Two 3D points closer than this are considered connected; triangle edges at
/// or beyond it are cut. Meters.
inline constexpr double kConnectivityThreshold = 0.1;

struct GridVertex {
    Eigen::Vector3d position{0, 0, 0};  // meters, camera space
    std::array<std::uint8_t, 3> rgb{0, 0, 0};
    float alpha = 0.0f;  // k/8 feather weight, 1 for interior vertices
    bool valid = false;
};

/// Triangle mesh over the depth grid. Vertices stay in row-major grid order
/// (rows x cols, including invalid slots); triangles index into that grid and
/// only ever reference valid vertices.
struct GridMesh {
    int rows = 0;
    int cols = 0;
    std::vector<GridVertex> vertices;
    std::vector<std::array<std::int32_t, 3>> triangles;

    const GridVertex& at(int row, int col) const {
        return vertices[static_cast<std::size_t>(row) * cols + col];
    }
    GridVertex& at(int row, int col) {
        return vertices[static_cast<std::size_t>(row) * cols + col];
    }
    std::int32_t index(int row, int col) const { return row * cols + col; }
};

namespace detail {

inline bool connected(const GridVertex& a, const GridVertex& b) {
    // Squared compare: one sqrt per vertex-pair adds up to milliseconds per
    // frame at full resolution.
    return (a.position - b.position).squaredNorm() <
           kConnectivityThreshold * kConnectivityThreshold;
}

}  // namespace detail

/// Builds the vertex grid and triangulation for one frame pair using a
/// precomputed projection table (table dimensions must match the depth
/// image). Each quad splits along its top-left to bottom-right diagonal; a
/// triangle is emitted only when all three vertices are valid and pairwise
/// closer than the connectivity threshold.
inline GridMesh build_grid_mesh(const FramePair& pair, const ProjectionTable& table) {
    const DepthFrame& depth = pair.depth();
    const ColorFrame& color = pair.color();
    if (table.rows() != depth.height || table.cols() != depth.width)
        throw ShapeError("build_grid_mesh: depth image is " + std::to_string(depth.width) + "x" +
                         std::to_string(depth.height) + " but the projection table was built for " +
                         std::to_string(table.cols()) + "x" + std::to_string(table.rows()));

    GridMesh mesh;
    mesh.rows = depth.height;
    mesh.cols = depth.width;
    mesh.vertices.resize(static_cast<std::size_t>(mesh.rows) * mesh.cols);

    for (int i = 0; i < mesh.rows; ++i) {
        for (int j = 0; j < mesh.cols; ++j) {
            GridVertex& v = mesh.at(i, j);
            const std::uint16_t d = table.depth_at(depth, i, j);
            if (d == kInvalidDepth) continue;
            v.valid = true;
            v.position = table.vertex_at(i, j, d);
            v.rgb = table.color_at(color, i, j).rgb;
            v.alpha = 1.0f;
        }
    }

    mesh.triangles.reserve(static_cast<std::size_t>(mesh.rows - 1) * (mesh.cols - 1) * 2);
    for (int i = 0; i + 1 < mesh.rows; ++i) {
        for (int j = 0; j + 1 < mesh.cols; ++j) {
            const GridVertex& tl = mesh.at(i, j);
            const GridVertex& tr = mesh.at(i, j + 1);
            const GridVertex& bl = mesh.at(i + 1, j);
            const GridVertex& br = mesh.at(i + 1, j + 1);
            const std::int32_t itl = mesh.index(i, j);
            const std::int32_t itr = mesh.index(i, j + 1);
            const std::int32_t ibl = mesh.index(i + 1, j);
            const std::int32_t ibr = mesh.index(i + 1, j + 1);
            // Diagonal runs top-left to bottom-right in both triangles.
            if (tl.valid && tr.valid && br.valid && detail::connected(tl, tr) &&
                detail::connected(tr, br) && detail::connected(tl, br))
                mesh.triangles.push_back({itl, itr, ibr});
            if (tl.valid && br.valid && bl.valid && detail::connected(tl, br) &&
                detail::connected(br, bl) && detail::connected(tl, bl))
                mesh.triangles.push_back({itl, ibr, ibl});
        }
    }
    return mesh;
}

/// Convenience overload that builds the projection table on the fly.
inline GridMesh build_grid_mesh(const FramePair& pair, const CameraModel& model) {
    ProjectionTable table(pair.depth().height, pair.depth().width, model);
    return build_grid_mesh(pair, table);
}

namespace detail {

/// Count of the (up to 8) surrounding vertices that are valid and within the
/// connectivity threshold, plus their centroid. Neighbor order follows the
/// grid clockwise from the top-left.
inline int neighbor_stats(const GridMesh& mesh, int row, int col, Eigen::Vector3d* centroid) {
    static constexpr int offsets[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, 1},
                                          {1, 1},   {1, 0},  {1, -1}, {0, -1}};
    const GridVertex& v = mesh.at(row, col);
    int count = 0;
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (const auto& off : offsets) {
        const int r = row + off[0];
        const int c = col + off[1];
        if (r < 0 || r >= mesh.rows || c < 0 || c >= mesh.cols) continue;
        const GridVertex& n = mesh.at(r, c);
        if (!n.valid || !connected(v, n)) continue;
        ++count;
        sum += n.position;
    }
    if (centroid && count > 0) *centroid = sum / count;
    return count;
}

}  // namespace detail

/// Pulls boundary vertices toward the surviving surface to soften ragged
/// silhouettes. A vertex with all 8 neighbors present is interior and stays
/// put; one with no neighbors has no direction to move in. Every other vertex
/// moves half the local grid spacing toward the centroid of its present
/// neighbors, with the displacement projected parallel to the surface (the
/// depth component is preserved). docs/edge-refinement.md tabulates the
/// per-neighbor-count cases this rule produces. Positions change; validity,
/// color, alpha and the triangle list do not. All displacements are computed
/// from the input mesh, so evaluation order cannot matter.
inline GridMesh refine_edge_vertices(const GridMesh& mesh) {
    GridMesh out = mesh;
    for (int i = 0; i < mesh.rows; ++i) {
        for (int j = 0; j < mesh.cols; ++j) {
            const GridVertex& v = mesh.at(i, j);
            if (!v.valid) continue;
            Eigen::Vector3d centroid;
            const int count = detail::neighbor_stats(mesh, i, j, &centroid);
            if (count == 0 || count == 8) continue;

            Eigen::Vector3d dir = centroid - v.position;
            dir.z() = 0.0;  // parallel to the surface: depth stays
            const double len = dir.norm();
            if (len == 0.0) continue;  // symmetric neighborhood, nowhere to go

            const double z = v.position.z();
            const double spacing = 0.5 * (z / (mesh.cols - 1) + z / (mesh.rows - 1));
            out.at(i, j).position = v.position + dir * (0.5 * spacing / len);
        }
    }
    return out;
}

/// Feathering: alpha = (valid in-range neighbors) / 8, so silhouette vertices
/// fade out. Interior vertices get 1, isolated ones 0.
inline GridMesh feather_alpha(const GridMesh& mesh) {
    GridMesh out = mesh;
    for (int i = 0; i < mesh.rows; ++i) {
        for (int j = 0; j < mesh.cols; ++j) {
            const GridVertex& v = mesh.at(i, j);
            if (!v.valid) continue;
            const int count = detail::neighbor_stats(mesh, i, j, nullptr);
            out.at(i, j).alpha = static_cast<float>(count) / 8.0f;
        }
    }
    return out;
}

/// Drops every triangle with an edge at or beyond the connectivity threshold.
/// Run after refinement, which can stretch edges that used to be short.
inline GridMesh prune_long_triangles(const GridMesh& mesh) {
    GridMesh out = mesh;
    out.triangles.clear();
    constexpr double limit_sq = kConnectivityThreshold * kConnectivityThreshold;
    for (const auto& t : mesh.triangles) {
        const Eigen::Vector3d& a = mesh.vertices[t[0]].position;
        const Eigen::Vector3d& b = mesh.vertices[t[1]].position;
        const Eigen::Vector3d& c = mesh.vertices[t[2]].position;
        if ((a - b).squaredNorm() < limit_sq && (b - c).squaredNorm() < limit_sq &&
            (a - c).squaredNorm() < limit_sq)
            out.triangles.push_back(t);
    }
    return out;
}

/// The full per-frame mesh chain: build, refine edges, feather, prune.
inline GridMesh build_enhanced_mesh(const FramePair& pair, const ProjectionTable& table) {
    return prune_long_triangles(feather_alpha(refine_edge_vertices(build_grid_mesh(pair, table))));
}

}  // namespace volcap
