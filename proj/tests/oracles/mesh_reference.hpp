#pragma once

// Exhaustive per-vertex / per-triangle oracles for the grid mesh code,
// written with plain index arithmetic instead of the library's helpers.

#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "volcap/mesh.hpp"

namespace oracle {

inline double ref_dist(const volcap::GridVertex& a, const volcap::GridVertex& b) {
    const double dx = a.position.x() - b.position.x();
    const double dy = a.position.y() - b.position.y();
    const double dz = a.position.z() - b.position.z();
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Number of the up-to-8 surrounding vertices that are valid and strictly
/// inside the connectivity threshold.
inline int ref_neighbor_count(const volcap::GridMesh& mesh, int row, int col) {
    int count = 0;
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const int r = row + dr, c = col + dc;
            if (r < 0 || r >= mesh.rows || c < 0 || c >= mesh.cols) continue;
            const volcap::GridVertex& n = mesh.vertices[std::size_t(r) * mesh.cols + c];
            if (!n.valid) continue;
            if (ref_dist(mesh.vertices[std::size_t(row) * mesh.cols + col], n) <
                volcap::kConnectivityThreshold)
                ++count;
        }
    }
    return count;
}

/// The set of triangles that should survive, derived straight from the rule:
/// each quad splits along its top-left/bottom-right diagonal, and a triangle
/// exists iff its three corners are valid and pairwise closer than the
/// threshold. Triangles are canonicalized as sorted index triples.
inline std::set<std::array<std::int32_t, 3>> ref_triangle_set(const volcap::GridMesh& mesh) {
    std::set<std::array<std::int32_t, 3>> out;
    const auto vertex = [&](int r, int c) -> const volcap::GridVertex& {
        return mesh.vertices[std::size_t(r) * mesh.cols + c];
    };
    const auto close = [&](int r0, int c0, int r1, int c1) {
        return ref_dist(vertex(r0, c0), vertex(r1, c1)) < volcap::kConnectivityThreshold;
    };
    const auto idx = [&](int r, int c) { return std::int32_t(r * mesh.cols + c); };
    for (int r = 0; r + 1 < mesh.rows; ++r) {
        for (int c = 0; c + 1 < mesh.cols; ++c) {
            // upper: (r,c) (r,c+1) (r+1,c+1)
            if (vertex(r, c).valid && vertex(r, c + 1).valid && vertex(r + 1, c + 1).valid &&
                close(r, c, r, c + 1) && close(r, c + 1, r + 1, c + 1) &&
                close(r, c, r + 1, c + 1)) {
                std::array<std::int32_t, 3> t{idx(r, c), idx(r, c + 1), idx(r + 1, c + 1)};
                std::sort(t.begin(), t.end());
                out.insert(t);
            }
            // lower: (r,c) (r+1,c+1) (r+1,c)
            if (vertex(r, c).valid && vertex(r + 1, c + 1).valid && vertex(r + 1, c).valid &&
                close(r, c, r + 1, c + 1) && close(r + 1, c + 1, r + 1, c) &&
                close(r, c, r + 1, c)) {
                std::array<std::int32_t, 3> t{idx(r, c), idx(r + 1, c + 1), idx(r + 1, c)};
                std::sort(t.begin(), t.end());
                out.insert(t);
            }
        }
    }
    return out;
}

inline std::set<std::array<std::int32_t, 3>> canonical_triangles(const volcap::GridMesh& mesh) {
    std::set<std::array<std::int32_t, 3>> out;
    for (auto t : mesh.triangles) {
        std::sort(t.begin(), t.end());
        out.insert(t);
    }
    return out;
}

}  // namespace oracle
