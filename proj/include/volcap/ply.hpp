#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "volcap/error.hpp"
#include "volcap/mesh.hpp"

namespace volcap {

/// Writes the mesh as ASCII PLY: position, RGB and an 8-bit alpha per vertex,
/// plus the triangle list. Invalid grid slots are omitted and indices
/// remapped densely. Output is byte-deterministic for a given mesh.
inline void export_ply(const GridMesh& mesh, std::ostream& out) {
    std::vector<std::int32_t> remap(mesh.vertices.size(), -1);
    std::int32_t next = 0;
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
        if (mesh.vertices[i].valid) remap[i] = next++;

    out << "ply\n"
        << "format ascii 1.0\n"
        << "element vertex " << next << "\n"
        << "property float x\n"
        << "property float y\n"
        << "property float z\n"
        << "property uchar red\n"
        << "property uchar green\n"
        << "property uchar blue\n"
        << "property uchar alpha\n"
        << "element face " << mesh.triangles.size() << "\n"
        << "property list uchar int vertex_indices\n"
        << "end_header\n";

    char line[160];
    for (const GridVertex& v : mesh.vertices) {
        if (!v.valid) continue;
        const int alpha = static_cast<int>(std::lround(v.alpha * 255.0f));
        std::snprintf(line, sizeof(line), "%.9g %.9g %.9g %d %d %d %d\n", v.position.x(),
                      v.position.y(), v.position.z(), v.rgb[0], v.rgb[1], v.rgb[2], alpha);
        out << line;
    }
    for (const auto& t : mesh.triangles) {
        std::snprintf(line, sizeof(line), "3 %d %d %d\n", remap[t[0]], remap[t[1]], remap[t[2]]);
        out << line;
    }
}

inline void export_ply(const GridMesh& mesh, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    export_ply(mesh, out);
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace volcap
