#pragma once

#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "volcap/camera.hpp"
#include "volcap/error.hpp"

namespace volcap {

/// Named coordinate frames connected by rigid transforms. An edge (a, b, T)
/// declares p_b = T.apply(p_a). Queries may traverse edges backwards through
/// the inverse, and multi-edge paths compose edgewise. Adding an edge between
/// frames that are already connected checks the new edge against the existing
/// path, so every cycle in the graph stays identity within 1e-6.
class FrameGraph {
public:
    void add_edge(const std::string& from, const std::string& to, const RigidTransform& T) {
        if (from == to)
            throw ValidationError("frame graph: self edge at \"" + from + "\"");
        if (auto existing = find_path(from, to)) {
            if (!existing->approx_equal(T, kCycleTolerance))
                throw ValidationError("frame graph: edge " + from + " -> " + to +
                                      " disagrees with the existing path between them "
                                      "(cycle would not be identity within 1e-6)");
        }
        edges_[from].emplace_back(to, T);
        edges_[to].emplace_back(from, T.inverse());
        frames_.insert(from);
        frames_.insert(to);
    }

    bool has_frame(const std::string& name) const { return frames_.count(name) > 0; }

    /// Transform taking coordinates expressed in `from` to coordinates in `to`.
    RigidTransform transform(const std::string& from, const std::string& to) const {
        if (!has_frame(from)) throw PathError("frame graph: unknown frame \"" + from + "\"");
        if (!has_frame(to)) throw PathError("frame graph: unknown frame \"" + to + "\"");
        if (from == to) return RigidTransform::identity();
        if (auto T = find_path(from, to)) return *T;
        throw PathError("frame graph: no path from \"" + from + "\" to \"" + to + "\"");
    }

    /// Re-expresses a pose given in `from` coordinates in `to` coordinates.
    /// For a pose {R3, t3} against a single stored edge {R2, t2} (to -> from)
    /// this is the classic change of frame R1 = R2^-1 R3, t1 = R2^-1 (t3 - t2).
    RigidTransform change_of_frame(const RigidTransform& pose, const std::string& from,
                                   const std::string& to) const {
        return transform(from, to) * pose;
    }

private:
    static constexpr double kCycleTolerance = 1e-6;

    std::optional<RigidTransform> find_path(const std::string& from, const std::string& to) const {
        if (!has_frame(from) || !has_frame(to)) return std::nullopt;
        // BFS; comparing against the tolerance makes any consistent path as
        // good as any other.
        std::map<std::string, RigidTransform> reached;  // frame -> transform from `from`
        std::queue<std::string> frontier;
        reached.emplace(from, RigidTransform::identity());
        frontier.push(from);
        while (!frontier.empty()) {
            const std::string cur = frontier.front();
            frontier.pop();
            if (cur == to) return reached.at(cur);
            auto it = edges_.find(cur);
            if (it == edges_.end()) continue;
            for (const auto& [next, T] : it->second) {
                if (reached.count(next)) continue;
                reached.emplace(next, T * reached.at(cur));
                frontier.push(next);
            }
        }
        return std::nullopt;
    }

    std::map<std::string, std::vector<std::pair<std::string, RigidTransform>>> edges_;
    std::set<std::string> frames_;
};

/// Free-function form of FrameGraph::change_of_frame.
inline RigidTransform change_of_frame(const RigidTransform& pose, const std::string& from,
                                      const std::string& to, const FrameGraph& graph) {
    return graph.change_of_frame(pose, from, to);
}

}  // namespace volcap
