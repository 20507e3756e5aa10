#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "volcap/error.hpp"

namespace volcap {

/// Paired 3D points (meters): a[i] in the source frame matches b[i] in the
/// target frame. At least 3 pairs are required for a rigid fit.
struct CorrespondenceSet {
    std::vector<Eigen::Vector3d> a;
    std::vector<Eigen::Vector3d> b;

    std::size_t size() const { return a.size(); }

    void add(const Eigen::Vector3d& pa, const Eigen::Vector3d& pb) {
        a.push_back(pa);
        b.push_back(pb);
    }

    void validate() const {
        if (a.size() != b.size())
            throw ValidationError("correspondences: " + std::to_string(a.size()) +
                                  " source points vs " + std::to_string(b.size()) + " targets");
        if (a.size() < 3)
            throw ArityError("correspondences: need at least 3 pairs, got " +
                             std::to_string(a.size()));
    }
};

/// Parses "ax,ay,az,bx,by,bz" lines (meters). Blank lines are skipped.
inline CorrespondenceSet parse_correspondences(std::istream& in) {
    CorrespondenceSet set;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        std::istringstream row(line);
        double v[6];
        char comma;
        for (int i = 0; i < 6; ++i) {
            if (!(row >> v[i]))
                throw FormatError("correspondences line " + std::to_string(line_no) +
                                  ": expected 6 comma-separated numbers");
            if (i < 5 && !(row >> comma))
                throw FormatError("correspondences line " + std::to_string(line_no) +
                                  ": expected 6 comma-separated numbers");
        }
        set.add({v[0], v[1], v[2]}, {v[3], v[4], v[5]});
    }
    set.validate();
    return set;
}

inline CorrespondenceSet load_correspondences(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open correspondences: " + path);
    return parse_correspondences(in);
}

}  // namespace volcap
