#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <string>
#include <vector>

#include "volcap/camera.hpp"
#include "volcap/correspondence.hpp"
#include "volcap/error.hpp"

namespace volcap {

/// Least-squares rigid transform (no scaling, no reflection) mapping the
/// source points onto the targets: minimizes sum |R a_i + t - b_i|^2.
///
/// Centroids are subtracted, the 3x3 cross covariance sum (a_i - mean_a)
/// (b_i - mean_b)^T is decomposed as U S V^T, and R = V U^T. When that
/// product is a reflection (det < 0), the column of V belonging to the
/// smallest singular value flips sign; singular values come out of the SVD
/// sorted descending, so with ties the fixed choice of the last column keeps
/// the result deterministic. t = mean_b - R mean_a.
inline RigidTransform fit_rigid(const CorrespondenceSet& corr) {
    corr.validate();
    const std::size_t n = corr.size();

    Eigen::Vector3d mean_a = Eigen::Vector3d::Zero();
    Eigen::Vector3d mean_b = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        mean_a += corr.a[i];
        mean_b += corr.b[i];
    }
    mean_a /= static_cast<double>(n);
    mean_b /= static_cast<double>(n);

    // Degenerate geometry check on the centered source points: a fit from
    // collinear (or coincident) points leaves a rotation axis free.
    Eigen::Matrix3Xd centered(3, static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) centered.col(static_cast<Eigen::Index>(i)) = corr.a[i] - mean_a;
    {
        Eigen::JacobiSVD<Eigen::Matrix3Xd> spread(centered);
        const auto& s = spread.singularValues();
        if (s(0) < 1e-12 || s(1) <= 1e-9 * s(0))
            throw RankError("fit_rigid: source points are collinear or coincident; "
                            "the rotation is underdetermined");
    }

    Eigen::Matrix3d cross = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < n; ++i)
        cross += (corr.a[i] - mean_a) * (corr.b[i] - mean_b).transpose();

    Eigen::JacobiSVD<Eigen::Matrix3d> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d U = svd.matrixU();
    Eigen::Matrix3d V = svd.matrixV();
    Eigen::Matrix3d R = V * U.transpose();
    if (R.determinant() < 0) {
        V.col(2) = -V.col(2);
        R = V * U.transpose();
    }

    return RigidTransform(R, mean_b - R * mean_a);
}

/// Sum of squared mapping errors of T over the correspondences (meters^2).
inline double residual(const CorrespondenceSet& corr, const RigidTransform& T) {
    double sum = 0.0;
    for (std::size_t i = 0; i < corr.size(); ++i)
        sum += (T.apply(corr.a[i]) - corr.b[i]).squaredNorm();
    return sum;
}

struct AlignmentStats {
    double mean_error_m = 0.0;
    double stddev_error_m = 0.0;  // population standard deviation
    std::vector<double> per_point_error_m;
};

/// Per-point Euclidean distance between where points should be and where the
/// fitted transform puts them, summarized as mean and population stddev.
inline AlignmentStats evaluate_alignment(const std::vector<Eigen::Vector3d>& expected,
                                         const std::vector<Eigen::Vector3d>& mapped) {
    if (expected.size() != mapped.size())
        throw ValidationError("evaluate_alignment: " + std::to_string(expected.size()) +
                              " expected points vs " + std::to_string(mapped.size()) + " mapped");
    if (expected.empty()) throw ArityError("evaluate_alignment: no points");

    AlignmentStats stats;
    stats.per_point_error_m.reserve(expected.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const double e = (expected[i] - mapped[i]).norm();
        stats.per_point_error_m.push_back(e);
        sum += e;
    }
    stats.mean_error_m = sum / static_cast<double>(expected.size());
    double var = 0.0;
    for (double e : stats.per_point_error_m) {
        const double d = e - stats.mean_error_m;
        var += d * d;
    }
    stats.stddev_error_m = std::sqrt(var / static_cast<double>(expected.size()));
    return stats;
}

}  // namespace volcap
