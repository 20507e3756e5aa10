#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

#include "volcap/error.hpp"

namespace volcap {

/// Rational radial + tangential lens distortion coefficients.
struct DistortionModel {
    double k1 = 0, k2 = 0, k3 = 0, k4 = 0, k5 = 0, k6 = 0;
    double p1 = 0, p2 = 0;

    bool is_zero() const {
        return k1 == 0 && k2 == 0 && k3 == 0 && k4 == 0 && k5 == 0 && k6 == 0 && p1 == 0 &&
               p2 == 0;
    }
};

/// Pinhole intrinsics plus distortion for one sensor.
struct CameraIntrinsics {
    double fx = 0, fy = 0, cx = 0, cy = 0;
    DistortionModel distortion;

    void validate(const std::string& name) const {
        if (!(fx > 0) || !(fy > 0))
            throw ValidationError(name + ": focal lengths must be positive (fx=" +
                                  std::to_string(fx) + ", fy=" + std::to_string(fy) + ")");
    }
};

/// Rotation + translation. Construction validates that R is a proper rotation
/// (orthonormal, det +1) within 1e-9, so a RigidTransform is rigid by type.
class RigidTransform {
public:
    RigidTransform() : R_(Eigen::Matrix3d::Identity()), t_(Eigen::Vector3d::Zero()) {}

    RigidTransform(const Eigen::Matrix3d& R, const Eigen::Vector3d& t) : R_(R), t_(t) {
        constexpr double tol = 1e-9;
        const double ortho = (R.transpose() * R - Eigen::Matrix3d::Identity()).norm();
        if (ortho > tol)
            throw ValidationError("RigidTransform: R not orthonormal (|R^T R - I| = " +
                                  std::to_string(ortho) + ")");
        const double det = R.determinant();
        if (std::abs(det - 1.0) > tol)
            throw ValidationError("RigidTransform: det(R) = " + std::to_string(det) +
                                  ", expected +1");
    }

    static RigidTransform identity() { return RigidTransform(); }

    const Eigen::Matrix3d& rotation() const { return R_; }
    const Eigen::Vector3d& translation() const { return t_; }

    Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return R_ * p + t_; }

    RigidTransform inverse() const {
        RigidTransform out;
        out.R_ = R_.transpose();
        out.t_ = -(R_.transpose() * t_);
        return out;
    }

    /// Composition: (a * b).apply(p) == a.apply(b.apply(p)).
    friend RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
        RigidTransform out;
        out.R_ = a.R_ * b.R_;
        out.t_ = a.R_ * b.t_ + a.t_;
        return out;
    }

    bool approx_equal(const RigidTransform& other, double tol) const {
        return (R_ - other.R_).cwiseAbs().maxCoeff() <= tol &&
               (t_ - other.t_).cwiseAbs().maxCoeff() <= tol;
    }

private:
    Eigen::Matrix3d R_;
    Eigen::Vector3d t_;
};

/// Full calibration of one capture device: depth and color intrinsics plus
/// the extrinsic transform into the color camera.
struct CameraModel {
    CameraIntrinsics depth;
    CameraIntrinsics color;
    RigidTransform color_extrinsics;

    void validate() const {
        depth.validate("depth intrinsics");
        color.validate("color intrinsics");
    }
};

namespace detail {

inline CameraIntrinsics parse_intrinsics(const nlohmann::json& j, const std::string& name) {
    CameraIntrinsics s;
    for (const char* key : {"fx", "fy", "cx", "cy"})
        if (!j.contains(key))
            throw FormatError("camera config: missing key \"" + std::string(key) + "\" in \"" +
                              name + "\"");
    s.fx = j.at("fx").get<double>();
    s.fy = j.at("fy").get<double>();
    s.cx = j.at("cx").get<double>();
    s.cy = j.at("cy").get<double>();
    s.distortion.k1 = j.value("k1", 0.0);
    s.distortion.k2 = j.value("k2", 0.0);
    s.distortion.k3 = j.value("k3", 0.0);
    s.distortion.k4 = j.value("k4", 0.0);
    s.distortion.k5 = j.value("k5", 0.0);
    s.distortion.k6 = j.value("k6", 0.0);
    s.distortion.p1 = j.value("p1", 0.0);
    s.distortion.p2 = j.value("p2", 0.0);
    return s;
}

}  // namespace detail

/// Parses a camera model from JSON. Distortion coefficients default to zero
/// when absent; everything else is required.
inline CameraModel parse_camera_model(const nlohmann::json& j) {
    for (const char* key : {"depth", "color", "color_extrinsics"})
        if (!j.contains(key))
            throw FormatError("camera config: missing key \"" + std::string(key) + "\"");

    CameraModel m;
    m.depth = detail::parse_intrinsics(j.at("depth"), "depth");
    m.color = detail::parse_intrinsics(j.at("color"), "color");

    const auto& ext = j.at("color_extrinsics");
    if (!ext.contains("R") || !ext.contains("t"))
        throw FormatError("camera config: color_extrinsics needs \"R\" (9 values, row-major) "
                          "and \"t\" (3 values)");
    const auto Rv = ext.at("R").get<std::vector<double>>();
    const auto tv = ext.at("t").get<std::vector<double>>();
    if (Rv.size() != 9 || tv.size() != 3)
        throw FormatError("camera config: color_extrinsics R must have 9 entries and t 3, got " +
                          std::to_string(Rv.size()) + " and " + std::to_string(tv.size()));
    Eigen::Matrix3d R;
    R << Rv[0], Rv[1], Rv[2], Rv[3], Rv[4], Rv[5], Rv[6], Rv[7], Rv[8];
    m.color_extrinsics = RigidTransform(R, Eigen::Vector3d(tv[0], tv[1], tv[2]));

    m.validate();
    return m;
}

inline CameraModel load_camera_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open camera config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("camera config " + path + ": " + e.what());
    }
    return parse_camera_model(j);
}

inline nlohmann::json camera_model_to_json(const CameraModel& m) {
    auto sensor = [](const CameraIntrinsics& s) {
        const DistortionModel& d = s.distortion;
        return nlohmann::json{{"fx", s.fx}, {"fy", s.fy}, {"cx", s.cx}, {"cy", s.cy},
                              {"k1", d.k1}, {"k2", d.k2}, {"k3", d.k3}, {"k4", d.k4},
                              {"k5", d.k5}, {"k6", d.k6}, {"p1", d.p1}, {"p2", d.p2}};
    };
    const Eigen::Matrix3d& R = m.color_extrinsics.rotation();
    const Eigen::Vector3d& t = m.color_extrinsics.translation();
    return nlohmann::json{
        {"depth", sensor(m.depth)},
        {"color", sensor(m.color)},
        {"color_extrinsics",
         {{"R", {R(0, 0), R(0, 1), R(0, 2), R(1, 0), R(1, 1), R(1, 2), R(2, 0), R(2, 1), R(2, 2)}},
          {"t", {t(0), t(1), t(2)}}}}};
}

}  // namespace volcap
