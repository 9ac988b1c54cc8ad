#include "viewrope/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace viewrope {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
}  // namespace

Eigen::Matrix3d Intrinsics::matrix() const {
    Eigen::Matrix3d k;
    k << fx, 0.0, cx,
         0.0, fy, cy,
         0.0, 0.0, 1.0;
    return k;
}

void Intrinsics::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0)) {
        throw std::invalid_argument("intrinsics: focal lengths must be positive");
    }
    if (cx < 0.0 || cx > width || cy < 0.0 || cy > height) {
        throw std::invalid_argument("intrinsics: principal point outside image");
    }
}

void CameraPose::validate() const {
    intrinsics.validate();
    if (!is_rotation(rotation)) {
        throw std::invalid_argument("camera pose: rotation is not in SO(3)");
    }
}

bool is_rotation(const Eigen::Matrix3d& r, double tol) {
    const Eigen::Matrix3d delta = r.transpose() * r - Eigen::Matrix3d::Identity();
    if (delta.cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(r.determinant() - 1.0) <= tol;
}

Eigen::Vector3d pixel_ray(const Intrinsics& k, double u, double v) {
    k.validate();
    if (u < 0.0 || u > k.width || v < 0.0 || v > k.height) {
        throw std::invalid_argument("pixel_ray: pixel outside image bounds");
    }
    const Eigen::Vector3d dir((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
    return dir.normalized();
}

Eigen::Matrix3d local_rotation(const Eigen::Vector3d& ray) {
    if (std::abs(ray.norm() - 1.0) > 1e-6) {
        throw std::invalid_argument("local_rotation: ray must be unit length");
    }
    const Eigen::Vector3d z(0.0, 0.0, 1.0);
    if ((ray + z).norm() < 1e-6) {
        // antipodal convention: 180 degrees about x
        Eigen::Matrix3d r;
        r << 1.0, 0.0, 0.0,
             0.0, -1.0, 0.0,
             0.0, 0.0, -1.0;
        return r;
    }
    const Eigen::Vector3d axis_raw = z.cross(ray);
    const double sin_angle = axis_raw.norm();
    const double cos_angle = z.dot(ray);
    if (sin_angle < 1e-15) {
        return Eigen::Matrix3d::Identity();
    }
    const Eigen::Vector3d axis = axis_raw / sin_angle;
    const double angle = std::atan2(sin_angle, cos_angle);
    return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

Eigen::Matrix3d view_rotation(const CameraPose& pose, const Eigen::Matrix3d& local) {
    if (!is_rotation(pose.rotation) || !is_rotation(local)) {
        throw std::invalid_argument("view_rotation: inputs must be in SO(3)");
    }
    return pose.rotation * local;
}

RayField build_ray_field(const CameraPose& pose, int rows, int cols, int patch_size) {
    pose.validate();
    if (rows <= 0 || cols <= 0 || patch_size <= 0) {
        throw std::invalid_argument("build_ray_field: grid dims and patch size must be positive");
    }
    if (cols * patch_size > pose.intrinsics.width || rows * patch_size > pose.intrinsics.height) {
        throw std::invalid_argument("build_ray_field: patch grid exceeds image bounds");
    }
    RayField field;
    field.rows = rows;
    field.cols = cols;
    field.patch_size = patch_size;
    field.rays.reserve(size_t(rows) * cols);
    field.rotations_local.reserve(size_t(rows) * cols);
    field.rotations_world.reserve(size_t(rows) * cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double u = (c + 0.5) * patch_size;
            const double v = (r + 0.5) * patch_size;
            const Eigen::Vector3d ray = pixel_ray(pose.intrinsics, u, v);
            const Eigen::Matrix3d local = local_rotation(ray);
            field.rays.push_back(ray);
            field.rotations_local.push_back(local);
            field.rotations_world.push_back(pose.rotation * local);
        }
    }
    return field;
}

Eigen::Matrix3d euler_ue5_to_matrix(const EulerUE5& e) {
    const double cy = std::cos(e.yaw * kDegToRad), sy = std::sin(e.yaw * kDegToRad);
    const double cp = std::cos(e.pitch * kDegToRad), sp = std::sin(e.pitch * kDegToRad);
    const double cr = std::cos(e.roll * kDegToRad), sr = std::sin(e.roll * kDegToRad);
    Eigen::Matrix3d rz, ry, rx;
    rz << cy, -sy, 0.0,
          sy, cy, 0.0,
          0.0, 0.0, 1.0;
    // left-handed positive pitch: nose up (+z forward component)
    ry << cp, 0.0, -sp,
          0.0, 1.0, 0.0,
          sp, 0.0, cp;
    // left-handed positive roll: clockwise looking along +x
    rx << 1.0, 0.0, 0.0,
          0.0, cr, sr,
          0.0, -sr, cr;
    return rz * ry * rx;
}

EulerUE5 matrix_to_euler_ue5(const Eigen::Matrix3d& r) {
    if (!is_rotation(r)) {
        throw std::invalid_argument("matrix_to_euler_ue5: input is not in SO(3)");
    }
    EulerUE5 e;
    const double sp = std::clamp(r(2, 0), -1.0, 1.0);
    e.pitch = std::asin(sp) * kRadToDeg;
    const double cp = std::sqrt(std::max(0.0, 1.0 - sp * sp));
    if (cp < 1e-9) {
        e.gimbal_lock = true;
        e.roll = 0.0;
        e.yaw = std::atan2(-r(0, 1), r(1, 1)) * kRadToDeg;
    } else {
        e.yaw = std::atan2(r(1, 0), r(0, 0)) * kRadToDeg;
        e.roll = std::atan2(-r(2, 1), r(2, 2)) * kRadToDeg;
    }
    return e;
}

Intrinsics intrinsics_from_fov(double fov_h_deg, double fov_v_deg, int width, int height) {
    if (fov_h_deg <= 0.0 || fov_h_deg >= 180.0 || fov_v_deg <= 0.0 || fov_v_deg >= 180.0) {
        throw std::invalid_argument("intrinsics_from_fov: fov must lie in (0, 180)");
    }
    Intrinsics k;
    k.width = width;
    k.height = height;
    k.cx = width * 0.5;
    k.cy = height * 0.5;
    k.fx = (width * 0.5) / std::tan(fov_h_deg * 0.5 * kDegToRad);
    k.fy = (height * 0.5) / std::tan(fov_v_deg * 0.5 * kDegToRad);
    k.validate();
    return k;
}

double pose_similarity(const CameraPose& a, const CameraPose& b, double lambda) {
    const Eigen::Matrix3d rel = a.rotation.transpose() * b.rotation;
    const double cos_angle = std::clamp((rel.trace() - 1.0) * 0.5, -1.0, 1.0);
    const double angle = std::acos(cos_angle);
    return angle + lambda * (a.position - b.position).norm();
}

bool revisit(const CameraPose& a, const CameraPose& b, double eps, double lambda) {
    return pose_similarity(a, b, lambda) <= eps;
}

} // namespace viewrope
