#pragma once

#include <Eigen/Dense>
#include <vector>

namespace viewrope {

/// Pinhole camera intrinsics. Assembles K = [[fx,0,cx],[0,fy,cy],[0,0,1]].
struct Intrinsics {
    double fx = 1.0;
    double fy = 1.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 1;
    int height = 1;

    Eigen::Matrix3d matrix() const;
    /// Throws std::invalid_argument if focal lengths are non-positive or the
    /// principal point lies outside the image.
    void validate() const;
};

/// Camera pose: world-from-camera rotation and the camera position in world
/// units, plus intrinsics for the frame.
struct CameraPose {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Intrinsics intrinsics;

    void validate() const;
};

/// True when r is orthonormal with det +1 within tol.
bool is_rotation(const Eigen::Matrix3d& r, double tol = 1e-6);

/// Unit viewing ray through pixel (u, v) in the camera frame:
/// normalize(K^-1 [u, v, 1]^T). z is positive for any valid pinhole K.
Eigen::Vector3d pixel_ray(const Intrinsics& k, double u, double v);

/// Minimal-geodesic rotation mapping the optical axis [0,0,1] onto the given
/// unit ray (axis z x r, angle acos(z . r)); it is the unique member of the
/// one-parameter family with no twist about the ray. Rays within 1e-6 of
/// [0,0,-1] use a fixed 180-degree rotation about x.
Eigen::Matrix3d local_rotation(const Eigen::Vector3d& ray);

/// World-aligned view rotation R_cam * R_local. Both inputs must be in SO(3).
Eigen::Matrix3d view_rotation(const CameraPose& pose, const Eigen::Matrix3d& local);

/// Per-patch rays and rotations for one view. Grids are row-major.
struct RayField {
    int rows = 0;
    int cols = 0;
    int patch_size = 0;
    std::vector<Eigen::Vector3d> rays;             // camera frame, unit length
    std::vector<Eigen::Matrix3d> rotations_local;  // maps [0,0,1] onto the ray
    std::vector<Eigen::Matrix3d> rotations_world;  // R_cam * local

    int count() const { return rows * cols; }
    int index(int row, int col) const { return row * cols + col; }
    const Eigen::Vector3d& ray(int row, int col) const { return rays[size_t(index(row, col))]; }
    const Eigen::Matrix3d& world(int row, int col) const {
        return rotations_world[size_t(index(row, col))];
    }
};

/// Rays sampled at patch centers ((col+0.5)*patch_size, (row+0.5)*patch_size).
/// Throws std::invalid_argument when the grid exceeds the image.
RayField build_ray_field(const CameraPose& pose, int rows, int cols, int patch_size);

/// Euler angles in degrees, UE convention: left-handed X-Forward, Y-Right,
/// Z-Up frame, composed R = Rz(yaw) * Ry(pitch) * Rx(roll) with pitch and
/// roll taking the left-handed positive sense (pitch up, roll clockwise).
/// The camera forward axis is then [cos p cos y, cos p sin y, sin p].
struct EulerUE5 {
    double pitch = 0.0;
    double roll = 0.0;
    double yaw = 0.0;
    bool gimbal_lock = false;  // set by matrix_to_euler_ue5 when |pitch| = 90
};

Eigen::Matrix3d euler_ue5_to_matrix(const EulerUE5& e);

/// Inverse of euler_ue5_to_matrix away from gimbal lock. At |pitch| = 90 the
/// result is flagged and roll is conventionally 0.
EulerUE5 matrix_to_euler_ue5(const Eigen::Matrix3d& r);

/// Intrinsics with the principal point at the image center and focal lengths
/// chosen so the horizontal/vertical fields of view match the given degrees.
Intrinsics intrinsics_from_fov(double fov_h_deg, double fov_v_deg, int width, int height);

/// Pose discrepancy: geodesic rotation angle in radians plus
/// lambda * ||P_a - P_b||. Symmetric, zero on identical poses.
double pose_similarity(const CameraPose& a, const CameraPose& b, double lambda = 0.1);

/// Revisit indicator: pose_similarity(a, b) <= eps.
bool revisit(const CameraPose& a, const CameraPose& b, double eps, double lambda = 0.1);

} // namespace viewrope
