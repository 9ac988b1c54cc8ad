#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "viewrope/geometry.hpp"
#include "viewrope/grid_io.hpp"

namespace viewrope {

/// Per-pixel depth in world units with the pose it was observed from.
/// Values must be positive and finite; NaN marks invalid pixels.
struct DepthMap {
    FloatGrid values;
    CameraPose pose;
};

/// Warp of every source pixel into a target view. covisible implies the
/// coordinates are inside the target image and the transformed depth is
/// positive (plus depth agreement when a target depth map is given).
struct WarpResult {
    int width = 0;
    int height = 0;
    std::vector<double> u;           // target x per source pixel
    std::vector<double> v;           // target y per source pixel
    std::vector<uint8_t> in_front;   // positive depth after the transform
    std::vector<uint8_t> covisible;  // the usable region

    size_t index(int row, int col) const { return size_t(row) * width + col; }
};

double huber(double r, double delta);

/// K^-1 [u, v, 1]^T * depth in the camera frame. depth must be positive.
Eigen::Vector3d backproject(const CameraPose& pose, double u, double v, double depth);

/// Perspective projection pi(K x) of a camera-frame point with positive z.
Eigen::Vector2d project(const Intrinsics& k, const Eigen::Vector3d& x);

/// Camera-frame change X_k = R_k R_t^-1 X_t + (P_k - R_k R_t^-1 P_t). The
/// rotation/translation pairs here play the role of world-to-camera
/// extrinsic parameters; helpers that start from camera-to-world records
/// convert before calling (see extrinsic_from_c2w).
Eigen::Vector3d transform_point(const Eigen::Vector3d& x_t, const CameraPose& pose_t,
                                const CameraPose& pose_k);

/// Converts a camera-to-world pose (rotation maps camera to world, position
/// is the camera center) to the extrinsic convention used by the warp.
CameraPose extrinsic_from_c2w(const CameraPose& c2w);

/// Exact at integer coordinates and exact on linear ramps at any sub-pixel
/// coordinate. Coordinates must lie in [0, width-1] x [0, height-1].
double bilinear_sample(const FloatGrid& grid, double u, double v);
double nearest_sample(const FloatGrid& grid, double u, double v);

/// Warps every valid source pixel into the target view. When target_depth is
/// supplied, covisibility additionally requires relative depth agreement
/// within tau_occ.
WarpResult warp_view(const DepthMap& source, const CameraPose& target,
                     const FloatGrid* target_depth = nullptr, double tau_occ = 0.03);

struct PairLoss {
    int t = 0;
    int k = 0;
    double loss = 0.0;
    int covisible_pixels = 0;
};

struct LoopClosureReport {
    double total = 0.0;
    std::vector<PairLoss> pairs;                  // revisit pairs that were evaluated
    std::vector<std::pair<int, int>> skipped;     // revisit pairs missing source depth
};

/// Sum over revisit pairs (t, k < t) of the Huber-penalized photometric
/// residual between frame t and frame k sampled at the warped coordinates,
/// restricted to the covisible region. Pairs whose source depth is missing
/// are skipped and reported.
LoopClosureReport loop_closure_loss(const std::vector<FloatGrid>& frames,
                                    const std::vector<CameraPose>& poses,
                                    const std::vector<const FloatGrid*>& depths, double eps,
                                    double lambda = 0.1, double rho_delta = 0.1,
                                    double tau_occ = 0.03);

using FrameDistance = std::function<double(const FloatGrid&, const FloatGrid&)>;

/// Robust photometric proxy: mean Huber difference after per-frame mean/std
/// normalization. Stands in for learned perceptual metrics, which plug in
/// through the FrameDistance interface.
double default_frame_distance(const FloatGrid& a, const FloatGrid& b);

/// Loop-closure error: distance between the start frame and the frame
/// generated at the return pose.
double lce(const FloatGrid& start, const FloatGrid& returned, const FrameDistance& distance = {});

} // namespace viewrope
