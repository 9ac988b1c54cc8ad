#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "viewrope/geometry.hpp"

namespace viewrope {

/// One annotated frame of a camera trajectory: camera-to-world SE(3) matrix,
/// Euler angles in degrees, position in centimeters, vertical/horizontal
/// field of view and WASD key states.
struct TrajectoryRecord {
    Eigen::Matrix4d c2w = Eigen::Matrix4d::Identity();
    EulerUE5 euler;
    Eigen::Vector3d position_cm = Eigen::Vector3d::Zero();
    double fov_v = 60.0;
    double fov_h = 90.0;
    std::array<bool, 4> wasd{false, false, false, false};  // w, a, s, d
    int frame_index = 0;
    double fps = 16.0;

    Eigen::Matrix3d rotation() const { return c2w.topLeftCorner<3, 3>(); }
    /// Reads the record as a camera pose under the camera-to-world convention.
    CameraPose camera_pose(const Intrinsics& intrinsics) const;
    /// Throws std::invalid_argument when the SE(3)/Euler/position cross
    /// checks fail.
    void validate() const;
};

using Trajectory = std::vector<TrajectoryRecord>;

/// Rotate-away-rotate-back specification: the camera holds position and
/// ramps each chosen axis linearly to the target angle at the midpoint, then
/// back to the start.
struct LoopClosureSpec {
    double angle_deg = 90.0;  // benchmark families use {30, 75, 90, 180}
    bool yaw = true;
    bool pitch = false;
    bool roll = false;
    int frames = 61;
    double fps = 16.0;
    double fov_v = 60.0;
    double fov_h = 90.0;
    /// Draw the ramp direction of each axis from the seed instead of the
    /// default positive sense.
    bool randomize_sign = false;

    int axis_count() const { return int(yaw) + int(pitch) + int(roll); }
    void validate() const;
};

enum class ActionKind { RotateOnly, MoveOnly, MoveAndRotate, Orbit };

/// One segment of an interactive-navigation trajectory. Angular velocities
/// are deg/frame, linear velocity is cm/frame in world coordinates. Orbit
/// keeps the camera aimed at the orbit center; its center derives from the
/// current pose (radius ahead along the view direction) unless explicitly
/// set, so segments stay continuous.
struct ActionSegment {
    ActionKind kind = ActionKind::MoveOnly;
    int duration_frames = 1;
    double yaw_rate = 0.0;
    double pitch_rate = 0.0;
    double roll_rate = 0.0;
    Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
    Eigen::Vector3d orbit_center = Eigen::Vector3d::Zero();
    bool orbit_center_set = false;
    double orbit_radius = 100.0;
    double orbit_rate = 3.0;
    /// When set with zero roll_rate the rate is drawn from the seed.
    bool roll_enabled = false;

    void validate() const;
};

/// Configuration for drawing random action segments.
struct ActionDrawConfig {
    int min_duration = 8;
    int max_duration = 32;
    double max_abs_rate = 3.0;           // deg/frame per axis
    double max_speed = 20.0;             // cm/frame
    double exploration_radius_cm = 500;  // compact wander bound
    double roll_probability = 0.2;       // same default for every kind
};

/// Stationary loop closure: frame count is exactly spec.frames, the first
/// and last poses coincide, and every chosen axis ramps at constant angular
/// velocity (ZYX composition).
Trajectory gen_loop_closure(const LoopClosureSpec& spec, const CameraPose& start_pose,
                            uint64_t rng_seed);

/// Segments composed continuously from the start pose. The returned
/// trajectory begins with the start pose itself.
Trajectory gen_action_sequence(const std::vector<ActionSegment>& segments,
                               const CameraPose& start_pose, uint64_t rng_seed);

/// Random segment list for the interactive-navigation part of the benchmark.
std::vector<ActionSegment> draw_action_segments(int count, const ActionDrawConfig& config,
                                                uint64_t rng_seed);

/// Uniform index resampling with the first and last records preserved
/// exactly; rotations interpolate along the geodesic, positions linearly.
Trajectory resample_fixed_endpoints(const Trajectory& traj, int target_frames);

/// JSON-lines file: a header object carrying the record count and a CRC32 of
/// the payload, then one record per line with keys frame, c2w (16 floats
/// row-major), euler {pitch,roll,yaw}, pos_cm, fov_v, fov_h, wasd and fps.
/// Floats carry 17 significant digits, so round-trips are lossless.
void serialize_trajectory(const Trajectory& traj, const std::string& path);
std::string serialize_trajectory_string(const Trajectory& traj);

/// Throws std::runtime_error with line/field diagnostics on malformed input;
/// corrupted payloads fail the checksum or the per-record cross checks.
Trajectory parse_trajectory(const std::string& path);
Trajectory parse_trajectory_string(const std::string& text);

} // namespace viewrope
