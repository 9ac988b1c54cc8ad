#include "viewrope/trajgen.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "viewrope/rng.hpp"

namespace viewrope {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

uint32_t crc32_bytes(const std::string& data) {
    static const auto table = [] {
        std::array<uint32_t, 256> t{};
        for (uint32_t i = 0; i < 256; ++i) {
            uint32_t c = i;
            for (int bit = 0; bit < 8; ++bit) {
                c = (c & 1u) ? (0xedb88320u ^ (c >> 1)) : (c >> 1);
            }
            t[i] = c;
        }
        return t;
    }();
    uint32_t crc = 0xffffffffu;
    for (unsigned char b : data) crc = table[(crc ^ b) & 0xffu] ^ (crc >> 8);
    return crc ^ 0xffffffffu;
}

TrajectoryRecord make_record(const EulerUE5& euler, const Eigen::Vector3d& position, double fov_v,
                             double fov_h, const std::array<bool, 4>& wasd, int frame_index,
                             double fps) {
    TrajectoryRecord rec;
    rec.euler = euler;
    rec.position_cm = position;
    rec.c2w.setIdentity();
    rec.c2w.topLeftCorner<3, 3>() = euler_ue5_to_matrix(euler);
    rec.c2w.topRightCorner<3, 1>() = position;
    rec.fov_v = fov_v;
    rec.fov_h = fov_h;
    rec.wasd = wasd;
    rec.frame_index = frame_index;
    rec.fps = fps;
    return rec;
}

std::array<bool, 4> wasd_from_motion(const Eigen::Matrix3d& rotation,
                                     const Eigen::Vector3d& world_velocity) {
    std::array<bool, 4> keys{false, false, false, false};
    if (world_velocity.norm() < 1e-12) return keys;
    const Eigen::Vector3d local = rotation.transpose() * world_velocity;
    const double forward = local.x();  // X-Forward
    const double right = local.y();    // Y-Right
    if (std::abs(forward) >= std::abs(right)) {
        keys[forward >= 0.0 ? 0 : 2] = true;  // W or S
    } else {
        keys[right >= 0.0 ? 3 : 1] = true;  // D or A
    }
    return keys;
}

// yaw/pitch aiming the forward axis [cp*cy, cp*sy, sp] along dir
void aim_at(const Eigen::Vector3d& dir, double& yaw_deg, double& pitch_deg) {
    const Eigen::Vector3d f = dir.normalized();
    yaw_deg = std::atan2(f.y(), f.x()) * kRadToDeg;
    pitch_deg = std::asin(std::clamp(f.z(), -1.0, 1.0)) * kRadToDeg;
}

}  // namespace

CameraPose TrajectoryRecord::camera_pose(const Intrinsics& intrinsics) const {
    CameraPose pose;
    pose.rotation = rotation();
    pose.position = position_cm;
    pose.intrinsics = intrinsics;
    return pose;
}

void TrajectoryRecord::validate() const {
    if (!is_rotation(rotation())) {
        throw std::invalid_argument("trajectory record: c2w rotation is not in SO(3)");
    }
    const Eigen::RowVector4d last = c2w.row(3);
    if ((last - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > 1e-12) {
        throw std::invalid_argument("trajectory record: bottom row must be [0,0,0,1]");
    }
    if ((c2w.topRightCorner<3, 1>() - position_cm).cwiseAbs().maxCoeff() >
        1e-9 * std::max(1.0, position_cm.cwiseAbs().maxCoeff())) {
        throw std::invalid_argument("trajectory record: pos_cm disagrees with c2w translation");
    }
    const Eigen::Matrix3d from_euler = euler_ue5_to_matrix(euler);
    const Eigen::Matrix3d rel = from_euler.transpose() * rotation();
    const double cos_angle = std::clamp((rel.trace() - 1.0) * 0.5, -1.0, 1.0);
    if (std::acos(cos_angle) > 1e-4 * kDegToRad) {
        throw std::invalid_argument("trajectory record: euler disagrees with c2w rotation");
    }
    if (!(fov_v > 0.0 && fov_v < 180.0 && fov_h > 0.0 && fov_h < 180.0)) {
        throw std::invalid_argument("trajectory record: fov out of range");
    }
    if (!(fps > 0.0)) throw std::invalid_argument("trajectory record: fps must be positive");
}

void LoopClosureSpec::validate() const {
    if (angle_deg < 0.0) throw std::invalid_argument("loop closure: angle must be non-negative");
    if (axis_count() < 1) throw std::invalid_argument("loop closure: need at least one axis");
    if (frames < 3) throw std::invalid_argument("loop closure: need at least 3 frames");
    if (!(fps > 0.0)) throw std::invalid_argument("loop closure: fps must be positive");
}

void ActionSegment::validate() const {
    if (duration_frames < 1) throw std::invalid_argument("action segment: duration must be >= 1");
    if (kind == ActionKind::Orbit && !(orbit_radius > 0.0)) {
        throw std::invalid_argument("action segment: orbit radius must be positive");
    }
}

Trajectory gen_loop_closure(const LoopClosureSpec& spec, const CameraPose& start_pose,
                            uint64_t rng_seed) {
    spec.validate();
    start_pose.validate();
    Rng rng(rng_seed);
    const double sign_yaw = spec.randomize_sign ? double(rng.sign()) : 1.0;
    const double sign_pitch = spec.randomize_sign ? double(rng.sign()) : 1.0;
    const double sign_roll = spec.randomize_sign ? double(rng.sign()) : 1.0;

    const EulerUE5 base = matrix_to_euler_ue5(start_pose.rotation);
    const int frames = spec.frames;
    const double mid = (frames - 1) * 0.5;

    Trajectory traj;
    traj.reserve(size_t(frames));
    for (int f = 0; f < frames; ++f) {
        const double tri = f <= mid ? f / mid : (frames - 1 - f) / mid;
        const double swing = spec.angle_deg * tri;
        EulerUE5 e = base;
        if (spec.yaw) e.yaw += sign_yaw * swing;
        if (spec.pitch) e.pitch += sign_pitch * swing;
        if (spec.roll) e.roll += sign_roll * swing;
        traj.push_back(make_record(e, start_pose.position, spec.fov_v, spec.fov_h,
                                   {false, false, false, false}, f, spec.fps));
    }
    return traj;
}

Trajectory gen_action_sequence(const std::vector<ActionSegment>& segments,
                               const CameraPose& start_pose, uint64_t rng_seed) {
    if (segments.empty()) throw std::invalid_argument("action sequence: segments must be nonempty");
    start_pose.validate();

    EulerUE5 euler = matrix_to_euler_ue5(start_pose.rotation);
    Eigen::Vector3d position = start_pose.position;
    const double fov_v = 60.0, fov_h = 90.0, fps = 16.0;

    Trajectory traj;
    traj.push_back(
        make_record(euler, position, fov_v, fov_h, {false, false, false, false}, 0, fps));

    int frame = 1;
    for (size_t si = 0; si < segments.size(); ++si) {
        const ActionSegment& seg = segments[si];
        seg.validate();
        Rng rng(derive_seed(rng_seed, uint64_t(si)));
        double roll_rate = seg.roll_rate;
        if (seg.roll_enabled && roll_rate == 0.0) roll_rate = rng.uniform(-1.0, 1.0);

        if (seg.kind == ActionKind::Orbit) {
            const Eigen::Matrix3d rot = euler_ue5_to_matrix(euler);
            const Eigen::Vector3d forward = rot.col(0);
            const Eigen::Vector3d center =
                seg.orbit_center_set ? seg.orbit_center : (position + seg.orbit_radius * forward).eval();
            const Eigen::Vector3d offset = position - center;
            const double r_xy = std::hypot(offset.x(), offset.y());
            if (r_xy < 1e-9) {
                throw std::invalid_argument("action segment: orbit center coincides with camera");
            }
            const double theta0 = std::atan2(offset.y(), offset.x());
            for (int f = 1; f <= seg.duration_frames; ++f) {
                const double theta = theta0 + seg.orbit_rate * kDegToRad * f;
                position = center + Eigen::Vector3d(r_xy * std::cos(theta), r_xy * std::sin(theta),
                                                    offset.z());
                aim_at(center - position, euler.yaw, euler.pitch);
                euler.roll += roll_rate;
                traj.push_back(make_record(euler, position, fov_v, fov_h,
                                           {false, false, false, false}, frame++, fps));
            }
            continue;
        }

        const bool moves = seg.kind == ActionKind::MoveOnly || seg.kind == ActionKind::MoveAndRotate;
        const bool rotates =
            seg.kind == ActionKind::RotateOnly || seg.kind == ActionKind::MoveAndRotate;
        for (int f = 1; f <= seg.duration_frames; ++f) {
            if (rotates) {
                euler.yaw += seg.yaw_rate;
                euler.pitch += seg.pitch_rate;
            }
            if (rotates || seg.roll_enabled) euler.roll += roll_rate;
            std::array<bool, 4> keys{false, false, false, false};
            if (moves) {
                position += seg.velocity;
                keys = wasd_from_motion(euler_ue5_to_matrix(euler), seg.velocity);
            }
            traj.push_back(make_record(euler, position, fov_v, fov_h, keys, frame++, fps));
        }
    }
    return traj;
}

std::vector<ActionSegment> draw_action_segments(int count, const ActionDrawConfig& config,
                                                uint64_t rng_seed) {
    if (count < 1) throw std::invalid_argument("draw_action_segments: count must be >= 1");
    Rng rng(rng_seed);
    std::vector<ActionSegment> out;
    out.reserve(size_t(count));
    Eigen::Vector3d tracked = Eigen::Vector3d::Zero();
    for (int i = 0; i < count; ++i) {
        ActionSegment seg;
        seg.kind = static_cast<ActionKind>(rng.uniform_index(4));
        seg.duration_frames =
            config.min_duration +
            int(rng.uniform_index(uint64_t(config.max_duration - config.min_duration + 1)));
        seg.roll_enabled = rng.bernoulli(config.roll_probability);
        switch (seg.kind) {
            case ActionKind::RotateOnly:
                seg.yaw_rate = rng.uniform(-config.max_abs_rate, config.max_abs_rate);
                seg.pitch_rate = rng.uniform(-config.max_abs_rate * 0.5, config.max_abs_rate * 0.5);
                break;
            case ActionKind::MoveOnly:
            case ActionKind::MoveAndRotate: {
                Eigen::Vector3d dir(rng.normal(), rng.normal(), 0.25 * rng.normal());
                if (dir.norm() < 1e-9) dir = Eigen::Vector3d::UnitX();
                dir.normalize();
                // steer back inside the exploration radius
                const Eigen::Vector3d ahead =
                    tracked + dir * config.max_speed * seg.duration_frames;
                if (ahead.norm() > config.exploration_radius_cm) dir = -tracked.normalized();
                seg.velocity = dir * rng.uniform(0.2 * config.max_speed, config.max_speed);
                tracked += seg.velocity * seg.duration_frames;
                if (seg.kind == ActionKind::MoveAndRotate) {
                    seg.yaw_rate = rng.uniform(-config.max_abs_rate, config.max_abs_rate);
                    seg.pitch_rate =
                        rng.uniform(-config.max_abs_rate * 0.5, config.max_abs_rate * 0.5);
                }
                break;
            }
            case ActionKind::Orbit:
                seg.orbit_radius = rng.uniform(50.0, config.exploration_radius_cm * 0.5);
                seg.orbit_rate = rng.uniform(1.0, config.max_abs_rate);
                if (rng.bernoulli(0.5)) seg.orbit_rate = -seg.orbit_rate;
                break;
        }
        out.push_back(seg);
    }
    return out;
}

Trajectory resample_fixed_endpoints(const Trajectory& traj, int target_frames) {
    if (traj.size() < 2) throw std::invalid_argument("resample: source needs at least 2 frames");
    if (target_frames < 2) throw std::invalid_argument("resample: target needs at least 2 frames");
    const int source = int(traj.size());
    Trajectory out;
    out.reserve(size_t(target_frames));
    for (int i = 0; i < target_frames; ++i) {
        if (i == 0) {
            out.push_back(traj.front());
            out.back().frame_index = 0;
            continue;
        }
        if (i == target_frames - 1) {
            out.push_back(traj.back());
            out.back().frame_index = i;
            continue;
        }
        const double s = double(i) * double(source - 1) / double(target_frames - 1);
        const int i0 = std::min(int(std::floor(s)), source - 2);
        const double f = s - i0;
        const TrajectoryRecord& a = traj[size_t(i0)];
        const TrajectoryRecord& b = traj[size_t(i0) + 1];

        const Eigen::Quaterniond qa(a.rotation());
        const Eigen::Quaterniond qb(b.rotation());
        const Eigen::Matrix3d rot = qa.slerp(f, qb).toRotationMatrix();

        TrajectoryRecord rec;
        rec.c2w.setIdentity();
        rec.c2w.topLeftCorner<3, 3>() = rot;
        rec.position_cm = (1.0 - f) * a.position_cm + f * b.position_cm;
        rec.c2w.topRightCorner<3, 1>() = rec.position_cm;
        rec.euler = matrix_to_euler_ue5(rot);
        rec.fov_v = (1.0 - f) * a.fov_v + f * b.fov_v;
        rec.fov_h = (1.0 - f) * a.fov_h + f * b.fov_h;
        rec.wasd = f < 0.5 ? a.wasd : b.wasd;
        rec.frame_index = i;
        rec.fps = a.fps;
        out.push_back(rec);
    }
    return out;
}

std::string serialize_trajectory_string(const Trajectory& traj) {
    std::string payload;
    for (const TrajectoryRecord& rec : traj) {
        std::string line = "{\"frame\":" + std::to_string(rec.frame_index) + ",\"c2w\":[";
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                line += fmt17(rec.c2w(r, c));
                if (r != 3 || c != 3) line += ',';
            }
        }
        line += "],\"euler\":{\"pitch\":" + fmt17(rec.euler.pitch) +
                ",\"roll\":" + fmt17(rec.euler.roll) + ",\"yaw\":" + fmt17(rec.euler.yaw) + "}";
        line += ",\"pos_cm\":[" + fmt17(rec.position_cm.x()) + ',' + fmt17(rec.position_cm.y()) +
                ',' + fmt17(rec.position_cm.z()) + "]";
        line += ",\"fov_v\":" + fmt17(rec.fov_v) + ",\"fov_h\":" + fmt17(rec.fov_h);
        line += ",\"wasd\":[";
        for (int i = 0; i < 4; ++i) {
            line += rec.wasd[size_t(i)] ? "true" : "false";
            if (i != 3) line += ',';
        }
        line += "],\"fps\":" + fmt17(rec.fps) + "}\n";
        payload += line;
    }
    std::string header = "{\"format\":\"vr-trajectory\",\"version\":1,\"count\":" +
                         std::to_string(traj.size()) +
                         ",\"crc32\":" + std::to_string(crc32_bytes(payload)) + "}\n";
    return header + payload;
}

void serialize_trajectory(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("trajectory write: cannot open " + path);
    out << serialize_trajectory_string(traj);
    if (!out) throw std::runtime_error("trajectory write: failed writing " + path);
}

namespace {

using nlohmann::json;

double require_number(const json& obj, const char* key, int line_no) {
    if (!obj.contains(key) || !obj[key].is_number()) {
        throw std::runtime_error("trajectory parse: line " + std::to_string(line_no) +
                                 ": missing or non-numeric field '" + key + "'");
    }
    return obj[key].get<double>();
}

}  // namespace

Trajectory parse_trajectory_string(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("trajectory parse: empty file");
    }
    json header;
    try {
        header = json::parse(line);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("trajectory parse: bad header: ") + e.what());
    }
    if (!header.is_object() || header.value("format", "") != "vr-trajectory" ||
        header.value("version", -1) != 1 || !header.contains("count") ||
        !header.contains("crc32")) {
        throw std::runtime_error("trajectory parse: unrecognized header");
    }
    const size_t count = header["count"].get<size_t>();
    const uint32_t want_crc = header["crc32"].get<uint32_t>();

    std::string payload;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        payload += line;
        payload += '\n';
        lines.push_back(line);
    }
    if (crc32_bytes(payload) != want_crc) {
        throw std::runtime_error("trajectory parse: payload checksum mismatch");
    }
    if (lines.size() != count) {
        throw std::runtime_error("trajectory parse: expected " + std::to_string(count) +
                                 " records, found " + std::to_string(lines.size()));
    }

    Trajectory traj;
    traj.reserve(count);
    for (size_t idx = 0; idx < lines.size(); ++idx) {
        const int line_no = int(idx) + 2;
        json obj;
        try {
            obj = json::parse(lines[idx]);
        } catch (const json::exception& e) {
            throw std::runtime_error("trajectory parse: line " + std::to_string(line_no) + ": " +
                                     e.what());
        }
        TrajectoryRecord rec;
        rec.frame_index = int(require_number(obj, "frame", line_no));
        if (rec.frame_index != int(idx)) {
            throw std::runtime_error("trajectory parse: line " + std::to_string(line_no) +
                                     ": frame index out of order");
        }
        if (!obj.contains("c2w") || !obj["c2w"].is_array() || obj["c2w"].size() != 16) {
            throw std::runtime_error("trajectory parse: line " + std::to_string(line_no) +
                                     ": field 'c2w' must hold 16 numbers");
        }
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                const json& cell = obj["c2w"][size_t(r * 4 + c)];
                if (!cell.is_number()) {
                    throw std::runtime_error("trajectory parse: line " + std::to_string(line_no) +
                                             ": non-numeric c2w entry");
                }
                rec.c2w(r, c) = cell.get<double>();
            }
        }
        if (!obj.contains("euler") || !obj["euler"].is_object()) {
            throw std::runtime_error("trajectory parse: line " + std::to_string(line_no) +
                                     ": missing field 'euler'");
        }
        rec.euler.pitch = require_number(obj["euler"], "pitch", line_no);
        rec.euler.roll = require_number(obj["euler"], "roll", line_no);
        rec.euler.yaw = require_number(obj["euler"], "yaw", line_no);
        if (!obj.contains("pos_cm") || !obj["pos_cm"].is_array() || obj["pos_cm"].size() != 3) {
            throw std::runtime_error("trajectory parse: line " + std::to_string(line_no) +
                                     ": field 'pos_cm' must hold 3 numbers");
        }
        for (int i = 0; i < 3; ++i) {
            const json& cell = obj["pos_cm"][size_t(i)];
            if (!cell.is_number()) {
                throw std::runtime_error("trajectory parse: line " + std::to_string(line_no) +
                                         ": non-numeric pos_cm entry");
            }
            rec.position_cm[i] = cell.get<double>();
        }
        rec.fov_v = require_number(obj, "fov_v", line_no);
        rec.fov_h = require_number(obj, "fov_h", line_no);
        if (!obj.contains("wasd") || !obj["wasd"].is_array() || obj["wasd"].size() != 4) {
            throw std::runtime_error("trajectory parse: line " + std::to_string(line_no) +
                                     ": field 'wasd' must hold 4 booleans");
        }
        for (int i = 0; i < 4; ++i) {
            const json& cell = obj["wasd"][size_t(i)];
            if (!cell.is_boolean()) {
                throw std::runtime_error("trajectory parse: line " + std::to_string(line_no) +
                                         ": non-boolean wasd entry");
            }
            rec.wasd[size_t(i)] = cell.get<bool>();
        }
        rec.fps = require_number(obj, "fps", line_no);
        try {
            rec.validate();
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error("trajectory parse: line " + std::to_string(line_no) + ": " +
                                     e.what());
        }
        traj.push_back(rec);
    }
    return traj;
}

Trajectory parse_trajectory(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("trajectory parse: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_trajectory_string(buf.str());
}

} // namespace viewrope
