#include "viewrope/warp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace viewrope {

double huber(double r, double delta) {
    const double a = std::abs(r);
    if (a <= delta) return 0.5 * r * r;
    return delta * (a - 0.5 * delta);
}

Eigen::Vector3d backproject(const CameraPose& pose, double u, double v, double depth) {
    if (!(depth > 0.0) || !std::isfinite(depth)) {
        throw std::invalid_argument("backproject: depth must be positive and finite");
    }
    const Intrinsics& k = pose.intrinsics;
    return Eigen::Vector3d((u - k.cx) / k.fx * depth, (v - k.cy) / k.fy * depth, depth);
}

Eigen::Vector2d project(const Intrinsics& k, const Eigen::Vector3d& x) {
    if (!(x.z() > 0.0)) {
        throw std::invalid_argument("project: point must have positive depth");
    }
    return Eigen::Vector2d(k.fx * x.x() / x.z() + k.cx, k.fy * x.y() / x.z() + k.cy);
}

Eigen::Vector3d transform_point(const Eigen::Vector3d& x_t, const CameraPose& pose_t,
                                const CameraPose& pose_k) {
    const Eigen::Matrix3d rel = pose_k.rotation * pose_t.rotation.transpose();
    return rel * x_t + (pose_k.position - rel * pose_t.position);
}

CameraPose extrinsic_from_c2w(const CameraPose& c2w) {
    CameraPose ext = c2w;
    ext.rotation = c2w.rotation.transpose();
    ext.position = -(c2w.rotation.transpose() * c2w.position);
    return ext;
}

namespace {

double sample_impl(const FloatGrid& grid, double u, double v, bool bilinear) {
    if (grid.width <= 0 || grid.height <= 0) {
        throw std::invalid_argument("sample: empty grid");
    }
    if (u < 0.0 || u > grid.width - 1 || v < 0.0 || v > grid.height - 1) {
        throw std::invalid_argument("sample: coordinate outside grid");
    }
    if (!bilinear) {
        const int c = int(std::lround(u));
        const int r = int(std::lround(v));
        return double(grid.at(r, c));
    }
    const int c0 = std::min(int(std::floor(u)), std::max(0, grid.width - 2));
    const int r0 = std::min(int(std::floor(v)), std::max(0, grid.height - 2));
    const int c1 = std::min(c0 + 1, grid.width - 1);
    const int r1 = std::min(r0 + 1, grid.height - 1);
    const double fu = u - c0;
    const double fv = v - r0;
    const double top = double(grid.at(r0, c0)) * (1.0 - fu) + double(grid.at(r0, c1)) * fu;
    const double bot = double(grid.at(r1, c0)) * (1.0 - fu) + double(grid.at(r1, c1)) * fu;
    return top * (1.0 - fv) + bot * fv;
}

}  // namespace

double bilinear_sample(const FloatGrid& grid, double u, double v) {
    return sample_impl(grid, u, v, true);
}

double nearest_sample(const FloatGrid& grid, double u, double v) {
    return sample_impl(grid, u, v, false);
}

WarpResult warp_view(const DepthMap& source, const CameraPose& target,
                     const FloatGrid* target_depth, double tau_occ) {
    source.pose.validate();
    target.validate();
    const FloatGrid& depth = source.values;
    WarpResult res;
    res.width = depth.width;
    res.height = depth.height;
    const size_t n = depth.count();
    res.u.assign(n, 0.0);
    res.v.assign(n, 0.0);
    res.in_front.assign(n, 0);
    res.covisible.assign(n, 0);

    const Intrinsics& kt = target.intrinsics;
    for (int row = 0; row < depth.height; ++row) {
        for (int col = 0; col < depth.width; ++col) {
            const size_t i = res.index(row, col);
            const double d = double(depth.at(row, col));
            if (!std::isfinite(d) || d <= 0.0) continue;
            const Eigen::Vector3d x_t = backproject(source.pose, col, row, d);
            const Eigen::Vector3d x_k = transform_point(x_t, source.pose, target);
            if (!(x_k.z() > 0.0)) continue;
            res.in_front[i] = 1;
            const double u = kt.fx * x_k.x() / x_k.z() + kt.cx;
            const double v = kt.fy * x_k.y() / x_k.z() + kt.cy;
            res.u[i] = u;
            res.v[i] = v;
            const bool in_bounds =
                u >= 0.0 && u <= kt.width - 1 && v >= 0.0 && v <= kt.height - 1;
            if (!in_bounds) continue;
            if (target_depth != nullptr) {
                const double dz = nearest_sample(*target_depth, u, v);
                if (!std::isfinite(dz) || dz <= 0.0) continue;
                if (std::abs(dz - x_k.z()) / x_k.z() > tau_occ) continue;
            }
            res.covisible[i] = 1;
        }
    }
    return res;
}

LoopClosureReport loop_closure_loss(const std::vector<FloatGrid>& frames,
                                    const std::vector<CameraPose>& poses,
                                    const std::vector<const FloatGrid*>& depths, double eps,
                                    double lambda, double rho_delta, double tau_occ) {
    if (frames.size() != poses.size() || frames.size() != depths.size()) {
        throw std::invalid_argument("loop_closure_loss: sequences must have equal length");
    }
    LoopClosureReport report;
    const int count = int(frames.size());
    for (int t = 0; t < count; ++t) {
        for (int k = 0; k < t; ++k) {
            if (!revisit(poses[size_t(t)], poses[size_t(k)], eps, lambda)) continue;
            if (depths[size_t(t)] == nullptr) {
                report.skipped.emplace_back(t, k);
                continue;
            }
            const DepthMap source{*depths[size_t(t)], poses[size_t(t)]};
            const WarpResult warp =
                warp_view(source, poses[size_t(k)], depths[size_t(k)], tau_occ);
            PairLoss pair;
            pair.t = t;
            pair.k = k;
            const FloatGrid& frame_t = frames[size_t(t)];
            const FloatGrid& frame_k = frames[size_t(k)];
            for (int row = 0; row < warp.height; ++row) {
                for (int col = 0; col < warp.width; ++col) {
                    const size_t i = warp.index(row, col);
                    if (!warp.covisible[i]) continue;
                    const double sampled = bilinear_sample(frame_k, warp.u[i], warp.v[i]);
                    pair.loss += huber(double(frame_t.at(row, col)) - sampled, rho_delta);
                    ++pair.covisible_pixels;
                }
            }
            report.total += pair.loss;
            report.pairs.push_back(pair);
        }
    }
    return report;
}

double default_frame_distance(const FloatGrid& a, const FloatGrid& b) {
    auto normalize = [](const FloatGrid& g) {
        double mean = 0.0;
        for (float v : g.values) mean += double(v);
        mean /= double(g.count());
        double var = 0.0;
        for (float v : g.values) var += (double(v) - mean) * (double(v) - mean);
        var /= double(g.count());
        const double inv = 1.0 / std::sqrt(var + 1e-12);
        std::vector<double> out(g.count());
        for (size_t i = 0; i < g.count(); ++i) out[i] = (double(g.values[i]) - mean) * inv;
        return out;
    };
    const std::vector<double> na = normalize(a);
    const std::vector<double> nb = normalize(b);
    double acc = 0.0;
    for (size_t i = 0; i < na.size(); ++i) acc += huber(na[i] - nb[i], 0.1);
    return acc / double(na.size());
}

double lce(const FloatGrid& start, const FloatGrid& returned, const FrameDistance& distance) {
    if (start.width != returned.width || start.height != returned.height) {
        throw std::invalid_argument("lce: frame dims must match");
    }
    if (distance) return distance(start, returned);
    return default_frame_distance(start, returned);
}

} // namespace viewrope
