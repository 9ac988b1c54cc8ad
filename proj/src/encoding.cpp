#include "viewrope/encoding.hpp"

#include <cmath>
#include <stdexcept>

namespace viewrope {

namespace {

// largest multiple of 3 not exceeding n
int floor3(int n) { return n - n % 3; }

// lowest-frequency tail of a band: the trailing channels carry the smallest
// rotary frequencies
ChannelRange low_freq_tail(const ChannelRange& band, int want) {
    const int len = std::min(want, floor3(band.size()));
    return ChannelRange{band.end - len, band.end};
}

}  // namespace

ChannelLayout ChannelLayout::with_mode(LayoutMode mode, int total_dims) {
    ChannelLayout layout;
    layout.mode = mode;
    layout.total_dims = total_dims;
    if (total_dims == 128) {
        layout.t_band = {0, 44};
        layout.h_band = {44, 86};
        layout.w_band = {86, 128};
    } else {
        if (total_dims < 6 || total_dims % 2 != 0) {
            throw std::invalid_argument("channel layout: total_dims must be even and >= 6");
        }
        int part = (total_dims / 3) & ~1;  // even
        layout.h_band = {total_dims - 2 * part, total_dims - part};
        layout.w_band = {total_dims - part, total_dims};
        layout.t_band = {0, total_dims - 2 * part};
    }
    switch (mode) {
        case LayoutMode::TDimLowFreq:
            layout.vr_bands = {low_freq_tail(layout.t_band, total_dims == 128
                                                                ? 12
                                                                : floor3(layout.t_band.size() / 2))};
            break;
        case LayoutMode::HWDimLowFreq:
        case LayoutMode::HWDimReplace: {
            const int want = total_dims == 128 ? 12 : floor3(layout.h_band.size() / 2);
            layout.vr_bands = {low_freq_tail(layout.h_band, want),
                               low_freq_tail(layout.w_band, want)};
            break;
        }
        case LayoutMode::AllDims:
            layout.vr_bands = {{0, floor3(total_dims)}};
            break;
    }
    layout.validate();
    return layout;
}

void ChannelLayout::validate() const {
    if (total_dims <= 0) throw std::invalid_argument("channel layout: total_dims must be positive");
    auto check_band = [&](const ChannelRange& b, const char* name) {
        if (b.begin < 0 || b.end > total_dims || b.begin > b.end) {
            throw std::invalid_argument(std::string("channel layout: bad band ") + name);
        }
    };
    check_band(t_band, "t");
    check_band(h_band, "h");
    check_band(w_band, "w");
    if (t_band.size() % 2 || h_band.size() % 2 || w_band.size() % 2) {
        throw std::invalid_argument("channel layout: rotary bands must have even width");
    }
    for (size_t i = 0; i < vr_bands.size(); ++i) {
        check_band(vr_bands[i], "vr");
        if (vr_bands[i].size() <= 0 || vr_bands[i].size() % 3 != 0) {
            throw std::invalid_argument("channel layout: vr band width must be a positive multiple of 3");
        }
        for (size_t j = i + 1; j < vr_bands.size(); ++j) {
            if (vr_bands[i].begin < vr_bands[j].end && vr_bands[j].begin < vr_bands[i].end) {
                throw std::invalid_argument("channel layout: vr bands overlap");
            }
        }
    }
}

int ChannelLayout::vr_channel_count() const {
    int n = 0;
    for (const auto& b : vr_bands) n += b.size();
    return n;
}

template <typename T>
void vr_transform_inplace(T* vec, const Eigen::Matrix3d& r, const ChannelLayout& layout) {
    for (const auto& band : layout.vr_bands) {
        for (int c = band.begin; c + 2 < band.end; c += 3) {
            const Eigen::Vector3d v(double(vec[c]), double(vec[c + 1]), double(vec[c + 2]));
            const Eigen::Vector3d w = r * v;
            vec[c] = T(w.x());
            vec[c + 1] = T(w.y());
            vec[c + 2] = T(w.z());
        }
    }
}

template <typename T>
std::vector<T> vr_transform(const std::vector<T>& vec, const Eigen::Matrix3d& r,
                            const ChannelLayout& layout) {
    layout.validate();
    if (int(vec.size()) != layout.total_dims) {
        throw std::invalid_argument("vr_transform: vector length does not match layout");
    }
    if (!is_rotation(r)) {
        throw std::invalid_argument("vr_transform: rotation is not in SO(3)");
    }
    std::vector<T> out = vec;
    vr_transform_inplace(out.data(), r, layout);
    return out;
}

template <typename T>
RotatedQK<T> apply_viewrope(const TokenGrid<T>& q, const TokenGrid<T>& k, const RayField& rays,
                            const ChannelLayout& layout) {
    layout.validate();
    if (q.rows != rays.rows || q.cols != rays.cols || k.rows != rays.rows || k.cols != rays.cols) {
        throw std::invalid_argument("apply_viewrope: token grid dims do not match ray field");
    }
    if (q.dim != layout.total_dims || k.dim != layout.total_dims) {
        throw std::invalid_argument("apply_viewrope: token dim does not match layout");
    }
    RotatedQK<T> out;
    out.q = q;
    out.k = k;
    out.ray_rows = rays.rows;
    out.ray_cols = rays.cols;
    out.mode = layout.mode;
    for (int r = 0; r < rays.rows; ++r) {
        for (int c = 0; c < rays.cols; ++c) {
            const Eigen::Matrix3d& rot = rays.world(r, c);
            vr_transform_inplace(out.q.at(r, c), rot, layout);
            vr_transform_inplace(out.k.at(r, c), rot, layout);
        }
    }
    return out;
}

template <typename T>
double relative_score(const std::vector<T>& q, const std::vector<T>& k,
                      const Eigen::Matrix3d& r_i, const Eigen::Matrix3d& r_j,
                      const ChannelLayout& layout) {
    const std::vector<T> qr = vr_transform(q, r_i, layout);
    const std::vector<T> kr = vr_transform(k, r_j, layout);
    double acc = 0.0;
    for (int c = 0; c < layout.total_dims; ++c) acc += double(qr[size_t(c)]) * double(kr[size_t(c)]);
    return acc;
}

template <typename T>
double relative_score_via_relative_rotation(const std::vector<T>& q, const std::vector<T>& k,
                                            const Eigen::Matrix3d& r_i,
                                            const Eigen::Matrix3d& r_j,
                                            const ChannelLayout& layout) {
    layout.validate();
    if (int(q.size()) != layout.total_dims || int(k.size()) != layout.total_dims) {
        throw std::invalid_argument("relative_score: vector length does not match layout");
    }
    const Eigen::Matrix3d rel = r_i.transpose() * r_j;
    std::vector<char> in_band(size_t(layout.total_dims), 0);
    double acc = 0.0;
    for (const auto& band : layout.vr_bands) {
        for (int c = band.begin; c + 2 < band.end; c += 3) {
            const Eigen::Vector3d qv(double(q[size_t(c)]), double(q[size_t(c) + 1]),
                                     double(q[size_t(c) + 2]));
            const Eigen::Vector3d kv(double(k[size_t(c)]), double(k[size_t(c) + 1]),
                                     double(k[size_t(c) + 2]));
            acc += qv.dot(rel * kv);
            in_band[size_t(c)] = in_band[size_t(c) + 1] = in_band[size_t(c) + 2] = 1;
        }
    }
    for (int c = 0; c < layout.total_dims; ++c) {
        if (!in_band[size_t(c)]) acc += double(q[size_t(c)]) * double(k[size_t(c)]);
    }
    return acc;
}

namespace {

// true when the rotary pair (c, c+1) is silenced by a replace-mode vr band
bool pair_replaced(const ChannelLayout& layout, int c) {
    if (layout.mode != LayoutMode::HWDimReplace) return false;
    for (const auto& band : layout.vr_bands) {
        if (band.contains(c) || band.contains(c + 1)) return true;
    }
    return false;
}

template <typename T>
void rope_band_inplace(T* vec, const ChannelRange& band, int pos, const ChannelLayout& layout) {
    const int len = band.size();
    for (int i = 0; 2 * i + 1 < len; ++i) {
        const int c = band.begin + 2 * i;
        if (pair_replaced(layout, c)) continue;
        const double freq = std::pow(layout.rope_base, -2.0 * i / double(len));
        const double angle = double(pos) * freq;
        const double ca = std::cos(angle), sa = std::sin(angle);
        const double x = double(vec[c]), y = double(vec[c + 1]);
        vec[c] = T(x * ca - y * sa);
        vec[c + 1] = T(x * sa + y * ca);
    }
}

}  // namespace

template <typename T>
void apply_rope3d_inplace(T* vec, const PosTHW& pos, const ChannelLayout& layout) {
    rope_band_inplace(vec, layout.t_band, pos.t, layout);
    rope_band_inplace(vec, layout.h_band, pos.h, layout);
    rope_band_inplace(vec, layout.w_band, pos.w, layout);
}

template <typename T>
TokenGrid<T> apply_rope3d(const TokenGrid<T>& tokens, const std::vector<PosTHW>& positions,
                          const ChannelLayout& layout) {
    layout.validate();
    if (int(positions.size()) != tokens.count()) {
        throw std::invalid_argument("apply_rope3d: one position required per token");
    }
    if (tokens.dim != layout.total_dims) {
        throw std::invalid_argument("apply_rope3d: token dim does not match layout");
    }
    for (const auto& p : positions) {
        if (p.t < 0 || p.h < 0 || p.w < 0) {
            throw std::invalid_argument("apply_rope3d: positions must be non-negative");
        }
    }
    TokenGrid<T> out = tokens;
    for (int i = 0; i < tokens.count(); ++i) {
        apply_rope3d_inplace(out.data.data() + size_t(i) * out.dim, positions[size_t(i)], layout);
    }
    return out;
}

template <typename T>
void apply_position_encodings_inplace(T* vec, const PosTHW& pos, const Eigen::Matrix3d& world_rot,
                                      const ChannelLayout& layout, bool enable_viewrope) {
    apply_rope3d_inplace(vec, pos, layout);
    if (enable_viewrope) {
        vr_transform_inplace(vec, world_rot, layout);
    }
}

#define VIEWROPE_INSTANTIATE(T)                                                                    \
    template void vr_transform_inplace<T>(T*, const Eigen::Matrix3d&, const ChannelLayout&);       \
    template std::vector<T> vr_transform<T>(const std::vector<T>&, const Eigen::Matrix3d&,         \
                                            const ChannelLayout&);                                 \
    template RotatedQK<T> apply_viewrope<T>(const TokenGrid<T>&, const TokenGrid<T>&,              \
                                            const RayField&, const ChannelLayout&);                \
    template double relative_score<T>(const std::vector<T>&, const std::vector<T>&,                \
                                      const Eigen::Matrix3d&, const Eigen::Matrix3d&,              \
                                      const ChannelLayout&);                                       \
    template double relative_score_via_relative_rotation<T>(                                       \
        const std::vector<T>&, const std::vector<T>&, const Eigen::Matrix3d&,                      \
        const Eigen::Matrix3d&, const ChannelLayout&);                                             \
    template void apply_rope3d_inplace<T>(T*, const PosTHW&, const ChannelLayout&);                \
    template TokenGrid<T> apply_rope3d<T>(const TokenGrid<T>&, const std::vector<PosTHW>&,         \
                                          const ChannelLayout&);                                   \
    template void apply_position_encodings_inplace<T>(T*, const PosTHW&, const Eigen::Matrix3d&,   \
                                                      const ChannelLayout&, bool);

VIEWROPE_INSTANTIATE(float)
VIEWROPE_INSTANTIATE(double)

#undef VIEWROPE_INSTANTIATE

} // namespace viewrope
