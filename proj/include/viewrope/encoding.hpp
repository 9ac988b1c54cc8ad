#pragma once

#include <vector>

#include "viewrope/geometry.hpp"

namespace viewrope {

/// Where the ray-rotation channels live relative to the standard
/// temporal/spatial rotary bands.
enum class LayoutMode {
    TDimLowFreq,   // lowest-frequency tail of the temporal band
    HWDimLowFreq,  // lowest-frequency tails of the H and W bands
    HWDimReplace,  // same tails, with the resident rotary angles zeroed there
    AllDims,       // largest multiple-of-3 prefix of the whole head
};

struct ChannelRange {
    int begin = 0;
    int end = 0;  // half-open
    int size() const { return end - begin; }
    bool contains(int c) const { return c >= begin && c < end; }
};

/// Channel layout for one attention head. t/h/w bands carry standard rotary
/// encoding; vr_bands carry the ray rotation (each a multiple of 3 wide,
/// grouped into consecutive channel triples).
struct ChannelLayout {
    int total_dims = 128;
    ChannelRange t_band{0, 44};
    ChannelRange h_band{44, 86};
    ChannelRange w_band{86, 128};
    std::vector<ChannelRange> vr_bands{{32, 44}};
    LayoutMode mode = LayoutMode::TDimLowFreq;
    double rope_base = 10000.0;

    /// Default layout for the given mode. total_dims must allow the standard
    /// 44/42/42 split scaled proportionally; the stock 128-dim split is used
    /// when total_dims == 128, otherwise bands are divided near-evenly with
    /// even sizes.
    static ChannelLayout with_mode(LayoutMode mode, int total_dims = 128);

    /// Throws std::invalid_argument on malformed bands (vr band not a
    /// multiple of 3, out of range, or overlapping another vr band).
    void validate() const;

    int vr_channel_count() const;
    int subvector_count() const { return vr_channel_count() / 3; }
};

/// Integer (t, h, w) position of a token.
struct PosTHW {
    int t = 0;
    int h = 0;
    int w = 0;
};

/// Row-major grid of d-dimensional token vectors.
template <typename T>
struct TokenGrid {
    int rows = 0;
    int cols = 0;
    int dim = 0;
    std::vector<T> data;

    TokenGrid() = default;
    TokenGrid(int r, int c, int d) : rows(r), cols(c), dim(d), data(size_t(r) * c * d, T(0)) {}
    int count() const { return rows * cols; }
    T* at(int row, int col) { return data.data() + (size_t(row) * cols + col) * dim; }
    const T* at(int row, int col) const { return data.data() + (size_t(row) * cols + col) * dim; }
};

/// Rotates each consecutive 3-channel subvector of the vr bands by r,
/// leaving every other channel untouched. Rotation math is double precision.
template <typename T>
void vr_transform_inplace(T* vec, const Eigen::Matrix3d& r, const ChannelLayout& layout);

template <typename T>
std::vector<T> vr_transform(const std::vector<T>& vec, const Eigen::Matrix3d& r,
                            const ChannelLayout& layout);

/// Query/key grids after the ray-rotation transform, with the producing
/// grid shape and layout mode kept for provenance.
template <typename T>
struct RotatedQK {
    TokenGrid<T> q;
    TokenGrid<T> k;
    int ray_rows = 0;
    int ray_cols = 0;
    LayoutMode mode = LayoutMode::TDimLowFreq;
};

/// Applies each patch's world rotation to the matching q/k token.
/// Grid dims must equal the ray field dims.
template <typename T>
RotatedQK<T> apply_viewrope(const TokenGrid<T>& q, const TokenGrid<T>& k, const RayField& rays,
                            const ChannelLayout& layout);

/// <VR(q, R_i), VR(k, R_j)>: rotate both vectors, then take the dot product.
template <typename T>
double relative_score(const std::vector<T>& q, const std::vector<T>& k,
                      const Eigen::Matrix3d& r_i, const Eigen::Matrix3d& r_j,
                      const ChannelLayout& layout);

/// Same quantity evaluated through the relative rotation R_i^-1 R_j applied
/// on the vr bands plus the plain dot product on the complement. Kept as an
/// independent evaluation route; must agree with relative_score to 1e-6.
template <typename T>
double relative_score_via_relative_rotation(const std::vector<T>& q, const std::vector<T>& k,
                                            const Eigen::Matrix3d& r_i,
                                            const Eigen::Matrix3d& r_j,
                                            const ChannelLayout& layout);

/// Standard rotary encoding over the t/h/w bands with geometric frequencies
/// (base from the layout). Channel pairs (2i, 2i+1) within each band rotate
/// by pos * base^(-2i/band); in HWDimReplace mode the pairs covered by a vr
/// band keep a zero angle so tensor shapes stay mode-independent.
template <typename T>
void apply_rope3d_inplace(T* vec, const PosTHW& pos, const ChannelLayout& layout);

template <typename T>
TokenGrid<T> apply_rope3d(const TokenGrid<T>& tokens, const std::vector<PosTHW>& positions,
                          const ChannelLayout& layout);

/// Fixed co-application order on shared channels: standard rotary first,
/// then the ray rotation. This order is pinned by a regression test.
template <typename T>
void apply_position_encodings_inplace(T* vec, const PosTHW& pos, const Eigen::Matrix3d& world_rot,
                                      const ChannelLayout& layout, bool enable_viewrope);

} // namespace viewrope
