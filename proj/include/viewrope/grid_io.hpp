#pragma once

#include <string>
#include <vector>

namespace viewrope {

/// Row-major [height x width] grid of 32-bit floats; the shared container
/// for frames and depth maps.
struct FloatGrid {
    int width = 0;
    int height = 0;
    std::vector<float> values;

    FloatGrid() = default;
    FloatGrid(int w, int h, float fill = 0.0f)
        : width(w), height(h), values(size_t(w) * h, fill) {}
    float& at(int row, int col) { return values[size_t(row) * width + col]; }
    float at(int row, int col) const { return values[size_t(row) * width + col]; }
    size_t count() const { return values.size(); }
};

/// Binary format: magic "VRKD", then height and width as 32-bit little-endian
/// unsigned integers, then row-major 32-bit floats.
void write_grid_binary(const FloatGrid& grid, const std::string& path);
FloatGrid read_grid_binary(const std::string& path);

/// Plain CSV, one grid row per line; for small hand-written test inputs.
void write_grid_csv(const FloatGrid& grid, const std::string& path);
FloatGrid read_grid_csv(const std::string& path);

} // namespace viewrope
