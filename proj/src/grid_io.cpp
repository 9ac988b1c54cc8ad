#include "viewrope/grid_io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace viewrope {

namespace {

constexpr char kMagic[4] = {'V', 'R', 'K', 'D'};

void put_u32_le(std::ostream& out, uint32_t v) {
    const unsigned char bytes[4] = {static_cast<unsigned char>(v & 0xff),
                                    static_cast<unsigned char>((v >> 8) & 0xff),
                                    static_cast<unsigned char>((v >> 16) & 0xff),
                                    static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

uint32_t get_u32_le(std::istream& in) {
    unsigned char bytes[4];
    in.read(reinterpret_cast<char*>(bytes), 4);
    if (!in) throw std::runtime_error("grid read: truncated header");
    return uint32_t(bytes[0]) | (uint32_t(bytes[1]) << 8) | (uint32_t(bytes[2]) << 16) |
           (uint32_t(bytes[3]) << 24);
}

}  // namespace

void write_grid_binary(const FloatGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("grid write: cannot open " + path);
    out.write(kMagic, 4);
    put_u32_le(out, uint32_t(grid.height));
    put_u32_le(out, uint32_t(grid.width));
    for (float v : grid.values) {
        uint32_t bits;
        std::memcpy(&bits, &v, 4);
        put_u32_le(out, bits);
    }
    if (!out) throw std::runtime_error("grid write: failed writing " + path);
}

FloatGrid read_grid_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("grid read: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw std::runtime_error("grid read: bad magic in " + path);
    }
    const uint32_t height = get_u32_le(in);
    const uint32_t width = get_u32_le(in);
    if (height == 0 || width == 0 || uint64_t(height) * width > (1u << 28)) {
        throw std::runtime_error("grid read: implausible dims in " + path);
    }
    FloatGrid grid(int(width), int(height));
    for (size_t i = 0; i < grid.count(); ++i) {
        const uint32_t bits = get_u32_le(in);
        std::memcpy(&grid.values[i], &bits, 4);
    }
    return grid;
}

void write_grid_csv(const FloatGrid& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("grid write: cannot open " + path);
    char buf[64];
    for (int r = 0; r < grid.height; ++r) {
        for (int c = 0; c < grid.width; ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", double(grid.at(r, c)));
            out << buf << (c + 1 == grid.width ? "" : ",");
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("grid write: failed writing " + path);
}

FloatGrid read_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("grid read: cannot open " + path);
    std::vector<std::vector<float>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<float> row;
        while (std::getline(ls, cell, ',')) row.push_back(std::stof(cell));
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw std::runtime_error("grid read: ragged rows in " + path);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("grid read: empty file " + path);
    FloatGrid grid(int(rows.front().size()), int(rows.size()));
    for (size_t r = 0; r < rows.size(); ++r) {
        for (size_t c = 0; c < rows[r].size(); ++c) grid.at(int(r), int(c)) = rows[r][c];
    }
    return grid;
}

} // namespace viewrope
