#include "pixeltrack/grid_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace pixeltrack {

namespace {

constexpr char kMagic[4] = {'P', '3', 'A', 'G'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw std::runtime_error("grid_io: truncated header");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f32(std::ostream& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

float get_f32(std::istream& in) {
    std::uint32_t bits = get_u32(in);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

}  // namespace

void write_grid(std::ostream& out, const FeatureGrid& grid) {
    out.write(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(grid.height));
    put_u32(out, static_cast<std::uint32_t>(grid.width));
    put_u32(out, static_cast<std::uint32_t>(grid.channels));
    for (double v : grid.data) put_f32(out, static_cast<float>(v));
    if (!out) throw std::runtime_error("grid_io: write failed");
}

void write_grid(const std::string& path, const FeatureGrid& grid) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("grid_io: cannot open for write: " + path);
    write_grid(f, grid);
}

FeatureGrid read_grid(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("grid_io: bad magic");
    const std::uint32_t version = get_u32(in);
    if (version != kVersion)
        throw std::runtime_error("grid_io: unsupported version");
    const std::uint32_t h = get_u32(in);
    const std::uint32_t w = get_u32(in);
    const std::uint32_t c = get_u32(in);
    FeatureGrid grid(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c));
    for (double& v : grid.data) v = static_cast<double>(get_f32(in));
    if (!in) throw std::runtime_error("grid_io: truncated data");
    return grid;
}

FeatureGrid read_grid(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("grid_io: cannot open: " + path);
    return read_grid(f);
}

FeatureGrid to_grid(const ScalarGrid& g) {
    FeatureGrid out(g.height, g.width, 1);
    out.data = g.data;
    return out;
}

FeatureGrid to_grid(const FlowField& f) {
    FeatureGrid out(f.height, f.width, 2);
    std::copy(f.dx.begin(), f.dx.end(), out.data.begin());
    std::copy(f.dy.begin(), f.dy.end(), out.data.begin() + f.dx.size());
    return out;
}

ScalarGrid to_scalar(const FeatureGrid& g) {
    if (g.channels != 1)
        throw std::invalid_argument("to_scalar: expected a 1-channel grid");
    ScalarGrid out(g.height, g.width);
    out.data = g.data;
    return out;
}

FlowField to_flow(const FeatureGrid& g) {
    if (g.channels != 2)
        throw std::invalid_argument("to_flow: expected a 2-channel grid");
    FlowField out(g.height, g.width);
    std::copy(g.data.begin(), g.data.begin() + out.dx.size(), out.dx.begin());
    std::copy(g.data.begin() + out.dx.size(), g.data.end(), out.dy.begin());
    return out;
}

void write_tensors(const std::string& path, const TensorMap& tensors) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("grid_io: cannot open for write: " + path);
    for (const auto& [name, grid] : tensors) {
        put_u32(f, static_cast<std::uint32_t>(name.size()));
        f.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_grid(f, grid);
    }
}

TensorMap read_tensors(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("grid_io: cannot open: " + path);
    TensorMap tensors;
    while (f.peek() != std::char_traits<char>::eof()) {
        const std::uint32_t len = get_u32(f);
        std::string name(len, '\0');
        f.read(name.data(), len);
        if (!f) throw std::runtime_error("grid_io: truncated tensor name");
        tensors.emplace_back(std::move(name), read_grid(f));
    }
    return tensors;
}

}  // namespace pixeltrack
