#include "pixeltrack/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace pixeltrack {

FeatureGrid::FeatureGrid(int height_, int width_, int channels_, double fill)
    : height(height_), width(width_), channels(channels_) {
    if (height < 0 || width < 0 || channels < 0)
        throw std::invalid_argument("FeatureGrid: negative dimensions");
    data.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

ScalarGrid::ScalarGrid(int height_, int width_, double fill)
    : height(height_), width(width_) {
    if (height < 0 || width < 0)
        throw std::invalid_argument("ScalarGrid: negative dimensions");
    data.assign(static_cast<std::size_t>(height) * width, fill);
}

double ScalarGrid::sum() const {
    double s = 0.0;
    for (double v : data) s += v;
    return s;
}

ScalarGrid::Peak ScalarGrid::peak() const {
    Peak p;
    if (data.empty()) return p;
    std::size_t best = 0;
    for (std::size_t i = 1; i < data.size(); ++i)
        if (data[i] > data[best]) best = i;
    p.value = data[best];
    p.y = static_cast<int>(best / width);
    p.x = static_cast<int>(best % width);
    return p;
}

FlowField::FlowField(int height_, int width_, double fill_dx, double fill_dy)
    : height(height_), width(width_) {
    if (height < 0 || width < 0)
        throw std::invalid_argument("FlowField: negative dimensions");
    dx.assign(static_cast<std::size_t>(height) * width, fill_dx);
    dy.assign(static_cast<std::size_t>(height) * width, fill_dy);
}

namespace {

// Corner indices and weights for one bilinear read. Out-of-bounds corners
// get weight applied to an implicit zero, handled by the callers.
struct BilinearTaps {
    int x0, x1, y0, y1;
    double w00, w01, w10, w11;  // (y,x) order: w[y][x]
};

inline BilinearTaps make_taps(double x, double y) {
    BilinearTaps t;
    double fx = std::floor(x);
    double fy = std::floor(y);
    t.x0 = static_cast<int>(fx);
    t.y0 = static_cast<int>(fy);
    t.x1 = t.x0 + 1;
    t.y1 = t.y0 + 1;
    double ax = x - fx;
    double ay = y - fy;
    t.w00 = (1.0 - ay) * (1.0 - ax);
    t.w01 = (1.0 - ay) * ax;
    t.w10 = ay * (1.0 - ax);
    t.w11 = ay * ax;
    return t;
}

inline bool inside(int v, int n) { return v >= 0 && v < n; }

}  // namespace

std::vector<double> bilinear_sample(const FeatureGrid& grid, double x, double y) {
    if (grid.empty())
        throw std::invalid_argument("bilinear_sample: empty grid");
    if (!std::isfinite(x) || !std::isfinite(y))
        throw std::invalid_argument("bilinear_sample: non-finite coordinates");

    std::vector<double> out(grid.channels, 0.0);
    const BilinearTaps t = make_taps(x, y);
    const bool x0i = inside(t.x0, grid.width), x1i = inside(t.x1, grid.width);
    const bool y0i = inside(t.y0, grid.height), y1i = inside(t.y1, grid.height);
    if (!((x0i || x1i) && (y0i || y1i))) return out;

    for (int c = 0; c < grid.channels; ++c) {
        double v = 0.0;
        if (y0i && x0i) v += t.w00 * grid.at(c, t.y0, t.x0);
        if (y0i && x1i) v += t.w01 * grid.at(c, t.y0, t.x1);
        if (y1i && x0i) v += t.w10 * grid.at(c, t.y1, t.x0);
        if (y1i && x1i) v += t.w11 * grid.at(c, t.y1, t.x1);
        out[c] = v;
    }
    return out;
}

double bilinear_sample(const ScalarGrid& grid, double x, double y) {
    if (grid.empty())
        throw std::invalid_argument("bilinear_sample: empty grid");
    if (!std::isfinite(x) || !std::isfinite(y))
        throw std::invalid_argument("bilinear_sample: non-finite coordinates");

    const BilinearTaps t = make_taps(x, y);
    double v = 0.0;
    if (inside(t.y0, grid.height)) {
        if (inside(t.x0, grid.width)) v += t.w00 * grid.at(t.y0, t.x0);
        if (inside(t.x1, grid.width)) v += t.w01 * grid.at(t.y0, t.x1);
    }
    if (inside(t.y1, grid.height)) {
        if (inside(t.x0, grid.width)) v += t.w10 * grid.at(t.y1, t.x0);
        if (inside(t.x1, grid.width)) v += t.w11 * grid.at(t.y1, t.x1);
    }
    return v;
}

FeatureGrid warp(const FeatureGrid& grid, const FlowField& flow) {
    if (grid.empty())
        throw std::invalid_argument("warp: empty grid");
    if (flow.height != grid.height || flow.width != grid.width)
        throw std::invalid_argument("warp: flow dimensions do not match grid");

    FeatureGrid out(grid.height, grid.width, grid.channels);
    for (int y = 0; y < grid.height; ++y) {
        for (int x = 0; x < grid.width; ++x) {
            const double sx = x + flow.dx_at(y, x);
            const double sy = y + flow.dy_at(y, x);
            const BilinearTaps t = make_taps(sx, sy);
            const bool x0i = inside(t.x0, grid.width), x1i = inside(t.x1, grid.width);
            const bool y0i = inside(t.y0, grid.height), y1i = inside(t.y1, grid.height);
            if (!((x0i || x1i) && (y0i || y1i))) continue;
            for (int c = 0; c < grid.channels; ++c) {
                double v = 0.0;
                if (y0i && x0i) v += t.w00 * grid.at(c, t.y0, t.x0);
                if (y0i && x1i) v += t.w01 * grid.at(c, t.y0, t.x1);
                if (y1i && x0i) v += t.w10 * grid.at(c, t.y1, t.x0);
                if (y1i && x1i) v += t.w11 * grid.at(c, t.y1, t.x1);
                out.at(c, y, x) = v;
            }
        }
    }
    return out;
}

ScalarGrid translate(const ScalarGrid& grid, double dx, double dy) {
    if (grid.empty())
        throw std::invalid_argument("translate: empty grid");

    ScalarGrid out(grid.height, grid.width);
    // Integer shifts are pure index moves, bit-exact.
    if (dx == std::floor(dx) && dy == std::floor(dy)) {
        const int ix = static_cast<int>(dx);
        const int iy = static_cast<int>(dy);
        for (int y = 0; y < grid.height; ++y) {
            const int sy = y - iy;
            if (!inside(sy, grid.height)) continue;
            for (int x = 0; x < grid.width; ++x) {
                const int sx = x - ix;
                if (inside(sx, grid.width)) out.at(y, x) = grid.at(sy, sx);
            }
        }
        return out;
    }
    for (int y = 0; y < grid.height; ++y)
        for (int x = 0; x < grid.width; ++x)
            out.at(y, x) = bilinear_sample(grid, x - dx, y - dy);
    return out;
}

namespace {

// Endpoint-aligned source coordinate for resampling: target index i in
// [0, tn) maps to i * (sn - 1) / (tn - 1), degenerating to 0 for tn == 1.
inline double resample_coord(int i, int tn, int sn) {
    if (tn <= 1 || sn <= 1) return 0.0;
    return static_cast<double>(i) * (sn - 1) / (tn - 1);
}

}  // namespace

ScalarGrid resize_bilinear(const ScalarGrid& grid, int target_height, int target_width) {
    if (grid.empty())
        throw std::invalid_argument("resize_bilinear: empty grid");
    if (target_height < 1 || target_width < 1)
        throw std::invalid_argument("resize_bilinear: target dimensions must be >= 1");

    ScalarGrid out(target_height, target_width);
    for (int y = 0; y < target_height; ++y) {
        const double sy = resample_coord(y, target_height, grid.height);
        for (int x = 0; x < target_width; ++x) {
            const double sx = resample_coord(x, target_width, grid.width);
            out.at(y, x) = bilinear_sample(grid, sx, sy);
        }
    }
    return out;
}

FlowField resize_flow(const FlowField& flow, int target_height, int target_width) {
    if (flow.empty())
        throw std::invalid_argument("resize_flow: empty flow");
    if (target_height < 1 || target_width < 1)
        throw std::invalid_argument("resize_flow: target dimensions must be >= 1");
    if (target_height == flow.height && target_width == flow.width) return flow;

    const double scale_x = static_cast<double>(target_width) / flow.width;
    const double scale_y = static_cast<double>(target_height) / flow.height;
    FlowField out(target_height, target_width);
    for (int y = 0; y < target_height; ++y) {
        const double sy = resample_coord(y, target_height, flow.height);
        for (int x = 0; x < target_width; ++x) {
            const double sx = resample_coord(x, target_width, flow.width);
            const BilinearTaps t = make_taps(sx, sy);
            const int x0 = std::min(std::max(t.x0, 0), flow.width - 1);
            const int x1 = std::min(std::max(t.x1, 0), flow.width - 1);
            const int y0 = std::min(std::max(t.y0, 0), flow.height - 1);
            const int y1 = std::min(std::max(t.y1, 0), flow.height - 1);
            const double vx = t.w00 * flow.dx_at(y0, x0) + t.w01 * flow.dx_at(y0, x1) +
                              t.w10 * flow.dx_at(y1, x0) + t.w11 * flow.dx_at(y1, x1);
            const double vy = t.w00 * flow.dy_at(y0, x0) + t.w01 * flow.dy_at(y0, x1) +
                              t.w10 * flow.dy_at(y1, x0) + t.w11 * flow.dy_at(y1, x1);
            out.dx_at(y, x) = vx * scale_x;
            out.dy_at(y, x) = vy * scale_y;
        }
    }
    return out;
}

}  // namespace pixeltrack
