#pragma once

#include <cstddef>
#include <vector>

namespace pixeltrack {

/// Dense H x W x C real-valued feature map.
///
/// Storage is channel-planar row-major: data[c*H*W + y*W + x]. All values
/// are held as 64-bit reals in memory; the on-disk format (grid_io) stores
/// 32-bit floats. Instances are plain values and safe to share across
/// threads once constructed.
struct FeatureGrid {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> data;

    FeatureGrid() = default;
    FeatureGrid(int height, int width, int channels, double fill = 0.0);

    bool empty() const { return height <= 0 || width <= 0 || channels <= 0; }
    std::size_t plane_size() const { return static_cast<std::size_t>(height) * width; }

    double& at(int c, int y, int x) { return data[(static_cast<std::size_t>(c) * height + y) * width + x]; }
    double at(int c, int y, int x) const { return data[(static_cast<std::size_t>(c) * height + y) * width + x]; }
};

/// Single-channel real grid (heatmaps, similarity weight maps).
struct ScalarGrid {
    int height = 0;
    int width = 0;
    std::vector<double> data;

    ScalarGrid() = default;
    ScalarGrid(int height, int width, double fill = 0.0);

    bool empty() const { return height <= 0 || width <= 0; }
    double& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }

    /// Sum of all values.
    double sum() const;
    /// Location and value of the maximum entry (first occurrence in row-major order).
    struct Peak { int x = 0; int y = 0; double value = 0.0; };
    Peak peak() const;
};

/// Per-object center heatmap, values in (0,1) for model output, [0,1] for targets.
using Heatmap = ScalarGrid;

/// Per-pixel displacement field in pixel units. dx/dy share dimensions.
struct FlowField {
    int height = 0;
    int width = 0;
    std::vector<double> dx;
    std::vector<double> dy;

    FlowField() = default;
    FlowField(int height, int width, double fill_dx = 0.0, double fill_dy = 0.0);

    bool empty() const { return height <= 0 || width <= 0; }
    double dx_at(int y, int x) const { return dx[static_cast<std::size_t>(y) * width + x]; }
    double dy_at(int y, int x) const { return dy[static_cast<std::size_t>(y) * width + x]; }
    double& dx_at(int y, int x) { return dx[static_cast<std::size_t>(y) * width + x]; }
    double& dy_at(int y, int x) { return dy[static_cast<std::size_t>(y) * width + x]; }
};

/// Bilinear interpolation of the four texels around (x, y), one value per
/// channel. Out-of-bounds texels read as zero (border padding), so samples
/// far outside the grid fade to the zero vector.
std::vector<double> bilinear_sample(const FeatureGrid& grid, double x, double y);

/// Single-channel overload of bilinear_sample.
double bilinear_sample(const ScalarGrid& grid, double x, double y);

/// Backward warp: output(p) = bilinear_sample(grid, p + flow(p)) per channel.
/// Flow dimensions must equal grid dimensions.
FeatureGrid warp(const FeatureGrid& grid, const FlowField& flow);

/// Shift a grid by (dx, dy): output(x, y) = sample(input, x - dx, y - dy),
/// zero fill at the borders. Integer shifts are exact index moves.
ScalarGrid translate(const ScalarGrid& grid, double dx, double dy);

/// Bilinear resample of a scalar grid to the target dimensions
/// (endpoint-aligned mapping; values are interpolated, not rescaled).
ScalarGrid resize_bilinear(const ScalarGrid& grid, int target_height, int target_width);

/// Resample a flow field to new dimensions and rescale the displacement
/// magnitudes by (target/source) per axis so vectors stay consistent with
/// the new pixel raster.
FlowField resize_flow(const FlowField& flow, int target_height, int target_width);

}  // namespace pixeltrack
