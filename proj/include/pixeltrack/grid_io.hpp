#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "pixeltrack/grid.hpp"

namespace pixeltrack {

// Grid blob layout: magic "P3AG", then little-endian u32 fields
// (version = 1, height, width, channels), then height*width*channels
// IEEE-754 little-endian 32-bit floats, channel-planar.

void write_grid(std::ostream& out, const FeatureGrid& grid);
void write_grid(const std::string& path, const FeatureGrid& grid);

FeatureGrid read_grid(std::istream& in);
FeatureGrid read_grid(const std::string& path);

/// One-channel view helpers for storing heatmaps and flow fields in the
/// same container format (flow is a 2-channel grid: dx plane then dy plane).
FeatureGrid to_grid(const ScalarGrid& g);
FeatureGrid to_grid(const FlowField& f);
ScalarGrid to_scalar(const FeatureGrid& g);
FlowField to_flow(const FeatureGrid& g);

/// Named tensor manifest: a flat sequence of entries, each
/// (u32 name length, name bytes, grid blob). Used for decoder parameters.
using TensorMap = std::vector<std::pair<std::string, FeatureGrid>>;

void write_tensors(const std::string& path, const TensorMap& tensors);
TensorMap read_tensors(const std::string& path);

}  // namespace pixeltrack
