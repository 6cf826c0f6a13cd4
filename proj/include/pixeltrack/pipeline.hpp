#pragma once

#include <map>
#include <vector>

#include "pixeltrack/mot_io.hpp"
#include "pixeltrack/simulator.hpp"
#include "pixeltrack/tracker.hpp"

namespace pixeltrack {

/// Run the tracker over per-frame detections and emit one result row per
/// track matched in that frame (conf carries the track score).
std::vector<MotRow> track_detections(const std::map<int, DetectionSet>& frames,
                                     const TrackerConfig& config, int frame_width,
                                     int frame_height);

/// Simulate observations in memory and track them (no files involved).
std::vector<MotRow> track_scene(const SceneTruth& truth, const TrackerConfig& config);

}  // namespace pixeltrack
