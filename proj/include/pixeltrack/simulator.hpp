#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pixeltrack/grid.hpp"
#include "pixeltrack/targets.hpp"
#include "pixeltrack/tracker.hpp"

namespace pixeltrack {

enum class MotionModel {
    constant_velocity,  // straight lines, bouncing at the borders
    sinusoidal,         // constant velocity plus lateral sine drift
    crossing_pairs,     // object pairs on head-on paths crossing mid-sequence
};

/// Frames [first_frame, last_frame] (1-based, inclusive) during which an
/// object is invisible.
struct OcclusionInterval {
    int object = 0;
    int first_frame = 0;
    int last_frame = 0;
};

struct SceneConfig {
    int width = 256;
    int height = 256;
    int num_objects = 10;
    int num_frames = 200;
    MotionModel motion = MotionModel::constant_velocity;
    std::vector<OcclusionInterval> occlusions;

    double noise_std = 0.0;       // additive heatmap noise, clipped to [0,1]
    double dropout = 0.0;         // probability a visible object goes undetected
    double clutter_rate = 0.0;    // expected spurious detections per frame
    double clutter_score_min = 0.50;
    double clutter_score_max = 0.85;
    double amp_min = 1.0;         // per-detection heatmap amplitude range;
    double amp_max = 1.0;         // the detection score follows the peak

    double min_size = 24.0;
    double max_size = 40.0;
    double min_speed = 0.5;
    double max_speed = 1.5;
    double wobble_amp = 0.0;      // lateral sine drift, used by sinusoidal and
    double wobble_period = 40.0;  // crossing scenes

    int feature_channels = 16;
    int class_id = 1;
    std::uint64_t seed = 1;
};

/// Exact trajectories plus per-object feature directions. Grids derived
/// from the truth (flow, features) are recomputed on demand.
struct SceneTruth {
    SceneConfig config;
    struct Entry {
        GroundTruthObject object;
        bool visible = true;
    };
    std::vector<std::vector<Entry>> frames;          // [frame-1][object]
    std::vector<std::vector<double>> feature_dirs;   // unit vector per object

    /// Flow from frame-1 to frame (1-based): inside an object's support the
    /// displacement points back to its previous center; background is zero.
    FlowField flow_for(int frame) const;
    /// Feature map for one frame: each visible object's unit direction
    /// splatted over its box support, weighted by its center Gaussian.
    FeatureGrid features_for(int frame, const TargetConfig& targets = {}) const;
};

/// Deterministic scene synthesis. Crossing scenes verify their own
/// construction (exactly one contiguous interval of pair IoU > 0.5).
SceneTruth generate(const SceneConfig& config);

/// What the detector would have produced for one frame: noisy per-object
/// heatmaps (plus clutter), the feature-grid pair, and the flow field.
/// Deterministic in (config.seed, frame) regardless of call order.
struct Observation {
    DetectionSet detections;
    FeatureGrid features_prev;
    FeatureGrid features_cur;
    FlowField flow;
};
Observation observe(const SceneTruth& truth, int frame, const TargetConfig& targets = {});

/// Just the detections of observe(), identical values, without building the
/// feature and flow grids.
DetectionSet observe_detections(const SceneTruth& truth, int frame,
                                const TargetConfig& targets = {});

/// Scene directory layout:
///   scene.cfg        key=value config echo
///   gt.txt           MOT gt rows, occluded frames carry visibility 0
///   det.txt          detection rows (id -1), conf = score
///   heat/NNNNNN.p3ag one grid per frame, channel k = detection k's heatmap
///   flow/NNNNNN.p3ag 2-channel flow grid per frame
void save_scene(const SceneTruth& truth, const std::string& dir);

SceneConfig load_scene_config(const std::string& dir);
/// Per-frame detections reassembled from det.txt and the heatmap blobs.
std::map<int, DetectionSet> load_scene_detections(const std::string& dir);

std::string motion_name(MotionModel m);
MotionModel motion_from_name(const std::string& name);

}  // namespace pixeltrack
