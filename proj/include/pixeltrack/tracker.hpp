#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pixeltrack/decoder.hpp"
#include "pixeltrack/grid.hpp"
#include "pixeltrack/kalman.hpp"

namespace pixeltrack {

struct TrackerConfig {
    double match_threshold = 0.65;  // accept a pair only below this cost
    double birth_threshold = 0.80;  // spawn a track only above this score
    int max_misses = 30;            // frames a track may coast before removal
    double min_score = 0.05;        // detector floor, deliberately low
    KalmanConfig kalman;

    enum class CostMode {
        heatmap,          // normalized L1 between forecast and detection heatmaps
        center_distance,  // baseline: center distance / frame diagonal
    };
    CostMode cost_mode = CostMode::heatmap;
};

/// One detector output: category, confidence, box (cx, cy, w, h) in pixels,
/// and the center heatmap it was read from. Never the no-object category.
struct Detection {
    int class_id = 0;
    double score = 0.0;
    Eigen::Vector4d box = Eigen::Vector4d::Zero();
    Heatmap heatmap;
};

using DetectionSet = std::vector<Detection>;

/// Persistent identity. score mirrors the peak of the last accepted
/// heatmap; misses counts consecutive unmatched frames.
struct Track {
    int id = 0;
    int class_id = 0;
    Eigen::Vector4d box = Eigen::Vector4d::Zero();
    double score = 0.0;
    Heatmap heatmap;
    BoxKalman kalman;
    int misses = 0;
    int age = 0;

    Track(int id, const Detection& det, const KalmanConfig& kf);
};

/// Forecast of a track one frame ahead.
struct Forecast {
    Eigen::Vector4d box = Eigen::Vector4d::Zero();
    Heatmap heatmap;
};

/// Advance a track's filter one frame and translate its heatmap along the
/// predicted center displacement (zero fill at the borders). The track's
/// stored heatmap is replaced by the translated one so coasting tracks keep
/// drifting with their forecast.
Forecast kf_predict(Track& track);

/// Normalized heatmap distance: sum|a-b| / (sum a + sum b + 1e-9), in [0,1].
double heatmap_cost(const Heatmap& a, const Heatmap& b);

/// Read detections out of decoder predictions: per query the argmax class
/// (skipping no-object), the heatmap peak as center and score, and the size
/// map at the peak scaled back to pixels.
DetectionSet extract_detections(const FramePrediction& pred, double min_score,
                                int noobject_class);

/// Online pixel-wise association over frames. Strictly sequential: call
/// step() once per frame with that frame's detections.
class PixelTracker {
public:
    explicit PixelTracker(const TrackerConfig& config = {});

    /// One association round: forecast every track, match per class, update
    /// matched tracks, spawn confident unmatched detections, age out stale
    /// tracks. Returns the full track list after the update.
    const std::vector<Track>& step(const DetectionSet& detections);

    const std::vector<Track>& tracks() const { return tracks_; }

    /// Tracks that matched a detection this frame (the ones a frame's
    /// output rows are written for).
    std::vector<const Track*> live_tracks() const;

    int frame_width = 0;   // used only by the center-distance baseline
    int frame_height = 0;

private:
    TrackerConfig config_;
    std::vector<Track> tracks_;
    int next_id_ = 1;
};

}  // namespace pixeltrack
