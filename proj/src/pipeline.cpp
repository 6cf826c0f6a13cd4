#include "pixeltrack/pipeline.hpp"

namespace pixeltrack {

namespace {

void emit_live(const PixelTracker& tracker, int frame, std::vector<MotRow>& rows) {
    for (const Track* t : tracker.live_tracks()) {
        MotRow row;
        row.frame = frame;
        row.id = t->id;
        row.left = t->box(0) - t->box(2) / 2.0;
        row.top = t->box(1) - t->box(3) / 2.0;
        row.width = t->box(2);
        row.height = t->box(3);
        row.conf = t->score;
        rows.push_back(row);
    }
}

}  // namespace

std::vector<MotRow> track_detections(const std::map<int, DetectionSet>& frames,
                                     const TrackerConfig& config, int frame_width,
                                     int frame_height) {
    PixelTracker tracker(config);
    tracker.frame_width = frame_width;
    tracker.frame_height = frame_height;

    std::vector<MotRow> rows;
    const int last = frames.empty() ? 0 : frames.rbegin()->first;
    static const DetectionSet kNone;
    for (int f = 1; f <= last; ++f) {
        const auto it = frames.find(f);
        tracker.step(it != frames.end() ? it->second : kNone);
        emit_live(tracker, f, rows);
    }
    return rows;
}

std::vector<MotRow> track_scene(const SceneTruth& truth, const TrackerConfig& config) {
    PixelTracker tracker(config);
    tracker.frame_width = truth.config.width;
    tracker.frame_height = truth.config.height;

    std::vector<MotRow> rows;
    for (int f = 1; f <= truth.config.num_frames; ++f) {
        tracker.step(observe_detections(truth, f));
        emit_live(tracker, f, rows);
    }
    return rows;
}

}  // namespace pixeltrack
