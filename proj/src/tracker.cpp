#include "pixeltrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "pixeltrack/assignment.hpp"

namespace pixeltrack {

Track::Track(int id_, const Detection& det, const KalmanConfig& kf)
    : id(id_),
      class_id(det.class_id),
      box(det.box),
      score(det.score),
      heatmap(det.heatmap),
      kalman(det.box, kf),
      misses(0),
      age(1) {}

Forecast kf_predict(Track& track) {
    const Eigen::Vector2d before = track.kalman.box().head<2>();
    track.kalman.predict();
    const Eigen::Vector2d delta = track.kalman.box().head<2>() - before;

    if (!track.heatmap.empty())
        track.heatmap = translate(track.heatmap, delta.x(), delta.y());

    Forecast f;
    f.box = track.kalman.box();
    f.heatmap = track.heatmap;
    track.box = f.box;
    return f;
}

double heatmap_cost(const Heatmap& a, const Heatmap& b) {
    if (a.height != b.height || a.width != b.width)
        throw std::invalid_argument("heatmap_cost: dimensions do not match");
    double l1 = 0.0, mass = 0.0;
    for (std::size_t p = 0; p < a.data.size(); ++p) {
        l1 += std::abs(a.data[p] - b.data[p]);
        mass += a.data[p] + b.data[p];
    }
    return l1 / (mass + 1e-9);
}

DetectionSet extract_detections(const FramePrediction& pred, double min_score,
                                int noobject_class) {
    DetectionSet out;
    const int n = static_cast<int>(pred.class_dist.rows());
    for (int i = 0; i < n; ++i) {
        int best = 0;
        for (int c = 1; c < pred.class_dist.cols(); ++c)
            if (pred.class_dist(i, c) > pred.class_dist(i, best)) best = c;
        if (best == noobject_class) continue;

        const auto peak = pred.center[i].peak();
        if (peak.value < min_score) continue;

        const int w = pred.center[i].width, h = pred.center[i].height;
        Detection det;
        det.class_id = best;
        det.score = peak.value;
        det.heatmap = pred.center[i];
        const double bw = std::clamp(pred.size[i].sx.at(peak.y, peak.x) * w, 1.0,
                                     static_cast<double>(w));
        const double bh = std::clamp(pred.size[i].sy.at(peak.y, peak.x) * h, 1.0,
                                     static_cast<double>(h));
        det.box << std::clamp(static_cast<double>(peak.x), 0.0, w - 1.0),
            std::clamp(static_cast<double>(peak.y), 0.0, h - 1.0), bw, bh;
        out.push_back(std::move(det));
    }
    return out;
}

PixelTracker::PixelTracker(const TrackerConfig& config) : config_(config) {}

std::vector<const Track*> PixelTracker::live_tracks() const {
    std::vector<const Track*> live;
    for (const Track& t : tracks_)
        if (t.misses == 0) live.push_back(&t);
    return live;
}

const std::vector<Track>& PixelTracker::step(const DetectionSet& detections) {
    if (frame_width == 0 && !detections.empty() && !detections[0].heatmap.empty()) {
        frame_width = detections[0].heatmap.width;
        frame_height = detections[0].heatmap.height;
    }

    // Step A: forecast every track.
    std::vector<Forecast> forecasts;
    forecasts.reserve(tracks_.size());
    for (Track& t : tracks_) forecasts.push_back(kf_predict(t));

    // Step B: class-pure Hungarian matching, gated after the solve.
    std::map<int, std::pair<std::vector<int>, std::vector<int>>> by_class;
    for (std::size_t i = 0; i < tracks_.size(); ++i)
        by_class[tracks_[i].class_id].first.push_back(static_cast<int>(i));
    for (std::size_t j = 0; j < detections.size(); ++j)
        by_class[detections[j].class_id].second.push_back(static_cast<int>(j));

    std::vector<char> track_matched(tracks_.size(), 0);
    std::vector<char> det_matched(detections.size(), 0);

    for (const auto& [cls, split] : by_class) {
        const auto& [t_idx, d_idx] = split;
        if (t_idx.empty() || d_idx.empty()) continue;

        std::vector<std::vector<double>> cost(t_idx.size(), std::vector<double>(d_idx.size()));
        for (std::size_t a = 0; a < t_idx.size(); ++a) {
            for (std::size_t b = 0; b < d_idx.size(); ++b) {
                const Detection& det = detections[d_idx[b]];
                if (config_.cost_mode == TrackerConfig::CostMode::heatmap) {
                    cost[a][b] = heatmap_cost(forecasts[t_idx[a]].heatmap, det.heatmap);
                } else {
                    const double diag = std::hypot(
                        frame_width > 0 ? frame_width : det.heatmap.width,
                        frame_height > 0 ? frame_height : det.heatmap.height);
                    const Eigen::Vector2d d =
                        forecasts[t_idx[a]].box.head<2>() - det.box.head<2>();
                    cost[a][b] = d.norm() / std::max(diag, 1.0);
                }
            }
        }

        const Assignment assign = solve_assignment(cost);
        for (std::size_t a = 0; a < t_idx.size(); ++a) {
            const int b = assign.row_to_col[a];
            if (b < 0 || cost[a][b] >= config_.match_threshold) continue;
            Track& track = tracks_[t_idx[a]];
            const Detection& det = detections[d_idx[b]];
            track.kalman.update(det.box);
            track.box = det.box;
            track.heatmap = det.heatmap;
            track.score = det.score;
            track.misses = 0;
            track.age += 1;
            track_matched[t_idx[a]] = 1;
            det_matched[d_idx[b]] = 1;
        }
    }

    // Unmatched confident detections start new tracks, in detection order.
    for (std::size_t j = 0; j < detections.size(); ++j) {
        if (det_matched[j] || detections[j].score <= config_.birth_threshold) continue;
        tracks_.emplace_back(next_id_++, detections[j], config_.kalman);
    }

    // Step C: age out tracks that kept missing.
    std::vector<Track> kept;
    kept.reserve(tracks_.size());
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
        Track& t = tracks_[i];
        const bool newborn = i >= track_matched.size();
        if (!newborn && !track_matched[i]) {
            t.misses += 1;
            t.age += 1;
            if (t.misses >= config_.max_misses) continue;
        }
        kept.push_back(std::move(t));
    }
    tracks_ = std::move(kept);
    return tracks_;
}

}  // namespace pixeltrack
