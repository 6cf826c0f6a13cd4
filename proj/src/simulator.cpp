#include "pixeltrack/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <stdexcept>

#include "pixeltrack/grid_io.hpp"
#include "pixeltrack/kv.hpp"
#include "pixeltrack/metrics.hpp"

namespace pixeltrack {

namespace {

constexpr double kTwoPi = 6.283185307179586;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream));
}

struct ObjectInit {
    double w, h;
    double x, y;    // base position, before wobble
    double vx, vy;
    double wobble_phase;
};

bool occluded_at(const SceneConfig& cfg, int object, int frame) {
    for (const OcclusionInterval& o : cfg.occlusions)
        if (o.object == object && frame >= o.first_frame && frame <= o.last_frame) return true;
    return false;
}

// Integer pixel span of a box side.
std::pair<int, int> support_span(double center, double extent, int limit) {
    int lo = static_cast<int>(std::ceil(center - extent / 2.0));
    int hi = static_cast<int>(std::floor(center + extent / 2.0));
    return {std::max(lo, 0), std::min(hi, limit - 1)};
}

void check_crossing_construction(const SceneTruth& truth) {
    // Each pair must produce exactly one contiguous run of frames with
    // box IoU above 0.5.
    const SceneConfig& cfg = truth.config;
    for (int a = 0; a + 1 < cfg.num_objects; a += 2) {
        std::vector<int> hits;
        for (int f = 0; f < cfg.num_frames; ++f) {
            const GroundTruthObject& oa = truth.frames[f][a].object;
            const GroundTruthObject& ob = truth.frames[f][a + 1].object;
            const double iou =
                box_iou(oa.cx - oa.w / 2, oa.cy - oa.h / 2, oa.w, oa.h,
                        ob.cx - ob.w / 2, ob.cy - ob.h / 2, ob.w, ob.h);
            if (iou > 0.5) hits.push_back(f);
        }
        if (hits.empty())
            throw std::logic_error("crossing scene: pair never overlaps above 0.5 IoU");
        for (std::size_t i = 1; i < hits.size(); ++i)
            if (hits[i] != hits[i - 1] + 1)
                throw std::logic_error("crossing scene: overlap interval not contiguous");
    }
}

}  // namespace

SceneTruth generate(const SceneConfig& config) {
    if (config.width < 16 || config.height < 16)
        throw std::invalid_argument("generate: frame dimensions must be >= 16");
    if (config.num_frames < 1)
        throw std::invalid_argument("generate: need at least one frame");
    if (config.num_objects < 0)
        throw std::invalid_argument("generate: negative object count");
    for (double p : {config.dropout, config.noise_std})
        if (p < 0.0 || p > 1.0)
            throw std::invalid_argument("generate: probabilities must lie in [0,1]");

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const double wob = config.wobble_amp;
    std::vector<ObjectInit> objs(config.num_objects);

    if (config.motion == MotionModel::crossing_pairs) {
        // Head-on pairs: the first of each pair is smaller, crossing happens
        // at mid-sequence by construction. Pairs get separate y lanes.
        const int pairs = std::max(1, (config.num_objects + 1) / 2);
        const double lane_h = static_cast<double>(config.height) / pairs;
        for (int k = 0; k < config.num_objects; ++k) {
            ObjectInit& o = objs[k];
            const int pair = k / 2;
            const bool small = (k % 2) == 0;
            const double scale = small ? 0.75 + 0.05 * unit(rng) : 0.90 + 0.10 * unit(rng);
            o.w = o.h = config.max_size * scale;
            const double margin_x = config.max_size / 2.0 + wob + 4.0;
            const double x0 = margin_x + 6.0 * unit(rng);
            const double lane_mid = lane_h * (pair + 0.5);
            o.y = std::clamp(lane_mid + 3.0 * (unit(rng) - 0.5),
                             config.max_size / 2.0 + wob + 1.0,
                             config.height - 1.0 - config.max_size / 2.0 - wob - 1.0);
            const int half_steps = std::max(1, (config.num_frames - 1) / 2);
            const double v = (config.width - 1.0 - 2.0 * x0) / (2.0 * half_steps);
            if (small) {
                o.x = x0;
                o.vx = v;
            } else {
                o.x = config.width - 1.0 - x0;
                o.vx = -v;
                o.y += 3.0 * (unit(rng) - 0.5);
            }
            o.vy = 0.0;
            o.wobble_phase = kTwoPi * unit(rng);
        }
    } else {
        for (int k = 0; k < config.num_objects; ++k) {
            ObjectInit& o = objs[k];
            o.w = config.min_size + (config.max_size - config.min_size) * unit(rng);
            o.h = config.min_size + (config.max_size - config.min_size) * unit(rng);
            const double mx = o.w / 2.0 + wob + 1.0;
            const double my = o.h / 2.0 + wob + 1.0;
            o.x = mx + (config.width - 1.0 - 2.0 * mx) * unit(rng);
            o.y = my + (config.height - 1.0 - 2.0 * my) * unit(rng);
            const double speed =
                config.min_speed + (config.max_speed - config.min_speed) * unit(rng);
            const double angle = kTwoPi * unit(rng);
            o.vx = speed * std::cos(angle);
            o.vy = speed * std::sin(angle);
            o.wobble_phase = kTwoPi * unit(rng);
        }
    }

    SceneTruth truth;
    truth.config = config;
    truth.frames.resize(config.num_frames);

    const bool wobbly = wob > 0.0 && (config.motion == MotionModel::sinusoidal ||
                                      config.motion == MotionModel::crossing_pairs);

    for (int f = 0; f < config.num_frames; ++f) {
        truth.frames[f].resize(config.num_objects);
        for (int k = 0; k < config.num_objects; ++k) {
            ObjectInit& o = objs[k];
            if (f > 0) {
                o.x += o.vx;
                o.y += o.vy;
                if (config.motion != MotionModel::crossing_pairs) {
                    // Reflect off the borders.
                    const double mx = o.w / 2.0 + wob + 1.0;
                    const double my = o.h / 2.0 + wob + 1.0;
                    if (o.x < mx) { o.x = 2.0 * mx - o.x; o.vx = -o.vx; }
                    if (o.x > config.width - 1.0 - mx) { o.x = 2.0 * (config.width - 1.0 - mx) - o.x; o.vx = -o.vx; }
                    if (o.y < my) { o.y = 2.0 * my - o.y; o.vy = -o.vy; }
                    if (o.y > config.height - 1.0 - my) { o.y = 2.0 * (config.height - 1.0 - my) - o.y; o.vy = -o.vy; }
                }
            }
            double cy = o.y;
            if (wobbly)
                cy += wob * std::sin(kTwoPi * f / config.wobble_period + o.wobble_phase);

            SceneTruth::Entry& entry = truth.frames[f][k];
            entry.object.cx = std::clamp(o.x, 0.0, config.width - 1.0);
            entry.object.cy = std::clamp(cy, 0.0, config.height - 1.0);
            entry.object.w = o.w;
            entry.object.h = o.h;
            entry.object.class_id = config.class_id;
            entry.object.track_id = k + 1;
            entry.visible = !occluded_at(config, k, f + 1);
        }
    }

    truth.feature_dirs.resize(config.num_objects);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int k = 0; k < config.num_objects; ++k) {
        auto& dir = truth.feature_dirs[k];
        dir.resize(config.feature_channels);
        double norm = 0.0;
        for (double& v : dir) {
            v = gauss(rng);
            norm += v * v;
        }
        norm = std::sqrt(std::max(norm, 1e-12));
        for (double& v : dir) v /= norm;
    }

    if (config.motion == MotionModel::crossing_pairs && config.num_objects >= 2)
        check_crossing_construction(truth);
    return truth;
}

FlowField SceneTruth::flow_for(int frame) const {
    if (frame < 1 || frame > config.num_frames)
        throw std::invalid_argument("flow_for: frame out of range");
    FlowField flow(config.height, config.width);
    if (frame == 1) return flow;

    for (int k = 0; k < config.num_objects; ++k) {
        const Entry& cur = frames[frame - 1][k];
        const Entry& prev = frames[frame - 2][k];
        if (!cur.visible || !prev.visible) continue;
        const double dx = prev.object.cx - cur.object.cx;
        const double dy = prev.object.cy - cur.object.cy;
        const auto [x0, x1] = support_span(cur.object.cx, cur.object.w, config.width);
        const auto [y0, y1] = support_span(cur.object.cy, cur.object.h, config.height);
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                flow.dx_at(y, x) = dx;
                flow.dy_at(y, x) = dy;
            }
        }
    }
    return flow;
}

FeatureGrid SceneTruth::features_for(int frame, const TargetConfig& targets) const {
    if (frame < 0 || frame > config.num_frames)
        throw std::invalid_argument("features_for: frame out of range");
    FeatureGrid feat(config.height, config.width, config.feature_channels);
    if (frame == 0) return feat;  // "before the first frame" is empty

    const std::size_t plane = feat.plane_size();
    for (int k = 0; k < config.num_objects; ++k) {
        const Entry& entry = frames[frame - 1][k];
        if (!entry.visible) continue;
        const Heatmap g = render_gaussian(entry.object, config.height, config.width, targets);
        const auto [x0, x1] = support_span(entry.object.cx, entry.object.w, config.width);
        const auto [y0, y1] = support_span(entry.object.cy, entry.object.h, config.height);
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double gv = g.at(y, x);
                if (gv == 0.0) continue;
                const std::size_t p = static_cast<std::size_t>(y) * config.width + x;
                for (int c = 0; c < config.feature_channels; ++c)
                    feat.data[c * plane + p] += gv * feature_dirs[k][c];
            }
        }
    }
    return feat;
}

DetectionSet observe_detections(const SceneTruth& truth, int frame,
                                const TargetConfig& targets) {
    const SceneConfig& cfg = truth.config;
    if (frame < 1 || frame > cfg.num_frames)
        throw std::invalid_argument("observe: frame out of range");

    std::mt19937_64 rng(mix(cfg.seed, static_cast<std::uint64_t>(frame)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    DetectionSet detections;

    auto make_detection = [&](const GroundTruthObject& obj, double amp) {
        Heatmap heat = render_gaussian(obj, cfg.height, cfg.width, targets);
        // Amplitude and noise act on a window covering the whole truncated
        // Gaussian support; noise stays confined there so the observation
        // remains a localized distribution.
        const double reach = 6.0 * targets.sigma_for(obj.w, obj.h);
        const auto [x0, x1] = support_span(obj.cx, std::max(obj.w, reach) + 4.0, cfg.width);
        const auto [y0, y1] = support_span(obj.cy, std::max(obj.h, reach) + 4.0, cfg.height);
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                double v = amp * heat.at(y, x);
                if (cfg.noise_std > 0.0) v += cfg.noise_std * gauss(rng);
                heat.at(y, x) = std::clamp(v, 0.0, 1.0);
            }
        }
        const auto peak = heat.peak();
        Detection det;
        det.class_id = obj.class_id;
        det.score = peak.value;
        det.heatmap = std::move(heat);
        det.box << static_cast<double>(peak.x), static_cast<double>(peak.y), obj.w, obj.h;
        return det;
    };

    for (int k = 0; k < cfg.num_objects; ++k) {
        const SceneTruth::Entry& entry = truth.frames[frame - 1][k];
        const double drop_coin = unit(rng);
        const double amp = cfg.amp_min + (cfg.amp_max - cfg.amp_min) * unit(rng);
        if (!entry.visible) continue;
        if (cfg.dropout > 0.0 && drop_coin < cfg.dropout) continue;
        detections.push_back(make_detection(entry.object, amp));
    }

    if (cfg.clutter_rate > 0.0) {
        std::poisson_distribution<int> clutter_count(cfg.clutter_rate);
        const int n = clutter_count(rng);
        for (int i = 0; i < n; ++i) {
            GroundTruthObject fake;
            fake.w = cfg.min_size + (cfg.max_size - cfg.min_size) * unit(rng);
            fake.h = cfg.min_size + (cfg.max_size - cfg.min_size) * unit(rng);
            const double mx = fake.w / 2.0 + 1.0, my = fake.h / 2.0 + 1.0;
            fake.cx = mx + (cfg.width - 1.0 - 2.0 * mx) * unit(rng);
            fake.cy = my + (cfg.height - 1.0 - 2.0 * my) * unit(rng);
            fake.class_id = cfg.class_id;
            const double amp =
                cfg.clutter_score_min + (cfg.clutter_score_max - cfg.clutter_score_min) * unit(rng);
            detections.push_back(make_detection(fake, amp));
        }
    }
    return detections;
}

Observation observe(const SceneTruth& truth, int frame, const TargetConfig& targets) {
    Observation obs;
    obs.detections = observe_detections(truth, frame, targets);
    obs.features_cur = truth.features_for(frame, targets);
    obs.features_prev = truth.features_for(frame - 1, targets);
    obs.flow = truth.flow_for(frame);
    return obs;
}

std::string motion_name(MotionModel m) {
    switch (m) {
        case MotionModel::constant_velocity: return "constant_velocity";
        case MotionModel::sinusoidal: return "sinusoidal";
        case MotionModel::crossing_pairs: return "crossing_pairs";
    }
    return "constant_velocity";
}

MotionModel motion_from_name(const std::string& name) {
    if (name == "constant_velocity" || name == "cv") return MotionModel::constant_velocity;
    if (name == "sinusoidal" || name == "sin") return MotionModel::sinusoidal;
    if (name == "crossing_pairs" || name == "cross") return MotionModel::crossing_pairs;
    throw std::invalid_argument("unknown motion model: " + name);
}

namespace {

std::string frame_blob_name(int frame) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%06d.p3ag", frame);
    return buf;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void save_scene(const SceneTruth& truth, const std::string& dir) {
    namespace fs = std::filesystem;
    const SceneConfig& cfg = truth.config;
    fs::create_directories(dir);
    fs::create_directories(dir + "/heat");
    fs::create_directories(dir + "/flow");

    KvPairs kv;
    kv.emplace_back("width", std::to_string(cfg.width));
    kv.emplace_back("height", std::to_string(cfg.height));
    kv.emplace_back("num_objects", std::to_string(cfg.num_objects));
    kv.emplace_back("num_frames", std::to_string(cfg.num_frames));
    kv.emplace_back("motion", motion_name(cfg.motion));
    kv.emplace_back("noise_std", format_double(cfg.noise_std));
    kv.emplace_back("dropout", format_double(cfg.dropout));
    kv.emplace_back("clutter_rate", format_double(cfg.clutter_rate));
    kv.emplace_back("clutter_score_min", format_double(cfg.clutter_score_min));
    kv.emplace_back("clutter_score_max", format_double(cfg.clutter_score_max));
    kv.emplace_back("amp_min", format_double(cfg.amp_min));
    kv.emplace_back("amp_max", format_double(cfg.amp_max));
    kv.emplace_back("min_size", format_double(cfg.min_size));
    kv.emplace_back("max_size", format_double(cfg.max_size));
    kv.emplace_back("min_speed", format_double(cfg.min_speed));
    kv.emplace_back("max_speed", format_double(cfg.max_speed));
    kv.emplace_back("wobble_amp", format_double(cfg.wobble_amp));
    kv.emplace_back("wobble_period", format_double(cfg.wobble_period));
    kv.emplace_back("feature_channels", std::to_string(cfg.feature_channels));
    kv.emplace_back("class_id", std::to_string(cfg.class_id));
    kv.emplace_back("seed", std::to_string(cfg.seed));
    std::string occ;
    for (const OcclusionInterval& o : cfg.occlusions) {
        if (!occ.empty()) occ += ';';
        occ += std::to_string(o.object) + ':' + std::to_string(o.first_frame) + ':' +
               std::to_string(o.last_frame);
    }
    kv.emplace_back("occlusions", occ);
    write_kv_file(dir + "/scene.cfg", kv);

    std::vector<MotRow> gt_rows;
    for (int f = 1; f <= cfg.num_frames; ++f) {
        for (int k = 0; k < cfg.num_objects; ++k) {
            const SceneTruth::Entry& e = truth.frames[f - 1][k];
            MotRow row;
            row.frame = f;
            row.id = e.object.track_id;
            row.left = e.object.cx - e.object.w / 2.0;
            row.top = e.object.cy - e.object.h / 2.0;
            row.width = e.object.w;
            row.height = e.object.h;
            row.conf = 1.0;
            row.class_id = e.object.class_id;
            row.visibility = e.visible ? 1.0 : 0.0;
            gt_rows.push_back(row);
        }
    }
    write_mot_file(dir + "/gt.txt", gt_rows);

    std::vector<MotRow> det_rows;
    for (int f = 1; f <= cfg.num_frames; ++f) {
        const Observation obs = observe(truth, f);
        FeatureGrid heat(cfg.height, cfg.width,
                         static_cast<int>(obs.detections.size()));
        const std::size_t plane = heat.plane_size();
        for (std::size_t k = 0; k < obs.detections.size(); ++k) {
            const Detection& det = obs.detections[k];
            std::copy(det.heatmap.data.begin(), det.heatmap.data.end(),
                      heat.data.begin() + k * plane);
            MotRow row;
            row.frame = f;
            row.id = -1;
            row.left = det.box(0) - det.box(2) / 2.0;
            row.top = det.box(1) - det.box(3) / 2.0;
            row.width = det.box(2);
            row.height = det.box(3);
            row.conf = det.score;
            row.class_id = det.class_id;
            det_rows.push_back(row);
        }
        write_grid(dir + "/heat/" + frame_blob_name(f), heat);
        write_grid(dir + "/flow/" + frame_blob_name(f), to_grid(obs.flow));
    }
    write_mot_file(dir + "/det.txt", det_rows);
}

SceneConfig load_scene_config(const std::string& dir) {
    const auto kv = kv_to_map(read_kv_file(dir + "/scene.cfg"));
    SceneConfig cfg;
    auto get = [&](const char* key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw std::runtime_error(std::string("scene.cfg missing ") + key);
        return it->second;
    };
    cfg.width = std::stoi(get("width"));
    cfg.height = std::stoi(get("height"));
    cfg.num_objects = std::stoi(get("num_objects"));
    cfg.num_frames = std::stoi(get("num_frames"));
    cfg.motion = motion_from_name(get("motion"));
    cfg.noise_std = std::stod(get("noise_std"));
    cfg.dropout = std::stod(get("dropout"));
    cfg.clutter_rate = std::stod(get("clutter_rate"));
    cfg.clutter_score_min = std::stod(get("clutter_score_min"));
    cfg.clutter_score_max = std::stod(get("clutter_score_max"));
    cfg.amp_min = std::stod(get("amp_min"));
    cfg.amp_max = std::stod(get("amp_max"));
    cfg.min_size = std::stod(get("min_size"));
    cfg.max_size = std::stod(get("max_size"));
    cfg.min_speed = std::stod(get("min_speed"));
    cfg.max_speed = std::stod(get("max_speed"));
    cfg.wobble_amp = std::stod(get("wobble_amp"));
    cfg.wobble_period = std::stod(get("wobble_period"));
    cfg.feature_channels = std::stoi(get("feature_channels"));
    cfg.class_id = std::stoi(get("class_id"));
    cfg.seed = std::stoull(get("seed"));
    const std::string occ = get("occlusions");
    std::size_t pos = 0;
    while (pos < occ.size()) {
        std::size_t end = occ.find(';', pos);
        if (end == std::string::npos) end = occ.size();
        const std::string item = occ.substr(pos, end - pos);
        const std::size_t c1 = item.find(':');
        const std::size_t c2 = item.find(':', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw std::runtime_error("scene.cfg: bad occlusion entry: " + item);
        cfg.occlusions.push_back({std::stoi(item.substr(0, c1)),
                                  std::stoi(item.substr(c1 + 1, c2 - c1 - 1)),
                                  std::stoi(item.substr(c2 + 1))});
        pos = end + 1;
    }
    return cfg;
}

std::map<int, DetectionSet> load_scene_detections(const std::string& dir) {
    const SceneConfig cfg = load_scene_config(dir);
    const auto rows = parse_mot_file(dir + "/det.txt");
    const auto by_frame = group_by_frame(rows);

    std::map<int, DetectionSet> out;
    for (int f = 1; f <= cfg.num_frames; ++f) {
        const FeatureGrid heat = read_grid(dir + "/heat/" + frame_blob_name(f));
        const std::size_t plane = heat.plane_size();
        DetectionSet dets;
        const auto it = by_frame.find(f);
        const std::size_t count = it != by_frame.end() ? it->second.size() : 0;
        if (static_cast<std::size_t>(heat.channels) != count)
            throw std::runtime_error("scene: heatmap channel count does not match det.txt at frame " +
                                     std::to_string(f));
        for (std::size_t k = 0; k < count; ++k) {
            const MotRow& row = it->second[k];
            Detection det;
            det.class_id = row.class_id;
            det.score = row.conf;
            det.box << row.left + row.width / 2.0, row.top + row.height / 2.0, row.width,
                row.height;
            det.heatmap = ScalarGrid(heat.height, heat.width);
            std::copy(heat.data.begin() + k * plane, heat.data.begin() + (k + 1) * plane,
                      det.heatmap.data.begin());
            dets.push_back(std::move(det));
        }
        out[f] = std::move(dets);
    }
    return out;
}

}  // namespace pixeltrack
