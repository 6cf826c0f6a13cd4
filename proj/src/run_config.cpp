#include "pixeltrack/run_config.hpp"

#include <cstdio>
#include <stdexcept>

namespace pixeltrack {

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool parse_bool(const std::string& v) {
    if (v == "1" || v == "true" || v == "on") return true;
    if (v == "0" || v == "false" || v == "off") return false;
    throw std::invalid_argument("bad boolean value: " + v);
}

}  // namespace

void apply_settings(RunConfig& config, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        if (key == "eta_m") config.tracker.match_threshold = std::stod(value);
        else if (key == "eta_s") config.tracker.birth_threshold = std::stod(value);
        else if (key == "nk") config.tracker.max_misses = std::stoi(value);
        else if (key == "min_score") config.tracker.min_score = std::stod(value);
        else if (key == "cost_mode") {
            if (value == "heatmap") config.tracker.cost_mode = TrackerConfig::CostMode::heatmap;
            else if (value == "center_distance")
                config.tracker.cost_mode = TrackerConfig::CostMode::center_distance;
            else throw std::invalid_argument("bad cost_mode: " + value);
        }
        else if (key == "kalman_process_std") config.tracker.kalman.process_std = std::stod(value);
        else if (key == "kalman_measurement_std")
            config.tracker.kalman.measurement_std = std::stod(value);
        else if (key == "radius_divisor") config.targets.radius_divisor = std::stod(value);
        else if (key == "min_sigma") config.targets.min_sigma = std::stod(value);
        else if (key == "w_ce") config.targets.w_ce = std::stod(value);
        else if (key == "w_focal") config.targets.w_focal = std::stod(value);
        else if (key == "w_size") config.targets.w_size = std::stod(value);
        else if (key == "focal_alpha") config.targets.focal_alpha = std::stod(value);
        else if (key == "focal_beta") config.targets.focal_beta = std::stod(value);
        else if (key == "normalize_heatmap_cost")
            config.targets.normalize_heatmap_cost = parse_bool(value);
        else if (key == "queries") config.decoder.num_queries = std::stoi(value);
        else if (key == "levels") config.decoder.num_levels = std::stoi(value);
        else if (key == "channels") config.decoder.channels = std::stoi(value);
        else if (key == "num_classes") config.decoder.num_classes = std::stoi(value);
        else if (key == "mask_threshold") config.decoder.mask_threshold = std::stod(value);
        else if (key == "scale_scores") config.decoder.scale_scores = parse_bool(value);
        else if (key == "positional_embedding")
            config.decoder.positional_embedding = parse_bool(value);
        else if (key == "seed") config.seed = std::stoull(value);
        else throw std::invalid_argument("unknown config key: " + key);
    }
}

KvPairs config_echo(const RunConfig& config) {
    KvPairs kv;
    kv.emplace_back("eta_m", format_double(config.tracker.match_threshold));
    kv.emplace_back("eta_s", format_double(config.tracker.birth_threshold));
    kv.emplace_back("nk", std::to_string(config.tracker.max_misses));
    kv.emplace_back("min_score", format_double(config.tracker.min_score));
    kv.emplace_back("cost_mode",
                    config.tracker.cost_mode == TrackerConfig::CostMode::heatmap
                        ? "heatmap"
                        : "center_distance");
    kv.emplace_back("kalman_process_std", format_double(config.tracker.kalman.process_std));
    kv.emplace_back("kalman_measurement_std",
                    format_double(config.tracker.kalman.measurement_std));
    kv.emplace_back("radius_divisor", format_double(config.targets.radius_divisor));
    kv.emplace_back("min_sigma", format_double(config.targets.min_sigma));
    kv.emplace_back("w_ce", format_double(config.targets.w_ce));
    kv.emplace_back("w_focal", format_double(config.targets.w_focal));
    kv.emplace_back("w_size", format_double(config.targets.w_size));
    kv.emplace_back("focal_alpha", format_double(config.targets.focal_alpha));
    kv.emplace_back("focal_beta", format_double(config.targets.focal_beta));
    kv.emplace_back("normalize_heatmap_cost",
                    config.targets.normalize_heatmap_cost ? "1" : "0");
    kv.emplace_back("queries", std::to_string(config.decoder.num_queries));
    kv.emplace_back("levels", std::to_string(config.decoder.num_levels));
    kv.emplace_back("channels", std::to_string(config.decoder.channels));
    kv.emplace_back("num_classes", std::to_string(config.decoder.num_classes));
    kv.emplace_back("mask_threshold", format_double(config.decoder.mask_threshold));
    kv.emplace_back("scale_scores", config.decoder.scale_scores ? "1" : "0");
    kv.emplace_back("positional_embedding", config.decoder.positional_embedding ? "1" : "0");
    kv.emplace_back("seed", std::to_string(config.seed));
    return kv;
}

}  // namespace pixeltrack
