#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "pixeltrack/decoder.hpp"
#include "pixeltrack/kv.hpp"
#include "pixeltrack/targets.hpp"
#include "pixeltrack/tracker.hpp"

namespace pixeltrack {

/// Everything a pipeline run needs. Values resolve as
/// flags > config file > built-in defaults.
struct RunConfig {
    TrackerConfig tracker;
    TargetConfig targets;
    DecoderConfig decoder;
    std::uint64_t seed = 1;
};

/// Apply key=value settings (unknown keys raise invalid_argument).
void apply_settings(RunConfig& config, const std::map<std::string, std::string>& kv);

/// The effective configuration as ordered key=value pairs, used for the
/// config echo and for writing config files.
KvPairs config_echo(const RunConfig& config);

}  // namespace pixeltrack
