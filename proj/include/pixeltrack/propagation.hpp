#pragma once

#include "pixeltrack/grid.hpp"

namespace pixeltrack {

/// Result of fusing the warped previous-frame features into the current
/// frame: fused(p) = current(p) + w(p) * warped(p).
struct FusedFeature {
    FeatureGrid fused;
    ScalarGrid weight;
};

/// Per-pixel similarity weight w(p) = exp(cos(current(p), warped(p))).
/// If either vector has norm below 1e-12 the weight is 0, dropping the
/// warped contribution at that pixel. Nonzero weights lie in [1/e, e].
ScalarGrid similarity_weight(const FeatureGrid& current, const FeatureGrid& warped);

/// Flow-guided propagation: warp the previous frame's features along the
/// flow (resampling the flow to the grid resolution when needed), weight
/// them by per-pixel similarity, and add them to the current features.
FusedFeature propagate(const FeatureGrid& current, const FeatureGrid& previous,
                       const FlowField& flow);

}  // namespace pixeltrack
