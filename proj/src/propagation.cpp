#include "pixeltrack/propagation.hpp"

#include <cmath>
#include <stdexcept>

namespace pixeltrack {

namespace {
constexpr double kNormFloor = 1e-12;
}

ScalarGrid similarity_weight(const FeatureGrid& current, const FeatureGrid& warped) {
    if (current.height != warped.height || current.width != warped.width ||
        current.channels != warped.channels)
        throw std::invalid_argument("similarity_weight: grid dimensions do not match");

    ScalarGrid w(current.height, current.width);
    const std::size_t plane = current.plane_size();
    for (std::size_t p = 0; p < plane; ++p) {
        double dot = 0.0, na = 0.0, nb = 0.0;
        for (int c = 0; c < current.channels; ++c) {
            const double a = current.data[c * plane + p];
            const double b = warped.data[c * plane + p];
            dot += a * b;
            na += a * a;
            nb += b * b;
        }
        na = std::sqrt(na);
        nb = std::sqrt(nb);
        w.data[p] = (na < kNormFloor || nb < kNormFloor) ? 0.0 : std::exp(dot / (na * nb));
    }
    return w;
}

FusedFeature propagate(const FeatureGrid& current, const FeatureGrid& previous,
                       const FlowField& flow) {
    if (current.height != previous.height || current.width != previous.width ||
        current.channels != previous.channels)
        throw std::invalid_argument("propagate: frame dimensions do not match");

    const FlowField* use = &flow;
    FlowField resized;
    if (flow.height != current.height || flow.width != current.width) {
        resized = resize_flow(flow, current.height, current.width);
        use = &resized;
    }

    const FeatureGrid warped = warp(previous, *use);
    FusedFeature out;
    out.weight = similarity_weight(current, warped);
    out.fused = FeatureGrid(current.height, current.width, current.channels);
    const std::size_t plane = current.plane_size();
    for (int c = 0; c < current.channels; ++c)
        for (std::size_t p = 0; p < plane; ++p)
            out.fused.data[c * plane + p] =
                current.data[c * plane + p] + out.weight.data[p] * warped.data[c * plane + p];
    return out;
}

}  // namespace pixeltrack
