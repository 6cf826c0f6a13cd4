#pragma once

#include <Eigen/Dense>

namespace pixeltrack {

struct KalmanConfig {
    // Noise standard deviations as fractions of the current box height,
    // applied uniformly per state element.
    double process_std = 1.0 / 20.0;
    double measurement_std = 1.0 / 10.0;
};

/// Constant-velocity filter over the box state (cx, cy, w, h) plus
/// per-component velocities.
class BoxKalman {
public:
    using State = Eigen::Matrix<double, 8, 1>;
    using Covariance = Eigen::Matrix<double, 8, 8>;
    using Box = Eigen::Vector4d;  // (cx, cy, w, h)

    BoxKalman(const Box& box, const KalmanConfig& config);

    /// Advance one frame under the constant-velocity model.
    void predict();
    /// Condition on an observed box.
    void update(const Box& measurement);

    Box box() const { return state_.head<4>(); }
    const State& state() const { return state_; }
    const Covariance& covariance() const { return covariance_; }

private:
    double height_scale() const;

    KalmanConfig config_;
    State state_;
    Covariance covariance_;
};

}  // namespace pixeltrack
