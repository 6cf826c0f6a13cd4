#include "pixeltrack/kalman.hpp"

#include <cmath>

namespace pixeltrack {

namespace {

Eigen::Matrix<double, 8, 8> transition() {
    Eigen::Matrix<double, 8, 8> f = Eigen::Matrix<double, 8, 8>::Identity();
    for (int i = 0; i < 4; ++i) f(i, i + 4) = 1.0;
    return f;
}

}  // namespace

BoxKalman::BoxKalman(const Box& box, const KalmanConfig& config) : config_(config) {
    state_.setZero();
    state_.head<4>() = box;

    const double h = height_scale();
    const double pos_std = 2.0 * config_.measurement_std * h;
    const double vel_std = 10.0 * config_.process_std * h;
    covariance_.setZero();
    for (int i = 0; i < 4; ++i) {
        covariance_(i, i) = pos_std * pos_std;
        covariance_(i + 4, i + 4) = vel_std * vel_std;
    }
}

double BoxKalman::height_scale() const {
    // Noise scales track the box height; keep a floor so degenerate boxes
    // stay numerically sane.
    return std::max(std::abs(state_(3)), 1.0);
}

void BoxKalman::predict() {
    static const Eigen::Matrix<double, 8, 8> f = transition();
    const double q = config_.process_std * height_scale();
    state_ = f * state_;
    covariance_ = f * covariance_ * f.transpose();
    covariance_.diagonal().array() += q * q;
}

void BoxKalman::update(const Box& measurement) {
    Eigen::Matrix<double, 4, 8> h = Eigen::Matrix<double, 4, 8>::Zero();
    h.leftCols<4>().setIdentity();

    const double r = config_.measurement_std * height_scale();
    Eigen::Matrix4d noise = Eigen::Matrix4d::Identity() * (r * r);

    const Eigen::Matrix4d s = h * covariance_ * h.transpose() + noise;
    const Eigen::Matrix<double, 8, 4> gain =
        covariance_ * h.transpose() * s.ldlt().solve(Eigen::Matrix4d::Identity());

    state_ += gain * (measurement - h * state_);
    covariance_ = (Covariance::Identity() - gain * h) * covariance_;
    // Symmetrize against accumulation drift.
    covariance_ = 0.5 * (covariance_ + covariance_.transpose()).eval();
}

}  // namespace pixeltrack
