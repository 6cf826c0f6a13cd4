#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "pixeltrack/decoder.hpp"
#include "pixeltrack/grid.hpp"

namespace pixeltrack {

/// One annotated object: box center/size in pixels, category, identity.
struct GroundTruthObject {
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;
    int class_id = 0;
    int track_id = 0;
};

struct TargetConfig {
    double radius_divisor = 2.0;  // gaussian radius = min(w,h) / radius_divisor
    double min_sigma = 1.0;       // sigma = max(min_sigma, radius / 3)
    double w_ce = 0.1;
    double w_focal = 0.5;
    double w_size = 1.0;
    double focal_alpha = 2.0;
    double focal_beta = 4.0;
    bool normalize_heatmap_cost = true;  // divide the matching L1 term by pixel count

    double sigma_for(double w, double h) const;
};

/// Matching outcome: injection of ground truths into predictions; the rest
/// of the predictions take the no-object assignment.
struct MatchResult {
    std::vector<std::pair<int, int>> pairs;  // (prediction index, ground-truth index)
    std::vector<int> unmatched_predictions;
    double total_cost = 0.0;
};

/// Render the target center heatmap for one object: a truncated Gaussian
/// with peak exactly 1 at the integer pixel nearest the center, zero beyond
/// three sigma. Centers outside the frame are clamped to the border (with a
/// warning on stderr).
Heatmap render_gaussian(const GroundTruthObject& obj, int height, int width,
                        const TargetConfig& config = {});

/// Matching cost of one (prediction, ground truth) pair:
///   -log p(class_gt) + |pred_heat - gt_heat|_1
/// with the L1 term averaged over pixels when the config says so.
/// Probabilities are clamped at 1e-12 before the log.
double pixelwise_cost(const Eigen::VectorXd& class_dist, const Heatmap& pred_heat,
                      int gt_class, const Heatmap& gt_heat, const TargetConfig& config = {});

/// Cost of assigning a prediction to no-object: -log p(noobject).
double noobject_cost(const Eigen::VectorXd& class_dist, int noobject_class);

/// Minimum-cost bipartite match over an N x K cost matrix. When N >= K every
/// ground truth is matched; leftover predictions are reported unmatched.
MatchResult hungarian_match(const std::vector<std::vector<double>>& cost);

/// Level-summed cost matrix for the decoder predictions against the ground
/// truths (one no-object column handled by the caller via noobject_cost).
std::vector<std::vector<double>> build_cost_matrix(
    const std::vector<FramePrediction>& levels, const std::vector<GroundTruthObject>& gts,
    const TargetConfig& config = {});

struct LossBreakdown {
    double ce = 0.0;
    double focal = 0.0;
    double size = 0.0;
    double total = 0.0;
};

/// Diagnostic losses given a fixed matching, summed over levels:
///   ce    mean -log p(assigned class) over all queries (no-object for the
///         unmatched ones),
///   focal penalty-reduced focal loss over matched center heatmaps,
///         normalized by the object count,
///   size  mean absolute error of the size maps read at the ground-truth
///         center pixels,
///   total w_ce*ce + w_focal*focal + w_size*size.
LossBreakdown compute_losses(const MatchResult& match,
                             const std::vector<FramePrediction>& levels,
                             const std::vector<GroundTruthObject>& gts, int noobject_class,
                             const TargetConfig& config = {});

}  // namespace pixeltrack
