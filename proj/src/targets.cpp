#include "pixeltrack/targets.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "pixeltrack/assignment.hpp"

namespace pixeltrack {

namespace {
constexpr double kProbFloor = 1e-12;

inline double clamp01(double v, double eps) { return std::min(std::max(v, eps), 1.0 - eps); }
}  // namespace

double TargetConfig::sigma_for(double w, double h) const {
    const double radius = std::min(w, h) / radius_divisor;
    return std::max(min_sigma, radius / 3.0);
}

Heatmap render_gaussian(const GroundTruthObject& obj, int height, int width,
                        const TargetConfig& config) {
    if (height < 1 || width < 1)
        throw std::invalid_argument("render_gaussian: dimensions must be positive");

    double cx = obj.cx, cy = obj.cy;
    if (cx < 0 || cx > width - 1 || cy < 0 || cy > height - 1) {
        std::cerr << "render_gaussian: center (" << cx << ", " << cy
                  << ") outside " << width << "x" << height << " frame, clamping\n";
        cx = std::clamp(cx, 0.0, static_cast<double>(width - 1));
        cy = std::clamp(cy, 0.0, static_cast<double>(height - 1));
    }

    // Peak sits on the integer pixel nearest the center; support is cut at
    // three sigma so distant heatmaps have genuinely disjoint support.
    const int px = static_cast<int>(std::lround(cx));
    const int py = static_cast<int>(std::lround(cy));
    const double sigma = config.sigma_for(obj.w, obj.h);
    const double r2max = 9.0 * sigma * sigma;
    const int reach = static_cast<int>(std::ceil(3.0 * sigma));

    Heatmap heat(height, width);
    const int y0 = std::max(0, py - reach), y1 = std::min(height - 1, py + reach);
    const int x0 = std::max(0, px - reach), x1 = std::min(width - 1, px + reach);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double r2 = static_cast<double>(x - px) * (x - px) +
                              static_cast<double>(y - py) * (y - py);
            if (r2 > r2max) continue;
            heat.at(y, x) = std::exp(-r2 / (2.0 * sigma * sigma));
        }
    }
    return heat;
}

double pixelwise_cost(const Eigen::VectorXd& class_dist, const Heatmap& pred_heat,
                      int gt_class, const Heatmap& gt_heat, const TargetConfig& config) {
    if (pred_heat.height != gt_heat.height || pred_heat.width != gt_heat.width)
        throw std::invalid_argument("pixelwise_cost: heatmap dimensions do not match");
    if (gt_class < 0 || gt_class >= class_dist.size())
        throw std::invalid_argument("pixelwise_cost: class index out of range");

    double l1 = 0.0;
    for (std::size_t p = 0; p < pred_heat.data.size(); ++p)
        l1 += std::abs(pred_heat.data[p] - gt_heat.data[p]);
    if (config.normalize_heatmap_cost) l1 /= static_cast<double>(pred_heat.data.size());

    return -std::log(std::max(class_dist(gt_class), kProbFloor)) + l1;
}

double noobject_cost(const Eigen::VectorXd& class_dist, int noobject_class) {
    if (noobject_class < 0 || noobject_class >= class_dist.size())
        throw std::invalid_argument("noobject_cost: class index out of range");
    return -std::log(std::max(class_dist(noobject_class), kProbFloor));
}

MatchResult hungarian_match(const std::vector<std::vector<double>>& cost) {
    const Assignment a = solve_assignment(cost);
    MatchResult out;
    out.total_cost = a.total_cost;
    for (std::size_t i = 0; i < a.row_to_col.size(); ++i) {
        if (a.row_to_col[i] >= 0)
            out.pairs.emplace_back(static_cast<int>(i), a.row_to_col[i]);
        else
            out.unmatched_predictions.push_back(static_cast<int>(i));
    }
    return out;
}

std::vector<std::vector<double>> build_cost_matrix(const std::vector<FramePrediction>& levels,
                                                   const std::vector<GroundTruthObject>& gts,
                                                   const TargetConfig& config) {
    if (levels.empty()) throw std::invalid_argument("build_cost_matrix: no levels");
    const int n = static_cast<int>(levels[0].class_dist.rows());
    const int base_h = levels[0].center.empty() ? 0 : levels[0].center[0].height;
    const int base_w = levels[0].center.empty() ? 0 : levels[0].center[0].width;

    std::vector<std::vector<double>> cost(n, std::vector<double>(gts.size(), 0.0));
    for (const FramePrediction& pred : levels) {
        const int lh = pred.center[0].height, lw = pred.center[0].width;
        for (std::size_t k = 0; k < gts.size(); ++k) {
            // Ground truths live in the first level's raster; rescale for
            // coarser/finer levels.
            GroundTruthObject obj = gts[k];
            if (lh != base_h || lw != base_w) {
                const double fx = static_cast<double>(lw) / base_w;
                const double fy = static_cast<double>(lh) / base_h;
                obj.cx *= fx;
                obj.w *= fx;
                obj.cy *= fy;
                obj.h *= fy;
            }
            const Heatmap gt_heat = render_gaussian(obj, lh, lw, config);
            for (int i = 0; i < n; ++i)
                cost[i][k] += pixelwise_cost(pred.class_dist.row(i), pred.center[i],
                                             obj.class_id, gt_heat, config);
        }
    }
    return cost;
}

LossBreakdown compute_losses(const MatchResult& match,
                             const std::vector<FramePrediction>& levels,
                             const std::vector<GroundTruthObject>& gts, int noobject_class,
                             const TargetConfig& config) {
    LossBreakdown out;
    if (levels.empty()) return out;
    const int n = static_cast<int>(levels[0].class_dist.rows());
    const int base_h = levels[0].center.empty() ? 0 : levels[0].center[0].height;
    const int base_w = levels[0].center.empty() ? 0 : levels[0].center[0].width;
    constexpr double kEps = 1e-12;

    for (const FramePrediction& pred : levels) {
        const int lh = pred.center[0].height, lw = pred.center[0].width;

        // Classification: matched queries predict their object's class, the
        // rest predict no-object.
        std::vector<int> target_class(n, noobject_class);
        for (const auto& [i, k] : match.pairs) target_class[i] = gts[k].class_id;
        double ce = 0.0;
        for (int i = 0; i < n; ++i)
            ce += -std::log(std::max(pred.class_dist(i, target_class[i]), kProbFloor));
        out.ce += ce / std::max(n, 1);

        double focal = 0.0;
        double size = 0.0;
        for (const auto& [i, k] : match.pairs) {
            GroundTruthObject obj = gts[k];
            if (lh != base_h || lw != base_w) {
                const double fx = static_cast<double>(lw) / base_w;
                const double fy = static_cast<double>(lh) / base_h;
                obj.cx *= fx;
                obj.w *= fx;
                obj.cy *= fy;
                obj.h *= fy;
            }
            const Heatmap gt_heat = render_gaussian(obj, lh, lw, config);

            // Penalty-reduced pixel-wise focal loss.
            for (std::size_t p = 0; p < gt_heat.data.size(); ++p) {
                const double y = clamp01(pred.center[i].data[p], kEps);
                const double t = gt_heat.data[p];
                if (t == 1.0)
                    focal -= std::pow(1.0 - y, config.focal_alpha) * std::log(y);
                else
                    focal -= std::pow(1.0 - t, config.focal_beta) *
                             std::pow(y, config.focal_alpha) * std::log(1.0 - y);
            }

            // Size regression read at the ground-truth center pixel.
            const int px = std::clamp(static_cast<int>(std::lround(obj.cx)), 0, lw - 1);
            const int py = std::clamp(static_cast<int>(std::lround(obj.cy)), 0, lh - 1);
            const double tx = obj.w / lw, ty = obj.h / lh;
            size += 0.5 * (std::abs(pred.size[i].sx.at(py, px) - tx) +
                           std::abs(pred.size[i].sy.at(py, px) - ty));
        }
        out.focal += focal / std::max<std::size_t>(match.pairs.size(), 1);
        out.size += match.pairs.empty() ? 0.0 : size / match.pairs.size();
    }

    out.total = config.w_ce * out.ce + config.w_focal * out.focal + config.w_size * out.size;
    return out;
}

}  // namespace pixeltrack
