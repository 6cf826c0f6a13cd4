#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "pixeltrack/grid.hpp"
#include "pixeltrack/propagation.hpp"

namespace pixeltrack {

struct DecoderConfig {
    int num_queries = 100;        // N
    int num_levels = 3;           // L
    int channels = 128;           // d
    int num_classes = 2;          // categories including the trailing no-object slot
    double mask_threshold = 0.5;
    bool scale_scores = false;    // optional 1/sqrt(d) attention score scaling
    bool positional_embedding = true;

    int noobject_class() const { return num_classes - 1; }
};

/// A stack of linear layers with rectified-linear activations between them
/// (none after the last).
struct Mlp {
    std::vector<Eigen::MatrixXd> weights;  // layer k maps in-dim -> weights[k].cols()
    std::vector<Eigen::VectorXd> biases;

    Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd forward(const Eigen::MatrixXd& rows) const;
};

struct AttentionParams {
    Eigen::MatrixXd wq, wk, wv;  // d x d
    Eigen::VectorXd bq, bk, bv;
};

struct LayerNormParams {
    Eigen::VectorXd scale;
    Eigen::VectorXd shift;
};

struct DecoderLayerParams {
    AttentionParams masked_attn;
    AttentionParams self_attn;
    Mlp ffn;  // d -> 2d -> d
    LayerNormParams norm_masked, norm_self, norm_ffn;
};

struct DecoderParams {
    std::vector<DecoderLayerParams> layers;   // one per level
    Mlp head_cls;                             // d -> d -> d -> num_classes
    Mlp head_ctr;                             // d -> d -> d -> d
    Mlp head_sz;                              // d -> d -> d -> 2d, columns split (x, y)
    Eigen::MatrixXd query_embed;              // N x d
};

/// N x (H*W) additive attention mask. Entries are exactly 0 (attend) or
/// -infinity (blocked).
struct AttentionMask {
    int num_queries = 0;
    int num_pixels = 0;
    std::vector<double> entries;

    AttentionMask() = default;
    AttentionMask(int num_queries, int num_pixels);  // all zeros

    double at(int q, int p) const { return entries[static_cast<std::size_t>(q) * num_pixels + p]; }
    double& at(int q, int p) { return entries[static_cast<std::size_t>(q) * num_pixels + p]; }
};

/// Per-query 2-channel size field; values in (0,1) are box extents
/// normalized by the frame dimensions.
struct SizeMap {
    ScalarGrid sx;
    ScalarGrid sy;
};

/// Decoded objects for one level: per-query class distribution, center
/// heatmap, and size map.
struct FramePrediction {
    int level = 0;
    Eigen::MatrixXd class_dist;        // N x num_classes, rows sum to 1
    std::vector<Heatmap> center;       // N heatmaps, values in (0,1)
    std::vector<SizeMap> size;         // N size maps, values in (0,1)
};

/// Row-softmax attention weights including the additive mask. A row whose
/// mask blocks every position falls back to the unmasked softmax of its
/// scores.
Eigen::MatrixXd attention_weights(const Eigen::MatrixXd& scores, const AttentionMask& mask);

/// Masked cross-attention update:
///   X = softmax(M + f_Q(X_prev) f_K(F)^T) f_V(F) + X_prev
/// with F the feature grid flattened to (H*W) x d rows.
Eigen::MatrixXd masked_attention(const Eigen::MatrixXd& x_prev, const FeatureGrid& features,
                                 const AttentionMask& mask, const AttentionParams& params,
                                 bool scale_scores = false);

/// Head evaluation: class logits softmaxed per query; center and size maps
/// from sigmoid dot products of the fused feature against the per-query
/// embeddings.
FramePrediction predict_heads(const Eigen::MatrixXd& x, const FeatureGrid& fused,
                              const DecoderParams& params, int num_classes);

/// Mask for the next layer: position attendable iff the previous heatmap
/// value is strictly above the threshold.
AttentionMask update_mask(const std::vector<Heatmap>& centers, double threshold);

/// One full decoder layer: masked attention, self-attention, feed-forward,
/// each followed by layer normalization.
Eigen::MatrixXd decode_layer(const Eigen::MatrixXd& x, const FeatureGrid& attn_features,
                             const AttentionMask& mask, const DecoderLayerParams& params,
                             bool scale_scores = false);

/// Run the L-layer decoder over per-level fused features and return one
/// prediction per level. The mask starts all-zero and is rebuilt from each
/// level's center heatmaps (resampled when level resolutions differ).
std::vector<FramePrediction> decode(const std::vector<FusedFeature>& levels,
                                    const DecoderConfig& config, const DecoderParams& params);

/// Sinusoidal two-axis positional embedding, added to attention features.
FeatureGrid positional_embedding(int height, int width, int channels);

/// Seeded uniform parameter initialization in [-1/sqrt(d), 1/sqrt(d)]
/// (layer-norm scales start at 1, shifts at 0).
DecoderParams random_params(const DecoderConfig& config, std::uint64_t seed);

void save_params(const std::string& path, const DecoderParams& params);
DecoderParams load_params(const std::string& path, const DecoderConfig& config);

}  // namespace pixeltrack
