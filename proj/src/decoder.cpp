#include "pixeltrack/decoder.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

#include "pixeltrack/grid_io.hpp"

namespace pixeltrack {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLayerNormEps = 1e-5;

Eigen::MatrixXd flatten_features(const FeatureGrid& grid) {
    // (H*W) x d rows, pixel p = y*W + x.
    const std::size_t plane = grid.plane_size();
    Eigen::MatrixXd f(plane, grid.channels);
    for (int c = 0; c < grid.channels; ++c)
        for (std::size_t p = 0; p < plane; ++p) f(p, c) = grid.data[c * plane + p];
    return f;
}

Eigen::MatrixXd linear(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w,
                       const Eigen::VectorXd& b) {
    return (x * w).rowwise() + b.transpose();
}

Eigen::VectorXd softmax_row(const Eigen::VectorXd& v) {
    const double m = v.maxCoeff();
    Eigen::VectorXd e = (v.array() - m).exp();
    return e / e.sum();
}

Eigen::MatrixXd layer_norm(const Eigen::MatrixXd& x, const LayerNormParams& p) {
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double mean = x.row(i).mean();
        const double var = (x.row(i).array() - mean).square().mean();
        out.row(i) = (((x.row(i).array() - mean) / std::sqrt(var + kLayerNormEps)) *
                          p.scale.transpose().array() +
                      p.shift.transpose().array());
    }
    return out;
}

inline double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace

AttentionMask::AttentionMask(int nq, int np) : num_queries(nq), num_pixels(np) {
    entries.assign(static_cast<std::size_t>(nq) * np, 0.0);
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
    Eigen::VectorXd h = x;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        h = weights[k].transpose() * h + biases[k];
        if (k + 1 < weights.size()) h = h.cwiseMax(0.0);
    }
    return h;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& rows) const {
    Eigen::MatrixXd h = rows;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        h = linear(h, weights[k], biases[k]);
        if (k + 1 < weights.size()) h = h.cwiseMax(0.0);
    }
    return h;
}

Eigen::MatrixXd attention_weights(const Eigen::MatrixXd& scores, const AttentionMask& mask) {
    if (mask.num_queries != scores.rows() || mask.num_pixels != scores.cols())
        throw std::invalid_argument("attention_weights: mask dimensions do not match scores");

    Eigen::MatrixXd w(scores.rows(), scores.cols());
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        Eigen::VectorXd row = scores.row(i);
        bool any_open = false;
        for (Eigen::Index j = 0; j < scores.cols(); ++j) {
            if (mask.at(static_cast<int>(i), static_cast<int>(j)) == 0.0) {
                any_open = true;
            } else {
                row(j) = kNegInf;
            }
        }
        // Fully blocked rows fall back to the unmasked softmax.
        if (!any_open) row = scores.row(i);
        w.row(i) = softmax_row(row).transpose();
    }
    return w;
}

Eigen::MatrixXd masked_attention(const Eigen::MatrixXd& x_prev, const FeatureGrid& features,
                                 const AttentionMask& mask, const AttentionParams& params,
                                 bool scale_scores) {
    if (features.empty())
        throw std::invalid_argument("masked_attention: empty feature grid");
    if (x_prev.cols() != features.channels)
        throw std::invalid_argument("masked_attention: query/feature channel mismatch");
    if (mask.num_queries != x_prev.rows() ||
        mask.num_pixels != static_cast<int>(features.plane_size()))
        throw std::invalid_argument("masked_attention: mask dimensions do not match");

    const Eigen::MatrixXd f = flatten_features(features);
    const Eigen::MatrixXd q = linear(x_prev, params.wq, params.bq);
    const Eigen::MatrixXd k = linear(f, params.wk, params.bk);
    const Eigen::MatrixXd v = linear(f, params.wv, params.bv);

    Eigen::MatrixXd scores = q * k.transpose();
    if (scale_scores) scores /= std::sqrt(static_cast<double>(x_prev.cols()));
    return attention_weights(scores, mask) * v + x_prev;
}

FramePrediction predict_heads(const Eigen::MatrixXd& x, const FeatureGrid& fused,
                              const DecoderParams& params, int num_classes) {
    if (fused.empty())
        throw std::invalid_argument("predict_heads: empty feature grid");
    if (x.cols() != fused.channels)
        throw std::invalid_argument("predict_heads: query/feature channel mismatch");

    const int n = static_cast<int>(x.rows());
    const int d = fused.channels;
    const std::size_t plane = fused.plane_size();
    const Eigen::MatrixXd f = flatten_features(fused);

    const Eigen::MatrixXd e_cls = params.head_cls.forward(x);  // N x num_classes
    const Eigen::MatrixXd e_ctr = params.head_ctr.forward(x);  // N x d
    const Eigen::MatrixXd e_sz = params.head_sz.forward(x);    // N x 2d
    if (e_cls.cols() != num_classes)
        throw std::invalid_argument("predict_heads: class head width mismatch");

    FramePrediction pred;
    pred.class_dist.resize(n, num_classes);
    for (int i = 0; i < n; ++i)
        pred.class_dist.row(i) = softmax_row(e_cls.row(i)).transpose();

    const Eigen::MatrixXd ctr_dots = f * e_ctr.transpose();                  // (H*W) x N
    const Eigen::MatrixXd sx_dots = f * e_sz.leftCols(d).transpose();        // (H*W) x N
    const Eigen::MatrixXd sy_dots = f * e_sz.rightCols(d).transpose();

    pred.center.resize(n);
    pred.size.resize(n);
    for (int i = 0; i < n; ++i) {
        pred.center[i] = Heatmap(fused.height, fused.width);
        pred.size[i].sx = ScalarGrid(fused.height, fused.width);
        pred.size[i].sy = ScalarGrid(fused.height, fused.width);
        for (std::size_t p = 0; p < plane; ++p) {
            pred.center[i].data[p] = sigmoid(ctr_dots(p, i));
            pred.size[i].sx.data[p] = sigmoid(sx_dots(p, i));
            pred.size[i].sy.data[p] = sigmoid(sy_dots(p, i));
        }
    }
    return pred;
}

AttentionMask update_mask(const std::vector<Heatmap>& centers, double threshold) {
    if (centers.empty()) return {};
    const int np = static_cast<int>(centers[0].data.size());
    AttentionMask mask(static_cast<int>(centers.size()), np);
    for (std::size_t i = 0; i < centers.size(); ++i) {
        if (static_cast<int>(centers[i].data.size()) != np)
            throw std::invalid_argument("update_mask: heatmap dimensions differ across queries");
        for (int p = 0; p < np; ++p)
            mask.entries[i * np + p] = centers[i].data[p] > threshold ? 0.0 : kNegInf;
    }
    return mask;
}

Eigen::MatrixXd decode_layer(const Eigen::MatrixXd& x, const FeatureGrid& attn_features,
                             const AttentionMask& mask, const DecoderLayerParams& params,
                             bool scale_scores) {
    Eigen::MatrixXd h = layer_norm(
        masked_attention(x, attn_features, mask, params.masked_attn, scale_scores),
        params.norm_masked);

    // Self-attention over the queries.
    const Eigen::MatrixXd q = linear(h, params.self_attn.wq, params.self_attn.bq);
    const Eigen::MatrixXd k = linear(h, params.self_attn.wk, params.self_attn.bk);
    const Eigen::MatrixXd v = linear(h, params.self_attn.wv, params.self_attn.bv);
    Eigen::MatrixXd scores = q * k.transpose();
    if (scale_scores) scores /= std::sqrt(static_cast<double>(h.cols()));
    Eigen::MatrixXd attn(scores.rows(), scores.cols());
    for (Eigen::Index i = 0; i < scores.rows(); ++i)
        attn.row(i) = softmax_row(scores.row(i)).transpose();
    h = layer_norm(h + attn * v, params.norm_self);

    return layer_norm(h + params.ffn.forward(h), params.norm_ffn);
}

std::vector<FramePrediction> decode(const std::vector<FusedFeature>& levels,
                                    const DecoderConfig& config, const DecoderParams& params) {
    if (static_cast<int>(levels.size()) != config.num_levels)
        throw std::invalid_argument("decode: expected exactly num_levels feature levels");
    if (static_cast<int>(params.layers.size()) != config.num_levels)
        throw std::invalid_argument("decode: layer parameter count mismatch");

    Eigen::MatrixXd x = params.query_embed;
    AttentionMask mask(config.num_queries,
                       static_cast<int>(levels[0].fused.plane_size()));  // all zeros
    std::vector<FramePrediction> preds;
    preds.reserve(levels.size());

    for (int l = 0; l < config.num_levels; ++l) {
        const FeatureGrid& fused = levels[l].fused;
        FeatureGrid attn_feat = fused;
        if (config.positional_embedding) {
            const FeatureGrid pe = positional_embedding(fused.height, fused.width, fused.channels);
            for (std::size_t i = 0; i < attn_feat.data.size(); ++i) attn_feat.data[i] += pe.data[i];
        }

        x = decode_layer(x, attn_feat, mask, params.layers[l], config.scale_scores);
        FramePrediction pred = predict_heads(x, fused, params, config.num_classes);
        pred.level = l;

        if (l + 1 < config.num_levels) {
            const FeatureGrid& next = levels[l + 1].fused;
            if (next.height == fused.height && next.width == fused.width) {
                mask = update_mask(pred.center, config.mask_threshold);
            } else {
                std::vector<Heatmap> resized(pred.center.size());
                for (std::size_t i = 0; i < pred.center.size(); ++i)
                    resized[i] = resize_bilinear(pred.center[i], next.height, next.width);
                mask = update_mask(resized, config.mask_threshold);
            }
        }
        preds.push_back(std::move(pred));
    }
    return preds;
}

FeatureGrid positional_embedding(int height, int width, int channels) {
    // Two-axis sinusoidal embedding: the first half of the channels encodes
    // y, the second half x, alternating sin/cos with geometric frequencies.
    FeatureGrid pe(height, width, channels);
    const int half = channels / 2;
    for (int c = 0; c < channels; ++c) {
        const bool is_y = c < half;
        const int k = is_y ? c : c - half;
        const int span = is_y ? half : channels - half;
        const double omega = 1.0 / std::pow(10000.0, (2.0 * (k / 2)) / std::max(span, 1));
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const double coord = is_y ? y : x;
                pe.at(c, y, x) = (k % 2 == 0) ? std::sin(coord * omega) : std::cos(coord * omega);
            }
        }
    }
    return pe;
}

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, double bound, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
    return m;
}

AttentionParams random_attention(int d, double bound, std::mt19937_64& rng) {
    AttentionParams p;
    p.wq = random_matrix(d, d, bound, rng);
    p.wk = random_matrix(d, d, bound, rng);
    p.wv = random_matrix(d, d, bound, rng);
    p.bq = random_matrix(d, 1, bound, rng);
    p.bk = random_matrix(d, 1, bound, rng);
    p.bv = random_matrix(d, 1, bound, rng);
    return p;
}

Mlp random_mlp(const std::vector<int>& dims, double bound, std::mt19937_64& rng) {
    Mlp m;
    for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
        m.weights.push_back(random_matrix(dims[k], dims[k + 1], bound, rng));
        m.biases.push_back(random_matrix(dims[k + 1], 1, bound, rng));
    }
    return m;
}

LayerNormParams unit_norm(int d) {
    LayerNormParams p;
    p.scale = Eigen::VectorXd::Ones(d);
    p.shift = Eigen::VectorXd::Zero(d);
    return p;
}

}  // namespace

DecoderParams random_params(const DecoderConfig& config, std::uint64_t seed) {
    const int d = config.channels;
    const double bound = 1.0 / std::sqrt(static_cast<double>(d));
    std::mt19937_64 rng(seed);

    DecoderParams p;
    p.layers.resize(config.num_levels);
    for (auto& layer : p.layers) {
        layer.masked_attn = random_attention(d, bound, rng);
        layer.self_attn = random_attention(d, bound, rng);
        layer.ffn = random_mlp({d, 2 * d, d}, bound, rng);
        layer.norm_masked = unit_norm(d);
        layer.norm_self = unit_norm(d);
        layer.norm_ffn = unit_norm(d);
    }
    p.head_cls = random_mlp({d, d, d, config.num_classes}, bound, rng);
    p.head_ctr = random_mlp({d, d, d, d}, bound, rng);
    p.head_sz = random_mlp({d, d, d, 2 * d}, bound, rng);
    p.query_embed = random_matrix(config.num_queries, d, bound, rng);
    return p;
}

namespace {

FeatureGrid matrix_to_grid(const Eigen::MatrixXd& m) {
    FeatureGrid g(static_cast<int>(m.rows()), static_cast<int>(m.cols()), 1);
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) g.at(0, i, j) = m(i, j);
    return g;
}

Eigen::MatrixXd grid_to_matrix(const FeatureGrid& g) {
    Eigen::MatrixXd m(g.height, g.width);
    for (int i = 0; i < g.height; ++i)
        for (int j = 0; j < g.width; ++j) m(i, j) = g.at(0, i, j);
    return m;
}

void append_attention(TensorMap& t, const std::string& prefix, const AttentionParams& p) {
    t.emplace_back(prefix + ".wq", matrix_to_grid(p.wq));
    t.emplace_back(prefix + ".wk", matrix_to_grid(p.wk));
    t.emplace_back(prefix + ".wv", matrix_to_grid(p.wv));
    t.emplace_back(prefix + ".bq", matrix_to_grid(p.bq));
    t.emplace_back(prefix + ".bk", matrix_to_grid(p.bk));
    t.emplace_back(prefix + ".bv", matrix_to_grid(p.bv));
}

void append_mlp(TensorMap& t, const std::string& prefix, const Mlp& m) {
    for (std::size_t k = 0; k < m.weights.size(); ++k) {
        t.emplace_back(prefix + ".w" + std::to_string(k), matrix_to_grid(m.weights[k]));
        t.emplace_back(prefix + ".b" + std::to_string(k), matrix_to_grid(m.biases[k]));
    }
}

void append_norm(TensorMap& t, const std::string& prefix, const LayerNormParams& p) {
    t.emplace_back(prefix + ".scale", matrix_to_grid(p.scale));
    t.emplace_back(prefix + ".shift", matrix_to_grid(p.shift));
}

class TensorReader {
public:
    explicit TensorReader(TensorMap tensors) {
        for (auto& [name, grid] : tensors) by_name_.emplace(name, std::move(grid));
    }

    Eigen::MatrixXd matrix(const std::string& name) const {
        auto it = by_name_.find(name);
        if (it == by_name_.end())
            throw std::runtime_error("load_params: missing tensor " + name);
        return grid_to_matrix(it->second);
    }
    Eigen::VectorXd vector(const std::string& name) const { return matrix(name).col(0); }

    AttentionParams attention(const std::string& prefix) const {
        AttentionParams p;
        p.wq = matrix(prefix + ".wq");
        p.wk = matrix(prefix + ".wk");
        p.wv = matrix(prefix + ".wv");
        p.bq = vector(prefix + ".bq");
        p.bk = vector(prefix + ".bk");
        p.bv = vector(prefix + ".bv");
        return p;
    }
    Mlp mlp(const std::string& prefix) const {
        Mlp m;
        for (int k = 0;; ++k) {
            const std::string wname = prefix + ".w" + std::to_string(k);
            if (by_name_.find(wname) == by_name_.end()) break;
            m.weights.push_back(matrix(wname));
            m.biases.push_back(vector(prefix + ".b" + std::to_string(k)));
        }
        if (m.weights.empty()) throw std::runtime_error("load_params: missing mlp " + prefix);
        return m;
    }
    LayerNormParams norm(const std::string& prefix) const {
        LayerNormParams p;
        p.scale = vector(prefix + ".scale");
        p.shift = vector(prefix + ".shift");
        return p;
    }

private:
    std::map<std::string, FeatureGrid> by_name_;
};

}  // namespace

void save_params(const std::string& path, const DecoderParams& params) {
    TensorMap t;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const std::string prefix = "layers." + std::to_string(l);
        append_attention(t, prefix + ".masked_attn", params.layers[l].masked_attn);
        append_attention(t, prefix + ".self_attn", params.layers[l].self_attn);
        append_mlp(t, prefix + ".ffn", params.layers[l].ffn);
        append_norm(t, prefix + ".norm_masked", params.layers[l].norm_masked);
        append_norm(t, prefix + ".norm_self", params.layers[l].norm_self);
        append_norm(t, prefix + ".norm_ffn", params.layers[l].norm_ffn);
    }
    append_mlp(t, "head_cls", params.head_cls);
    append_mlp(t, "head_ctr", params.head_ctr);
    append_mlp(t, "head_sz", params.head_sz);
    t.emplace_back("query_embed", matrix_to_grid(params.query_embed));
    write_tensors(path, t);
}

DecoderParams load_params(const std::string& path, const DecoderConfig& config) {
    TensorReader reader(read_tensors(path));
    DecoderParams p;
    p.layers.resize(config.num_levels);
    for (int l = 0; l < config.num_levels; ++l) {
        const std::string prefix = "layers." + std::to_string(l);
        p.layers[l].masked_attn = reader.attention(prefix + ".masked_attn");
        p.layers[l].self_attn = reader.attention(prefix + ".self_attn");
        p.layers[l].ffn = reader.mlp(prefix + ".ffn");
        p.layers[l].norm_masked = reader.norm(prefix + ".norm_masked");
        p.layers[l].norm_self = reader.norm(prefix + ".norm_self");
        p.layers[l].norm_ffn = reader.norm(prefix + ".norm_ffn");
    }
    p.head_cls = reader.mlp("head_cls");
    p.head_ctr = reader.mlp("head_ctr");
    p.head_sz = reader.mlp("head_sz");
    p.query_embed = reader.matrix("query_embed");

    if (p.query_embed.rows() != config.num_queries || p.query_embed.cols() != config.channels)
        throw std::runtime_error("load_params: query embedding shape mismatch");
    return p;
}

}  // namespace pixeltrack
